// Copyright 2026 The dqpt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "dqpt/scenario.hpp"

int main(int argc, char **argv) {
    CLI::App app{"Dynamical quantum phase transitions in a two-site Z3 Schwinger model"};
    app.set_version_flag("--version", dqpt::kVersion);
    app.require_subcommand(1);

    std::string config, out = "out", device;
    std::uint64_t seed = 0;
    bool no_noise = false;
    for (auto p : {dqpt::Pipeline::Scan, dqpt::Pipeline::Exact, dqpt::Pipeline::Circuit, dqpt::Pipeline::Pulse,
                   dqpt::Pipeline::Stats}) {
        auto *sub = app.add_subcommand(dqpt::pipeline_name(p));
        sub->add_option("--config", config, "Scenario or manifest JSON")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Noise seed, overrides the config");
        sub->add_option("--out", out, "Output directory")->capture_default_str();
        sub->add_option("--device", device, "Device JSON, overrides the config")->check(CLI::ExistingFile);
        sub->add_flag("--no-noise", no_noise, "Drop the noise section");
    }
    CLI11_PARSE(app, argc, argv);

    try {
        dqpt::Scenario s = dqpt::load_scenario(config);
        s.pipeline = dqpt::pipeline_from_name(app.get_subcommands().front()->get_name());
        if (no_noise) s.noise.reset();
        if (s.noise && app.get_subcommands().front()->count("--seed")) s.noise->seed = seed;
        if (!device.empty()) {
            std::ifstream in(device);
            s.device = dqpt::device_from_json(nlohmann::json::parse(in));
        }
        s.validate();
        dqpt::ScenarioResult r = dqpt::run_scenario(s);
        for (const auto &path : dqpt::emit_report(r, out)) std::cout << path.string() << '\n';
        if (r.lociFit) {
            std::printf("loci fit: ln g = %.4f + %.4f ln|m| over %zu points\n", r.lociFit->intercept, r.lociFit->slope,
                        r.lociFit->points);
        }
    } catch (const dqpt::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

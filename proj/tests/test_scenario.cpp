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

#include "dqpt/scenario.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace dqpt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
    fs::path p = fs::temp_directory_path() / ("dqpt_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const fs::path &p) {
    std::vector<std::string> out;
    std::ifstream in(p);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

Scenario short_run(Pipeline p) {
    Scenario s;
    s.pipeline = p;
    s.nTrotterSteps = 10;
    s.subsampleEvery = 5;
    return s;
}

}  // namespace

TEST(scenario, presets_round_trip) {
    for (const char *name : {"case1.json", "case2.json", "loci.json"}) {
        Scenario s = load_scenario(fs::path(DQPT_PRESET_DIR) / name);
        EXPECT_EQ(scenario_from_json(to_json(s)), s) << name;
        EXPECT_EQ(scenario_from_json(nlohmann::json::parse(to_json(s).dump())), s) << name;
    }
    Scenario c1 = load_scenario(fs::path(DQPT_PRESET_DIR) / "case1.json");
    EXPECT_EQ(c1.nTrotterSteps, 125);
    EXPECT_EQ(c1.noise->nRealizations, 100);
    EXPECT_EQ(c1.noise->enabled.size(), 3u);
    Scenario c2 = load_scenario(fs::path(DQPT_PRESET_DIR) / "case2.json");
    EXPECT_EQ(c2.reported_steps().size(), 126u);
    EXPECT_EQ(c2.reported_steps().back(), 875);
}

TEST(scenario, device_preset_matches_defaults) {
    std::ifstream in(fs::path(DQPT_PRESET_DIR) / "device.json");
    DeviceConfig d = device_from_json(nlohmann::json::parse(in));
    EXPECT_EQ(to_json(d), to_json(DeviceConfig{}));
}

TEST(scenario, config_errors) {
    Scenario s;
    s.noise = NoiseConfig{};
    s.noise->enabled = {NoiseSource::Spam};
    s.pipeline = Pipeline::Exact;
    EXPECT_THROW(s.validate(), ConfigError);
    s.pipeline = Pipeline::Circuit;
    EXPECT_THROW(s.validate(), ConfigError);
    s.pipeline = Pipeline::Pulse;
    EXPECT_NO_THROW(s.validate());
    s.noise.reset();
    s.pipeline = Pipeline::Stats;
    EXPECT_THROW(s.validate(), ConfigError);
    s.pipeline = Pipeline::Exact;
    s.subsampleEvery = 0;
    EXPECT_THROW(s.validate(), ConfigError);
    s.subsampleEvery = 1;
    s.dtRescaled = 0;
    EXPECT_THROW(s.validate(), ConfigError);
    EXPECT_THROW(scenario_from_json({{"pipeline", "analog"}}), ConfigError);
    EXPECT_THROW(scenario_from_json({{"mOverJ", "heavy"}}), ConfigError);
    EXPECT_THROW(load_scenario("/nonexistent/case.json"), ConfigError);
}

TEST(run_scenario, pipelines_agree) {
    ScenarioResult exact = run_scenario(short_run(Pipeline::Exact));
    ScenarioResult circ = run_scenario(short_run(Pipeline::Circuit));
    ScenarioResult pulse = run_scenario(short_run(Pipeline::Pulse));
    ASSERT_EQ(exact.timeSteps, (std::vector<int>{0, 5, 10}));
    EXPECT_EQ(circ.timeSteps, exact.timeSteps);
    EXPECT_EQ(pulse.timeSteps, exact.timeSteps);
    EXPECT_DOUBLE_EQ(exact.rescaledTimes[2], 1.0);
    EXPECT_NEAR(exact.populations[0][0], 1.0, 1e-14);
    EXPECT_NEAR(exact.loschmidt.echo[0], 1.0, 1e-14);
    for (std::size_t k = 0; k < 3; ++k) {
        for (int i = 0; i < 4; ++i) {
            EXPECT_NEAR(circ.populations[k][i], exact.populations[k][i], 5e-3);
            EXPECT_NEAR(pulse.populations[k][i], circ.populations[k][i], 2e-2);
        }
        // Initial state is psi1+, so the echo equals its population.
        EXPECT_NEAR(exact.loschmidt.echo[k], exact.populations[k][0], 1e-12);
        EXPECT_NEAR(circ.loschmidt.echo[k], circ.populations[k][0], 1e-12);
        EXPECT_NEAR(circ.loschmidt.rate[k], -std::log(circ.loschmidt.echo[k]) / 2, 1e-12);
    }
}

TEST(emit_report, schemas_and_manifest) {
    Scenario s = short_run(Pipeline::Stats);
    s.noise = NoiseConfig{};
    s.noise->nRealizations = 3;
    s.noise->seed = 11;
    ScenarioResult r = run_scenario(s);
    fs::path dir = scratch("stats");
    auto files = emit_report(r, dir);
    EXPECT_EQ(files.size(), 8u);

    auto pop = lines(dir / "populations.csv");
    ASSERT_EQ(pop.size(), 4u);
    EXPECT_EQ(pop[0], "timeStep,rescaledTime,psi1,psi2,psi3,psi4");
    EXPECT_EQ(pop[2].substr(0, 6), "5,0.5,");
    EXPECT_EQ(lines(dir / "loschmidt.csv")[0], "timeStep,rescaledTime,echo,rate,clamped");
    EXPECT_EQ(lines(dir / "boxplot.csv")[0], "model,state,median,q1,q3,whiskerLow,whiskerHigh");
    EXPECT_EQ(lines(dir / "boxplot.csv").size(), 1u + 4 * 4);

    // Every stats row joins a populations row on timeStep.
    std::set<std::string> steps;
    for (std::size_t i = 1; i < pop.size(); ++i) steps.insert(pop[i].substr(0, pop[i].find(',')));
    for (const char *model : {"spam", "doppler", "amplitude", "combined"}) {
        auto st = lines(dir / (std::string("stats_") + model + ".csv"));
        ASSERT_EQ(st.size(), 1u + 3 * 4) << model;
        EXPECT_EQ(st[0], "timeStep,state,mean,std");
        std::set<std::string> joined;
        for (std::size_t i = 1; i < st.size(); ++i) joined.insert(st[i].substr(0, st[i].find(',')));
        EXPECT_EQ(joined, steps);
    }

    nlohmann::json m = nlohmann::json::parse(slurp(dir / "manifest.json"));
    EXPECT_EQ(m.at("version"), kVersion);
    EXPECT_EQ(m.at("seed"), 11u);
    EXPECT_EQ(load_scenario(dir / "manifest.json"), s);
}

TEST(emit_report, rerun_is_byte_identical) {
    Scenario s = short_run(Pipeline::Pulse);
    s.noise = NoiseConfig{};
    s.noise->enabled = {NoiseSource::Spam, NoiseSource::Doppler, NoiseSource::Amplitude};
    s.noise->nRealizations = 4;
    fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
    emit_report(run_scenario(s), a);
    emit_report(run_scenario(load_scenario(a / "manifest.json")), b);
    for (const char *f : {"populations.csv", "loschmidt.csv", "stats_combined.csv", "manifest.json"}) {
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
        EXPECT_FALSE(slurp(a / f).empty()) << f;
    }
}

TEST(emit_report, loci_schema) {
    Scenario s;
    s.pipeline = Pipeline::Scan;
    s.grid = {-1.49, -1.0, 1.7, 1.8, 2, 2};
    ScenarioResult r = run_scenario(s);
    fs::path dir = scratch("loci");
    emit_report(r, dir);
    auto rows = lines(dir / "loci.csv");
    EXPECT_EQ(rows[0], "mOverJ,gOverJ,criticalTimeIndex,rescaledTime");
    std::size_t zeros = 0;
    for (const auto &p : r.loci) zeros += p.criticalTimes.size();
    EXPECT_EQ(rows.size(), 1 + zeros);
    EXPECT_GT(zeros, 0u);
}

TEST(emit_report, io_failure_names_path) {
    fs::path blocker = scratch("blocker");
    std::ofstream(blocker) << "file";
    try {
        emit_report(run_scenario(short_run(Pipeline::Exact)), blocker / "sub");
        FAIL() << "expected an error";
    } catch (const std::runtime_error &e) {
        EXPECT_NE(std::string(e.what()).find(blocker.string()), std::string::npos);
    }
}

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

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dqpt/circuit.hpp"
#include "dqpt/errors.hpp"
#include "dqpt/noise.hpp"
#include "dqpt/pulse.hpp"
#include "dqpt/quench.hpp"
#include "dqpt/synthesis.hpp"
#include "json.hpp"

namespace dqpt {

inline constexpr const char *kVersion = "0.1.0";

enum class Pipeline { Scan, Exact, Circuit, Pulse, Stats };

inline const char *pipeline_name(Pipeline p) {
    switch (p) {
        case Pipeline::Scan: return "scan";
        case Pipeline::Exact: return "exact";
        case Pipeline::Circuit: return "circuit";
        case Pipeline::Pulse: return "pulse";
        case Pipeline::Stats: return "stats";
    }
    return "?";
}

inline Pipeline pipeline_from_name(const std::string &s) {
    for (Pipeline p : {Pipeline::Scan, Pipeline::Exact, Pipeline::Circuit, Pipeline::Pulse, Pipeline::Stats}) {
        if (s == pipeline_name(p)) return p;
    }
    throw ConfigError("unknown pipeline '" + s + "'");
}

/// One run. nTrotterSteps counts fine steps of dtRescaled; every subsampleEvery-th step is reported.
struct Scenario {
    std::string name = "custom";
    Pipeline pipeline = Pipeline::Exact;
    double mOverJ = -1.49;
    double gOverJ = 1.7;
    int nTrotterSteps = 125;
    double dtRescaled = 0.1;
    int subsampleEvery = 1;
    TrotterOrder order = TrotterOrder::Second;
    std::optional<NoiseConfig> noise;
    DeviceConfig device;
    ScanGrid grid;

    void validate() const {
        if (!(dtRescaled > 0)) throw ConfigError("dtRescaled must be positive");
        if (subsampleEvery < 1) throw ConfigError("subsampleEvery must be at least 1");
        if (nTrotterSteps < 0) throw ConfigError("nTrotterSteps must be non-negative");
        if (pipeline != Pipeline::Scan && gOverJ == 0.0) throw ConfigError("gOverJ must be non-zero");
        if (grid.mCount < 1 || grid.gCount < 1) throw ConfigError("scan grid must be non-empty");
        device.validate();
        if (noise) {
            noise->validate();
            bool noisy_ok = pipeline == Pipeline::Pulse || pipeline == Pipeline::Stats;
            if (noise->any() && !noisy_ok) {
                throw ConfigError(std::string("noise is not available in the ") + pipeline_name(pipeline) + " pipeline");
            }
        }
        if (pipeline == Pipeline::Stats && !noise) throw ConfigError("stats pipeline needs a noise section");
    }

    /// Fine step indices that are reported.
    std::vector<int> reported_steps() const {
        std::vector<int> k;
        for (int s = 0; s <= nTrotterSteps; s += subsampleEvery) k.push_back(s);
        return k;
    }
};

inline nlohmann::json to_json(const Scenario &s) {
    nlohmann::json j{{"name", s.name},
                     {"pipeline", pipeline_name(s.pipeline)},
                     {"mOverJ", s.mOverJ},
                     {"gOverJ", s.gOverJ},
                     {"nTrotterSteps", s.nTrotterSteps},
                     {"dtRescaled", s.dtRescaled},
                     {"subsampleEvery", s.subsampleEvery},
                     {"trotterOrder", s.order == TrotterOrder::First ? "first" : "second"},
                     {"device", to_json(s.device)},
                     {"grid",
                      {{"mMin", s.grid.mMin},
                       {"mMax", s.grid.mMax},
                       {"gMin", s.grid.gMin},
                       {"gMax", s.grid.gMax},
                       {"mCount", s.grid.mCount},
                       {"gCount", s.grid.gCount}}}};
    if (s.noise) j["noise"] = to_json(*s.noise);
    return j;
}

inline Scenario scenario_from_json(const nlohmann::json &j) {
    Scenario s;
    try {
        s.name = j.value("name", s.name);
        if (j.contains("pipeline")) s.pipeline = pipeline_from_name(j.at("pipeline").get<std::string>());
        s.mOverJ = j.value("mOverJ", s.mOverJ);
        s.gOverJ = j.value("gOverJ", s.gOverJ);
        s.nTrotterSteps = j.value("nTrotterSteps", s.nTrotterSteps);
        s.dtRescaled = j.value("dtRescaled", s.dtRescaled);
        s.subsampleEvery = j.value("subsampleEvery", s.subsampleEvery);
        std::string order = j.value("trotterOrder", std::string("second"));
        if (order != "first" && order != "second") throw ConfigError("trotterOrder must be 'first' or 'second'");
        s.order = order == "first" ? TrotterOrder::First : TrotterOrder::Second;
        if (j.contains("noise")) s.noise = noise_from_json(j.at("noise"));
        if (j.contains("device")) s.device = device_from_json(j.at("device"));
        if (j.contains("grid")) {
            const auto &g = j.at("grid");
            s.grid.mMin = g.value("mMin", s.grid.mMin);
            s.grid.mMax = g.value("mMax", s.grid.mMax);
            s.grid.gMin = g.value("gMin", s.grid.gMin);
            s.grid.gMax = g.value("gMax", s.grid.gMax);
            s.grid.mCount = g.value("mCount", s.grid.mCount);
            s.grid.gCount = g.value("gCount", s.grid.gCount);
        }
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("malformed scenario: ") + e.what());
    }
    s.validate();
    return s;
}

inline bool operator==(const Scenario &a, const Scenario &b) { return to_json(a) == to_json(b); }

inline Scenario load_scenario(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError("cannot parse config " + path.string() + ": " + e.what());
    }
    // A run manifest carries the scenario verbatim.
    return scenario_from_json(j.contains("scenario") ? j.at("scenario") : j);
}

/// Name of a noise model given its enabled sources.
inline std::string noise_model_name(const std::set<NoiseSource> &s) {
    if (s.size() == 3) return "combined";
    if (s.empty()) return "none";
    std::string out;
    for (auto src : s) out += (out.empty() ? "" : "_") + std::string(noise_source_name(src));
    return out;
}

struct ScenarioResult {
    Scenario scenario;
    std::vector<int> timeSteps;
    std::vector<double> rescaledTimes;
    std::vector<std::array<double, 4>> populations;
    LoschmidtSeries loschmidt;
    std::map<std::string, EnsembleStats> stats;
    std::vector<BoxplotRow> boxplots;
    std::vector<LociPoint> loci;
    std::optional<LociFit> lociFit;
};

/// Compressed pulse programs for the reported steps, each evolving the full prefix U^k.
inline std::vector<PulseSequence> compile_reported_steps(const Scenario &s) {
    const double scale = tilde_time_per_rescaled(s.mOverJ, s.gOverJ);
    const double g2 = s.gOverJ * s.gOverJ;
    Matrix4 step = circuit_unitary(trotter_step(1.0 / g2, s.mOverJ / g2, s.dtRescaled * scale, s.order));
    std::vector<int> ks = s.reported_steps();
    std::vector<Matrix4> us;
    Matrix4 acc = Matrix4::Identity();
    int done = 0;
    for (int k : ks) {
        for (; done < k; ++done) acc = step * acc;
        us.push_back(acc);
    }
    CzCalibration cal = calibrate_cz(s.device);
    std::vector<PulseSequence> out(us.size());
    parallel_for(us.size(), [&](std::size_t i) { out[i] = compile_to_pulses(synthesize_two_qubit(us[i]), s.device, cal); });
    return out;
}

namespace detail {

inline LoschmidtSeries echo_series(const std::vector<double> &times, const std::vector<double> &echo) {
    LoschmidtSeries ls;
    ls.times = times;
    for (double e : echo) {
        ls.echo.push_back(std::clamp(e, 0.0, 1.0));
        ls.amplitude.emplace_back(std::sqrt(ls.echo.back()), 0.0);
    }
    return rate_function(std::move(ls));
}

inline std::vector<std::array<double, 4>> noiseless_pulse_populations(const std::vector<PulseSequence> &seqs,
                                                                       const DeviceConfig &dev) {
    std::vector<std::array<double, 4>> pops(seqs.size());
    StateVector psi0 = atoms_from_qubits(dirac_vacuum());
    parallel_for(seqs.size(), [&](std::size_t i) {
        pops[i] = readout_probabilities(simulate_sequence(seqs[i], dev, psi0).back());
    });
    return pops;
}

}  // namespace detail

/// Runs the scenario's pipeline from the Dirac vacuum.
inline ScenarioResult run_scenario(const Scenario &s) {
    s.validate();
    ScenarioResult r;
    r.scenario = s;
    if (s.pipeline == Pipeline::Scan) {
        r.loci = scan_zero_loci(s.grid);
        try {
            r.lociFit = fit_loci_regression(r.loci);
        } catch (const std::invalid_argument &) {
        }
        return r;
    }

    r.timeSteps = s.reported_steps();
    for (int k : r.timeSteps) r.rescaledTimes.push_back(k * s.dtRescaled);
    const StateVector psi0 = dirac_vacuum();
    std::vector<double> echo;

    switch (s.pipeline) {
        case Pipeline::Exact: {
            QuenchSpec q{psi0, even_block_for(s.mOverJ, s.gOverJ), r.rescaledTimes,
                         tilde_time_per_rescaled(s.mOverJ, s.gOverJ)};
            Eigen::MatrixXd pops = population_series(q);
            for (Eigen::Index i = 0; i < pops.rows(); ++i) r.populations.push_back({pops(i, 0), pops(i, 1), pops(i, 2), pops(i, 3)});
            r.loschmidt = loschmidt_series(q);
            r.loschmidt.times = r.rescaledTimes;
            return r;
        }
        case Pipeline::Circuit: {
            const double g2 = s.gOverJ * s.gOverJ;
            Circuit step = trotter_step(1.0 / g2, s.mOverJ / g2,
                                        s.dtRescaled * tilde_time_per_rescaled(s.mOverJ, s.gOverJ), s.order);
            auto states = simulate_steps(step, psi0, s.nTrotterSteps);
            for (int k : r.timeSteps) {
                const StateVector &psi = states[k];
                r.populations.push_back({std::norm(psi(0)), std::norm(psi(1)), std::norm(psi(2)), std::norm(psi(3))});
                echo.push_back(std::norm(psi0.dot(psi)));
            }
            break;
        }
        case Pipeline::Pulse:
        case Pipeline::Stats: {
            auto seqs = compile_reported_steps(s);
            StateVector atoms0 = atoms_from_qubits(psi0);
            if (s.pipeline == Pipeline::Pulse && s.noise && s.noise->any()) {
                EnsembleStats st = monte_carlo(seqs, s.device, atoms0, *s.noise);
                r.populations = st.mean;
                r.stats[noise_model_name(s.noise->enabled)] = std::move(st);
            } else {
                r.populations = detail::noiseless_pulse_populations(seqs, s.device);
            }
            if (s.pipeline == Pipeline::Stats) {
                using NS = NoiseSource;
                for (const auto &set : {std::set<NS>{NS::Spam}, std::set<NS>{NS::Doppler}, std::set<NS>{NS::Amplitude},
                                        std::set<NS>{NS::Spam, NS::Doppler, NS::Amplitude}}) {
                    NoiseConfig c = *s.noise;
                    c.enabled = set;
                    r.stats[noise_model_name(set)] = monte_carlo(seqs, s.device, atoms0, c);
                }
                r.boxplots = fluctuation_boxplots(r.stats);
            }
            // The initial state is basis state psi1+, so the echo is its population.
            for (const auto &p : r.populations) echo.push_back(p[0]);
            break;
        }
        case Pipeline::Scan: break;
    }
    r.loschmidt = detail::echo_series(r.rescaledTimes, echo);
    return r;
}

// ---- Report ----

inline std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

namespace detail {

inline std::ofstream open_report(const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

inline void close_report(std::ofstream &out, const std::filesystem::path &path) {
    out.close();
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace detail

/// Manifest with the verbatim scenario, seed and code version.
inline nlohmann::json manifest(const Scenario &s) {
    return {{"version", kVersion}, {"seed", s.noise ? s.noise->seed : 0}, {"scenario", to_json(s)}};
}

/// Writes the result files into `dir` and returns their paths.
inline std::vector<std::filesystem::path> emit_report(const ScenarioResult &r, const std::filesystem::path &dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;
    auto file = [&](const std::string &name, auto &&body) {
        auto path = dir / name;
        auto out = detail::open_report(path);
        body(out);
        detail::close_report(out, path);
        written.push_back(path);
    };

    if (!r.populations.empty()) {
        file("populations.csv", [&](std::ofstream &out) {
            out << "timeStep,rescaledTime,psi1,psi2,psi3,psi4\n";
            for (std::size_t i = 0; i < r.populations.size(); ++i) {
                out << r.timeSteps[i] << ',' << format_real(r.rescaledTimes[i]);
                for (double p : r.populations[i]) out << ',' << format_real(p);
                out << '\n';
            }
        });
    }
    if (!r.loschmidt.echo.empty()) {
        file("loschmidt.csv", [&](std::ofstream &out) {
            out << "timeStep,rescaledTime,echo,rate,clamped\n";
            for (std::size_t i = 0; i < r.loschmidt.echo.size(); ++i) {
                out << r.timeSteps[i] << ',' << format_real(r.rescaledTimes[i]) << ',' << format_real(r.loschmidt.echo[i])
                    << ',' << format_real(r.loschmidt.rate[i]) << ',' << (r.loschmidt.clamped[i] ? 1 : 0) << '\n';
            }
        });
    }
    for (const auto &[model, st] : r.stats) {
        file("stats_" + model + ".csv", [&](std::ofstream &out) {
            out << "timeStep,state,mean,std\n";
            for (std::size_t k = 0; k < st.mean.size(); ++k) {
                for (int i = 0; i < 4; ++i) {
                    out << r.timeSteps[k] << ',' << i + 1 << ',' << format_real(st.mean[k][i]) << ','
                        << format_real(st.std[k][i]) << '\n';
                }
            }
        });
    }
    if (!r.boxplots.empty()) {
        file("boxplot.csv", [&](std::ofstream &out) {
            out << "model,state,median,q1,q3,whiskerLow,whiskerHigh\n";
            for (const auto &b : r.boxplots) {
                out << b.model << ',' << b.state << ',' << format_real(b.median) << ',' << format_real(b.q1) << ','
                    << format_real(b.q3) << ',' << format_real(b.whiskerLow) << ',' << format_real(b.whiskerHigh) << '\n';
            }
        });
    }
    if (r.scenario.pipeline == Pipeline::Scan) {
        file("loci.csv", [&](std::ofstream &out) {
            out << "mOverJ,gOverJ,criticalTimeIndex,rescaledTime\n";
            for (const auto &p : r.loci) {
                for (std::size_t i = 0; i < p.criticalTimes.size(); ++i) {
                    out << format_real(p.mOverJ) << ',' << format_real(p.gOverJ) << ',' << i << ','
                        << format_real(p.criticalTimes[i]) << '\n';
                }
            }
        });
    }
    file("manifest.json", [&](std::ofstream &out) {
        nlohmann::json m = manifest(r.scenario);
        if (r.lociFit) m["lociFit"] = {{"intercept", r.lociFit->intercept}, {"slope", r.lociFit->slope}, {"points", r.lociFit->points}};
        out << m.dump(2) << '\n';
    });
    return written;
}

}  // namespace dqpt

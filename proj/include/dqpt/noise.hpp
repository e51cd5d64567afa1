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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dqpt/errors.hpp"
#include "dqpt/parallel.hpp"
#include "dqpt/pulse.hpp"
#include "json.hpp"

namespace dqpt {

enum class NoiseSource { Spam, Doppler, Amplitude };

inline const char *noise_source_name(NoiseSource s) {
    switch (s) {
        case NoiseSource::Spam: return "spam";
        case NoiseSource::Doppler: return "doppler";
        case NoiseSource::Amplitude: return "amplitude";
    }
    return "?";
}

inline NoiseSource noise_source_from_name(const std::string &s) {
    if (s == "spam") return NoiseSource::Spam;
    if (s == "doppler") return NoiseSource::Doppler;
    if (s == "amplitude") return NoiseSource::Amplitude;
    throw ConfigError("unknown noise source '" + s + "'");
}

/// Noise magnitudes. temperature in uK; shots = 0 keeps exact readout probabilities.
struct NoiseConfig {
    double eta = 0.005;
    double epsilon = 0.01;
    double epsilonPrime = 0.05;
    double temperature = 50.0;
    double ampRelSigma = 0.01;
    std::set<NoiseSource> enabled;
    std::uint64_t seed = 0;
    int nRealizations = 100;
    long shots = 5;

    bool has(NoiseSource s) const { return enabled.count(s) > 0; }
    bool any() const { return !enabled.empty(); }

    void validate() const {
        for (double p : {eta, epsilon, epsilonPrime}) {
            if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("noise probabilities must lie in [0, 1]");
        }
        if (!(temperature >= 0.0)) throw ConfigError("temperature must be non-negative");
        if (!(ampRelSigma >= 0.0)) throw ConfigError("ampRelSigma must be non-negative");
        if (nRealizations < 1) throw ConfigError("nRealizations must be at least 1");
        if (shots < 0) throw ConfigError("shots must be non-negative");
    }
};

inline nlohmann::json to_json(const NoiseConfig &c) {
    std::vector<std::string> en;
    for (auto s : c.enabled) en.emplace_back(noise_source_name(s));
    return {{"eta", c.eta},
            {"epsilon", c.epsilon},
            {"epsilonPrime", c.epsilonPrime},
            {"temperature", c.temperature},
            {"ampRelSigma", c.ampRelSigma},
            {"enabled", en},
            {"seed", c.seed},
            {"nRealizations", c.nRealizations},
            {"shots", c.shots}};
}

inline NoiseConfig noise_from_json(const nlohmann::json &j) {
    NoiseConfig c;
    c.eta = j.value("eta", c.eta);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.epsilonPrime = j.value("epsilonPrime", c.epsilonPrime);
    c.temperature = j.value("temperature", c.temperature);
    c.ampRelSigma = j.value("ampRelSigma", c.ampRelSigma);
    if (j.contains("enabled")) {
        for (const auto &s : j.at("enabled")) c.enabled.insert(noise_source_from_name(s.get<std::string>()));
    }
    c.seed = j.value("seed", c.seed);
    c.nRealizations = j.value("nRealizations", c.nRealizations);
    c.shots = j.value("shots", c.shots);
    c.validate();
    return c;
}

/// Thermal Doppler width (2 pi / lambda_eff) sqrt(k_B T / M) in rad/us.
inline double doppler_sigma(double temperature_uK, const DeviceConfig &dev) {
    constexpr double kBoltzmann = 1.380649e-23;
    double v = std::sqrt(kBoltzmann * temperature_uK * 1e-6 / dev.atomMass);  // m/s = um/us
    return 2.0 * kPi / dev.lambdaEff * v;
}

/// Independent stream for one realization.
inline std::mt19937_64 realization_stream(std::uint64_t seed, std::uint64_t realization) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(realization), static_cast<std::uint32_t>(realization >> 32)};
    return std::mt19937_64(seq);
}

/// Draws one realization. Every draw is taken even for disabled sources so that the
/// stream stays aligned across noise models.
inline NoiseRealization sample_realization(const NoiseConfig &cfg, const DeviceConfig &dev, std::size_t nPulses,
                                           std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    NoiseRealization r;
    const double sd = doppler_sigma(cfg.temperature, dev);
    for (int a = 0; a < 2; ++a) {
        bool failed = uniform(rng) < cfg.eta;
        r.atomPrepared[a] = !(cfg.has(NoiseSource::Spam) && failed);
    }
    for (int a = 0; a < 2; ++a) {
        double z = normal(rng);
        r.dopplerShift[a] = cfg.has(NoiseSource::Doppler) ? sd * z : 0.0;
    }
    r.ampFactor.resize(nPulses);
    for (auto &f : r.ampFactor) {
        double z;
        do {
            z = 1.0 + cfg.ampRelSigma * normal(rng);
        } while (!(z > 0.0));
        f = cfg.has(NoiseSource::Amplitude) ? z : 1.0;
    }
    return r;
}

/// Per-shot readout errors: an unprepared atom reads 0, then 1 -> 0 with epsilon and
/// 0 -> 1 with epsilonPrime.
inline Counts spam_postprocess(const Counts &raw, const NoiseConfig &cfg, const std::array<bool, 2> &prepared,
                               std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Counts out{};
    for (int k = 0; k < 4; ++k) {
        for (long s = 0; s < raw[k]; ++s) {
            std::array<int, 2> bits{k & 1, (k >> 1) & 1};  // atom 0, atom 1
            for (int a = 0; a < 2; ++a) {
                if (!prepared[a]) bits[a] = 0;
                double u = uniform(rng);
                if (bits[a] == 1 && u < cfg.epsilon) {
                    bits[a] = 0;
                } else if (bits[a] == 0 && u < cfg.epsilonPrime) {
                    bits[a] = 1;
                }
            }
            ++out[2 * bits[1] + bits[0]];
        }
    }
    return out;
}

/// Expected readout distribution under the same SPAM rules.
inline std::array<double, 4> spam_probabilities(const std::array<double, 4> &p, const NoiseConfig &cfg,
                                                const std::array<bool, 2> &prepared) {
    auto flip = [&](int a, int from, int to) {
        if (!prepared[a]) from = 0;
        if (from == 1) return to == 1 ? 1.0 - cfg.epsilon : cfg.epsilon;
        return to == 1 ? cfg.epsilonPrime : 1.0 - cfg.epsilonPrime;
    };
    std::array<double, 4> out{};
    for (int k = 0; k < 4; ++k) {
        for (int j = 0; j < 4; ++j) out[j] += p[k] * flip(1, k >> 1, j >> 1) * flip(0, k & 1, j & 1);
    }
    return out;
}

/// Mean and standard deviation of the psi_i+ populations per time step.
struct EnsembleStats {
    std::vector<std::array<double, 4>> mean;
    std::vector<std::array<double, 4>> std;
    int nRealizations = 0;
};

/// Populations of one noisy run of one sequence.
inline std::array<double, 4> noisy_populations(const PulseSequence &seq, const DeviceConfig &dev,
                                               const StateVector &psi0, const NoiseConfig &cfg,
                                               std::mt19937_64 &rng) {
    NoiseRealization real = sample_realization(cfg, dev, seq.pulse_count(), rng);
    StateVector out = simulate_sequence(seq, dev, psi0, &real).back();
    std::array<double, 4> p = readout_probabilities(out);
    bool spam = cfg.has(NoiseSource::Spam);
    if (cfg.shots == 0) return spam ? spam_probabilities(p, cfg, real.atomPrepared) : p;
    Counts c = sample_counts(p, cfg.shots, rng);
    if (spam) c = spam_postprocess(c, cfg, real.atomPrepared, rng);
    std::array<double, 4> pop{};
    for (int k = 0; k < 4; ++k) pop[k] = static_cast<double>(c[k]) / static_cast<double>(cfg.shots);
    return pop;
}

/// Runs nRealizations noisy simulations of every sequence (one per time step).
/// Realization r draws from its own stream and walks the steps in order, so results do not
/// depend on thread scheduling.
inline EnsembleStats monte_carlo(const std::vector<PulseSequence> &steps, const DeviceConfig &dev,
                                 const StateVector &psi0, const NoiseConfig &cfg) {
    cfg.validate();
    const auto n = static_cast<std::size_t>(cfg.nRealizations);
    std::vector<std::vector<std::array<double, 4>>> runs(n);
    parallel_for(n, [&](std::size_t r) {
        std::mt19937_64 rng = realization_stream(cfg.seed, r);
        runs[r].reserve(steps.size());
        for (const auto &seq : steps) runs[r].push_back(noisy_populations(seq, dev, psi0, cfg, rng));
    });
    EnsembleStats st;
    st.nRealizations = cfg.nRealizations;
    st.mean.assign(steps.size(), {});
    st.std.assign(steps.size(), {});
    for (std::size_t k = 0; k < steps.size(); ++k) {
        for (int i = 0; i < 4; ++i) {
            double s = 0;
            for (std::size_t r = 0; r < n; ++r) s += runs[r][k][i];
            double mean = s / n, var = 0;
            for (std::size_t r = 0; r < n; ++r) var += (runs[r][k][i] - mean) * (runs[r][k][i] - mean);
            st.mean[k][i] = mean;
            st.std[k][i] = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
        }
    }
    return st;
}

inline EnsembleStats monte_carlo(const PulseSequence &seq, const DeviceConfig &dev, const StateVector &psi0,
                                 const NoiseConfig &cfg) {
    return monte_carlo(std::vector<PulseSequence>{seq}, dev, psi0, cfg);
}

// ---- Summaries ----

/// Linearly interpolated quantile of unsorted data.
inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw std::invalid_argument("quantile of empty data");
    std::sort(v.begin(), v.end());
    double pos = q * static_cast<double>(v.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct BoxplotRow {
    std::string model;
    int state = 1;  // psi_state+
    double median = 0, q1 = 0, q3 = 0, whiskerLow = 0, whiskerHigh = 0;
};

/// Box summary of the std time series of each state; whiskers extend to the furthest
/// point within 1.5 IQR of the box.
inline std::vector<BoxplotRow> fluctuation_boxplots(const std::map<std::string, EnsembleStats> &runs) {
    std::vector<BoxplotRow> rows;
    for (const auto &[model, st] : runs) {
        for (int i = 0; i < 4; ++i) {
            std::vector<double> s;
            for (const auto &row : st.std) s.push_back(row[i]);
            if (s.empty()) continue;
            BoxplotRow b{model, i + 1};
            b.median = quantile(s, 0.5);
            b.q1 = quantile(s, 0.25);
            b.q3 = quantile(s, 0.75);
            double iqr = b.q3 - b.q1;
            b.whiskerLow = b.q1;
            b.whiskerHigh = b.q3;
            for (double x : s) {
                if (x >= b.q1 - 1.5 * iqr) b.whiskerLow = std::min(b.whiskerLow, x);
                if (x <= b.q3 + 1.5 * iqr) b.whiskerHigh = std::max(b.whiskerHigh, x);
            }
            rows.push_back(b);
        }
    }
    return rows;
}

}  // namespace dqpt

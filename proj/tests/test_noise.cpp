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

#include "dqpt/noise.hpp"

#include <gtest/gtest.h>

#include <cstdlib>

using namespace dqpt;

namespace {

// Binomial frequency within three standard errors.
void expect_binomial(long hits, long trials, double p) {
    double se = std::sqrt(p * (1 - p) / static_cast<double>(trials));
    EXPECT_NEAR(static_cast<double>(hits) / static_cast<double>(trials), p, 3 * se);
}

StateVector ground() { return atoms_from_qubits(StateVector::Unit(4, 0)); }

PulseSequence half_flip(const DeviceConfig &dev) {
    PulseSequence seq;
    seq.resolution = dev.resolution;
    double area = kPi / 2;
    seq.items.emplace_back(
        detail::make_pulse(Channel::Digital, 0, area, minimal_blackman_duration(area, dev.omegaMax, dev.resolution), 0.0, dev));
    seq.items.emplace_back(Measure{});
    return seq;
}

NoiseConfig only(std::set<NoiseSource> s) {
    NoiseConfig c;
    c.enabled = std::move(s);
    return c;
}

}  // namespace

TEST(noise_config, json_round_trip) {
    NoiseConfig c = only({NoiseSource::Spam, NoiseSource::Amplitude});
    c.seed = 0xFFFFFFFFFFFFull;
    c.shots = 0;
    NoiseConfig d = noise_from_json(to_json(c));
    EXPECT_EQ(d.enabled, c.enabled);
    EXPECT_EQ(d.seed, c.seed);
    EXPECT_EQ(d.shots, 0);
    EXPECT_DOUBLE_EQ(d.epsilonPrime, c.epsilonPrime);
}

TEST(noise_config, rejects_invalid) {
    NoiseConfig c;
    c.eta = 1.5;
    EXPECT_THROW(c.validate(), ConfigError);
    c = NoiseConfig{};
    c.temperature = -1;
    EXPECT_THROW(c.validate(), ConfigError);
    c = NoiseConfig{};
    c.nRealizations = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    EXPECT_THROW(noise_from_json({{"enabled", {"decay"}}}), ConfigError);
}

TEST(sample_realization, disabled_is_identity) {
    DeviceConfig dev;
    auto rng = realization_stream(1, 0);
    NoiseRealization r = sample_realization(NoiseConfig{}, dev, 5, rng);
    EXPECT_TRUE(r.atomPrepared[0] && r.atomPrepared[1]);
    EXPECT_EQ(r.dopplerShift[0], 0.0);
    EXPECT_EQ(r.dopplerShift[1], 0.0);
    ASSERT_EQ(r.ampFactor.size(), 5u);
    for (double f : r.ampFactor) EXPECT_EQ(f, 1.0);
}

TEST(sample_realization, preparation_rate) {
    DeviceConfig dev;
    NoiseConfig c = only({NoiseSource::Spam});
    c.eta = 0.5;
    auto rng = realization_stream(2, 0);
    long prepared = 0, n = 100000;
    for (long i = 0; i < n / 2; ++i) {
        auto r = sample_realization(c, dev, 0, rng);
        prepared += r.atomPrepared[0] + r.atomPrepared[1];
    }
    expect_binomial(prepared, n, 0.5);
}

TEST(sample_realization, doppler_width_scales_with_root_temperature) {
    DeviceConfig dev;
    EXPECT_NEAR(doppler_sigma(200, dev) / doppler_sigma(50, dev), 2.0, 1e-12);
    // k_eff sqrt(k_B T / M) for Rb-87 at 50 uK, k_eff = 8.7 / um.
    EXPECT_NEAR(doppler_sigma(50, dev), 8.7 * std::sqrt(1.380649e-23 * 50e-6 / 1.45e-25), 1e-9);

    auto empirical = [&](double t) {
        NoiseConfig c = only({NoiseSource::Doppler});
        c.temperature = t;
        auto rng = realization_stream(3, 0);
        double s2 = 0;
        int n = 50000;
        for (int i = 0; i < n; ++i) {
            auto r = sample_realization(c, dev, 0, rng);
            s2 += r.dopplerShift[0] * r.dopplerShift[0];
        }
        return std::sqrt(s2 / n);
    };
    EXPECT_NEAR(empirical(200) / empirical(50), 2.0, 0.03);
    EXPECT_NEAR(empirical(50), doppler_sigma(50, dev), 0.02 * doppler_sigma(50, dev));
}

TEST(sample_realization, amplitude_factors) {
    DeviceConfig dev;
    NoiseConfig c = only({NoiseSource::Amplitude});
    c.ampRelSigma = 0.05;
    auto rng = realization_stream(4, 0);
    auto r = sample_realization(c, dev, 40000, rng);
    double s = 0, s2 = 0;
    for (double f : r.ampFactor) {
        EXPECT_GT(f, 0.0);
        s += f;
        s2 += f * f;
    }
    double mean = s / r.ampFactor.size();
    EXPECT_NEAR(mean, 1.0, 3 * 0.05 / std::sqrt(40000.0));
    EXPECT_NEAR(std::sqrt(s2 / r.ampFactor.size() - mean * mean), 0.05, 0.002);
}

TEST(spam_postprocess, zero_rates_leave_counts) {
    NoiseConfig c;
    c.eta = c.epsilon = c.epsilonPrime = 0;
    std::mt19937_64 rng(5);
    Counts raw{10, 20, 30, 40};
    EXPECT_EQ(spam_postprocess(raw, c, {true, true}, rng), raw);
}

TEST(spam_postprocess, false_positive_rate) {
    NoiseConfig c;
    c.epsilon = 0;
    c.epsilonPrime = 0.03;
    std::mt19937_64 rng(6);
    long n = 100000;
    Counts out = spam_postprocess({n, 0, 0, 0}, c, {true, true}, rng);
    expect_binomial(out[1] + out[3], n, 0.03);
    expect_binomial(out[2] + out[3], n, 0.03);
}

TEST(spam_postprocess, false_negative_rate) {
    NoiseConfig c;
    c.epsilon = 0.01;
    c.epsilonPrime = 0;
    std::mt19937_64 rng(7);
    long n = 100000;
    Counts out = spam_postprocess({0, 0, 0, n}, c, {true, true}, rng);
    expect_binomial(out[0] + out[2], n, 0.01);
}

TEST(spam_postprocess, unprepared_atoms_read_zero) {
    NoiseConfig c;
    c.epsilon = c.epsilonPrime = 0;
    std::mt19937_64 rng(8);
    Counts out = spam_postprocess({1, 2, 3, 4}, c, {false, false}, rng);
    EXPECT_EQ(out, (Counts{10, 0, 0, 0}));
    out = spam_postprocess({1, 2, 3, 4}, c, {true, false}, rng);
    EXPECT_EQ(out, (Counts{4, 6, 0, 0}));
}

TEST(spam_probabilities, matches_shot_frequencies) {
    NoiseConfig c;
    c.epsilon = 0.1;
    c.epsilonPrime = 0.2;
    std::array<double, 4> p{0.1, 0.2, 0.3, 0.4};
    auto q = spam_probabilities(p, c, {true, true});
    double total = 0;
    for (double x : q) total += x;
    EXPECT_NEAR(total, 1.0, 1e-14);
    // |11> reads as 11 with (1 - eps)^2 and so on.
    EXPECT_NEAR(q[3], 0.4 * 0.81 + 0.3 * 0.9 * 0.2 + 0.2 * 0.2 * 0.9 + 0.1 * 0.04, 1e-14);
    std::mt19937_64 rng(9);
    long n = 200000;
    Counts out = spam_postprocess(sample_counts(p, n, rng), c, {true, true}, rng);
    for (int k = 0; k < 4; ++k) expect_binomial(out[k], n, q[k]);
}

TEST(monte_carlo, zero_noise_reproduces_noiseless) {
    DeviceConfig dev;
    auto seq = half_flip(dev);
    NoiseConfig c;
    c.shots = 0;
    c.nRealizations = 4;
    EnsembleStats st = monte_carlo(seq, dev, ground(), c);
    auto ideal = readout_probabilities(simulate_sequence(seq, dev, ground()).back());
    for (int i = 0; i < 4; ++i) {
        EXPECT_EQ(st.std[0][i], 0.0);
        EXPECT_NEAR(st.mean[0][i], ideal[i], 1e-14);
    }
    EXPECT_NEAR(st.mean[0][1], 0.5, 1e-3);
}

TEST(monte_carlo, deterministic_and_thread_independent) {
    DeviceConfig dev;
    std::vector<PulseSequence> steps{half_flip(dev), half_flip(dev)};
    NoiseConfig c = only({NoiseSource::Spam, NoiseSource::Doppler, NoiseSource::Amplitude});
    c.nRealizations = 16;
    c.seed = 42;
    EnsembleStats a = monte_carlo(steps, dev, ground(), c);
    setenv("DQPT_THREADS", "1", 1);
    EnsembleStats b = monte_carlo(steps, dev, ground(), c);
    unsetenv("DQPT_THREADS");
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.std, b.std);
    c.seed = 43;
    EXPECT_NE(monte_carlo(steps, dev, ground(), c).mean, a.mean);
}

TEST(monte_carlo, doppler_spreads_populations) {
    DeviceConfig dev;
    NoiseConfig c = only({NoiseSource::Doppler});
    c.shots = 0;
    c.nRealizations = 20;
    c.temperature = 5000;
    EnsembleStats st = monte_carlo(half_flip(dev), dev, ground(), c);
    EXPECT_GT(st.std[0][1], 1e-4);
    EXPECT_NEAR(st.mean[0][0] + st.mean[0][1], 1.0, 1e-12);
}

TEST(quantile, linear_interpolation) {
    std::vector<double> v{5, 1, 4, 2, 3};
    EXPECT_DOUBLE_EQ(quantile(v, 0.25), 2.0);
    EXPECT_DOUBLE_EQ(quantile(v, 0.5), 3.0);
    EXPECT_DOUBLE_EQ(quantile({1, 2}, 0.5), 1.5);
    EXPECT_THROW(quantile({}, 0.5), std::invalid_argument);
}

TEST(fluctuation_boxplots, whiskers_exclude_outliers) {
    EnsembleStats st;
    for (double x : {1.0, 2.0, 3.0, 4.0, 5.0, 100.0}) st.std.push_back({x, 0, 0, 0});
    auto rows = fluctuation_boxplots({{"spam", st}});
    ASSERT_EQ(rows.size(), 4u);
    const auto &b = rows[0];
    EXPECT_EQ(b.model, "spam");
    EXPECT_EQ(b.state, 1);
    EXPECT_DOUBLE_EQ(b.median, 3.5);
    EXPECT_DOUBLE_EQ(b.q1, 2.25);
    EXPECT_DOUBLE_EQ(b.q3, 4.75);
    EXPECT_DOUBLE_EQ(b.whiskerLow, 1.0);
    EXPECT_DOUBLE_EQ(b.whiskerHigh, 5.0);
    EXPECT_EQ(rows[1].median, 0.0);
}

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

#include "dqpt/synthesis.hpp"

#include <gtest/gtest.h>

#include <random>

#include "dqpt/model.hpp"
#include "dqpt/quench.hpp"

using namespace dqpt;

namespace {

Circuit random_circuit(std::mt19937_64 &rng) {
    std::normal_distribution<double> n(0, 1.5);
    std::uniform_int_distribution<int> pick(0, 5), len(1, 30);
    Circuit c;
    int layers = len(rng);
    for (int k = 0; k < layers; ++k) {
        int q = static_cast<int>(rng() % 2);
        switch (pick(rng)) {
            case 0: c.add(Gate::rx(q, n(rng))); break;
            case 1: c.add(Gate::ry(q, n(rng))); break;
            case 2: c.add(Gate::rz(q, n(rng))); break;
            case 3: c.add(Gate::h(q)); break;
            case 4: c.add(Gate::cz(1, 0)); break;
            default: c.add(Gate::cnot(q, 1 - q)); break;
        }
    }
    c.globalPhase = n(rng);
    return c;
}

void expect_equivalent(const Circuit &in, const Circuit &out) {
    Matrix4 a = circuit_unitary(in), b = circuit_unitary(out);
    EXPECT_NEAR(std::abs((a.adjoint() * b).trace()), 4.0, 1e-9);
    EXPECT_LT(phase_aligned_distance(a, b), 1e-10);
}

std::size_t max_rotations_per_layer(const Circuit &c) {
    std::size_t best = 0;
    std::array<std::size_t, 2> run{};
    for (const auto &g : c.gates) {
        if (g.is_two_qubit()) {
            run = {};
            continue;
        }
        best = std::max(best, ++run[g.target]);
    }
    return best;
}

}  // namespace

TEST(compress, random_circuits) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 500; ++trial) {
        Circuit c = random_circuit(rng);
        Circuit out = compress(c);
        EXPECT_LE(out.count(GateKind::CNOT), 3u);
        EXPECT_LE(max_rotations_per_layer(out), 3u);
        EXPECT_EQ(out.count(GateKind::CNOT) + 1, [&] {
            std::size_t layers = 1;
            for (const auto &g : out.gates) layers += g.is_two_qubit();
            return layers;
        }());
        expect_equivalent(c, out);
        // The global phase is carried too.
        EXPECT_LT(max_abs(circuit_unitary(c) - circuit_unitary(out)), 1e-10);
    }
}

TEST(compress, minimal_classes) {
    Circuit id;
    id.add(Gate::rx(0, 0.3)).add(Gate::cnot(1, 0)).add(Gate::cnot(1, 0)).add(Gate::ry(1, 0.2));
    EXPECT_EQ(compress(id).count(GateKind::CNOT), 0u);
    expect_equivalent(id, compress(id));

    Circuit one;
    one.add(Gate::h(0)).add(Gate::cz(1, 0)).add(Gate::rz(1, 0.4));
    EXPECT_EQ(compress(one).count(GateKind::CNOT), 1u);
    expect_equivalent(one, compress(one));

    Circuit two;
    two.add(Gate::cnot(1, 0)).add(Gate::rx(1, 0.7)).add(Gate::rz(0, 0.4)).add(Gate::cnot(1, 0));
    EXPECT_EQ(compress(two).count(GateKind::CNOT), 2u);
    expect_equivalent(two, compress(two));

    Circuit swap;
    swap.add(Gate::cnot(1, 0)).add(Gate::cnot(0, 1)).add(Gate::cnot(1, 0));
    EXPECT_EQ(compress(swap).count(GateKind::CNOT), 3u);
    expect_equivalent(swap, compress(swap));
}

TEST(compress, trotter_compositions_have_fixed_depth) {
    double m = -1.49, g = 1.7;
    double xi = 1 / (g * g), mu = m / (g * g), dt = 0.1 * tilde_time_per_rescaled(m, g);
    for (int steps : {1, 7, 91, 125, 875}) {
        Circuit c = trotter_circuit(xi, mu, dt, steps);
        Circuit out = compress(c);
        EXPECT_EQ(out.count(GateKind::CNOT), 3u) << steps;
        expect_equivalent(c, out);
    }
}

TEST(compress, batch_matches_serial) {
    std::mt19937_64 rng(2);
    std::vector<Circuit> in;
    for (int i = 0; i < 20; ++i) in.push_back(random_circuit(rng));
    auto out = compress_batch(in);
    for (int i = 0; i < 20; ++i) EXPECT_EQ(to_json(out[i]), to_json(compress(in[i])));
}

TEST(compress, rejects_non_unitary) {
    EXPECT_THROW(synthesize_two_qubit(Matrix4::Identity() * 1.1), std::runtime_error);
}

TEST(coordinates, canonical_gates_round_trip) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int trial = 0; trial < 100; ++trial) {
        Matrix4 v = canonical_gate(u(rng), u(rng), u(rng));
        auto c = interaction_coordinates(v);
        EXPECT_TRUE(solve_dressing(v, canonical_gate(c[0], c[1], c[2])).has_value());
    }
    auto c = interaction_coordinates(cnot_matrix(1, 0));
    int quarter = 0;
    for (double x : c) quarter += std::abs(std::abs(std::remainder(x, kPi / 2)) - kPi / 4) < 1e-9;
    EXPECT_EQ(quarter, 1);
}

TEST(dressing, recovers_local_factors) {
    std::mt19937_64 rng(19);
    std::normal_distribution<double> n(0, 1);
    for (int trial = 0; trial < 50; ++trial) {
        Matrix4 core = canonical_gate(n(rng), n(rng), n(rng));
        Matrix4 k1 = kron2(rx_matrix(n(rng)) * rz_matrix(n(rng)), ry_matrix(n(rng)));
        Matrix4 k2 = kron2(rz_matrix(n(rng)), rx_matrix(n(rng)) * ry_matrix(n(rng)));
        Matrix4 u = k1 * core * k2;
        auto d = solve_dressing(u, core);
        ASSERT_TRUE(d.has_value());
        EXPECT_LT(max_abs(std::polar(1.0, d->phase) * d->after * core * d->before - u), 1e-10);
        auto [a, b] = detail::factor_local(d->before);
        EXPECT_LT(phase_aligned_distance(kron2(a, b), d->before), 1e-10);
    }
}

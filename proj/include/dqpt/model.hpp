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
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dqpt/errors.hpp"
#include "dqpt/linalg.hpp"

namespace dqpt {

/// Lattice and coupling parameters of the Z_n Schwinger chain. Energies are in units of J.
struct GaugeConfig {
    int n = 3;       // Z_n truncation of each link
    int sites = 2;   // matter sites N, even
    double mass = 0.0;
    double hopping = 1.0;
    double charge = 1.0;

    void validate() const {
        if (n < 2) throw ConfigError("n must be at least 2");
        if (sites < 2 || sites % 2 != 0) throw ConfigError("number of sites must be even and at least 2");
        if (!(hopping > 0.0)) throw ConfigError("J must be positive");
        if (!std::isfinite(mass) || !std::isfinite(charge)) throw ConfigError("m and g must be finite");
    }

    double xi() const {
        require_interacting();
        return hopping * hopping / (charge * charge);
    }

    double mu() const {
        require_interacting();
        return mass * hopping / (charge * charge);
    }

    void require_interacting() const {
        if (charge == 0.0) {
            throw DomainError("g = 0 has no rescaled couplings; use two_band_amplitude for the free theory");
        }
    }
};

/// Electric field eigenvalue e_k = sqrt(2 pi / n) (k - (n - 1) / 2).
inline double electric_field_value(int k, int n) {
    if (n < 2) throw DomainError("n must be at least 2");
    if (k < 0 || k >= n) throw DomainError("field index out of range");
    return std::sqrt(2.0 * kPi / n) * (k - 0.5 * (n - 1));
}

/// Matter occupations per site and field index per link x -> x+1.
struct PhysicalState {
    std::vector<std::uint8_t> occupations;
    std::vector<int> fieldIndices;

    auto operator<=>(const PhysicalState &other) const {
        if (auto c = fieldIndices <=> other.fieldIndices; c != 0) return c;
        return occupations <=> other.occupations;
    }
    bool operator==(const PhysicalState &) const = default;
};

inline int positive_mod(int a, int n) { return ((a % n) + n) % n; }

/// Staggered background charge ((-1)^x - 1) / 2: 0 on even sites, -1 on odd sites.
inline int background_charge(int x) { return x % 2 == 0 ? 0 : -1; }

/// Gauss law on the cyclic group: k_x - k_{x-1} = occ(x) + ((-1)^x - 1) / 2 (mod n).
inline bool satisfies_gauss_law(const PhysicalState &s, int n) {
    const int sites = static_cast<int>(s.occupations.size());
    if (static_cast<int>(s.fieldIndices.size()) != sites) return false;
    for (int x = 0; x < sites; ++x) {
        int left = s.fieldIndices[positive_mod(x - 1, sites)];
        int diff = s.fieldIndices[x] - left - s.occupations[x] - background_charge(x);
        if (positive_mod(diff, n) != 0) return false;
    }
    return true;
}

inline bool is_charge_neutral(const PhysicalState &s) {
    int filled = 0;
    for (auto o : s.occupations) filled += o;
    return 2 * filled == static_cast<int>(s.occupations.size());
}

/// Ordered physical states with index lookup.
struct PhysicalBasis {
    int n = 0;
    int sites = 0;
    std::vector<PhysicalState> states;

    std::size_t size() const { return states.size(); }

    std::ptrdiff_t index_of(const PhysicalState &s) const {
        auto it = std::find(states.begin(), states.end(), s);
        return it == states.end() ? -1 : it - states.begin();
    }
};

namespace detail {

// For (n=3, N=2): vac_eps has occupations (0, 1), mes_eps has (1, 0); eps = k_1 - 1.
inline void order_two_site_basis(std::vector<PhysicalState> &states) {
    std::stable_sort(states.begin(), states.end(), [](const PhysicalState &a, const PhysicalState &b) {
        if (a.fieldIndices[1] != b.fieldIndices[1]) return a.fieldIndices[1] < b.fieldIndices[1];
        return a.occupations[0] < b.occupations[0];
    });
}

}  // namespace detail

/// All Gauss-law states of the charge-neutral sector, in canonical order.
///
/// States are sorted by (fieldIndices, occupations). For n = 3, N = 2 the order is
/// {vac-, mes-, vac0, mes0, vac+, mes+}.
inline PhysicalBasis enumerate_physical_basis(const GaugeConfig &cfg) {
    cfg.validate();
    const int N = cfg.sites;
    PhysicalBasis basis{cfg.n, N, {}};
    for (std::uint32_t mask = 0; mask < (1u << N); ++mask) {
        PhysicalState s;
        s.occupations.resize(N);
        for (int x = 0; x < N; ++x) s.occupations[x] = (mask >> x) & 1u;
        if (!is_charge_neutral(s)) continue;
        // The last link fixes the rest by walking the Gauss law around the ring.
        for (int closing = 0; closing < cfg.n; ++closing) {
            s.fieldIndices.assign(N, 0);
            int k = closing;
            for (int x = 0; x < N; ++x) {
                k = positive_mod(k + s.occupations[x] + background_charge(x), cfg.n);
                s.fieldIndices[x] = k;
            }
            if (satisfies_gauss_law(s, cfg.n)) basis.states.push_back(s);
        }
    }
    std::sort(basis.states.begin(), basis.states.end());
    basis.states.erase(std::unique(basis.states.begin(), basis.states.end()), basis.states.end());
    if (cfg.n == 3 && N == 2) detail::order_two_site_basis(basis.states);
    return basis;
}

/// Matrix of the rescaled Hamiltonian in a physical basis:
/// (xi/2) sum (s-_x U_x s+_{x+1} + h.c.) - (mu/2) sum (-1)^x Z_x + (1/2) sum E_x^2.
inline ComplexMatrix build_gauge_hamiltonian(const GaugeConfig &cfg, const PhysicalBasis &basis) {
    cfg.validate();
    const double xi = cfg.xi();
    const double mu = cfg.mu();
    const int N = basis.sites;
    const auto dim = static_cast<Eigen::Index>(basis.size());
    std::map<PhysicalState, Eigen::Index> lookup;
    for (Eigen::Index i = 0; i < dim; ++i) lookup.emplace(basis.states[i], i);

    ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const PhysicalState &s = basis.states[i];
        double diag = 0.0;
        for (int x = 0; x < N; ++x) {
            double z = s.occupations[x] ? -1.0 : 1.0;
            double sign = x % 2 == 0 ? 1.0 : -1.0;
            double e = electric_field_value(s.fieldIndices[x], basis.n);
            diag += -0.5 * mu * sign * z + 0.5 * e * e;
        }
        h(i, i) = diag;

        // s-_x creates a fermion on x, s+_{x+1} removes one on x+1, U raises the link.
        for (int x = 0; x < N; ++x) {
            int y = (x + 1) % N;
            if (s.occupations[x] != 0 || s.occupations[y] != 1) continue;
            PhysicalState t = s;
            t.occupations[x] = 1;
            t.occupations[y] = 0;
            t.fieldIndices[x] = (t.fieldIndices[x] + 1) % basis.n;
            auto it = lookup.find(t);
            if (it == lookup.end()) continue;
            h(it->second, i) += 0.5 * xi;
            h(i, it->second) += 0.5 * xi;
        }
    }
    return h;
}

/// Closed form of the even-parity block for n = 3, N = 2.
inline Matrix4 block_hamiltonian(double xi, double mu) {
    const double r2 = std::sqrt(2.0);
    Matrix4 h = Matrix4::Zero();
    h(0, 0) = -mu;
    h(1, 1) = mu + kPi / 3.0;
    h(2, 2) = -mu + 2.0 * kPi / 3.0;
    h(3, 3) = mu + 2.0 * kPi / 3.0;
    h(0, 1) = h(1, 0) = xi / r2;
    h(1, 2) = h(2, 1) = xi / 2.0;
    h(2, 3) = h(3, 2) = xi / r2;
    return h;
}

/// Closed form of the odd-parity block for n = 3, N = 2.
inline Matrix2 odd_block_hamiltonian(double xi, double mu) {
    Matrix2 h;
    h << mu + kPi / 3.0, xi / 2.0, xi / 2.0, -mu + 2.0 * kPi / 3.0;
    return h;
}

/// Parity eigenbasis for n = 3, N = 2. Rows are psi1+..psi4+, psi1-, psi2- in the
/// basis {vac-, mes-, vac0, mes0, vac+, mes+}.
inline ComplexMatrix parity_basis_n2() {
    const double s = 1.0 / std::sqrt(2.0);
    ComplexMatrix w = ComplexMatrix::Zero(6, 6);
    w(0, 2) = 1.0;
    w(1, 3) = s;
    w(1, 1) = s;
    w(2, 4) = s;
    w(2, 0) = s;
    w(3, 5) = 1.0;
    w(4, 3) = s;
    w(4, 1) = -s;
    w(5, 4) = s;
    w(5, 0) = -s;
    return w;
}

/// Parity operator in the {vac-, mes-, vac0, mes0, vac+, mes+} basis.
/// It maps vac_eps -> vac_{-eps}, mes_0 -> mes_-, mes_+ -> mes_+.
inline ComplexMatrix parity_operator_n2() {
    ComplexMatrix p = ComplexMatrix::Zero(6, 6);
    p(4, 0) = p(0, 4) = 1.0;
    p(2, 2) = 1.0;
    p(1, 3) = p(3, 1) = 1.0;
    p(5, 5) = 1.0;
    return p;
}

struct ParityBlocks {
    ComplexMatrix W;
    Matrix4 Hplus;
    Matrix2 Hminus;
};

/// Rotates the two-site Hamiltonian into the parity eigenbasis and splits its blocks.
inline ParityBlocks parity_rotation_n2(const GaugeConfig &cfg) {
    if (cfg.n != 3 || cfg.sites != 2) {
        throw UnsupportedConfiguration("parity blocks are implemented only for n = 3, N = 2");
    }
    PhysicalBasis basis = enumerate_physical_basis(cfg);
    ComplexMatrix h = build_gauge_hamiltonian(cfg, basis);
    ParityBlocks out;
    out.W = parity_basis_n2();
    ComplexMatrix rotated = out.W * h * out.W.adjoint();
    double off = std::max(max_abs(rotated.block(0, 4, 4, 2)), max_abs(rotated.block(4, 0, 2, 4)));
    if (off > 1e-12) throw std::runtime_error("parity rotation left off-block entries");
    out.Hplus = rotated.block(0, 0, 4, 4);
    out.Hminus = rotated.block(4, 4, 2, 2);
    return out;
}

}  // namespace dqpt

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

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "dqpt/circuit.hpp"
#include "dqpt/parallel.hpp"

namespace dqpt {

inline Matrix4 magic_basis() {
    Matrix4 m;
    m << 1, 0, 0, kI,  //
        0, kI, 1, 0,   //
        0, kI, -1, 0,  //
        1, 0, 0, -kI;
    return m / std::sqrt(2.0);
}

/// exp(i (c1 XX + c2 YY + c3 ZZ)).
inline Matrix4 canonical_gate(double c1, double c2, double c3) {
    Matrix4 h = c1 * kron2(pauli::x(), pauli::x()) + c2 * kron2(pauli::y(), pauli::y()) +
                c3 * kron2(pauli::z(), pauli::z());
    return hermitian_propagator(-h, 1.0);
}

namespace detail {

inline Matrix4 to_special_unitary(const Matrix4 &u) { return u * std::polar(1.0, -std::arg(u.determinant()) / 4); }

/// Real orthogonal O (det +1) and eigenvalues d with S = O diag(d) O^T for symmetric unitary S.
struct SymmetricSplit {
    Eigen::Matrix4d o;
    Eigen::Vector4cd d;
};

inline SymmetricSplit split_symmetric_unitary(const Matrix4 &s) {
    Eigen::Matrix4d re = s.real(), im = s.imag();
    SymmetricSplit best;
    double best_err = 1e300;
    for (double r : {0.5772156649015329, 1.6180339887498949, -0.3183098861837907, 2.718281828459045}) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(re + r * im);
        Eigen::Matrix4d o = es.eigenvectors();
        if (o.determinant() < 0) o.col(0) *= -1.0;
        Matrix4 diag = o.transpose().cast<Complex>() * s * o.cast<Complex>();
        Matrix4 off = diag;
        off.diagonal().setZero();
        double err = max_abs(off);
        if (err < best_err) {
            best_err = err;
            best.o = o;
            best.d = diag.diagonal();
        }
        if (err < 1e-12) break;
    }
    return best;
}

/// W_B = Q exp(i Theta) O^T with Q, O real orthogonal, for W in SU(4) given in the magic basis.
struct MagicDecomposition {
    Eigen::Matrix4d q;
    Eigen::Matrix4d o;
    Eigen::Vector4d theta;
};

inline MagicDecomposition decompose_with(const Matrix4 &wb, const Eigen::Matrix4d &o, const Eigen::Vector4d &theta) {
    Matrix4 q = wb * o.cast<Complex>();
    for (int j = 0; j < 4; ++j) q.col(j) *= std::polar(1.0, -theta(j));
    return {q.real(), o, theta};
}

/// Writes a local 4x4 unitary as exp(i phase) a x b.
inline std::pair<Matrix2, Matrix2> factor_local(const Matrix4 &k) {
    int bi = 0, bj = 0;
    double best = -1;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            double n = k.block<2, 2>(2 * i, 2 * j).norm();
            if (n > best) best = n, bi = i, bj = j;
        }
    }
    Matrix2 b = k.block<2, 2>(2 * bi, 2 * bj);
    b /= std::sqrt(b.determinant());
    Matrix2 a;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) a(i, j) = (b.adjoint() * k.block<2, 2>(2 * i, 2 * j)).trace() / 2.0;
    }
    return {a, b};
}

}  // namespace detail

/// Weyl coordinates (c1, c2, c3) with u locally equivalent to canonical_gate(c1, c2, c3) up to phase.
inline std::array<double, 3> interaction_coordinates(const Matrix4 &u) {
    Matrix4 m = magic_basis();
    Matrix4 ub = m.adjoint() * detail::to_special_unitary(u) * m;
    auto split = detail::split_symmetric_unitary(ub.transpose() * ub);
    std::array<double, 4> l{};
    double sum = 0;
    for (int j = 0; j < 4; ++j) sum += l[j] = std::arg(split.d(j)) / 2;
    l[0] -= kPi * std::round(sum / kPi);
    return {(l[0] + l[1]) / 2, (l[1] + l[3]) / 2, (l[0] + l[3]) / 2};
}

/// Finds locals with u = exp(i phase) k1 v k2 when u and v are locally equivalent.
struct Dressing {
    Matrix4 before;  // k2, applied first
    Matrix4 after;   // k1
    double phase = 0;
};

inline std::optional<Dressing> solve_dressing(const Matrix4 &u, const Matrix4 &v, double tol = 1e-9) {
    const Matrix4 m = magic_basis();
    const Matrix4 us = detail::to_special_unitary(u);
    for (Complex vphase : {Complex(1, 0), Complex(0, 1)}) {
        Matrix4 vs = vphase * detail::to_special_unitary(v);
        Matrix4 ub = m.adjoint() * us * m, vb = m.adjoint() * vs * m;
        auto su = detail::split_symmetric_unitary(ub.transpose() * ub);
        auto sv = detail::split_symmetric_unitary(vb.transpose() * vb);

        // Pair eigenvalues and reorder v's eigenvectors to match u's.
        std::array<int, 4> perm{};
        std::array<bool, 4> used{};
        bool matched = true;
        for (int i = 0; i < 4; ++i) {
            int pick = -1;
            double best = 1e300;
            for (int j = 0; j < 4; ++j) {
                double d = std::abs(su.d(i) - sv.d(j));
                if (!used[j] && d < best) best = d, pick = j;
            }
            if (best > 1e-7) matched = false;
            used[pick] = true;
            perm[i] = pick;
        }
        if (!matched) continue;
        Eigen::Matrix4d ov;
        for (int i = 0; i < 4; ++i) ov.col(i) = sv.o.col(perm[i]);
        if (ov.determinant() < 0) ov.col(0) *= -1.0;

        Eigen::Vector4d theta;
        double sum = 0;
        for (int i = 0; i < 4; ++i) sum += theta(i) = std::arg(su.d(i)) / 2;
        theta(0) -= kPi * std::round(sum / kPi);

        auto du = detail::decompose_with(ub, su.o, theta);
        auto dv = detail::decompose_with(vb, ov, theta);
        Matrix4 k1 = m * (du.q * dv.q.transpose()).cast<Complex>() * m.adjoint();
        Matrix4 k2 = m * (ov * su.o.transpose()).cast<Complex>() * m.adjoint();
        Matrix4 recon = k1 * v * k2;
        Complex t = (recon.adjoint() * u).trace();
        if (std::abs(std::abs(t) - 4.0) > tol) continue;
        return Dressing{k2, k1, std::arg(t)};
    }
    return std::nullopt;
}

/// Two-qubit skeleton: locals[0], cnots[0], locals[1], ..., locals[k]. Locals are (qubit 1, qubit 0).
struct Skeleton {
    std::vector<std::pair<Matrix2, Matrix2>> locals;
    std::vector<std::pair<int, int>> cnots;  // (control, target)

    Matrix4 unitary() const {
        Matrix4 u = kron2(locals[0].first, locals[0].second);
        for (std::size_t k = 0; k < cnots.size(); ++k) {
            u = kron2(locals[k + 1].first, locals[k + 1].second) * cnot_matrix(cnots[k].first, cnots[k].second) * u;
        }
        return u;
    }
};

namespace detail {

inline std::pair<Matrix2, Matrix2> id_pair() { return {Matrix2::Identity(), Matrix2::Identity()}; }

/// Three-CNOT skeleton locally equal to canonical_gate(a, b, -c).
inline Skeleton three_cnot_skeleton(double a, double b, double c) {
    Skeleton s;
    s.locals.push_back({Matrix2::Identity(), rz_matrix(kPi / 2)});
    s.cnots.push_back({0, 1});
    s.locals.push_back({rz_matrix(2 * c - kPi / 2), ry_matrix(kPi / 2 - 2 * a)});
    s.cnots.push_back({1, 0});
    s.locals.push_back({Matrix2::Identity(), ry_matrix(2 * b - kPi / 2)});
    s.cnots.push_back({0, 1});
    s.locals.push_back({rz_matrix(-kPi / 2), Matrix2::Identity()});
    return s;
}

inline bool near_multiple(double x, double period, double tol) {
    double r = std::remainder(x, period);
    return std::abs(r) < tol;
}

inline std::vector<Skeleton> candidate_skeletons(const std::array<double, 3> &c) {
    const double tol = 1e-9;
    std::vector<Skeleton> out;
    int zeros = 0, quarters = 0;
    for (double x : c) {
        zeros += near_multiple(x, kPi / 2, tol);
        quarters += !near_multiple(x, kPi / 2, tol) && near_multiple(x - kPi / 4, kPi / 2, tol);
    }
    if (zeros == 3) out.push_back(Skeleton{{id_pair()}, {}});
    if (zeros == 2 && quarters == 1) out.push_back(Skeleton{{id_pair(), id_pair()}, {{1, 0}}});
    if (zeros >= 1) {
        // CNOT (Rx x Rz) CNOT is locally canonical_gate(-t1/2, 0, -t2/2).
        std::array<double, 3> s = c;
        std::sort(s.begin(), s.end(), [&](double p, double q) {
            return near_multiple(p, kPi / 2, tol) > near_multiple(q, kPi / 2, tol);
        });
        for (auto [x, z] : {std::pair{s[1], s[2]}, std::pair{s[2], s[1]}}) {
            out.push_back(Skeleton{{id_pair(), {rx_matrix(-2 * x), rz_matrix(-2 * z)}, id_pair()}, {{1, 0}, {1, 0}}});
        }
    }
    out.push_back(three_cnot_skeleton(c[0], c[1], -c[2]));
    return out;
}

inline void emit_local(Circuit &c, int q, const Matrix2 &u) {
    EulerZYZ e = euler_zyz(u);
    auto keep = [](double x) { return std::abs(std::remainder(x, 4 * kPi)) > 1e-12; };
    if (keep(e.delta)) c.add(Gate::rz(q, e.delta));
    if (keep(e.gamma)) c.add(Gate::ry(q, e.gamma));
    if (keep(e.beta)) c.add(Gate::rz(q, e.beta));
}

}  // namespace detail

/// Resynthesizes a two-qubit unitary with the fewest CNOTs among the 0..3 templates.
inline Circuit synthesize_two_qubit(const Matrix4 &u) {
    double defect = unitarity_defect(u);
    if (defect > 1e-8) {
        std::ostringstream msg;
        msg << "accumulated matrix is not unitary (max |U U^dagger - 1| = " << defect << ")";
        throw std::runtime_error(msg.str());
    }
    for (const Skeleton &sk : detail::candidate_skeletons(interaction_coordinates(u))) {
        auto dressing = solve_dressing(u, sk.unitary());
        if (!dressing) continue;
        auto [b1, b0] = detail::factor_local(dressing->before);
        auto [a1, a0] = detail::factor_local(dressing->after);
        Skeleton full = sk;
        full.locals.front() = {full.locals.front().first * b1, full.locals.front().second * b0};
        full.locals.back() = {a1 * full.locals.back().first, a0 * full.locals.back().second};

        Circuit out;
        for (std::size_t k = 0; k < full.locals.size(); ++k) {
            detail::emit_local(out, 1, full.locals[k].first);
            detail::emit_local(out, 0, full.locals[k].second);
            if (k < full.cnots.size()) out.add(Gate::cnot(full.cnots[k].first, full.cnots[k].second));
        }
        Matrix4 got = circuit_unitary(out);
        Complex t = (got.adjoint() * u).trace();
        out.globalPhase = std::arg(t);
        if (std::abs(std::abs(t) - 4.0) < 1e-9) return out;
    }
    throw std::runtime_error("two-qubit synthesis failed to verify");
}

/// Fixed-depth resynthesis of the whole circuit from its composed unitary.
inline Circuit compress(const Circuit &c) {
    c.validate();
    return synthesize_two_qubit(circuit_unitary(c));
}

inline std::vector<Circuit> compress_batch(const std::vector<Circuit> &circuits) {
    std::vector<Circuit> out(circuits.size());
    parallel_for(circuits.size(), [&](std::size_t i) { out[i] = compress(circuits[i]); });
    return out;
}

}  // namespace dqpt

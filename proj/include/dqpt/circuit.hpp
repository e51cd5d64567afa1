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

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dqpt/errors.hpp"
#include "dqpt/linalg.hpp"
#include "json.hpp"

namespace dqpt {

/// RPhi is a rotation about the axis cos(phase) X + sin(phase) Y.
enum class GateKind { RX, RY, RZ, RPhi, VirtualZ, Hadamard, Phase, CZ, CNOT, U1q, U2q };

inline const char *gate_kind_name(GateKind k) {
    switch (k) {
        case GateKind::RX: return "RX";
        case GateKind::RY: return "RY";
        case GateKind::RZ: return "RZ";
        case GateKind::RPhi: return "RPhi";
        case GateKind::VirtualZ: return "VirtualZ";
        case GateKind::Hadamard: return "Hadamard";
        case GateKind::Phase: return "Phase";
        case GateKind::CZ: return "CZ";
        case GateKind::CNOT: return "CNOT";
        case GateKind::U1q: return "U1q";
        case GateKind::U2q: return "U2q";
    }
    return "?";
}

inline GateKind gate_kind_from_name(const std::string &s) {
    for (int k = 0; k <= static_cast<int>(GateKind::U2q); ++k) {
        if (s == gate_kind_name(static_cast<GateKind>(k))) return static_cast<GateKind>(k);
    }
    throw ConfigError("unknown gate kind '" + s + "'");
}

struct Gate {
    GateKind kind = GateKind::RZ;
    double angle = 0.0;
    double phase = 0.0;  // RPhi axis angle
    int target = 0;
    std::optional<int> control;
    ComplexMatrix matrix;  // U1q (2x2) or U2q (4x4, qubit 1 is the first factor)

    static Gate rx(int q, double a) { return {GateKind::RX, a, 0.0, q, {}, {}}; }
    static Gate ry(int q, double a) { return {GateKind::RY, a, 0.0, q, {}, {}}; }
    static Gate rz(int q, double a) { return {GateKind::RZ, a, 0.0, q, {}, {}}; }
    static Gate rphi(int q, double a, double phi) { return {GateKind::RPhi, a, phi, q, {}, {}}; }
    static Gate virtual_z(int q, double a) { return {GateKind::VirtualZ, a, 0.0, q, {}, {}}; }
    static Gate h(int q) { return {GateKind::Hadamard, 0.0, 0.0, q, {}, {}}; }
    static Gate p(int q, double a) { return {GateKind::Phase, a, 0.0, q, {}, {}}; }
    static Gate cz(int control, int target) { return {GateKind::CZ, 0.0, 0.0, target, control, {}}; }
    static Gate cnot(int control, int target) { return {GateKind::CNOT, 0.0, 0.0, target, control, {}}; }
    static Gate u1q(int q, const Matrix2 &m) { return {GateKind::U1q, 0.0, 0.0, q, {}, m}; }
    static Gate u2q(const Matrix4 &m) { return {GateKind::U2q, 0.0, 0.0, 0, {}, m}; }

    bool is_two_qubit() const {
        return kind == GateKind::CZ || kind == GateKind::CNOT || kind == GateKind::U2q;
    }
};

/// Ordered gate program. globalPhase multiplies the unitary by exp(i globalPhase).
struct Circuit {
    int nQubits = 2;
    std::vector<Gate> gates;
    double globalPhase = 0.0;

    Circuit &add(Gate g) {
        gates.push_back(std::move(g));
        return *this;
    }

    Circuit &append(const Circuit &other) {
        gates.insert(gates.end(), other.gates.begin(), other.gates.end());
        globalPhase += other.globalPhase;
        return *this;
    }

    std::size_t count(GateKind k) const {
        std::size_t n = 0;
        for (const auto &g : gates) n += g.kind == k;
        return n;
    }

    void validate() const {
        if (nQubits != 2) throw std::invalid_argument("only two-qubit circuits are supported");
        if (!std::isfinite(globalPhase)) throw std::invalid_argument("global phase must be finite");
        for (const auto &g : gates) {
            if (!std::isfinite(g.angle) || !std::isfinite(g.phase)) throw std::invalid_argument("gate angles must be finite");
            if (g.target < 0 || g.target >= nQubits) throw std::invalid_argument("gate target out of range");
            if (g.kind == GateKind::CZ || g.kind == GateKind::CNOT) {
                if (!g.control || *g.control < 0 || *g.control >= nQubits || *g.control == g.target) {
                    throw std::invalid_argument("controlled gate needs a distinct control qubit");
                }
            }
            if (g.kind == GateKind::U1q || g.kind == GateKind::U2q) {
                int d = g.kind == GateKind::U1q ? 2 : 4;
                if (g.matrix.rows() != d || g.matrix.cols() != d) throw std::invalid_argument("explicit gate has wrong shape");
                if (unitarity_defect(g.matrix) > 1e-10) throw std::invalid_argument("explicit gate is not unitary");
            }
        }
    }
};

// ---- Gate matrices ----

inline Matrix2 rotation(const Matrix2 &axis, double angle) {
    return std::cos(angle / 2) * Matrix2::Identity() - kI * std::sin(angle / 2) * axis;
}

inline Matrix2 rx_matrix(double a) { return rotation(pauli::x(), a); }
inline Matrix2 ry_matrix(double a) { return rotation(pauli::y(), a); }
inline Matrix2 rz_matrix(double a) { return rotation(pauli::z(), a); }
inline Matrix2 rphi_matrix(double a, double phi) {
    return rotation(std::cos(phi) * pauli::x() + std::sin(phi) * pauli::y(), a);
}

inline Matrix2 hadamard_matrix() {
    Matrix2 m;
    m << 1, 1, 1, -1;
    return m / std::sqrt(2.0);
}

inline Matrix2 phase_matrix(double a) {
    Matrix2 m = Matrix2::Identity();
    m(1, 1) = std::polar(1.0, a);
    return m;
}

/// Places a single-qubit operator; qubit 1 is the first tensor factor.
inline Matrix4 on_qubit(int q, const Matrix2 &u) {
    return q == 1 ? kron2(u, Matrix2::Identity()) : kron2(Matrix2::Identity(), u);
}

inline Matrix4 cnot_matrix(int control, int target) {
    Matrix2 p0 = Matrix2::Zero(), p1 = Matrix2::Zero();
    p0(0, 0) = 1;
    p1(1, 1) = 1;
    return on_qubit(control, p0) + on_qubit(control, p1) * on_qubit(target, pauli::x());
}

inline Matrix4 cz_matrix() {
    Matrix4 m = Matrix4::Identity();
    m(3, 3) = -1;
    return m;
}

inline Matrix2 single_qubit_matrix(const Gate &g) {
    switch (g.kind) {
        case GateKind::RX: return rx_matrix(g.angle);
        case GateKind::RY: return ry_matrix(g.angle);
        case GateKind::RZ:
        case GateKind::VirtualZ: return rz_matrix(g.angle);
        case GateKind::RPhi: return rphi_matrix(g.angle, g.phase);
        case GateKind::Hadamard: return hadamard_matrix();
        case GateKind::Phase: return phase_matrix(g.angle);
        case GateKind::U1q: return g.matrix;
        default: throw std::invalid_argument("not a single-qubit gate");
    }
}

inline Matrix4 gate_matrix(const Gate &g) {
    switch (g.kind) {
        case GateKind::CZ: return cz_matrix();
        case GateKind::CNOT: return cnot_matrix(*g.control, g.target);
        case GateKind::U2q: return g.matrix;
        default: return on_qubit(g.target, single_qubit_matrix(g));
    }
}

/// Product of gate matrices in program order, including the global phase.
inline Matrix4 circuit_unitary(const Circuit &c) {
    c.validate();
    Matrix4 u = Matrix4::Identity();
    for (const auto &g : c.gates) u = gate_matrix(g) * u;
    return std::polar(1.0, c.globalPhase) * u;
}

/// States after each gate; element 0 is the input.
inline std::vector<StateVector> simulate_circuit(const Circuit &c, const StateVector &psi0) {
    c.validate();
    if (psi0.size() != 4) throw std::invalid_argument("two-qubit state expected");
    if (std::abs(psi0.norm() - 1.0) > 1e-10) throw std::invalid_argument("input state is not normalized");
    std::vector<StateVector> out{psi0};
    out.reserve(c.gates.size() + 1);
    for (const auto &g : c.gates) out.push_back(gate_matrix(g) * out.back());
    if (!out.empty()) out.back() *= std::polar(1.0, c.globalPhase);
    return out;
}

/// States at step boundaries when `step` is repeated; element 0 is the input.
inline std::vector<StateVector> simulate_steps(const Circuit &step, const StateVector &psi0, int steps) {
    if (std::abs(psi0.norm() - 1.0) > 1e-10) throw std::invalid_argument("input state is not normalized");
    Matrix4 u = circuit_unitary(step);
    std::vector<StateVector> out{psi0};
    for (int k = 0; k < steps; ++k) out.push_back(u * out.back());
    return out;
}

// ---- Pauli decomposition ----

/// Coefficients c_kl = Tr(G_kl H) with G_kl = P_k x P_l / 2, labels k, l in {1, X, Y, Z}.
struct PauliDecomposition {
    std::array<double, 16> coefficients{};

    double coefficient(int k, int l) const { return coefficients[4 * k + l]; }
    /// Multiplier of P_k x P_l in H.
    double term(int k, int l) const { return coefficient(k, l) / 2.0; }

    Matrix4 reconstruct() const {
        Matrix4 h = Matrix4::Zero();
        for (int k = 0; k < 4; ++k) {
            for (int l = 0; l < 4; ++l) h += term(k, l) * kron2(pauli::by_index(k), pauli::by_index(l));
        }
        return h;
    }
};

inline PauliDecomposition pauli_decompose(const ComplexMatrix &h) {
    if (h.rows() != 4 || h.cols() != 4) throw std::invalid_argument("Pauli decomposition needs a 4x4 matrix");
    if (hermiticity_defect(h) > 1e-12 * std::max(1.0, max_abs(h))) throw DomainError("matrix is not Hermitian");
    PauliDecomposition d;
    for (int k = 0; k < 4; ++k) {
        for (int l = 0; l < 4; ++l) {
            Matrix4 g = kron2(pauli::by_index(k), pauli::by_index(l)) / 2.0;
            d.coefficients[4 * k + l] = (g * h).trace().real();
        }
    }
    return d;
}

// ---- Trotter step ----

enum class TrotterOrder { First, Second };

/// exp(-i dt [(xi/4)(XX + YY) - (pi/12) ZZ]) from CNOT, Hadamard, phase and CZ gates.
inline Circuit exchange_block(double xi, double dt) {
    Circuit c;
    c.add(Gate::cnot(1, 0))
        .add(Gate::h(1))
        .add(Gate::p(1, xi * dt / 2))
        .add(Gate::h(1))
        .add(Gate::cz(1, 0))
        .add(Gate::h(1))
        .add(Gate::p(1, -xi * dt / 2))
        .add(Gate::h(1))
        .add(Gate::cz(1, 0))
        .add(Gate::rz(0, -kPi * dt / 6))
        .add(Gate::cnot(1, 0));
    return c;
}

/// One Trotter step of exp(-i H+ dt) for the even-parity block in rescaled couplings.
///
/// The single-qubit part -(pi/4) Z1 + (xi/sqrt2) 1X - (pi/12 + mu) 1Z is split into Z and X
/// factors. Second order wraps the exchange block symmetrically. The identity term is
/// recorded in globalPhase.
inline Circuit trotter_step(double xi, double mu, double dt, TrotterOrder order = TrotterOrder::Second) {
    if (!(dt >= 0.0)) throw std::invalid_argument("time step must be non-negative");
    const double z1 = -kPi / 2 * dt;                // angle of RZ on qubit 1
    const double x0 = std::sqrt(2.0) * xi * dt;     // angle of RX on qubit 0
    const double z0 = -2.0 * (kPi / 12 + mu) * dt;  // angle of RZ on qubit 0
    Circuit c;
    if (order == TrotterOrder::First) {
        c.append(exchange_block(xi, dt));
        c.add(Gate::rz(1, z1)).add(Gate::rz(0, z0)).add(Gate::rx(0, x0));
    } else {
        c.add(Gate::rz(1, z1 / 2)).add(Gate::rz(0, z0 / 2)).add(Gate::rx(0, x0 / 2));
        c.append(exchange_block(xi, dt));
        c.add(Gate::rx(0, x0 / 2)).add(Gate::rz(0, z0 / 2)).add(Gate::rz(1, z1 / 2));
    }
    c.globalPhase = -5.0 * kPi / 12 * dt;
    return c;
}

/// `steps` copies of one Trotter step.
inline Circuit trotter_circuit(double xi, double mu, double dt, int steps, TrotterOrder order = TrotterOrder::Second) {
    Circuit step = trotter_step(xi, mu, dt, order);
    Circuit c;
    for (int k = 0; k < steps; ++k) c.append(step);
    return c;
}

// ---- Single-qubit Euler angles ----

/// u = exp(i alpha) Rz(beta) Ry(gamma) Rz(delta).
struct EulerZYZ {
    double alpha = 0, beta = 0, gamma = 0, delta = 0;
};

inline EulerZYZ euler_zyz(const Matrix2 &u) {
    EulerZYZ e;
    Complex det = u.determinant();
    e.alpha = std::arg(det) / 2;
    Matrix2 v = u * std::polar(1.0, -e.alpha);
    Complex a = v(0, 0), b = v(1, 0);
    e.gamma = 2 * std::atan2(std::abs(b), std::abs(a));
    // When a or b vanishes only one combination of beta and delta is fixed.
    double pa = std::abs(a) > 1e-14 ? std::arg(a) : 0.0;
    double pb = std::abs(b) > 1e-14 ? std::arg(b) : 0.0;
    e.beta = pb - pa;
    e.delta = -pa - pb;
    // Remove any residual sign from the branch of det^(1/2).
    Matrix2 r = rz_matrix(e.beta) * ry_matrix(e.gamma) * rz_matrix(e.delta);
    Complex t = (r.adjoint() * v).trace();
    if (t.real() < 0) e.alpha += kPi;
    return e;
}

// ---- Virtual Z ----

/// Rewrites a circuit so every Z rotation becomes a frame update pushed to the end.
/// Output contains RPhi, CZ and trailing VirtualZ gates; the unitary is preserved exactly.
inline Circuit virtualize_z(const Circuit &c) {
    c.validate();
    Circuit out;
    out.globalPhase = c.globalPhase;
    std::array<double, 2> frame{0.0, 0.0};

    auto xy = [&](int q, double angle, double phi) {
        if (angle != 0.0) out.add(Gate::rphi(q, angle, phi - frame[q]));
    };
    auto z = [&](int q, double angle) { frame[q] += angle; };
    // H = Z . RY(-pi/2), and Z = i RZ(pi).
    auto hadamard = [&](int q) {
        xy(q, -kPi / 2, kPi / 2);
        z(q, kPi);
        out.globalPhase += kPi / 2;
    };

    for (const auto &g : c.gates) {
        switch (g.kind) {
            case GateKind::RZ:
            case GateKind::VirtualZ: z(g.target, g.angle); break;
            case GateKind::Phase:
                z(g.target, g.angle);
                out.globalPhase += g.angle / 2;
                break;
            case GateKind::RX: xy(g.target, g.angle, 0.0); break;
            case GateKind::RY: xy(g.target, g.angle, kPi / 2); break;
            case GateKind::RPhi: xy(g.target, g.angle, g.phase); break;
            case GateKind::Hadamard: hadamard(g.target); break;
            case GateKind::CZ: out.add(g); break;
            case GateKind::CNOT:
                hadamard(g.target);
                out.add(Gate::cz(*g.control, g.target));
                hadamard(g.target);
                break;
            case GateKind::U1q: {
                EulerZYZ e = euler_zyz(g.matrix);
                z(g.target, e.delta);
                xy(g.target, e.gamma, kPi / 2);
                z(g.target, e.beta);
                out.globalPhase += e.alpha;
                break;
            }
            case GateKind::U2q: throw std::invalid_argument("virtualize_z needs U2q gates compressed first");
        }
    }
    for (int q = 1; q >= 0; --q) {
        if (frame[q] != 0.0) out.add(Gate::virtual_z(q, frame[q]));
    }
    return out;
}

// ---- JSON ----

inline constexpr int kCircuitSchemaVersion = 1;

inline nlohmann::json to_json(const Circuit &c) {
    nlohmann::json gates = nlohmann::json::array();
    for (const auto &g : c.gates) {
        nlohmann::json j{{"kind", gate_kind_name(g.kind)}, {"angle", g.angle}, {"target", g.target}};
        if (g.kind == GateKind::RPhi) j["phase"] = g.phase;
        if (g.control) j["control"] = *g.control;
        if (g.matrix.size() > 0) {
            nlohmann::json rows = nlohmann::json::array();
            for (Eigen::Index r = 0; r < g.matrix.rows(); ++r) {
                nlohmann::json row = nlohmann::json::array();
                for (Eigen::Index k = 0; k < g.matrix.cols(); ++k) row.push_back({g.matrix(r, k).real(), g.matrix(r, k).imag()});
                rows.push_back(row);
            }
            j["matrix"] = rows;
        }
        gates.push_back(j);
    }
    return {{"schemaVersion", kCircuitSchemaVersion}, {"nQubits", c.nQubits}, {"globalPhase", c.globalPhase}, {"gates", gates}};
}

inline Circuit circuit_from_json(const nlohmann::json &j) {
    if (j.value("schemaVersion", 0) != kCircuitSchemaVersion) throw ConfigError("unsupported circuit schema version");
    Circuit c;
    c.nQubits = j.at("nQubits").get<int>();
    c.globalPhase = j.value("globalPhase", 0.0);
    for (const auto &jg : j.at("gates")) {
        Gate g;
        g.kind = gate_kind_from_name(jg.at("kind").get<std::string>());
        g.angle = jg.value("angle", 0.0);
        g.phase = jg.value("phase", 0.0);
        g.target = jg.at("target").get<int>();
        if (jg.contains("control")) g.control = jg.at("control").get<int>();
        if (jg.contains("matrix")) {
            const auto &rows = jg.at("matrix");
            g.matrix.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
            for (std::size_t r = 0; r < rows.size(); ++r) {
                for (std::size_t k = 0; k < rows[r].size(); ++k) {
                    g.matrix(r, k) = {rows[r][k][0].get<double>(), rows[r][k][1].get<double>()};
                }
            }
        }
        c.gates.push_back(std::move(g));
    }
    c.validate();
    return c;
}

}  // namespace dqpt

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
#include <functional>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "dqpt/circuit.hpp"
#include "dqpt/errors.hpp"
#include "dqpt/linalg.hpp"
#include "json.hpp"

namespace dqpt {

// Atom levels; the computational qubit is {g -> 0, h -> 1}.
enum Level : int { kG = 0, kH = 1, kR = 2 };
inline constexpr int kAtomDim = 9;

/// Index of the two-atom level pair; atom 1 is the most significant factor.
inline int atom_index(int level1, int level0) { return 3 * level1 + level0; }

enum class Channel { Digital, Rydberg };

inline const char *channel_name(Channel c) { return c == Channel::Digital ? "digital" : "rydberg"; }

inline Channel channel_from_name(const std::string &s) {
    if (s == "digital") return Channel::Digital;
    if (s == "rydberg") return Channel::Rydberg;
    throw ConfigError("unknown channel '" + s + "'");
}

/// Two-atom register and laser limits. Lengths in um, times in us, rates in rad/us.
struct DeviceConfig {
    std::vector<std::array<double, 2>> positions{{0.0, 0.0}, {4.0, 0.0}};
    double omegaMax = 62.831;
    double c6 = 62.831 * std::pow(8.7, 6);  // blockade radius 8.7 um at omegaMax
    double minSpacing = 4.0;
    double resolution = 0.001;
    double czPiDuration = 0.121;
    double czTwoPiDuration = 0.242;
    double lambdaEff = 2.0 * kPi / 8.7;  // effective Doppler wavelength, um
    double atomMass = 1.45e-25;           // kg

    double distance() const {
        double dx = positions[1][0] - positions[0][0], dy = positions[1][1] - positions[0][1];
        return std::hypot(dx, dy);
    }

    double interaction() const { return c6 / std::pow(distance(), 6); }

    void validate() const {
        if (positions.size() != 2) throw ConfigError("device must hold exactly two atoms");
        if (!(omegaMax > 0)) throw ConfigError("omegaMax must be positive");
        if (!(c6 > 0)) throw ConfigError("c6 must be positive");
        if (!(resolution > 0)) throw ConfigError("resolution must be positive");
        if (distance() < minSpacing - 1e-12) throw ConfigError("atoms are closer than minSpacing");
        if (!(czPiDuration > 0) || !(czTwoPiDuration > 0)) throw ConfigError("CZ pulse durations must be positive");
        if (!(lambdaEff > 0) || !(atomMass > 0)) throw ConfigError("Doppler parameters must be positive");
    }
};

inline nlohmann::json to_json(const DeviceConfig &d) {
    nlohmann::json pos = nlohmann::json::array();
    for (const auto &p : d.positions) pos.push_back({p[0], p[1]});
    return {{"positions", pos},           {"omegaMax", d.omegaMax},          {"c6", d.c6},
            {"minSpacing", d.minSpacing}, {"resolution", d.resolution},      {"czPiDuration", d.czPiDuration},
            {"czTwoPiDuration", d.czTwoPiDuration}, {"lambdaEff", d.lambdaEff}, {"atomMass", d.atomMass}};
}

inline DeviceConfig device_from_json(const nlohmann::json &j) {
    DeviceConfig d;
    if (j.contains("positions")) {
        d.positions.clear();
        for (const auto &p : j.at("positions")) d.positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    d.omegaMax = j.value("omegaMax", d.omegaMax);
    d.c6 = j.value("c6", d.c6);
    d.minSpacing = j.value("minSpacing", d.minSpacing);
    d.resolution = j.value("resolution", d.resolution);
    d.czPiDuration = j.value("czPiDuration", d.czPiDuration);
    d.czTwoPiDuration = j.value("czTwoPiDuration", d.czTwoPiDuration);
    d.lambdaEff = j.value("lambdaEff", d.lambdaEff);
    d.atomMass = j.value("atomMass", d.atomMass);
    d.validate();
    return d;
}

/// R_b = (C6 / Omega)^(1/6).
inline double blockade_radius(double omega, double c6) {
    if (!(omega > 0)) throw DomainError("Rabi frequency must be positive");
    return std::pow(c6 / omega, 1.0 / 6.0);
}

inline double blockade_radius(double omega, const DeviceConfig &dev = {}) { return blockade_radius(omega, dev.c6); }

// ---- Waveforms ----

inline std::size_t sample_count(double duration, double resolution) {
    double n = duration / resolution;
    auto m = static_cast<std::size_t>(std::llround(n));
    if (std::abs(n - static_cast<double>(m)) > 1e-6 || m == 0) {
        throw std::invalid_argument("pulse duration must be a positive multiple of the resolution");
    }
    return m;
}

/// Blackman window sampled every `resolution`, scaled so sum(samples) * resolution = area.
inline std::vector<double> blackman_waveform(double area, double duration, double resolution) {
    if (!(duration > 0)) throw std::invalid_argument("duration must be positive");
    std::size_t m = sample_count(duration, resolution);
    std::vector<double> w(m, 1.0);
    if (m > 2) {
        for (std::size_t i = 0; i < m; ++i) {
            double x = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(m - 1);
            w[i] = 0.42 - 0.5 * std::cos(x) + 0.08 * std::cos(2 * x);
        }
    }
    double sum = 0;
    for (double v : w) sum += v;
    for (double &v : w) v *= area / (sum * resolution);
    return w;
}

inline void check_peak(const std::vector<double> &wave, double omegaMax) {
    for (double v : wave) {
        if (v > omegaMax * (1 + 1e-12)) throw DomainError("pulse peak exceeds omegaMax; lengthen the pulse");
    }
}

/// Shortest Blackman pulse of the given area whose peak stays within omegaMax.
inline double minimal_blackman_duration(double area, double omegaMax, double resolution) {
    auto m = static_cast<long>(std::ceil(std::abs(area) / (0.42 * omegaMax) / resolution - 1e-9));
    m = std::max(m, 3L);
    for (;; ++m) {
        auto w = blackman_waveform(std::abs(area), m * resolution, resolution);
        if (*std::max_element(w.begin(), w.end()) <= omegaMax) return m * resolution;
    }
}

// ---- Sequences ----

/// Constant-phase pulse on one channel of one atom.
struct Pulse {
    Channel channel = Channel::Digital;
    int target = 0;
    std::vector<double> amplitude;  // Omega(t) >= 0
    std::vector<double> detuning;   // delta(t)
    double phase = 0.0;
    double duration = 0.0;

    double area(double resolution) const {
        double s = 0;
        for (double v : amplitude) s += v;
        return s * resolution;
    }
};

/// Digital-channel frame update; shifts the phase of later digital pulses on `target`.
struct FrameShift {
    int target = 0;
    double angle = 0.0;
};

struct Measure {};

using SequenceItem = std::variant<Pulse, FrameShift, Measure>;

struct PulseSequence {
    std::vector<SequenceItem> items;
    double resolution = 0.001;

    std::size_t pulse_count() const {
        std::size_t n = 0;
        for (const auto &it : items) n += std::holds_alternative<Pulse>(it);
        return n;
    }

    double duration(std::optional<Channel> only = {}) const {
        double t = 0;
        for (const auto &it : items) {
            if (const auto *p = std::get_if<Pulse>(&it); p && (!only || p->channel == *only)) t += p->duration;
        }
        return t;
    }

    /// Net frame per atom after the whole sequence.
    std::array<double, 2> final_frames() const {
        std::array<double, 2> f{0, 0};
        for (const auto &it : items) {
            if (const auto *s = std::get_if<FrameShift>(&it)) f[s->target] += s->angle;
        }
        return f;
    }
};

inline nlohmann::json to_json(const PulseSequence &seq) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto &it : seq.items) {
        if (const auto *p = std::get_if<Pulse>(&it)) {
            items.push_back({{"type", "pulse"},        {"channel", channel_name(p->channel)},
                             {"target", p->target},    {"amplitude", p->amplitude},
                             {"detuning", p->detuning}, {"phase", p->phase},
                             {"duration", p->duration}});
        } else if (const auto *s = std::get_if<FrameShift>(&it)) {
            items.push_back({{"type", "frameShift"}, {"target", s->target}, {"angle", s->angle}});
        } else {
            items.push_back({{"type", "measure"}});
        }
    }
    return {{"resolution", seq.resolution}, {"items", items}};
}

inline PulseSequence pulse_sequence_from_json(const nlohmann::json &j) {
    PulseSequence seq;
    seq.resolution = j.at("resolution").get<double>();
    for (const auto &it : j.at("items")) {
        std::string type = it.at("type").get<std::string>();
        if (type == "pulse") {
            Pulse p;
            p.channel = channel_from_name(it.at("channel").get<std::string>());
            p.target = it.at("target").get<int>();
            p.amplitude = it.at("amplitude").get<std::vector<double>>();
            p.detuning = it.at("detuning").get<std::vector<double>>();
            p.phase = it.at("phase").get<double>();
            p.duration = it.at("duration").get<double>();
            seq.items.emplace_back(std::move(p));
        } else if (type == "frameShift") {
            seq.items.emplace_back(FrameShift{it.at("target").get<int>(), it.at("angle").get<double>()});
        } else if (type == "measure") {
            seq.items.emplace_back(Measure{});
        } else {
            throw ConfigError("unknown sequence item '" + type + "'");
        }
    }
    return seq;
}

// ---- States ----

/// Embeds a two-qubit state (qubit 1 first) into the two-atom level space.
inline StateVector atoms_from_qubits(const StateVector &q) {
    StateVector a = StateVector::Zero(kAtomDim);
    for (int b1 = 0; b1 < 2; ++b1) {
        for (int b0 = 0; b0 < 2; ++b0) a(atom_index(b1, b0)) = q(2 * b1 + b0);
    }
    return a;
}

/// Computational block of a two-atom state.
inline StateVector qubits_from_atoms(const StateVector &a) {
    StateVector q(4);
    for (int b1 = 0; b1 < 2; ++b1) {
        for (int b0 = 0; b0 < 2; ++b0) q(2 * b1 + b0) = a(atom_index(b1, b0));
    }
    return q;
}

/// Applies the virtual frames, Rz(F) on the g/h subspace of each atom.
inline StateVector to_logical_frame(StateVector a, const std::array<double, 2> &frames) {
    for (int l1 = 0; l1 < 3; ++l1) {
        for (int l0 = 0; l0 < 3; ++l0) {
            double phase = 0;
            if (l1 != kR) phase += (l1 == kG ? -0.5 : 0.5) * frames[1];
            if (l0 != kR) phase += (l0 == kG ? -0.5 : 0.5) * frames[0];
            a(atom_index(l1, l0)) *= std::polar(1.0, phase);
        }
    }
    return a;
}

/// Probability of reading bit 1 per atom: h and r both count as 1.
inline std::array<double, 4> readout_probabilities(const StateVector &a) {
    std::array<double, 4> p{};
    for (int l1 = 0; l1 < 3; ++l1) {
        for (int l0 = 0; l0 < 3; ++l0) {
            int b1 = l1 != kG, b0 = l0 != kG;
            p[2 * b1 + b0] += std::norm(a(atom_index(l1, l0)));
        }
    }
    return p;
}

// ---- Compilation ----

/// Frame corrections that turn the raw blockade sequence into CZ up to global phase.
struct CzCalibration {
    std::array<double, 2> frame{0.0, 0.0};  // per atom
    double residual = 0.0;                   // conditional-phase error after correction
};

namespace detail {

inline Pulse make_pulse(Channel ch, int target, double area, double duration, double phase, const DeviceConfig &dev) {
    Pulse p;
    p.channel = ch;
    p.target = target;
    p.duration = duration;
    p.amplitude = blackman_waveform(area, duration, dev.resolution);
    check_peak(p.amplitude, dev.omegaMax);
    p.detuning.assign(p.amplitude.size(), 0.0);
    p.phase = phase;
    return p;
}

inline std::vector<Pulse> cz_pulses(int control, int target, const DeviceConfig &dev) {
    return {make_pulse(Channel::Rydberg, control, kPi, dev.czPiDuration, 0.0, dev),
            make_pulse(Channel::Rydberg, target, 2 * kPi, dev.czTwoPiDuration, 0.0, dev),
            make_pulse(Channel::Rydberg, control, kPi, dev.czPiDuration, 0.0, dev)};
}

}  // namespace detail

struct NoiseRealization;

inline std::vector<StateVector> simulate_sequence(const PulseSequence &seq, const DeviceConfig &dev,
                                                  const StateVector &psi0, const NoiseRealization *noise = nullptr,
                                                  const std::function<void(const StateVector &)> &observer = {});

/// Measures the single-qubit phases left by the blockade sequence on a noiseless device.
inline CzCalibration calibrate_cz(const DeviceConfig &dev) {
    dev.validate();
    PulseSequence seq;
    seq.resolution = dev.resolution;
    for (auto &p : detail::cz_pulses(1, 0, dev)) seq.items.emplace_back(std::move(p));
    std::array<double, 4> phase{};
    for (int k = 0; k < 4; ++k) {
        StateVector a = StateVector::Zero(kAtomDim);
        a(atom_index(k / 2, k % 2)) = 1.0;
        phase[k] = std::arg(simulate_sequence(seq, dev, a).back()(atom_index(k / 2, k % 2)));
    }
    CzCalibration cal;
    // Rz(z) raises the phase of bit 1 relative to bit 0 by z.
    cal.frame[0] = -(phase[1] - phase[0]);
    cal.frame[1] = -(phase[2] - phase[0]);
    cal.residual = std::remainder(phase[3] - phase[2] - phase[1] + phase[0] - kPi, 2 * kPi);
    return cal;
}

/// Lowers a circuit to pulses. Every Z rotation becomes a FrameShift placed where it occurs;
/// XY rotations become one digital pulse whose phase is set from the logical axis.
/// A digital pulse with phase p rotates about cos(p + F) X - sin(p + F) Y, F the running frame.
inline PulseSequence compile_to_pulses(const Circuit &c, const DeviceConfig &dev,
                                       const std::optional<CzCalibration> &calibration = {}) {
    c.validate();
    dev.validate();
    CzCalibration cal = calibration ? *calibration : calibrate_cz(dev);
    PulseSequence seq;
    seq.resolution = dev.resolution;

    auto frame = [&](int q, double angle) {
        if (std::abs(std::remainder(angle, 4 * kPi)) > 1e-15) seq.items.emplace_back(FrameShift{q, angle});
    };
    auto rotate = [&](int q, double angle, double axis) {
        angle = std::remainder(angle, 2 * kPi);  // drops a global sign only
        if (angle < 0) angle = -angle, axis += kPi;
        if (angle < 1e-12) return;
        double duration = minimal_blackman_duration(angle, dev.omegaMax, dev.resolution);
        seq.items.emplace_back(detail::make_pulse(Channel::Digital, q, angle, duration, -axis, dev));
    };
    // H = Z . RY(-pi/2): a Y-axis pulse followed by a virtual Z.
    auto hadamard = [&](int q) {
        rotate(q, -kPi / 2, kPi / 2);
        frame(q, kPi);
    };
    auto cz = [&](int control, int target) {
        for (auto &p : detail::cz_pulses(control, target, dev)) seq.items.emplace_back(std::move(p));
        // Calibration ran with atom 1 as control.
        frame(control, cal.frame[1]);
        frame(target, cal.frame[0]);
    };

    for (const auto &g : c.gates) {
        switch (g.kind) {
            case GateKind::RZ:
            case GateKind::VirtualZ:
            case GateKind::Phase: frame(g.target, g.angle); break;
            case GateKind::RX: rotate(g.target, g.angle, 0.0); break;
            case GateKind::RY: rotate(g.target, g.angle, kPi / 2); break;
            case GateKind::RPhi: rotate(g.target, g.angle, g.phase); break;
            case GateKind::Hadamard: hadamard(g.target); break;
            case GateKind::CZ: cz(*g.control, g.target); break;
            case GateKind::CNOT:
                hadamard(g.target);
                cz(*g.control, g.target);
                hadamard(g.target);
                break;
            case GateKind::U1q: {
                EulerZYZ e = euler_zyz(g.matrix);
                frame(g.target, e.delta);
                rotate(g.target, e.gamma, kPi / 2);
                frame(g.target, e.beta);
                break;
            }
            case GateKind::U2q: throw std::invalid_argument("U2q has no pulse template; compress the circuit first");
        }
    }
    seq.items.emplace_back(Measure{});
    return seq;
}

// ---- Simulation ----

/// One sampled noise draw: preparation, Doppler shift per atom, amplitude factor per pulse.
struct NoiseRealization {
    std::array<bool, 2> atomPrepared{true, true};
    std::array<double, 2> dopplerShift{0.0, 0.0};
    std::vector<double> ampFactor;
};

namespace detail {

/// exp(-i dt [[a, b], [conj(b), d]]) with a, d real.
inline Matrix2 expm_2x2(double a, Complex b, double d, double dt) {
    double h0 = 0.5 * (a + d), hz = 0.5 * (a - d);
    double r = std::sqrt(hz * hz + std::norm(b));
    double c = std::cos(r * dt), s = r > 0 ? std::sin(r * dt) / r : dt;
    Complex ph = std::polar(1.0, -h0 * dt);
    Matrix2 u;
    u(0, 0) = ph * Complex(c, -s * hz);
    u(1, 1) = ph * Complex(c, s * hz);
    u(0, 1) = ph * Complex(0, -s) * b;
    u(1, 0) = ph * Complex(0, -s) * std::conj(b);
    return u;
}

}  // namespace detail

/// Integrates the pulse sequence with a piecewise-constant Hamiltonian per sample.
///
/// A pulse drives (Omega/2)(X cos phi - Y sin phi) - (delta/2) Z on the g<->h (digital) or
/// g<->r (rydberg) transition of its target, g being the Z = +1 level, plus C6/r^6 on |rr>.
/// Returns the state after every item; element 0 is the input.
inline std::vector<StateVector> simulate_sequence(const PulseSequence &seq, const DeviceConfig &dev,
                                                  const StateVector &psi0, const NoiseRealization *noise,
                                                  const std::function<void(const StateVector &)> &observer) {
    if (psi0.size() != kAtomDim) throw std::invalid_argument("two-atom state expected");
    if (std::abs(psi0.norm() - 1.0) > 1e-8) throw std::invalid_argument("input state is not normalized");
    if (std::abs(seq.resolution - dev.resolution) > 1e-15) throw std::invalid_argument("sequence resolution does not match device");
    const double v = dev.interaction();
    const double dt = seq.resolution;

    StateVector psi = psi0;
    if (noise) {
        // An unprepared atom is held in g; keep the other atom's dominant slice.
        for (int a = 0; a < 2; ++a) {
            if (noise->atomPrepared[a]) continue;
            StateVector best = StateVector::Zero(3);
            for (int l = 0; l < 3; ++l) {
                StateVector slice(3);
                for (int o = 0; o < 3; ++o) slice(o) = psi(a == 1 ? atom_index(l, o) : atom_index(o, l));
                if (slice.norm() > best.norm()) best = slice;
            }
            best.normalize();
            psi.setZero();
            for (int o = 0; o < 3; ++o) psi(a == 1 ? atom_index(kG, o) : atom_index(o, kG)) = best(o);
        }
    }

    std::vector<StateVector> out{psi};
    out.reserve(seq.items.size() + 1);
    std::array<double, 2> frames{0.0, 0.0};
    std::size_t pulse_index = 0;
    for (const auto &item : seq.items) {
        if (const auto *s = std::get_if<FrameShift>(&item)) {
            frames[s->target] += s->angle;
        } else if (const auto *p = std::get_if<Pulse>(&item)) {
            std::size_t idx = pulse_index++;
            if (p->amplitude.size() != sample_count(p->duration, dt) || p->detuning.size() != p->amplitude.size()) {
                throw std::invalid_argument("waveform sample count does not match duration / resolution");
            }
            if (p->target < 0 || p->target > 1) throw std::invalid_argument("pulse target out of range");
            bool skip = noise && !noise->atomPrepared[p->target];
            if (!skip) {
                double amp_scale = noise && idx < noise->ampFactor.size() ? noise->ampFactor[idx] : 1.0;
                double doppler = noise ? noise->dopplerShift[p->target] : 0.0;
                double phi = p->phase + (p->channel == Channel::Digital ? frames[p->target] : 0.0);
                Complex e_phi = std::polar(1.0, phi);
                int upper = p->channel == Channel::Digital ? kH : kR;
                int idle = p->channel == Channel::Digital ? kR : kH;
                int t = p->target;
                for (std::size_t k = 0; k < p->amplitude.size(); ++k) {
                    double om = p->amplitude[k] * amp_scale;
                    double de = p->detuning[k] + doppler;
                    for (int spectator = 0; spectator < 3; ++spectator) {
                        auto at = [&](int level) {
                            return t == 0 ? atom_index(spectator, level) : atom_index(level, spectator);
                        };
                        double shift_upper = (upper == kR && spectator == kR) ? v : 0.0;
                        Matrix2 u = detail::expm_2x2(-de / 2, 0.5 * om * e_phi, de / 2 + shift_upper, dt);
                        Complex xg = psi(at(kG)), xu = psi(at(upper));
                        psi(at(kG)) = u(0, 0) * xg + u(0, 1) * xu;
                        psi(at(upper)) = u(1, 0) * xg + u(1, 1) * xu;
                        if (idle == kR && spectator == kR) psi(at(kR)) *= std::polar(1.0, -v * dt);
                    }
                    if (observer) observer(psi);
                }
            }
        }
        out.push_back(psi);
    }
    return out;
}

// ---- Measurement ----

/// Shot counts indexed by 2 * bit(atom 1) + bit(atom 0).
using Counts = std::array<long, 4>;

inline Counts sample_counts(const std::array<double, 4> &p, long shots, std::mt19937_64 &rng) {
    if (shots < 1) throw std::invalid_argument("shots must be at least 1");
    std::discrete_distribution<int> d(p.begin(), p.end());
    Counts c{};
    for (long s = 0; s < shots; ++s) ++c[d(rng)];
    return c;
}

inline Counts measure(const StateVector &state, long shots, std::mt19937_64 &rng) {
    return sample_counts(readout_probabilities(state), shots, rng);
}

}  // namespace dqpt

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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "dqpt/errors.hpp"
#include "dqpt/linalg.hpp"
#include "dqpt/model.hpp"
#include "dqpt/parallel.hpp"

namespace dqpt {

inline constexpr double kEchoFloor = 1e-15;
inline constexpr double kCriticalMass = 0.7071067811865476;  // |m_c| / J

/// Diagonalizes a Hermitian matrix once and evolves states for arbitrary times.
class Propagator {
   public:
    explicit Propagator(const ComplexMatrix &h) {
        double scale = std::max(1.0, max_abs(h));
        if (h.rows() != h.cols()) throw std::invalid_argument("Hamiltonian must be square");
        if (hermiticity_defect(h) > 1e-12 * scale) throw DomainError("Hamiltonian is not Hermitian");
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
        energies_ = es.eigenvalues();
        vectors_ = es.eigenvectors();
    }

    Eigen::Index dim() const { return energies_.size(); }
    const Eigen::VectorXd &energies() const { return energies_; }

    StateVector evolve(const StateVector &psi0, double t) const {
        check_state(psi0);
        StateVector c = vectors_.adjoint() * psi0;
        for (Eigen::Index j = 0; j < c.size(); ++j) c(j) *= std::polar(1.0, -energies_(j) * t);
        return vectors_ * c;
    }

    ComplexMatrix unitary(double t) const {
        Eigen::VectorXcd phases(dim());
        for (Eigen::Index j = 0; j < dim(); ++j) phases(j) = std::polar(1.0, -energies_(j) * t);
        return vectors_ * phases.asDiagonal() * vectors_.adjoint();
    }

    /// Spectral weights |<v_j|psi0>|^2 for fast amplitude evaluation.
    Eigen::VectorXd weights(const StateVector &psi0) const {
        check_state(psi0);
        return (vectors_.adjoint() * psi0).cwiseAbs2();
    }

    void check_state(const StateVector &psi0) const {
        if (psi0.size() != dim()) throw std::invalid_argument("state dimension does not match Hamiltonian");
        if (std::abs(psi0.norm() - 1.0) > 1e-10) throw std::invalid_argument("initial state is not normalized");
    }

   private:
    Eigen::VectorXd energies_;
    ComplexMatrix vectors_;
};

/// Loschmidt amplitude of a fixed initial state, sum_j w_j exp(-i E_j t).
class EchoFunction {
   public:
    EchoFunction(const Propagator &p, const StateVector &psi0) : energies_(p.energies()), weights_(p.weights(psi0)) {}

    Complex amplitude(double t) const {
        Complex g = 0;
        for (Eigen::Index j = 0; j < energies_.size(); ++j) g += weights_(j) * std::polar(1.0, -energies_(j) * t);
        return g;
    }

    double echo(double t) const { return std::min(1.0, std::norm(amplitude(t))); }

   private:
    Eigen::VectorXd energies_;
    Eigen::VectorXd weights_;
};

inline StateVector evolve_exact(const ComplexMatrix &h, const StateVector &psi0, double t) {
    return Propagator(h).evolve(psi0, t);
}

inline Complex loschmidt_amplitude(const ComplexMatrix &h, const StateVector &psi0, double t) {
    return psi0.dot(evolve_exact(h, psi0, t));
}

/// Exact quench: reported times are multiplied by timeScale to get Hamiltonian time.
struct QuenchSpec {
    StateVector initialState;
    ComplexMatrix hamiltonian;
    std::vector<double> timeGrid;
    double timeScale = 1.0;

    void validate() const {
        if (std::abs(initialState.norm() - 1.0) > 1e-12) throw std::invalid_argument("initial state is not normalized");
        if (timeGrid.empty() || timeGrid.front() != 0.0) throw std::invalid_argument("time grid must start at 0");
        for (std::size_t i = 1; i < timeGrid.size(); ++i) {
            if (!(timeGrid[i] > timeGrid[i - 1])) throw std::invalid_argument("time grid must be strictly increasing");
        }
    }
};

struct LoschmidtSeries {
    std::vector<double> times;
    std::vector<Complex> amplitude;
    std::vector<double> echo;
    std::vector<double> rate;
    std::vector<bool> clamped;
    int dof = 2;
};

/// Fills rate = -(1/N) ln(echo), flooring echo at kEchoFloor and flagging clamped samples.
inline LoschmidtSeries rate_function(LoschmidtSeries s) {
    if (s.dof < 1) throw std::invalid_argument("rate normalization needs N >= 1");
    s.rate.resize(s.echo.size());
    s.clamped.resize(s.echo.size());
    for (std::size_t i = 0; i < s.echo.size(); ++i) {
        s.clamped[i] = s.echo[i] < kEchoFloor;
        s.rate[i] = -std::log(std::max(s.echo[i], kEchoFloor)) / s.dof;
    }
    return s;
}

inline LoschmidtSeries loschmidt_series(const QuenchSpec &spec, int dof = 2) {
    spec.validate();
    Propagator p(spec.hamiltonian);
    EchoFunction f(p, spec.initialState);
    LoschmidtSeries s;
    s.dof = dof;
    s.times = spec.timeGrid;
    for (double t : spec.timeGrid) {
        Complex g = f.amplitude(t * spec.timeScale);
        s.amplitude.push_back(g);
        s.echo.push_back(std::min(1.0, std::norm(g)));
    }
    return rate_function(std::move(s));
}

/// Basis populations |<e_i|psi(t)>|^2; one row per grid time.
inline Eigen::MatrixXd population_series(const QuenchSpec &spec) {
    spec.validate();
    Propagator p(spec.hamiltonian);
    Eigen::MatrixXd out(spec.timeGrid.size(), p.dim());
    for (std::size_t i = 0; i < spec.timeGrid.size(); ++i) {
        out.row(i) = p.evolve(spec.initialState, spec.timeGrid[i] * spec.timeScale).cwiseAbs2().transpose();
    }
    return out;
}

/// One momentum factor of the free-fermion amplitude after a quench d0 -> d1.
inline Complex two_band_amplitude(const Eigen::Vector3d &d0, const Eigen::Vector3d &d1, double omega1, double t) {
    double n0 = d0.norm(), n1 = d1.norm();
    if (!(n0 > 0.0) || !(n1 > 0.0)) throw DomainError("two-band vectors must be non-zero");
    double c = d0.dot(d1) / (n0 * n1);
    return {std::cos(omega1 * t), c * std::sin(omega1 * t)};
}

/// Free staggered-fermion Bloch vector (0, -J, m).
inline Eigen::Vector3d free_bloch_vector(double mass, double hopping = 1.0) { return {0.0, -hopping, mass}; }

// ---- Case parameters in units of J ----

/// Rescaled time r = t sqrt(m^2 + J^2) to dimensionless Hamiltonian time for H~ = (J/g^2) H.
inline double tilde_time_per_rescaled(double mOverJ, double gOverJ) {
    return gOverJ * gOverJ / std::sqrt(mOverJ * mOverJ + 1.0);
}

inline Matrix4 even_block_for(double mOverJ, double gOverJ) {
    if (gOverJ == 0.0) throw DomainError("g = 0 has no rescaled couplings; use two_band_amplitude");
    double g2 = gOverJ * gOverJ;
    return block_hamiltonian(1.0 / g2, mOverJ / g2);
}

/// psi1+ (the Dirac vacuum) in the even-parity block.
inline StateVector dirac_vacuum() { return StateVector::Unit(4, 0); }

/// Coupling at which two diagonal entries of the even block become degenerate.
/// Case 1: psi1+ and psi2+. Case 2: psi1+ and psi4+.
inline double resonance_coupling(int resonance_case, double mOverJ) {
    if (!(mOverJ < 0.0)) throw DomainError("resonances need m/J < 0");
    const double a = std::sqrt(6.0 / kPi);
    switch (resonance_case) {
        case 1:
            return a * std::sqrt(-mOverJ);
        case 2:
            return a / std::sqrt(2.0) * std::sqrt(-mOverJ);
        default:
            throw DomainError("resonance case must be 1 or 2");
    }
}

// ---- Zero scanning ----

struct ZeroSearch {
    double windowEnd = 30.0;      // rescaled time
    double step = 0.05;           // coarse sampling step
    double zeroThreshold = 1e-3;  // echo below this counts as a zero candidate
    double prominence = 2.0;      // rate must exceed this multiple of the median rate
    double tolerance = 1e-6;      // golden-section bracket width
    int dof = 2;
};

/// Golden-section minimum of f on [a, b].
inline double golden_section_minimum(const std::function<double(double)> &f, double a, double b, double tol) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

/// Refined local minima of echo(t) on [0, windowEnd] that pass threshold and prominence.
inline std::vector<double> find_echo_zeros(const std::function<double(double)> &echo, const ZeroSearch &opt) {
    if (!(opt.step > 0.0) || !(opt.windowEnd > opt.step)) throw std::invalid_argument("bad time window");
    const auto count = static_cast<std::size_t>(std::floor(opt.windowEnd / opt.step + 1e-9)) + 1;
    std::vector<double> t(count), e(count), rate(count);
    for (std::size_t i = 0; i < count; ++i) {
        t[i] = opt.step * static_cast<double>(i);
        e[i] = echo(t[i]);
        rate[i] = -std::log(std::max(e[i], kEchoFloor)) / opt.dof;
    }
    std::vector<double> sorted = rate;
    std::nth_element(sorted.begin(), sorted.begin() + count / 2, sorted.end());
    const double median = sorted[count / 2];

    std::vector<double> zeros;
    for (std::size_t i = 1; i + 1 < count; ++i) {
        if (!(e[i] <= e[i - 1] && e[i] < e[i + 1])) continue;
        double tm = golden_section_minimum(echo, t[i - 1], t[i + 1], opt.tolerance);
        double em = echo(tm);
        double rm = -std::log(std::max(em, kEchoFloor)) / opt.dof;
        if (em < opt.zeroThreshold && rm > opt.prominence * median) zeros.push_back(tm);
    }
    return zeros;
}

/// Critical times of the Dirac-vacuum quench at (m/J, g/J), in rescaled time.
inline std::vector<double> critical_times(double mOverJ, double gOverJ, const ZeroSearch &opt = {}) {
    Propagator p(even_block_for(mOverJ, gOverJ));
    EchoFunction f(p, dirac_vacuum());
    const double scale = tilde_time_per_rescaled(mOverJ, gOverJ);
    return find_echo_zeros([&](double r) { return f.echo(r * scale); }, opt);
}

/// Zeros of the single-mode free amplitude after a quench d0 -> d1, in units of 1/|d1|.
inline std::vector<double> free_quench_zeros(const Eigen::Vector3d &d0, const Eigen::Vector3d &d1,
                                             const ZeroSearch &opt) {
    return find_echo_zeros([&](double r) { return std::norm(two_band_amplitude(d0, d1, 1.0, r)); }, opt);
}

struct LociPoint {
    double mOverJ = 0;
    double gOverJ = 0;
    std::vector<double> criticalTimes;
};

struct ScanGrid {
    double mMin = -2.0, mMax = -0.75;
    double gMin = 1.0, gMax = 2.2;
    int mCount = 40, gCount = 40;

    double m(int i) const { return mCount == 1 ? mMin : mMin + (mMax - mMin) * i / (mCount - 1); }
    double g(int j) const { return gCount == 1 ? gMin : gMin + (gMax - gMin) * j / (gCount - 1); }
};

/// Scans the grid in parallel; points without zeros are omitted. Output is in grid order (m major).
inline std::vector<LociPoint> scan_zero_loci(const ScanGrid &grid, const ZeroSearch &opt = {}) {
    if (grid.mCount < 1 || grid.gCount < 1) throw std::invalid_argument("empty scan grid");
    std::vector<LociPoint> all(static_cast<std::size_t>(grid.mCount) * grid.gCount);
    parallel_for(all.size(), [&](std::size_t k) {
        int i = static_cast<int>(k) / grid.gCount, j = static_cast<int>(k) % grid.gCount;
        all[k] = {grid.m(i), grid.g(j), critical_times(grid.m(i), grid.g(j), opt)};
    });
    std::vector<LociPoint> out;
    for (auto &p : all) {
        if (!p.criticalTimes.empty()) out.push_back(std::move(p));
    }
    return out;
}

/// True when at least three critical times follow t_k = (2k + 1) t_0 within rel_tol,
/// the pattern of a resonant two-level oscillation.
inline bool is_periodic_branch(const LociPoint &p, double rel_tol = 0.05) {
    const auto &t = p.criticalTimes;
    if (t.size() < 3 || !(t[0] > 0.0)) return false;
    for (std::size_t k = 1; k < 3; ++k) {
        double expected = (2.0 * k + 1.0) * t[0];
        if (std::abs(t[k] - expected) > rel_tol * expected) return false;
    }
    return true;
}

struct LociFit {
    double intercept = 0;
    double slope = 0;
    std::size_t points = 0;
};

/// Least-squares fit of ln(g/J) against ln(-m/J).
inline LociFit fit_power_law(const std::vector<std::pair<double, double>> &mg) {
    if (mg.size() < 5) throw std::invalid_argument("loci regression needs at least 5 points");
    Eigen::MatrixXd a(mg.size(), 2);
    Eigen::VectorXd b(mg.size());
    for (std::size_t i = 0; i < mg.size(); ++i) {
        if (!(mg[i].first < 0.0) || !(mg[i].second > 0.0)) throw DomainError("loci points need m < 0 and g > 0");
        a(i, 0) = 1.0;
        a(i, 1) = std::log(-mg[i].first);
        b(i) = std::log(mg[i].second);
    }
    Eigen::Vector2d x = a.colPivHouseholderQr().solve(b);
    return {x(0), x(1), mg.size()};
}

/// Fit over the periodic (sub-critical) branch of a loci scan.
inline LociFit fit_loci_regression(const std::vector<LociPoint> &points) {
    std::vector<std::pair<double, double>> mg;
    for (const auto &p : points) {
        if (p.mOverJ < 0.0 && is_periodic_branch(p)) mg.emplace_back(p.mOverJ, p.gOverJ);
    }
    return fit_power_law(mg);
}

}  // namespace dqpt

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
#include <complex>
#include <numbers>

#include "dqpt/errors.hpp"

namespace dqpt {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;
using Vector4 = Eigen::Vector4cd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

namespace pauli {

inline Matrix2 identity() { return Matrix2::Identity(); }

inline Matrix2 x() {
    Matrix2 m;
    m << 0, 1, 1, 0;
    return m;
}

inline Matrix2 y() {
    Matrix2 m;
    m << 0, -kI, kI, 0;
    return m;
}

inline Matrix2 z() {
    Matrix2 m;
    m << 1, 0, 0, -1;
    return m;
}

/// Index 0..3 maps to {1, X, Y, Z}.
inline Matrix2 by_index(int k) {
    switch (k) {
        case 0:
            return identity();
        case 1:
            return x();
        case 2:
            return y();
        case 3:
            return z();
        default:
            throw DomainError("pauli index must be in [0, 3]");
    }
}

}  // namespace pauli

/// Kronecker product; the first argument is the most significant factor.
inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline Matrix4 kron2(const Matrix2 &a, const Matrix2 &b) { return kron(a, b); }

inline double max_abs(const ComplexMatrix &m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double hermiticity_defect(const ComplexMatrix &h) { return max_abs(h - h.adjoint()); }

inline double unitarity_defect(const ComplexMatrix &u) {
    return max_abs(u * u.adjoint() - ComplexMatrix::Identity(u.rows(), u.cols()));
}

/// |Tr(A^dagger B)| / dim, equal to 1 exactly when A and B agree up to a global phase.
inline double phase_invariant_overlap(const ComplexMatrix &a, const ComplexMatrix &b) {
    return std::abs((a.adjoint() * b).trace()) / static_cast<double>(a.rows());
}

/// Max-entry distance between A and B after removing the best global phase.
inline double phase_aligned_distance(const ComplexMatrix &a, const ComplexMatrix &b) {
    Complex t = (b.adjoint() * a).trace();
    Complex phase = std::abs(t) > 0 ? t / std::abs(t) : Complex{1.0};
    return max_abs(a - phase * b);
}

/// exp(-i H t) for Hermitian H through its eigendecomposition.
inline ComplexMatrix hermitian_propagator(const ComplexMatrix &h, double t) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    Eigen::VectorXcd phases = (es.eigenvalues().cast<Complex>() * Complex(0.0, -t)).array().exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace dqpt

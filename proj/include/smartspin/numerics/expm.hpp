// Copyright 2026 The smartspin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Eigenvalues>

#include "smartspin/errors.hpp"
#include "smartspin/numerics/linalg.hpp"

namespace smartspin {

inline constexpr double kHermitianTolerance = 1e-12;

/// U = exp(-i H t) for Hermitian H (angular units) via the Hermitian
/// eigendecomposition. The tolerance on Hermiticity is relative to the
/// largest entry so that GHz-scale Hamiltonians are accepted.
inline ComplexMatrix expm_skew_hermitian(const ComplexMatrix& h, double t) {
  if (h.rows() != h.cols()) {
    throw InvariantError("expm_skew_hermitian: matrix is not square");
  }
  if (!(t >= 0.0)) throw InputError("expm_skew_hermitian: negative duration");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const double defect = hermiticity_defect(h);
  if (!(defect < kHermitianTolerance * scale)) {
    throw InvariantError("expm_skew_hermitian: generator is not Hermitian (defect " +
                         std::to_string(defect) + ")");
  }
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw NumericError("expm_skew_hermitian: eigendecomposition failed");
  }
  const Eigen::VectorXcd phases =
      (eig.eigenvalues().cast<Complex>() * (-kI * t)).array().exp();
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

/// Closed-form exp(-i G) for a 2x2 Hermitian G = g0 I + g.sigma.
inline Matrix2c expm_two_level(const Matrix2c& g) {
  const double g0 = 0.5 * std::real(g(0, 0) + g(1, 1));
  const double gz = 0.5 * std::real(g(0, 0) - g(1, 1));
  const double gx = std::real(0.5 * (g(0, 1) + g(1, 0)));
  const double gy = std::real(0.5 * kI * (g(0, 1) - g(1, 0)));
  const double norm = std::sqrt(gx * gx + gy * gy + gz * gz);
  const double c = std::cos(norm);
  // sin(x)/x without the removable singularity
  const double sinc = norm > 1e-8 ? std::sin(norm) / norm : 1.0 - norm * norm / 6.0;
  Matrix2c u;
  u(0, 0) = Complex(c, -sinc * gz);
  u(1, 1) = Complex(c, sinc * gz);
  u(0, 1) = -kI * sinc * Complex(gx, -gy);
  u(1, 0) = -kI * sinc * Complex(gx, gy);
  return std::exp(Complex(0.0, -g0)) * u;
}

/// U^n by repeated squaring.
template <typename Matrix>
Matrix matrix_power(const Matrix& u, std::uint64_t n) {
  Matrix result = Matrix::Identity(u.rows(), u.cols());
  Matrix base = u;
  while (n > 0) {
    if (n & 1U) result = base * result;
    n >>= 1U;
    if (n > 0) base = base * base;
  }
  return result;
}

}  // namespace smartspin

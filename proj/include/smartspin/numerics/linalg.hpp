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

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace smartspin {

using Complex = std::complex<double>;

/// Dense complex matrix, used for every operator in the library (dim <= 6).
using ComplexMatrix = Eigen::MatrixXcd;
/// Normalised state amplitudes.
using StateVector = Eigen::VectorXcd;

using Matrix2c = Eigen::Matrix2cd;
using Vector2c = Eigen::Vector2cd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Largest entrywise |A - A^dagger|.
template <typename Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() != a.cols()) return INFINITY;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& a, double tol = 1e-12) {
  return hermiticity_defect(a) < tol;
}

/// Kronecker product, electron factor first.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// max|U - e^{i phi} V| with phi chosen to align the traces. Zero iff the
/// two operators agree up to a global phase.
template <typename DerivedA, typename DerivedB>
double phase_distance(const Eigen::MatrixBase<DerivedA>& u,
                      const Eigen::MatrixBase<DerivedB>& v) {
  const Complex overlap = (v.adjoint() * u).trace();
  const Complex phase =
      std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex{1.0, 0.0};
  return (u - phase * v).cwiseAbs().maxCoeff();
}

/// Max entrywise deviation of U^dagger U from the identity.
template <typename Derived>
double unitarity_defect(const Eigen::MatrixBase<Derived>& u) {
  using Plain = typename Derived::PlainObject;
  const Plain id = Plain::Identity(u.rows(), u.cols());
  return (u.adjoint() * u - id).cwiseAbs().maxCoeff();
}

namespace pauli {

inline Matrix2c identity() { return Matrix2c::Identity(); }

inline Matrix2c x() {
  Matrix2c m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline Matrix2c y() {
  Matrix2c m;
  m << 0.0, -kI, kI, 0.0;
  return m;
}

inline Matrix2c z() {
  Matrix2c m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

}  // namespace pauli

/// exp(-i angle/2 n.sigma) for a unit axis n.
inline Matrix2c rotation(double angle, double nx, double ny, double nz) {
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  return c * pauli::identity() -
         kI * s * (nx * pauli::x() + ny * pauli::y() + nz * pauli::z());
}

/// Bloch vector of a two-level pure state.
inline Eigen::Vector3d bloch_vector(const Vector2c& psi) {
  const Complex a = psi(0);
  const Complex b = psi(1);
  return {2.0 * std::real(std::conj(a) * b), 2.0 * std::imag(std::conj(a) * b),
          std::norm(a) - std::norm(b)};
}

/// Rotation angle in [0, pi] and unit axis of an SU(2)-like unitary (global
/// phase removed). The axis is undefined (returned as z) for the identity.
struct AxisAngle {
  double angle = 0.0;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
};

inline AxisAngle axis_angle(const Matrix2c& u) {
  const Complex det = u.determinant();
  const Matrix2c su = u / std::sqrt(det);
  // su = cos(a/2) I - i sin(a/2) n.sigma
  const double c = 0.5 * std::real(su.trace());
  Eigen::Vector3d v;
  v(0) = -0.5 * std::imag(su(0, 1) + su(1, 0));
  v(1) = 0.5 * std::real(su(1, 0) - su(0, 1));
  v(2) = -0.5 * std::imag(su(0, 0) - su(1, 1));
  AxisAngle out;
  double s = v.norm();
  double cc = c;
  if (cc < 0.0) {  // pick the representative with angle in [0, pi]
    cc = -cc;
    v = -v;
  }
  out.angle = 2.0 * std::atan2(s, cc);
  if (s > 1e-15) out.axis = v / s;
  return out;
}

}  // namespace smartspin

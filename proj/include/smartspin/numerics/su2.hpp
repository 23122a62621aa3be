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

#include <Eigen/Core>

#include "smartspin/numerics/linalg.hpp"

namespace smartspin {

/// Element of SU(2) stored as U = w 1 - i (v . sigma), w^2 + |v|^2 = 1.
/// Traceless two-level Hamiltonians only ever produce such elements, so the
/// engine multiplies these instead of dense 2x2 matrices.
struct Su2 {
  double w = 1.0;
  Eigen::Vector3d v = Eigen::Vector3d::Zero();

  static Su2 identity() { return {}; }

  /// exp(-i g . sigma).
  static Su2 exp_pauli(const Eigen::Vector3d& g) {
    const double n = g.norm();
    Su2 u;
    u.w = std::cos(n);
    const double sinc = n > 1e-8 ? std::sin(n) / n : 1.0 - n * n / 6.0;
    u.v = sinc * g;
    return u;
  }

  /// Product this * other (other acts first).
  Su2 operator*(const Su2& o) const {
    Su2 r;
    r.w = w * o.w - v.dot(o.v);
    r.v = w * o.v + o.w * v + v.cross(o.v);
    return r;
  }

  Su2 adjoint() const {
    Su2 r;
    r.w = w;
    r.v = -v;
    return r;
  }

  /// Restores w^2 + |v|^2 = 1 after long products.
  void renormalize() {
    const double n = std::sqrt(w * w + v.squaredNorm());
    w /= n;
    v /= n;
  }

  double norm_defect() const { return std::abs(w * w + v.squaredNorm() - 1.0); }

  Matrix2c matrix() const {
    Matrix2c m;
    m(0, 0) = Complex(w, -v.z());
    m(1, 1) = Complex(w, v.z());
    m(0, 1) = Complex(-v.y(), -v.x());
    m(1, 0) = Complex(v.y(), -v.x());
    return m;
  }

  Vector2c apply(const Vector2c& psi) const { return matrix() * psi; }
};

/// U^n for an SU(2) element by repeated squaring.
inline Su2 power(Su2 base, unsigned long long n) {
  Su2 result = Su2::identity();
  while (n > 0) {
    if (n & 1ULL) result = base * result;
    n >>= 1ULL;
    if (n > 0) base = base * base;
  }
  return result;
}

}  // namespace smartspin

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

#include <algorithm>
#include <cmath>
#include <string>

#include "smartspin/errors.hpp"
#include "smartspin/numerics/linalg.hpp"

namespace smartspin {

namespace detail {

// Below this the ascending series is used. The Hankel expansion only reaches
// 1e-10 absolute accuracy once its smallest term (~e^{-2x}) is small enough,
// which happens near x = 12; the series is still well conditioned there.
inline constexpr double kBesselSeriesLimit = 12.0;

// J_n(x) for n in {0, 1} by the ascending power series. Terms grow to
// ~e^x / sqrt(x) before cancelling, so the sum is carried in long double.
inline double bessel_series(int order, double x) {
  const long double q = -0.25L * x * x;
  long double term = order == 0 ? 1.0L : 0.5L * x;
  long double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<long double>(k) * static_cast<long double>(k + order));
    sum += term;
    if (std::abs(term) < 1e-21L * std::max(1.0L, std::abs(sum))) break;
  }
  return static_cast<double>(sum);
}

// Hankel asymptotic expansion, truncated at its smallest term.
inline double bessel_asymptotic(int order, double x) {
  const double mu = 4.0 * order * order;
  double p = 0.0;
  double q = 0.0;
  double term = 1.0;  // a_k(order) / x^k
  double last = INFINITY;
  for (int k = 0; k < 60; ++k) {
    if (k > 0) {
      const double odd = 2.0 * k - 1.0;
      term *= (mu - odd * odd) / (static_cast<double>(k) * 8.0 * x);
    }
    if (std::abs(term) > last) break;
    last = std::abs(term);
    switch (k % 4) {
      case 0: p += term; break;
      case 1: q += term; break;
      case 2: p -= term; break;
      default: q -= term; break;
    }
  }
  const double chi = x - (0.5 * order + 0.25) * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

inline double bessel(int order, double x) {
  const double ax = std::abs(x);
  const double value = ax < kBesselSeriesLimit ? bessel_series(order, ax)
                                               : bessel_asymptotic(order, ax);
  return (order == 1 && x < 0.0) ? -value : value;
}

}  // namespace detail

/// Bessel function of the first kind, order zero. Accurate to 1e-10 on |x| < 1e4.
inline double bessel_j0(double x) { return detail::bessel(0, x); }

/// Order one; J0' = -J1.
inline double bessel_j1(double x) { return detail::bessel(1, x); }

/// The (i+1)-th positive root of J0, by Newton iteration from (i + 3/4) pi.
inline double bessel_j0_zero(int index) {
  if (index < 0 || index > 20) {
    throw InputError("bessel_j0_zero: index must lie in [0, 20], got " +
                     std::to_string(index));
  }
  double x = (index + 0.75) * kPi;
  for (int it = 0; it < 100; ++it) {
    const double step = bessel_j0(x) / bessel_j1(x);  // -J0/J0'
    x += step;
    if (std::abs(step) < 1e-13 * x) return x;
  }
  throw NumericError("bessel_j0_zero: Newton iteration did not converge");
}

}  // namespace smartspin

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
#include <cstdint>
#include <initializer_list>
#include <optional>

#include "smartspin/errors.hpp"
#include "smartspin/numerics/linalg.hpp"
#include "smartspin/physics/constants.hpp"

namespace smartspin {

// ---------------------------------------------------------- random streams --

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30U)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27U)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31U);
}

/// Hash of a master seed and a tuple of counters. Used to give every shot
/// (and every RB randomisation) its own stream independent of scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master ^ 0x5EEDC0DE5EEDC0DEULL);
  for (const auto p : path) h = splitmix64(h ^ splitmix64(p + 0x632BE59BD9B4E019ULL));
  return h;
}

/// Counter-based generator: the k-th output is splitmix64(key + k).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return splitmix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

  /// Uniform on (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11U) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  bool coin() { return (next_u64() >> 63U) != 0U; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw InputError("CounterRng::below: empty range");
    const std::uint64_t limit = ~0ULL - (~0ULL % n);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  /// Binomial(n, p) by direct summation (n stays small in readout models).
  int binomial(int n, double p) {
    int k = 0;
    for (int i = 0; i < n; ++i) k += uniform() < p ? 1 : 0;
    return k;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// ------------------------------------------------------------ noise model --

/// sigma of a static Gaussian detuning giving a Ramsey envelope exp(-(t/T2*)^2).
inline double sigma_bath_for_t2star(double t2star) {
  if (!(t2star > 0.0)) throw InputError("T2* must be positive");
  return std::sqrt(2.0) / (kTwoPi * t2star);
}

/// Quasi-static disturbances, fixed within a shot and random across shots.
struct NoiseModel {
  bool nuclear_uninitialized = true;  // m_I = +-1/2 equiprobable
  double a_parallel_hz = defaults::kHyperfineHz;
  double sigma_bath_hz = 0.0;  // Gaussian static detuning
  double sigma_amp = 0.0;      // fractional Gaussian Rabi-amplitude error
  /// Pins m_I instead of drawing it (e.g. an initialised nucleus).
  std::optional<double> fixed_nuclear_m;

  void validate() const {
    if (!(sigma_bath_hz >= 0.0) || !(sigma_amp >= 0.0) || !(a_parallel_hz >= 0.0)) {
      throw ConfigError("NoiseModel: standard deviations and A_par must be >= 0");
    }
    if (fixed_nuclear_m && std::abs(std::abs(*fixed_nuclear_m) - 0.5) > 1e-12) {
      throw ConfigError("NoiseModel: fixed nuclear projection must be +1/2 or -1/2");
    }
  }

  static NoiseModel none() {
    NoiseModel m;
    m.nuclear_uninitialized = false;
    return m;
  }

  static NoiseModel nuclear_only() { return NoiseModel{}; }

  /// Uninitialised nucleus, bath matching kT2StarSeconds, calibrated sigma_amp.
  static NoiseModel calibrated() {
    NoiseModel m;
    m.sigma_bath_hz = sigma_bath_for_t2star(defaults::kT2StarSeconds);
    m.sigma_amp = defaults::kSigmaAmp;
    return m;
  }

  bool is_silent() const {
    return !nuclear_uninitialized && !fixed_nuclear_m && sigma_bath_hz == 0.0 &&
           sigma_amp == 0.0;
  }
};

/// One sample of the noise model.
struct NoiseDraw {
  double nuclear_m = 0.0;        // +-1/2, or 0 when the nucleus is ignored
  double nuclear_hz = 0.0;       // m_I * A_par
  double bath_hz = 0.0;
  double delta_offset_hz = 0.0;  // nuclear + bath
  double amp_factor = 1.0;

  static NoiseDraw none() { return {}; }

  static NoiseDraw detuned(double delta_hz) {
    NoiseDraw d;
    d.bath_hz = delta_hz;
    d.delta_offset_hz = delta_hz;
    return d;
  }
};

/// Draws the noise for one shot. Identical (seed, shot) give identical draws.
inline NoiseDraw draw_noise(const NoiseModel& model, std::uint64_t seed, std::uint64_t shot) {
  model.validate();
  CounterRng rng(derive_seed(seed, {0x4E4F495345ULL, shot}));
  NoiseDraw d;
  const bool nuclear_bit = rng.coin();
  const double bath_normal = rng.normal();
  const double amp_normal = rng.normal();
  if (model.fixed_nuclear_m) {
    d.nuclear_m = *model.fixed_nuclear_m;
  } else if (model.nuclear_uninitialized) {
    d.nuclear_m = nuclear_bit ? 0.5 : -0.5;
  }
  d.nuclear_hz = d.nuclear_m * model.a_parallel_hz;
  d.bath_hz = model.sigma_bath_hz * bath_normal;
  d.delta_offset_hz = d.nuclear_hz + d.bath_hz;
  d.amp_factor = 1.0 + model.sigma_amp * amp_normal;
  return d;
}

}  // namespace smartspin

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
#include <unordered_map>

#include "smartspin/engine/noise.hpp"
#include "smartspin/errors.hpp"
#include "smartspin/numerics/linalg.hpp"
#include "smartspin/numerics/su2.hpp"
#include "smartspin/waveform/pulse.hpp"

namespace smartspin {

/// Minimum number of steps per cycle of the fastest rate in a segment.
inline constexpr double kMinStepsPerCycle = 50.0;

struct EngineOptions {
  /// Steps per cycle of the segment's rate bound (|Omega| + |delta|). Values
  /// below kMinStepsPerCycle are raised to it.
  double steps_per_cycle = 256.0;
};

struct ShotResult {
  double p0 = 1.0;  // |<0|psi>|^2
  StateVector final_state;
};

namespace detail {

// Pauli vector of H / (rad/s) at local time t: H = a . sigma.
inline Eigen::Vector3d pauli_vector(const PulseSegment& s, const NoiseDraw& d, double t) {
  return kPi * Eigen::Vector3d(d.amp_factor * s.omega_i_at(t), d.amp_factor * s.omega_q_at(t),
                               -(s.delta_at(t) + d.delta_offset_hz));
}

inline double effective_bound(const PulseSegment& s, const NoiseDraw& d) {
  return std::max(1.0, std::abs(d.amp_factor)) * s.bound_hz + std::abs(d.delta_offset_hz);
}

// Fourth-order Magnus propagation of [t0, t0 + span] in n equal steps.
inline Su2 magnus4(const PulseSegment& s, const NoiseDraw& d, double t0, double span, long n) {
  constexpr double kC1 = 0.5 - 0.28867513459481288225;  // 1/2 - sqrt(3)/6
  constexpr double kC2 = 0.5 + 0.28867513459481288225;
  constexpr double kCommutator = 0.28867513459481288225;  // sqrt(3)/6
  const double h = span / static_cast<double>(n);
  Su2 u = Su2::identity();
  for (long k = 0; k < n; ++k) {
    const double t = t0 + static_cast<double>(k) * h;
    const Eigen::Vector3d a = pauli_vector(s, d, t + kC1 * h);
    const Eigen::Vector3d b = pauli_vector(s, d, t + kC2 * h);
    const Eigen::Vector3d g = 0.5 * h * (a + b) - kCommutator * h * h * a.cross(b);
    u = Su2::exp_pauli(g) * u;
  }
  u.renormalize();
  return u;
}

}  // namespace detail

/// Propagator of one segment in the two-level rotating frame under a noise
/// draw. Constant segments are exponentiated exactly; periodic segments
/// propagate one period and raise it to the number of periods.
inline Su2 segment_propagator(const PulseSegment& s, const NoiseDraw& d,
                              const EngineOptions& opt = {}) {
  s.validate();
  if (s.constant) {
    return Su2::exp_pauli(s.duration * detail::pauli_vector(s, d, 0.0));
  }
  const double resolution = std::max(opt.steps_per_cycle, kMinStepsPerCycle);
  const double rate = detail::effective_bound(s, d);
  const long periods = s.periods();
  const double span = periods > 0 ? s.period : s.duration;
  const auto steps = std::max(1L, static_cast<long>(std::ceil(span * rate * resolution)));
  const Su2 once = detail::magnus4(s, d, 0.0, span, steps);
  return periods > 1 ? power(once, static_cast<unsigned long long>(periods)) : once;
}

/// Per-draw memo of segment propagators keyed by PulseSegment::cache_key.
class PropagatorCache {
 public:
  const Su2& get(const PulseSegment& s, const NoiseDraw& d, const EngineOptions& opt) {
    const std::string key = s.cache_key + "#" + std::to_string(s.periods());
    auto it = map_.find(key);
    if (it == map_.end()) it = map_.emplace(key, segment_propagator(s, d, opt)).first;
    return it->second;
  }
  void clear() { map_.clear(); }
  std::size_t size() const { return map_.size(); }

 private:
  std::unordered_map<std::string, Su2> map_;
};

/// Product of all segment propagators (last segment leftmost).
inline Su2 sequence_propagator(const PulseSequence& seq, const NoiseDraw& d,
                               const EngineOptions& opt = {}, PropagatorCache* cache = nullptr) {
  Su2 u = Su2::identity();
  for (const auto& s : seq.segments) {
    const bool cached = cache != nullptr && !s.cache_key.empty();
    u = (cached ? cache->get(s, d, opt) : segment_propagator(s, d, opt)) * u;
  }
  u.renormalize();
  return u;
}

inline Vector2c ground_state() { return Vector2c(1.0, 0.0); }

/// Evolves `init` through `seq` in the two-level model and reports the
/// population of |0>.
inline ShotResult evolve_two_level(const PulseSequence& seq, const NoiseDraw& d,
                                   const Vector2c& init = ground_state(),
                                   const EngineOptions& opt = {}) {
  if (std::abs(init.norm() - 1.0) > 1e-10) {
    throw InputError("evolve_two_level: initial state is not normalised");
  }
  const Su2 u = sequence_propagator(seq, d, opt);
  const Vector2c psi = u.apply(init);
  if (std::abs(psi.norm() - 1.0) > 1e-8) {
    throw NumericError("evolve_two_level: norm drift beyond 1e-8");
  }
  ShotResult r;
  r.p0 = std::clamp(std::norm(psi(0)), 0.0, 1.0);
  r.final_state = psi;
  return r;
}

}  // namespace smartspin

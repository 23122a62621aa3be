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
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "smartspin/errors.hpp"
#include "smartspin/numerics/linalg.hpp"

namespace smartspin {

/// Envelope as a function of segment-local time (s), in Hz.
using Envelope = std::function<double(double)>;

inline constexpr double kMaxEnvelopeHz = 1e9;

/// One piece of an IQ drive in the rotating frame of the carrier.
///
/// Empty envelopes are identically zero. `bound_hz` must dominate
/// |omega_I| + |omega_Q| + |delta| over the segment; the engine derives its
/// step size from it. Segments flagged `constant` are propagated in closed
/// form. A positive `period` declares the envelopes periodic with that
/// period and the duration an integer multiple of it, so one period can be
/// propagated and powered. Segments sharing a non-empty `cache_key` must have
/// identical envelopes.
struct PulseSegment {
  double duration = 0.0;
  Envelope omega_i;
  Envelope omega_q;
  Envelope delta;
  double bound_hz = 0.0;
  bool constant = false;
  double period = 0.0;
  std::string cache_key;
  std::string label;

  double omega_i_at(double t) const { return omega_i ? omega_i(t) : 0.0; }
  double omega_q_at(double t) const { return omega_q ? omega_q(t) : 0.0; }
  double delta_at(double t) const { return delta ? delta(t) : 0.0; }

  /// Number of whole periods, or 0 for aperiodic segments.
  long periods() const {
    return period > 0.0 ? std::lround(duration / period) : 0;
  }

  void validate() const {
    if (!(duration > 0.0) || !std::isfinite(duration)) {
      throw InvariantError("PulseSegment '" + label + "': duration must be positive");
    }
    if (!(bound_hz >= 0.0) || bound_hz > 3.0 * kMaxEnvelopeHz) {
      throw InvariantError("PulseSegment '" + label + "': envelope bound out of range");
    }
    if (period > 0.0) {
      const double n = duration / period;
      if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n) || std::round(n) < 1.0) {
        throw InvariantError("PulseSegment '" + label +
                             "': duration is not a whole number of periods");
      }
    }
  }
};

/// Time-ordered list of segments; idle time is an explicit zero-drive segment.
struct PulseSequence {
  std::vector<PulseSegment> segments;

  double duration() const {
    double total = 0.0;
    for (const auto& s : segments) total += s.duration;
    return total;
  }

  PulseSequence& append(PulseSegment s) {
    s.validate();
    segments.push_back(std::move(s));
    return *this;
  }

  PulseSequence& append(const PulseSequence& other) {
    for (const auto& s : other.segments) append(s);
    return *this;
  }
};

/// Rectangular segment with fixed envelope values.
inline PulseSegment constant_segment(double duration, double omega_i, double omega_q,
                                     double delta, std::string label = "constant") {
  for (const double v : {omega_i, omega_q, delta}) {
    if (!std::isfinite(v) || std::abs(v) >= kMaxEnvelopeHz) {
      throw InvariantError("constant_segment: envelope value out of range");
    }
  }
  PulseSegment s;
  s.duration = duration;
  if (omega_i != 0.0) s.omega_i = [omega_i](double) { return omega_i; };
  if (omega_q != 0.0) s.omega_q = [omega_q](double) { return omega_q; };
  if (delta != 0.0) s.delta = [delta](double) { return delta; };
  s.bound_hz = std::abs(omega_i) + std::abs(omega_q) + std::abs(delta);
  s.constant = true;
  s.label = std::move(label);
  s.validate();
  return s;
}

/// Free evolution (no drive) of the given length.
inline PulseSegment idle(double duration) {
  return constant_segment(duration, 0.0, 0.0, 0.0, "idle");
}

enum class Axis { kPlusX, kMinusX, kPlusY, kMinusY };

inline std::string to_string(Axis a) {
  switch (a) {
    case Axis::kPlusX: return "+X";
    case Axis::kMinusX: return "-X";
    case Axis::kPlusY: return "+Y";
    case Axis::kMinusY: return "-Y";
  }
  return "?";
}

/// Resonant rectangular pulse rotating by `angle` about the given axis.
inline PulseSegment bare_pulse(Axis axis, double angle, double omega) {
  if (!(omega > 0.0)) throw InputError("bare_pulse: omega must be positive");
  if (!(angle > 0.0 && angle <= kTwoPi + 1e-12)) {
    throw InputError("bare_pulse: angle must lie in (0, 2 pi]");
  }
  const double duration = angle / (kTwoPi * omega);
  double wi = 0.0;
  double wq = 0.0;
  switch (axis) {
    case Axis::kPlusX: wi = omega; break;
    case Axis::kMinusX: wi = -omega; break;
    case Axis::kPlusY: wq = omega; break;
    case Axis::kMinusY: wq = -omega; break;
  }
  PulseSegment s = constant_segment(duration, wi, wq, 0.0, "bare " + to_string(axis));
  return s;
}

}  // namespace smartspin

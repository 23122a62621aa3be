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
#include <cstdio>
#include <optional>
#include <string>

#include "smartspin/errors.hpp"
#include "smartspin/numerics/bessel.hpp"
#include "smartspin/numerics/linalg.hpp"
#include "smartspin/waveform/pulse.hpp"

namespace smartspin {

namespace detail {

inline std::string format_key(const char* fmt, double a, double b, double c, double d) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c, d);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------- dressed --

/// How the dressed gate steers the dressed axis.
///  kFrequencyModulated: delta(t) = fm_depth cos(2 pi f (t + t_clk) + phi).
///  kCircular: the same modulation split over delta and the Q channel at
///    half depth each, which cancels the counter-rotating part in the
///    dressed frame. Requires f equal to the carrier.
enum class DressedMode { kFrequencyModulated, kCircular };

/// Dressed-qubit gate: an always-on resonant drive on I plus a modulation of
/// the detuning at f_fm.
///
/// `clock_offset` is the time elapsed since the always-on drive started, so
/// that consecutive gates keep a common modulation phase reference.
/// `fm_frequency` of 0 means "equal to omega_carrier". The dressed Rabi
/// frequency is fm_depth / 2. When the duration is a whole number of
/// modulation periods the segment is marked periodic.
inline PulseSegment dressed_gate(Axis axis, double fm_depth, double duration,
                                 double omega_carrier, double fm_frequency = 0.0,
                                 double clock_offset = 0.0,
                                 DressedMode mode = DressedMode::kFrequencyModulated) {
  if (!(omega_carrier > 0.0)) throw ConfigError("dressed_gate: carrier must be positive");
  if (!(fm_depth >= 0.0)) throw ConfigError("dressed_gate: FM depth must be >= 0");
  if (fm_depth > omega_carrier / 4.0) {
    throw ConfigError("dressed_gate: FM depth exceeds carrier/4; the dressed rotating-wave "
                      "picture breaks down");
  }
  const double f = fm_frequency > 0.0 ? fm_frequency : omega_carrier;
  if (mode == DressedMode::kCircular && std::abs(f - omega_carrier) > 1e-9 * omega_carrier) {
    throw ConfigError("dressed_gate: circular mode needs the modulation at the carrier frequency");
  }
  double phi = 0.0;
  switch (axis) {
    case Axis::kPlusX: phi = 0.0; break;
    case Axis::kPlusY: phi = 0.5 * kPi; break;
    case Axis::kMinusX: phi = kPi; break;
    case Axis::kMinusY: phi = 1.5 * kPi; break;
  }
  PulseSegment s;
  s.duration = duration;
  s.omega_i = [omega_carrier](double) { return omega_carrier; };
  const bool circular = mode == DressedMode::kCircular;
  const double depth = circular ? 0.5 * fm_depth : fm_depth;
  if (fm_depth > 0.0) {
    s.delta = [depth, f, phi, clock_offset](double t) {
      return depth * std::cos(kTwoPi * f * (t + clock_offset) + phi);
    };
    if (circular) {
      s.omega_q = [depth, f, phi, clock_offset](double t) {
        return depth * std::sin(kTwoPi * f * (t + clock_offset) + phi);
      };
    }
  }
  s.bound_hz = omega_carrier + (circular ? 2.0 * depth : depth);
  s.constant = fm_depth == 0.0;
  s.label = "dressed " + to_string(axis);
  const double cycles = duration * f;
  if (!s.constant && std::abs(cycles - std::round(cycles)) < 1e-9 * std::max(1.0, cycles) &&
      std::round(cycles) >= 1.0) {
    s.period = duration / std::round(cycles);
    const double clock_phase = std::fmod(clock_offset * f, 1.0);
    s.cache_key = detail::format_key("dressed:%.17g:%.17g:%.17g:%.17g", omega_carrier, f,
                                     fm_depth, phi + kTwoPi * clock_phase) +
                  (circular ? ":c" : ":fm");
  }
  s.validate();
  return s;
}

inline double dressed_rabi_hz(double fm_depth) { return 0.5 * fm_depth; }

/// Duration of a dressed rotation by `angle`.
inline double dressed_gate_duration(double angle, double fm_depth) {
  if (!(fm_depth > 0.0)) throw ConfigError("dressed gate needs a positive FM depth");
  return angle / (kTwoPi * dressed_rabi_hz(fm_depth));
}

// ------------------------------------------------------------------ SMART --

/// Sinusoidally modulated always-on drive Omega(t) = omega_peak sin(2 pi t / t_mod)
/// and its calibrated two-axis control tones.
struct SmartParams {
  double omega_peak = 9e6;
  double t_mod = 260e-9;
  std::optional<double> tone_amp_y;
  std::optional<double> tone_amp_z;
  /// Fundamental-harmonic admixture of the z gate; keeps its rotation axis
  /// orthogonal to the y gate's.
  double tone_mix_z = 0.0;

  /// Dimensionless omega_peak * t_mod.
  double bessel_argument() const { return omega_peak * t_mod; }

  /// True when the Bessel argument sits within 1e-3 of a zero of J0.
  bool optimal() const {
    const double a = bessel_argument();
    for (int i = 0; i <= 20; ++i) {
      if (std::abs(a - bessel_j0_zero(i)) < 1e-3) return true;
    }
    return false;
  }

  void validate() const {
    if (!(omega_peak > 0.0 && omega_peak < kMaxEnvelopeHz)) {
      throw ConfigError("SmartParams: omega_peak must lie in (0, 1 GHz)");
    }
    if (!(t_mod > 0.0)) throw ConfigError("SmartParams: t_mod must be positive");
  }
};

enum class SmartGate { kIdentity, kPlusY2, kMinusY2, kY, kPlusZ2, kMinusZ2, kZ };

inline std::string to_string(SmartGate g) {
  switch (g) {
    case SmartGate::kIdentity: return "I";
    case SmartGate::kPlusY2: return "+Y/2";
    case SmartGate::kMinusY2: return "-Y/2";
    case SmartGate::kY: return "Y";
    case SmartGate::kPlusZ2: return "+Z/2";
    case SmartGate::kMinusZ2: return "-Z/2";
    case SmartGate::kZ: return "Z";
  }
  return "?";
}

/// Number of modulation periods a gate occupies at pi/2 per period.
inline int smart_gate_periods(SmartGate g) {
  switch (g) {
    case SmartGate::kY:
    case SmartGate::kZ: return 2;
    default: return 1;
  }
}

/// SMART drive over n_periods with Q-channel tones
/// amp_f cos(2 pi t / t_mod) + amp_2f cos(4 pi t / t_mod).
inline PulseSegment smart_tone_segment(const SmartParams& p, long n_periods, double amp_f,
                                       double amp_2f) {
  p.validate();
  if (n_periods < 1) throw InputError("smart segment needs at least one period");
  for (const double a : {amp_f, amp_2f}) {
    if (!std::isfinite(a) || std::abs(a) >= kMaxEnvelopeHz) {
      throw InvariantError("smart tone amplitude out of range");
    }
  }
  const double w = kTwoPi / p.t_mod;
  const double peak = p.omega_peak;
  PulseSegment s;
  s.duration = static_cast<double>(n_periods) * p.t_mod;
  s.period = p.t_mod;
  s.omega_i = [peak, w](double t) { return peak * std::sin(w * t); };
  if (amp_f != 0.0 || amp_2f != 0.0) {
    s.omega_q = [amp_f, amp_2f, w](double t) {
      return amp_f * std::cos(w * t) + amp_2f * std::cos(2.0 * w * t);
    };
  }
  s.bound_hz = peak + std::abs(amp_f) + std::abs(amp_2f);
  s.cache_key = detail::format_key("smart:%.17g:%.17g:%.17g:%.17g", peak, p.t_mod, amp_f, amp_2f);
  s.label = "smart";
  s.validate();
  return s;
}

/// SMART gate segment. The gate selects tone axis and sign; each period
/// rotates by pi/2 at the calibrated tone amplitude, so the identity may span
/// any number of periods and the other gates use smart_gate_periods(gate).
inline PulseSegment smart_segment(const SmartParams& p, long n_periods, SmartGate gate) {
  double amp_f = 0.0;
  double amp_2f = 0.0;
  auto require = [&](const std::optional<double>& a, const char* axis) {
    if (!a) {
      throw CalibrationError(std::string("SMART ") + axis +
                             " tone amplitude is not calibrated; run calibrate first");
    }
    return *a;
  };
  switch (gate) {
    case SmartGate::kIdentity: break;
    case SmartGate::kPlusY2:
    case SmartGate::kY: amp_f = require(p.tone_amp_y, "y"); break;
    case SmartGate::kMinusY2: amp_f = -require(p.tone_amp_y, "y"); break;
    case SmartGate::kPlusZ2:
    case SmartGate::kZ:
      amp_2f = require(p.tone_amp_z, "z");
      amp_f = p.tone_mix_z;
      break;
    case SmartGate::kMinusZ2:
      amp_2f = -require(p.tone_amp_z, "z");
      amp_f = -p.tone_mix_z;
      break;
  }
  PulseSegment s = smart_tone_segment(p, n_periods, amp_f, amp_2f);
  s.label = "smart " + to_string(gate);
  return s;
}

/// |(1/T) int_0^T exp(i theta(t)) dt| for theta(t) = 2 pi int_0^t omega_I, over
/// the first `period` of the segment. This is the first-order sensitivity
/// of the driven qubit to a static detuning; it equals |J0(omega T)| for
/// sinusoidal modulation.
inline double dephasing_sensitivity(const PulseSegment& seg, double period, int n_quad = 20000) {
  if (!(period > 0.0) || period > seg.duration * (1.0 + 1e-12)) {
    throw InputError("dephasing_sensitivity: period must lie in (0, duration]");
  }
  if (n_quad < 16) throw InputError("dephasing_sensitivity: too few quadrature nodes");
  const double h = period / n_quad;
  double theta = 0.0;
  double prev = seg.omega_i_at(0.0);
  Complex acc = 0.5 * Complex(1.0, 0.0);  // trapezoid end weight at t = 0
  for (int k = 1; k <= n_quad; ++k) {
    const double t = k * h;
    const double mid = seg.omega_i_at(t - 0.5 * h);
    const double cur = seg.omega_i_at(t);
    theta += kTwoPi * h * (prev + 4.0 * mid + cur) / 6.0;  // Simpson per cell
    prev = cur;
    const double weight = k == n_quad ? 0.5 : 1.0;
    acc += weight * std::exp(Complex(0.0, theta));
  }
  return std::abs(acc) / n_quad;
}

}  // namespace smartspin

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
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "smartspin/engine/evolve.hpp"
#include "smartspin/errors.hpp"
#include "smartspin/numerics/linalg.hpp"
#include "smartspin/waveform/modulated.hpp"

namespace smartspin {

enum class ToneAxis { kY, kZ };

inline std::string to_string(ToneAxis a) { return a == ToneAxis::kY ? "y" : "z"; }

struct ToneCalibrationOptions {
  double angle_tolerance = 1e-5;  // rad, bisection target
  double initial_bracket_hz = 0.5e6;
  int monotonic_samples = 33;
  /// Static detunings the per-period angle is averaged over. {0} is the
  /// noiseless calibration.
  std::vector<double> detunings_hz{0.0};
  EngineOptions engine;
};

/// Axis and angle of one modulation period with the given tone amplitudes.
inline AxisAngle smart_period_rotation(const SmartParams& p, double amp_f, double amp_2f,
                                       double detuning_hz = 0.0, const EngineOptions& opt = {}) {
  const PulseSegment s = smart_tone_segment(p, 1, amp_f, amp_2f);
  return axis_angle(segment_propagator(s, NoiseDraw::detuned(detuning_hz), opt).matrix());
}

/// First-order sensitivity of one tone-free SMART period to a static
/// detuning around delta0: |d r / d delta| / (2 pi t_mod), with r the
/// rotation vector of the period propagator. Equals |J0(omega_peak t_mod)|
/// at delta0 = 0.
inline double smart_idle_sensitivity(const SmartParams& p, double delta0 = 0.0,
                                     double step_hz = 1e3, const EngineOptions& opt = {}) {
  auto r = [&](double d) {
    const AxisAngle a = smart_period_rotation(p, 0.0, 0.0, d, opt);
    return Eigen::Vector3d(a.angle * a.axis);
  };
  return (r(delta0 + step_hz) - r(delta0 - step_hz)).norm() / (2.0 * step_hz) /
         (kTwoPi * p.t_mod);
}

namespace detail {

inline double mean_period_angle(const SmartParams& p, ToneAxis axis, double amp,
                                const ToneCalibrationOptions& o) {
  double sum = 0.0;
  for (const double d : o.detunings_hz) {
    const AxisAngle r = axis == ToneAxis::kY
                            ? smart_period_rotation(p, amp, 0.0, d, o.engine)
                            : smart_period_rotation(p, p.tone_mix_z, amp, d, o.engine);
    sum += r.angle;
  }
  return sum / static_cast<double>(o.detunings_hz.size());
}

}  // namespace detail

/// Tone amplitude (Hz) giving a per-period rotation of `target` rad about
/// the tone's axis, by bisection. For the z axis the fundamental admixture
/// p.tone_mix_z is held fixed. Throws CalibrationError when the angle is
/// not monotonic on the search bracket.
inline double calibrate_smart_tone(ToneAxis axis, const SmartParams& p, double target = kPi / 2,
                                   const ToneCalibrationOptions& o = {}) {
  p.validate();
  if (!(target >= 0.0 && target < kPi)) {
    throw InputError("calibrate_smart_tone: target must lie in [0, pi)");
  }
  if (o.detunings_hz.empty()) throw InputError("calibrate_smart_tone: no detunings given");
  auto angle = [&](double a) { return detail::mean_period_angle(p, axis, a, o); };
  const double base = angle(0.0);
  if (target <= base + o.angle_tolerance) {
    if (target == 0.0 || std::abs(target - base) <= o.angle_tolerance) return 0.0;
    throw CalibrationError("calibrate_smart_tone: target below the tone-free rotation");
  }
  double hi = o.initial_bracket_hz;
  int expansions = 0;
  while (angle(hi) < target) {
    hi *= 2.0;
    if (++expansions > 8) {
      throw CalibrationError("calibrate_smart_tone: target angle not reached below " +
                             std::to_string(hi / 1e6) + " MHz");
    }
  }
  double prev = base;
  for (int k = 1; k < o.monotonic_samples; ++k) {
    const double a = angle(hi * k / (o.monotonic_samples - 1));
    if (a < prev - 1e-9) {
      throw CalibrationError("calibrate_smart_tone: rotation angle is not monotonic in the tone "
                             "amplitude on [0, " + std::to_string(hi / 1e6) +
                             " MHz]; use a smaller bracket");
    }
    prev = a;
  }
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double a = angle(mid);
    if (std::abs(a - target) < o.angle_tolerance || hi - lo < 1e-9) return mid;
    (a < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct SmartCalibration {
  SmartParams params;
  Eigen::Vector3d axis_y;  // per-period rotation axes, Bloch coordinates
  Eigen::Vector3d axis_z;
  double angle_y = 0.0;
  double angle_z = 0.0;
  int orthogonality_iterations = 0;
};

/// Calibrates both tones to `target` per period and chooses the z gate's
/// fundamental admixture so that its axis is orthogonal to the y gate's
/// (secant iteration on the admixture, bisection on the amplitude inside).
/// Axes are always taken at zero detuning; only the angles follow
/// o.detunings_hz.
inline SmartCalibration calibrate_smart(SmartParams p, double target = kPi / 2,
                                        const ToneCalibrationOptions& o = {},
                                        double orthogonality_tolerance = 1e-8) {
  SmartCalibration out;
  p.tone_amp_y = calibrate_smart_tone(ToneAxis::kY, p, target, o);
  constexpr double d0 = 0.0;
  const AxisAngle ry = smart_period_rotation(p, *p.tone_amp_y, 0.0, d0, o.engine);
  out.axis_y = ry.axis;
  out.angle_y = ry.angle;

  auto overlap = [&](double mix) {
    SmartParams q = p;
    q.tone_mix_z = mix;
    const double az = calibrate_smart_tone(ToneAxis::kZ, q, target, o);
    return std::pair{az, smart_period_rotation(q, mix, az, d0, o.engine).axis.dot(out.axis_y)};
  };
  double m0 = 0.0;
  auto [a0, f0] = overlap(m0);
  double m1 = 0.05 * *p.tone_amp_y;
  auto [a1, f1] = overlap(m1);
  int it = 0;
  while (std::abs(f1) > orthogonality_tolerance) {
    if (++it > 40 || f1 == f0) {
      throw CalibrationError("calibrate_smart: z axis could not be made orthogonal to y");
    }
    const double m2 = m1 - f1 * (m1 - m0) / (f1 - f0);
    m0 = m1;
    f0 = f1;
    m1 = m2;
    std::tie(a1, f1) = overlap(m1);
  }
  p.tone_mix_z = m1;
  p.tone_amp_z = a1;
  const AxisAngle rz = smart_period_rotation(p, m1, a1, d0, o.engine);
  out.axis_z = rz.axis;
  out.angle_z = rz.angle;
  out.orthogonality_iterations = it;
  out.params = p;
  return out;
}

}  // namespace smartspin

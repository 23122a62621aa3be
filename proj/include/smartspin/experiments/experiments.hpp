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
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "smartspin/analysis/fits.hpp"
#include "smartspin/engine/evolve.hpp"
#include "smartspin/engine/lab_frame.hpp"
#include "smartspin/engine/shots.hpp"
#include "smartspin/experiments/calibration.hpp"
#include "smartspin/experiments/sweep.hpp"
#include "smartspin/numerics/bessel.hpp"
#include "smartspin/physics/constants.hpp"
#include "smartspin/waveform/modulated.hpp"
#include "smartspin/waveform/pulse.hpp"

namespace smartspin {

namespace detail {

inline double p0_of(const Vector2c& psi) { return std::clamp(std::norm(psi(0)), 0.0, 1.0); }

// Rectangular pulse at a static detuning.
inline Su2 pulse(Axis axis, double angle, double omega, double detune, const NoiseDraw& d) {
  PulseSegment s = bare_pulse(axis, angle, omega);
  if (detune != 0.0) {
    s.delta = [detune](double) { return detune; };
    s.bound_hz += std::abs(detune);
  }
  return segment_propagator(s, d);
}

inline Json fit_summary(const FitOutcome& f, const char* t2_name) {
  Json j = to_json(f);
  if (!f.flagged) {
    j["frequency_Hz"] = json_number(f.value("f"));
    j["frequency_ci95_Hz"] = json_number(f.ci95("f"));
    j[t2_name] = json_number(f.value("T2"));
    j[std::string(t2_name) + "_ci95"] = json_number(f.ci95("T2"));
  }
  return j;
}

}  // namespace detail

// ------------------------------------------------------------------- ODMR --

struct OdmrConfig {
  double f_min_hz = 0.0;  // both 0: centre of the hyperfine pair +- 5 MHz
  double f_max_hz = 0.0;
  std::size_t n_points = 201;
  double pulse_len_s = 0.0;  // 0: pi pulse at omega
  double omega_hz = 0.5e6;
};

/// Fixed-length pulse versus drive frequency; p0 dips at the |0> <-> |+1>
/// hyperfine lines of the static Hamiltonian.
inline SweepResult odmr_sweep(const OdmrConfig& cfg, const ExperimentContext& ctx) {
  if (!(cfg.omega_hz > 0.0)) throw ConfigError("odmr: omega must be positive");
  if (cfg.n_points < 2) throw ConfigError("odmr: need at least two points");
  const LabFrameModel model(ctx.physics);
  const double center = model.center_hz();
  const double line_up = model.line_hz(0.5);
  const double line_down = model.line_hz(-0.5);
  const double lo = cfg.f_min_hz == 0.0 && cfg.f_max_hz == 0.0 ? center - 5e6 : cfg.f_min_hz;
  const double hi = cfg.f_min_hz == 0.0 && cfg.f_max_hz == 0.0 ? center + 5e6 : cfg.f_max_hz;
  if (!(hi > lo)) throw ConfigError("odmr: f_max must exceed f_min");
  const double len = cfg.pulse_len_s > 0.0 ? cfg.pulse_len_s : 0.5 / cfg.omega_hz;
  SweepResult r;
  r.experiment = "odmr";
  r.axis_name = "f";
  r.axis_unit = "Hz";
  r.axis_values = linspace(lo, hi, cfg.n_points);
  const auto trace = [&](const NoiseDraw& d) {
    const double line = d.nuclear_m > 0.0 ? line_up : d.nuclear_m < 0.0 ? line_down : center;
    std::vector<double> p(r.axis_values.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
      // two-level detuning = line - f + bath; the draw already carries m_I A_par
      const double detune = line - r.axis_values[k] - d.nuclear_hz;
      const Su2 u = segment_propagator(
          constant_segment(len, cfg.omega_hz, 0.0, detune, "odmr"), d, ctx.shot_options.engine);
      p[k] = detail::p0_of(u.apply(ground_state()));
    }
    return p;
  };
  r.assign(run_shot_traces(trace, r.axis_values.size(), ctx.noise, ctx.shots, ctx.seed,
                           ctx.shot_options));
  r.metadata = to_json(ctx);
  r.metadata["f_min_Hz"] = lo;
  r.metadata["f_max_Hz"] = hi;
  r.metadata["n_points"] = cfg.n_points;
  r.metadata["pulse_len_s"] = len;
  r.metadata["omega_Hz"] = cfg.omega_hz;
  r.fits["line_plus_half_Hz"] = line_up;
  r.fits["line_minus_half_Hz"] = line_down;
  r.fits["splitting_Hz"] = line_up - line_down;
  r.validate();
  return r;
}

/// Axis positions of the two deepest separated dips of an ODMR trace.
inline std::vector<double> odmr_dips(const SweepResult& r, double min_separation_hz) {
  std::vector<std::size_t> idx(r.p0_mean.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return r.p0_mean[a] < r.p0_mean[b]; });
  std::vector<double> out;
  for (const auto i : idx) {
    const bool far = std::all_of(out.begin(), out.end(), [&](double f) {
      return std::abs(f - r.axis_values[i]) >= min_separation_hz;
    });
    if (far) out.push_back(r.axis_values[i]);
    if (out.size() == 2) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ----------------------------------------------------------- Rabi, Ramsey --

struct RabiConfig {
  double t_max_s = 1e-6;
  std::size_t n_points = 201;
  double omega_hz = defaults::kRabiHz;
  double detune_hz = 0.0;  // from the hyperfine midpoint
};

inline SweepResult rabi(const RabiConfig& cfg, const ExperimentContext& ctx) {
  if (!(cfg.omega_hz > 0.0)) throw ConfigError("rabi: omega must be positive");
  if (!(cfg.t_max_s > 0.0) || cfg.n_points < 2) throw ConfigError("rabi: bad time grid");
  SweepResult r;
  r.experiment = "rabi";
  r.axis_name = "t";
  r.axis_unit = "s";
  r.axis_values = linspace(0.0, cfg.t_max_s, cfg.n_points);
  const auto trace = [&](const NoiseDraw& d) {
    std::vector<double> p(r.axis_values.size(), 1.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double t = r.axis_values[k];
      if (t <= 0.0) continue;
      const Su2 u = segment_propagator(
          constant_segment(t, cfg.omega_hz, 0.0, cfg.detune_hz, "rabi"), d, ctx.shot_options.engine);
      p[k] = detail::p0_of(u.apply(ground_state()));
    }
    return p;
  };
  r.assign(run_shot_traces(trace, r.axis_values.size(), ctx.noise, ctx.shots, ctx.seed,
                           ctx.shot_options));
  r.metadata = to_json(ctx);
  r.metadata["t_max_s"] = cfg.t_max_s;
  r.metadata["n_points"] = cfg.n_points;
  r.metadata["omega_Hz"] = cfg.omega_hz;
  r.metadata["detune_Hz"] = cfg.detune_hz;
  if (cfg.n_points >= 8) {
    const FitOutcome f =
        fit_decaying_sinusoid(r.axis_values, r.p0_mean, DecayEnvelope::kExponential);
    r.fits["decaying_sinusoid"] = detail::fit_summary(f, "T2_rabi_s");
    r.fits["envelope"] = "exponential";
  }
  r.validate();
  return r;
}

struct RamseyConfig {
  double tau_max_s = 3e-6;
  std::size_t n_points = 151;
  double omega_hz = defaults::kRabiHz;
  double detune_hz = 0.0;
};

/// X/2 - idle(tau) - X/2.
inline SweepResult ramsey(const RamseyConfig& cfg, const ExperimentContext& ctx) {
  if (!(cfg.omega_hz > 0.0)) throw ConfigError("ramsey: omega must be positive");
  if (!(cfg.tau_max_s > 0.0) || cfg.n_points < 2) throw ConfigError("ramsey: bad delay grid");
  SweepResult r;
  r.experiment = "ramsey";
  r.axis_name = "tau";
  r.axis_unit = "s";
  r.axis_values = linspace(0.0, cfg.tau_max_s, cfg.n_points);
  const auto trace = [&](const NoiseDraw& d) {
    const Su2 half = detail::pulse(Axis::kPlusX, kPi / 2, cfg.omega_hz, cfg.detune_hz, d);
    std::vector<double> p(r.axis_values.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double tau = r.axis_values[k];
      Su2 u = half * half;
      if (tau > 0.0) {
        const Su2 wait = segment_propagator(constant_segment(tau, 0.0, 0.0, cfg.detune_hz, "wait"),
                                            d, ctx.shot_options.engine);
        u = half * wait * half;
      }
      p[k] = detail::p0_of(u.apply(ground_state()));
    }
    return p;
  };
  r.assign(run_shot_traces(trace, r.axis_values.size(), ctx.noise, ctx.shots, ctx.seed,
                           ctx.shot_options));
  r.metadata = to_json(ctx);
  r.metadata["tau_max_s"] = cfg.tau_max_s;
  r.metadata["n_points"] = cfg.n_points;
  r.metadata["omega_Hz"] = cfg.omega_hz;
  r.metadata["detune_Hz"] = cfg.detune_hz;
  if (cfg.n_points >= 8) {
    const FitOutcome f = fit_decaying_sinusoid(r.axis_values, r.p0_mean, DecayEnvelope::kGaussian);
    r.fits["decaying_sinusoid"] = detail::fit_summary(f, "T2_star_s");
    r.fits["envelope"] = "gaussian";
  }
  r.validate();
  return r;
}

// ------------------------------------------------------------ SMART Ramsey --

struct SmartRamseyConfig {
  std::vector<double> t_mod_list = linspace(100e-9, 700e-9, 61);
  double omega_peak_hz = defaults::kRabiHz;
  double pulse_omega_hz = defaults::kRabiHz;  // +-Y/2 pulses
  std::size_t n_points = 64;                  // delays per t_mod
  /// Each trace spans window_factor * T2* / s, clamped to [window_min_s,
  /// window_max_s], in whole periods; s is smart_idle_sensitivity at the
  /// nuclear detuning of the noise model (|J0| without it).
  double window_factor = 3.0;
  double window_min_s = 4e-6;
  double window_max_s = 150e-6;
  long n_periods_max = 0;  // optional hard cap, 0 = none
};

struct SmartRamseyResult {
  std::vector<SweepResult> traces;
  std::vector<double> t_mod;
  std::vector<CoherenceEstimate> coherence;
  CoherenceSummary summary;
  FitOutcome bessel;
  bool bessel_fitted = false;
  double bare_t2_star = 0.0;
  Json metadata = Json::object();

  std::vector<double> t2() const {
    std::vector<double> v;
    for (const auto& c : coherence) v.push_back(c.t2);
    return v;
  }
};

/// Reference bare T2* of a noise model (quasi-static Gaussian bath).
inline double bare_t2_star(const NoiseModel& n) {
  return n.sigma_bath_hz > 0.0 ? std::sqrt(2.0) / (kTwoPi * n.sigma_bath_hz)
                               : defaults::kT2StarSeconds;
}

/// -Y/2 - SMART identity (n t_mod) - +Y/2 for every t_mod, with a Gaussian
/// coherence fit per trace, normalised 1/T2, |J0| fit and maxima.
inline SmartRamseyResult smart_ramsey(const SmartRamseyConfig& cfg, const ExperimentContext& ctx) {
  if (cfg.t_mod_list.empty()) throw ConfigError("smart_ramsey: empty t_mod list");
  if (cfg.n_points < 8) throw ConfigError("smart_ramsey: need at least 8 delays per trace");
  if (!(cfg.window_min_s > 0.0 && cfg.window_max_s >= cfg.window_min_s)) {
    throw ConfigError("smart_ramsey: bad window bounds");
  }
  SmartRamseyResult out;
  out.bare_t2_star = bare_t2_star(ctx.noise);
  for (std::size_t m = 0; m < cfg.t_mod_list.size(); ++m) {
    SmartParams p;
    p.omega_peak = cfg.omega_peak_hz;
    p.t_mod = cfg.t_mod_list[m];
    p.validate();
    const bool nuclear = ctx.noise.nuclear_uninitialized || ctx.noise.fixed_nuclear_m.has_value();
    const double sens =
        smart_idle_sensitivity(p, nuclear ? 0.5 * ctx.noise.a_parallel_hz : 0.0, 1e3,
                               ctx.shot_options.engine);
    const double window =
        std::clamp(cfg.window_factor * out.bare_t2_star / std::max(sens, 1e-12), cfg.window_min_s,
                   cfg.window_max_s);
    long n_max = std::max(1L, static_cast<long>(std::floor(window / p.t_mod)));
    if (cfg.n_periods_max > 0) n_max = std::min(n_max, cfg.n_periods_max);
    std::vector<long> grid;
    for (std::size_t k = 0; k < cfg.n_points; ++k) {
      const long n = std::lround(static_cast<double>(k) * static_cast<double>(n_max) /
                                 static_cast<double>(cfg.n_points - 1));
      if (grid.empty() || n != grid.back()) grid.push_back(n);
    }
    SweepResult r;
    r.experiment = "smart_ramsey";
    r.axis_name = "t";
    r.axis_unit = "s";
    for (const long n : grid) r.axis_values.push_back(static_cast<double>(n) * p.t_mod);
    const PulseSegment period = smart_tone_segment(p, 1, 0.0, 0.0);
    const auto trace = [&](const NoiseDraw& d) {
      // The state is prepared along the drive axis x, which is orthogonal
      // to the first-order idle axis for every t_mod.
      const Su2 open = detail::pulse(Axis::kMinusY, kPi / 2, cfg.pulse_omega_hz, 0.0, d);
      const Su2 close = detail::pulse(Axis::kPlusY, kPi / 2, cfg.pulse_omega_hz, 0.0, d);
      const Su2 one = segment_propagator(period, d, ctx.shot_options.engine);
      std::vector<double> pv(grid.size());
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const Su2 u = close * power(one, static_cast<unsigned long long>(grid[k])) * open;
        pv[k] = detail::p0_of(u.apply(ground_state()));
      }
      return pv;
    };
    ShotOptions so = ctx.shot_options;
    so.stream = m;
    r.assign(run_shot_traces(trace, grid.size(), ctx.noise, ctx.shots, ctx.seed, so));
    r.metadata = Json::object();
    r.metadata["t_mod_s"] = p.t_mod;
    r.metadata["n_periods_max"] = n_max;
    r.metadata["sensitivity"] = sens;
    CoherenceEstimate est = grid.size() >= 5
                                ? estimate_coherence(r.axis_values, r.p0_mean,
                                                     DecayEnvelope::kGaussian, r.p0_sem)
                                : CoherenceEstimate{};
    Json fj = to_json(est.fit);
    fj["T2_s"] = json_number(est.t2);
    fj["T2_ci95_s"] = json_number(est.t2_ci95);
    fj["no_decay"] = est.no_decay;
    fj["oscillating"] = est.oscillating;
    fj["envelope"] = "gaussian";
    r.fits["coherence"] = fj;
    r.validate();
    out.t_mod.push_back(p.t_mod);
    out.coherence.push_back(est);
    out.traces.push_back(std::move(r));
  }
  const std::vector<double> t2 = out.t2();
  out.summary = summarize_coherence(out.t_mod, t2, out.bare_t2_star);
  std::vector<double> x, y, s;
  double max_inv = 0.0;
  for (const double v : t2) {
    if (std::isfinite(v) && v > 0.0) max_inv = std::max(max_inv, 1.0 / v);
  }
  for (std::size_t i = 0; i < t2.size(); ++i) {
    if (!std::isfinite(t2[i]) || !(t2[i] > 0.0)) continue;
    const double sd = out.coherence[i].t2_ci95 / kCi95;
    x.push_back(out.t_mod[i]);
    y.push_back(out.summary.inv_t2_normalized[i]);
    s.push_back(std::max(sd / (t2[i] * t2[i]) / max_inv, 1e-3));
  }
  if (x.size() >= 6) {
    out.bessel = fit_bessel_coherence(x, y, s, cfg.omega_peak_hz);
    out.bessel_fitted = true;
  }
  out.metadata = to_json(ctx);
  out.metadata["omega_peak_Hz"] = cfg.omega_peak_hz;
  out.metadata["pulse_omega_Hz"] = cfg.pulse_omega_hz;
  out.metadata["n_points"] = cfg.n_points;
  out.metadata["window_factor"] = cfg.window_factor;
  out.metadata["window_min_s"] = cfg.window_min_s;
  out.metadata["window_max_s"] = cfg.window_max_s;
  out.metadata["n_periods_max"] = cfg.n_periods_max;
  out.metadata["t_mod_s"] = cfg.t_mod_list;
  return out;
}

inline void write_smart_ramsey_csv(std::ostream& os, const SmartRamseyResult& r) {
  os << "t_mod_s,T2_s,T2_ci95_s,inv_T2_normalized,no_decay\n";
  for (std::size_t i = 0; i < r.t_mod.size(); ++i) {
    const auto& c = r.coherence[i];
    const double inv = r.summary.inv_t2_normalized[i];
    os << format_double(r.t_mod[i]) << ',' << (std::isfinite(c.t2) ? format_double(c.t2) : "inf")
       << ',' << format_double(c.t2_ci95) << ',' << (std::isfinite(inv) ? format_double(inv) : "nan")
       << ',' << (c.no_decay ? 1 : 0) << '\n';
  }
}

inline void write_smart_ramsey_traces_csv(std::ostream& os, const SmartRamseyResult& r) {
  os << "t_mod_s,t_s,p0_mean,p0_sem\n";
  for (std::size_t i = 0; i < r.traces.size(); ++i) {
    const auto& t = r.traces[i];
    for (std::size_t k = 0; k < t.axis_values.size(); ++k) {
      os << format_double(r.t_mod[i]) << ',' << format_double(t.axis_values[k]) << ','
         << format_double(t.p0_mean[k]) << ',' << format_double(t.p0_sem[k]) << '\n';
    }
  }
}

inline Json to_json(const SmartRamseyResult& r) {
  Json j = Json::object();
  j["experiment"] = "smart_ramsey";
  j["config"] = r.metadata;
  j["bare_T2_star_s"] = r.bare_t2_star;
  Json rows = Json::array();
  for (std::size_t i = 0; i < r.t_mod.size(); ++i) {
    Json row = r.traces[i].fits["coherence"];
    row["t_mod_s"] = r.t_mod[i];
    row["inv_T2_normalized"] = json_number(r.summary.inv_t2_normalized[i]);
    rows.push_back(row);
  }
  j["per_t_mod"] = rows;
  Json peaks = Json::array();
  for (const auto& p : r.summary.peaks) {
    peaks.push_back({{"t_mod_s", p.t_mod}, {"T2_s", p.t2}, {"improvement_vs_bare", p.improvement}});
  }
  j["coherence_maxima"] = peaks;
  j["no_decay_points"] = r.summary.no_decay_points;
  if (r.bessel_fitted) {
    Json b = to_json(r.bessel);
    if (!r.bessel.flagged) {
      const double w = r.bessel.value("omega_eff");
      b["zeros_s"] = {bessel_j0_zero(0) / w, bessel_j0_zero(1) / w};
    }
    j["bessel_fit"] = b;
  } else {
    j["bessel_fit"] = nullptr;
  }
  return j;
}

// ------------------------------------------------- dressed and SMART Rabi --

struct DressedRabiConfig {
  double fm_depth_hz = defaults::kDressedFmDepthHz;
  double carrier_hz = defaults::kRabiHz;
  double fm_frequency_hz = 0.0;  // 0: carrier
  DressedMode mode = DressedMode::kFrequencyModulated;
  double t_max_s = 80e-6;
  long step_periods = 2;  // modulation periods between samples
  double prep_omega_hz = defaults::kRabiHz;
};

namespace detail {

// -Y/2 prep, u, +Y/2 projection.
inline double prep_project(const Su2& u, double omega, const NoiseDraw& d) {
  const Su2 prep = pulse(Axis::kMinusY, kPi / 2, omega, 0.0, d);
  const Su2 proj = pulse(Axis::kPlusY, kPi / 2, omega, 0.0, d);
  return p0_of((proj * u * prep).apply(ground_state()));
}

inline SweepResult periodic_rabi(const std::string& name, const PulseSegment& one_period,
                                 double period, long step, long n_max, double prep_omega,
                                 const ExperimentContext& ctx) {
  SweepResult r;
  r.experiment = name;
  r.axis_name = "t";
  r.axis_unit = "s";
  std::vector<long> grid;
  for (long n = 0; n <= n_max; n += step) grid.push_back(n);
  for (const long n : grid) r.axis_values.push_back(static_cast<double>(n) * period);
  const auto trace = [&](const NoiseDraw& d) {
    const Su2 one = segment_propagator(one_period, d, ctx.shot_options.engine);
    std::vector<double> p(grid.size());
    Su2 u = Su2::identity();
    const Su2 stride = power(one, static_cast<unsigned long long>(step));
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (k > 0) {
        u = stride * u;
        if (k % 64 == 0) u.renormalize();
      }
      p[k] = prep_project(u, prep_omega, d);
    }
    return p;
  };
  r.assign(run_shot_traces(trace, grid.size(), ctx.noise, ctx.shots, ctx.seed, ctx.shot_options));
  if (grid.size() >= 8) {
    const FitOutcome f =
        fit_decaying_sinusoid(r.axis_values, r.p0_mean, DecayEnvelope::kExponential);
    r.fits["decaying_sinusoid"] = fit_summary(f, "T2_rabi_s");
    r.fits["envelope"] = "exponential";
  }
  return r;
}

}  // namespace detail

/// -Y/2, always-on drive with detuning modulation for a swept duration, +Y/2.
/// Durations are whole modulation periods.
inline SweepResult dressed_rabi(const DressedRabiConfig& cfg, const ExperimentContext& ctx) {
  const double f = cfg.fm_frequency_hz > 0.0 ? cfg.fm_frequency_hz : cfg.carrier_hz;
  if (!(f > 0.0) || cfg.step_periods < 1 || !(cfg.t_max_s > 0.0)) {
    throw ConfigError("dressed_rabi: bad modulation frequency or grid");
  }
  const double period = 1.0 / f;
  const PulseSegment one =
      dressed_gate(Axis::kPlusX, cfg.fm_depth_hz, period, cfg.carrier_hz, f, 0.0, cfg.mode);
  const auto n_max = static_cast<long>(std::floor(cfg.t_max_s / period));
  SweepResult r =
      detail::periodic_rabi("dressed_rabi", one, period, cfg.step_periods, n_max, cfg.prep_omega_hz,
                            ctx);
  r.metadata = to_json(ctx);
  r.metadata["fm_depth_Hz"] = cfg.fm_depth_hz;
  r.metadata["carrier_Hz"] = cfg.carrier_hz;
  r.metadata["fm_frequency_Hz"] = f;
  r.metadata["mode"] = cfg.mode == DressedMode::kCircular ? "circular" : "fm";
  r.metadata["t_max_s"] = cfg.t_max_s;
  r.metadata["step_periods"] = cfg.step_periods;
  r.validate();
  return r;
}

struct SmartRabiConfig {
  SmartParams params;  // tones must be calibrated for the chosen axis
  ToneAxis axis = ToneAxis::kZ;
  long n_periods_max = 600;
  long step_periods = 1;
  double prep_omega_hz = defaults::kRabiHz;
};

/// -Y/2, SMART drive with one calibrated tone for n periods, +Y/2.
inline SweepResult smart_rabi(const SmartRabiConfig& cfg, const ExperimentContext& ctx) {
  if (cfg.n_periods_max < 1 || cfg.step_periods < 1) throw ConfigError("smart_rabi: bad grid");
  const SmartGate gate = cfg.axis == ToneAxis::kY ? SmartGate::kPlusY2 : SmartGate::kPlusZ2;
  const PulseSegment one = smart_segment(cfg.params, 1, gate);
  SweepResult r = detail::periodic_rabi("smart_rabi", one, cfg.params.t_mod, cfg.step_periods,
                                        cfg.n_periods_max, cfg.prep_omega_hz, ctx);
  r.metadata = to_json(ctx);
  r.metadata["omega_peak_Hz"] = cfg.params.omega_peak;
  r.metadata["t_mod_s"] = cfg.params.t_mod;
  r.metadata["tone_axis"] = to_string(cfg.axis);
  r.metadata["tone_amp_y_Hz"] = cfg.params.tone_amp_y ? Json(*cfg.params.tone_amp_y) : Json(nullptr);
  r.metadata["tone_amp_z_Hz"] = cfg.params.tone_amp_z ? Json(*cfg.params.tone_amp_z) : Json(nullptr);
  r.metadata["tone_mix_z_Hz"] = cfg.params.tone_mix_z;
  r.metadata["n_periods_max"] = cfg.n_periods_max;
  r.metadata["step_periods"] = cfg.step_periods;
  r.validate();
  return r;
}

/// Fitted T2 of a Rabi-type sweep, NaN when the fit is flagged.
inline double fitted_t2_rabi(const SweepResult& r) {
  const Json& f = r.fits.at("decaying_sinusoid");
  if (f.at("flagged").get<bool>() || !f.contains("T2_rabi_s") || f.at("T2_rabi_s").is_null()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return f.at("T2_rabi_s").get<double>();
}

// ------------------------------------------------- noise calibration --

struct AmpCalibrationConfig {
  double target_t2_rabi_s = defaults::kT2RabiSeconds;
  RabiConfig rabi{12e-6, 1201, defaults::kRabiHz, 0.0};
  double sigma_amp_max = 0.05;
  double relative_tolerance = 2e-3;
};

struct AmpCalibration {
  double sigma_amp = 0.0;
  double t2_rabi_s = 0.0;
  double t2_rabi_at_zero_s = 0.0;
  int iterations = 0;
};

/// sigma_amp such that the fitted bare Rabi decay under the full noise
/// model of `ctx` (with its sigma_amp replaced) equals the target.
inline AmpCalibration calibrate_sigma_amp(const AmpCalibrationConfig& cfg, ExperimentContext ctx) {
  auto t2_at = [&](double s) {
    ctx.noise.sigma_amp = s;
    return fitted_t2_rabi(rabi(cfg.rabi, ctx));
  };
  AmpCalibration out;
  out.t2_rabi_at_zero_s = t2_at(0.0);
  if (!(out.t2_rabi_at_zero_s > cfg.target_t2_rabi_s)) {
    throw CalibrationError("calibrate_sigma_amp: Rabi decay without amplitude noise (" +
                           std::to_string(out.t2_rabi_at_zero_s * 1e6) +
                           " us) is already shorter than the target");
  }
  if (!(t2_at(cfg.sigma_amp_max) < cfg.target_t2_rabi_s)) {
    throw CalibrationError("calibrate_sigma_amp: target not reached at sigma_amp_max");
  }
  double lo = 0.0;
  double hi = cfg.sigma_amp_max;
  for (int it = 1; it <= 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double t2 = t2_at(mid);
    out.iterations = it;
    out.sigma_amp = mid;
    out.t2_rabi_s = t2;
    if (std::abs(t2 - cfg.target_t2_rabi_s) <= cfg.relative_tolerance * cfg.target_t2_rabi_s) break;
    (std::isnan(t2) || t2 < cfg.target_t2_rabi_s ? hi : lo) = mid;
  }
  return out;
}

}  // namespace smartspin

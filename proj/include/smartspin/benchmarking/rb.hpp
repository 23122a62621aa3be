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
#include <cstdint>
#include <limits>
#include <ostream>
#include <set>
#include <span>
#include <vector>

#include "smartspin/analysis/fits.hpp"
#include "smartspin/benchmarking/clifford.hpp"
#include "smartspin/engine/evolve.hpp"
#include "smartspin/engine/noise.hpp"
#include "smartspin/engine/shots.hpp"
#include "smartspin/errors.hpp"
#include "smartspin/experiments/calibration.hpp"
#include "smartspin/experiments/sweep.hpp"
#include "smartspin/numerics/nlls.hpp"
#include "smartspin/physics/constants.hpp"
#include "smartspin/waveform/modulated.hpp"
#include "smartspin/waveform/pulse.hpp"
#include "smartspin/waveform/sample.hpp"

namespace smartspin {

// ------------------------------------------------------------ bounds --

/// Rabi quality factor: full oscillations within the Rabi decay time.
inline double quality_factor(double omega_hz, double t2_rabi_s) {
  if (!(omega_hz > 0.0) || !(t2_rabi_s > 0.0)) {
    throw InputError("quality_factor: omega and T2 must be positive");
  }
  return omega_hz * t2_rabi_s;
}

/// Fidelity upper bound 1 - 1.875 / (4 Q).
inline double upper_bound(double q) {
  if (!(q > 0.0)) throw InputError("upper_bound: Q must be positive");
  return 1.0 - 1.875 / (4.0 * q);
}

struct FidelityBound {
  double q = 0.0;           // omega * T2
  double ub = 0.0;
  double q_pi = 0.0;        // 2 omega * T2 (counting pi rotations)
  double ub_pi = 0.0;
};

inline FidelityBound fidelity_bound(double omega_hz, double t2_rabi_s) {
  FidelityBound b;
  b.q = quality_factor(omega_hz, t2_rabi_s);
  b.ub = upper_bound(b.q);
  b.q_pi = 2.0 * b.q;
  b.ub_pi = upper_bound(b.q_pi);
  return b;
}

// -------------------------------------------------------- compilation --

struct RbBasisConfig {
  Basis basis = Basis::kBare;
  double bare_omega_hz = defaults::kRabiHz;
  double dressed_carrier_hz = defaults::kRabiHz;
  double dressed_fm_depth_hz = defaults::kDressedFmDepthHz;
  /// Circular by default: FM gates carry ~0.08 counter-rotating error.
  DressedMode dressed_mode = DressedMode::kCircular;
  SmartParams smart;  // tones must be calibrated for the SMART basis
  double prep_omega_hz = defaults::kRabiHz;
};

/// Turns Clifford indices into pulse segments of one basis.
///
/// Each basis has a frame V (columns: physical Bloch axes of the logical
/// x, y, z) and a prepared logical state s0. Physical gates realise
/// W C W^dagger, W the SU(2) lift of V. For the dressed basis "physical"
/// means the interaction picture of the always-on drive, whose frame
/// rotation commutes with the readout axis.
class RbCompiler {
 public:
  explicit RbCompiler(RbBasisConfig cfg, EngineOptions opt = {})
      : cfg_(std::move(cfg)), opt_(opt) {
    Eigen::Vector3d prepared = Eigen::Vector3d::UnitZ();
    switch (cfg_.basis) {
      case Basis::kBare:
        if (!(cfg_.bare_omega_hz > 0.0)) throw ConfigError("rb: bare Rabi frequency must be > 0");
        frame_.setIdentity();
        break;
      case Basis::kDressed: {
        if (!(cfg_.dressed_fm_depth_hz > 0.0)) {
          throw ConfigError("rb: dressed basis needs a positive FM depth");
        }
        RbBasisConfig exact = cfg_;
        exact.dressed_mode = DressedMode::kCircular;
        const RbCompiler probe(exact, opt_, Eigen::Matrix3d::Identity());
        const Eigen::Vector3d ax = probe.primitive_axis({0, kPi / 2});
        const Eigen::Vector3d ay = probe.primitive_axis({1, kPi / 2});
        set_frame(ax, ay, ax.cross(ay));
        prepared = prepared_bloch();
        break;
      }
      case Basis::kSmart: {
        const SmartParams& p = cfg_.smart;
        if (!p.tone_amp_y || !p.tone_amp_z) {
          throw CalibrationError("rb: SMART basis requires calibrated y and z tones");
        }
        const Eigen::Vector3d ny =
            smart_period_rotation(p, *p.tone_amp_y, 0.0, 0.0, opt_).axis;
        const Eigen::Vector3d nz =
            smart_period_rotation(p, p.tone_mix_z, *p.tone_amp_z, 0.0, opt_).axis;
        set_frame(ny.cross(nz), ny, nz);
        prepared = prepared_bloch();
        break;
      }
    }
    w_ = su2_from_rotation(frame_);
    initial_ = frame_.transpose() * prepared;
    for (int i = 0; i < 3; ++i) {
      if (std::abs(std::abs(initial_(i)) - 1.0) < 1e-3) {
        initial_ = Eigen::Vector3d::Zero();
        initial_(i) = prepared.dot(frame_.col(i)) > 0.0 ? 1.0 : -1.0;
        return;
      }
    }
    throw InvariantError("rb: prepared state is not a logical Pauli eigenstate");
  }

  const RbBasisConfig& config() const { return cfg_; }
  Basis basis() const { return cfg_.basis; }
  const Eigen::Matrix3d& frame() const { return frame_; }
  /// Logical Bloch vector of the prepared state.
  const Eigen::Vector3d& initial_state() const { return initial_; }

  /// Ideal physical unitary of Clifford i.
  Su2 ideal(int i) const { return w_ * clifford_group().element(i).unitary * w_.adjoint(); }

  /// Gate segments for a list of Cliffords; `clock` is the time since the
  /// always-on drive started and is advanced.
  PulseSequence compile(const std::vector<int>& cliffords, double& clock) const {
    PulseSequence seq;
    const auto& g = clifford_group();
    for (const int c : cliffords) {
      const auto& word = g.element(c).decomposition(cfg_.basis);
      if (word.empty() && cfg_.basis == Basis::kSmart) {
        seq.append(smart_segment(cfg_.smart, 1, SmartGate::kIdentity));
        clock += cfg_.smart.t_mod;
      }
      for (const auto& p : word) {
        PulseSegment s = primitive_segment(p, clock);
        clock += s.duration;
        seq.append(std::move(s));
      }
    }
    return seq;
  }

  /// Noiseless-or-noisy propagator of the gates alone, in the basis's
  /// physical frame (dressed: interaction picture of the always-on drive,
  /// which starts at clock 0).
  Su2 gates_propagator(const std::vector<int>& cliffords, const NoiseDraw& d,
                       PropagatorCache* cache = nullptr) const {
    double clock = 0.0;
    const PulseSequence seq = compile(cliffords, clock);
    const Su2 u = sequence_propagator(seq, d, opt_, cache);
    return cfg_.basis == Basis::kDressed ? drive_frame(clock).adjoint() * u : u;
  }

  /// p0 after prep, the full sequence (recovery included) and projection.
  double sequence_p0(const RbSequence& s, const NoiseDraw& d,
                     PropagatorCache* cache = nullptr) const {
    std::vector<int> all = s.cliffords;
    all.push_back(s.recovery);
    double clock = 0.0;
    PulseSequence seq;
    if (cfg_.basis != Basis::kBare) seq.append(bare_pulse(Axis::kMinusY, kPi / 2, cfg_.prep_omega_hz));
    seq.append(compile(all, clock));
    if (cfg_.basis != Basis::kBare) seq.append(bare_pulse(Axis::kPlusY, kPi / 2, cfg_.prep_omega_hz));
    const Su2 u = sequence_propagator(seq, d, opt_, cache);
    const Vector2c psi = u.apply(ground_state());
    return std::clamp(std::norm(psi(0)), 0.0, 1.0);
  }

  /// Physical rotation axis of one primitive, from its noiseless propagator.
  Eigen::Vector3d primitive_axis(const Primitive& p) const {
    double clock = 0.0;
    const PulseSegment s = primitive_segment(p, clock);
    Su2 u = segment_propagator(s, NoiseDraw::none(), opt_);
    if (cfg_.basis == Basis::kDressed) u = drive_frame(s.duration).adjoint() * u;
    return axis_angle(u.matrix()).axis;
  }

 private:
  RbCompiler(RbBasisConfig cfg, EngineOptions opt, const Eigen::Matrix3d& frame)
      : cfg_(std::move(cfg)), opt_(opt), frame_(frame) {}

  void set_frame(const Eigen::Vector3d& x, const Eigen::Vector3d& y, const Eigen::Vector3d& z) {
    frame_.col(0) = x;
    frame_.col(1) = y;
    frame_.col(2) = z;
    if ((frame_.transpose() * frame_ - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-6) {
      throw CalibrationError("rb: " + to_string(cfg_.basis) +
                             " gate axes are not orthogonal; recalibrate");
    }
    // Re-orthonormalise so W is exact.
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(frame_, Eigen::ComputeFullU | Eigen::ComputeFullV);
    frame_ = svd.matrixU() * svd.matrixV().transpose();
  }

  Eigen::Vector3d prepared_bloch() const {
    const Su2 prep = segment_propagator(bare_pulse(Axis::kMinusY, kPi / 2, cfg_.prep_omega_hz),
                                        NoiseDraw::none(), opt_);
    return bloch_vector(prep.apply(ground_state()));
  }

  // Interaction-picture frame of the always-on dressing drive.
  Su2 drive_frame(double t) const {
    return Su2::exp_pauli(Eigen::Vector3d(kPi * cfg_.dressed_carrier_hz * t, 0.0, 0.0));
  }

  PulseSegment primitive_segment(const Primitive& p, double clock) const {
    const double angle = std::abs(p.angle);
    const bool negative = p.angle < 0.0;
    switch (cfg_.basis) {
      case Basis::kBare:
      case Basis::kDressed: {
        if (p.axis > 1) throw InvariantError("rb: z primitive in an x/y basis");
        const Axis a = p.axis == 0 ? (negative ? Axis::kMinusX : Axis::kPlusX)
                                   : (negative ? Axis::kMinusY : Axis::kPlusY);
        if (cfg_.basis == Basis::kBare) return bare_pulse(a, angle, cfg_.bare_omega_hz);
        return dressed_gate(a, cfg_.dressed_fm_depth_hz,
                            dressed_gate_duration(angle, cfg_.dressed_fm_depth_hz),
                            cfg_.dressed_carrier_hz, 0.0, clock, cfg_.dressed_mode);
      }
      case Basis::kSmart: {
        if (p.axis == 0) throw InvariantError("rb: x primitive in the SMART basis");
        const bool full = std::abs(angle - kPi) < 1e-12;
        SmartGate g;
        if (p.axis == 1) {
          g = full ? SmartGate::kY : (negative ? SmartGate::kMinusY2 : SmartGate::kPlusY2);
        } else {
          g = full ? SmartGate::kZ : (negative ? SmartGate::kMinusZ2 : SmartGate::kPlusZ2);
        }
        return smart_segment(cfg_.smart, smart_gate_periods(g), g);
      }
    }
    throw InvariantError("rb: unknown basis");
  }

  RbBasisConfig cfg_;
  EngineOptions opt_;
  Eigen::Matrix3d frame_ = Eigen::Matrix3d::Identity();
  Su2 w_;
  Eigen::Vector3d initial_ = Eigen::Vector3d::UnitZ();
};

/// Largest phase distance between each Clifford's noiseless compiled
/// propagator and its ideal unitary.
inline double compilation_error(const RbCompiler& c) {
  double worst = 0.0;
  for (int i = 0; i < CliffordGroup::kOrder; ++i) {
    const Su2 u = c.gates_propagator({i}, NoiseDraw::none());
    worst = std::max(worst, phase_distance(u, c.ideal(i)));
  }
  return worst;
}

// ------------------------------------------------------------ fitting --

struct RbFit {
  FitOutcome fit;
  double fidelity = std::numeric_limits<double>::quiet_NaN();
  double fidelity_ci95 = std::numeric_limits<double>::quiet_NaN();
  double p0 = std::numeric_limits<double>::quiet_NaN();
  double p_inf = 0.5;
  bool flagged = false;
};

/// Fits P(N) = P0 (2 F - 1)^N + P_inf with P_inf fixed. With sigma (all > 0)
/// the intervals use it as absolute; without, they are residual-scaled.
inline RbFit fit_rb(std::span<const double> n, std::span<const double> p,
                    std::span<const double> sigma = {}, double p_inf = 0.5) {
  if (n.size() != p.size()) throw InputError("fit_rb: N and P lengths differ");
  detail::require_finite(n, "fit_rb: N");
  detail::require_finite(p, "fit_rb: P");
  const std::set<double> distinct(n.begin(), n.end());
  if (distinct.size() < 3) throw InputError("fit_rb: need at least three distinct N values");
  if (n.size() < 4) throw InputError("fit_rb: need at least four data points");
  bool absolute = !sigma.empty();
  for (const double s : sigma) absolute = absolute && s > 0.0;
  const std::vector<double> s = absolute ? std::vector<double>(sigma.begin(), sigma.end())
                                         : std::vector<double>(n.size(), 1.0);

  // Initial guess: log-linear fit of |P - P_inf| against N.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double d = p[i] - p_inf;
    if (d > 1e-6) {
      sx += n[i];
      sy += std::log(d);
      sxx += n[i] * n[i];
      sxy += n[i] * std::log(d);
      ++m;
    }
  }
  double r0 = 0.98;
  double a0 = 0.5;
  if (m >= 2 && m * sxx - sx * sx > 0.0) {
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    r0 = std::clamp(std::exp(slope), 0.05, 1.0);
    a0 = std::exp((sy - slope * sx) / m);
  }
  const FitModel model = [p_inf](double x, const RealVector& q) {
    return q(0) * std::pow(2.0 * q(1) - 1.0, x) + p_inf;
  };
  RealVector init(2);
  init << a0, 0.5 * (1.0 + r0);
  NllsOptions o;
  o.scale_covariance = !absolute;
  RbFit out;
  out.p_inf = p_inf;
  out.fit = nlls_fit(model, {"P0", "F_C"}, init, n, p, s, o);
  out.p0 = out.fit.value("P0");
  out.fidelity = out.fit.value("F_C");
  out.fidelity_ci95 = out.fit.ci95("F_C");
  if (!out.fit.converged) {
    out.flagged = true;
  } else if (!(out.fidelity > 0.5 && out.fidelity <= 1.0 + 1e-9)) {
    out.flagged = true;
    out.fit.diagnostic = "F_C outside (0.5, 1]";
  }
  out.fit.flagged = out.flagged;
  return out;
}

// ----------------------------------------------------------- execution --

struct RbConfig {
  RbBasisConfig basis;
  std::vector<std::size_t> n_list{1, 2, 3, 5, 8, 12, 17, 23, 30, 40, 50, 60};
  std::size_t k = 50;      // randomisations per N and target
  std::size_t shots = 10;  // noise draws per randomisation
  NoiseModel noise = NoiseModel::calibrated();
  std::uint64_t seed = 1;
  double p_inf = 0.5;
  ShotOptions shot_options;
  /// Rabi frequency and decay time for the quality-factor bound; 0 skips it.
  double bound_rabi_hz = 0.0;
  double bound_t2_rabi_s = 0.0;

  void validate() const {
    if (n_list.empty()) throw ConfigError("rb: empty N list");
    for (const auto n : n_list) {
      if (n < 1) throw ConfigError("rb: N values must be >= 1");
    }
    if (k < 1 || shots < 1) throw ConfigError("rb: k and shots must be >= 1");
    if (!(p_inf >= 0.0 && p_inf <= 1.0)) throw ConfigError("rb: P_inf must lie in [0, 1]");
    noise.validate();
    shot_options.readout.validate();
  }
};

struct RbResult {
  Basis basis = Basis::kBare;
  std::vector<std::size_t> n_list;
  std::size_t k = 0;
  std::size_t shots = 0;
  std::uint64_t seed = 0;
  // Survival of each target (mean and SEM over randomisations) and their average.
  std::vector<ShotStatistics> initial, orthogonal, combined;
  RbFit fit;
  std::optional<FidelityBound> bound;
  double compilation_error = std::numeric_limits<double>::quiet_NaN();
  Json metadata = Json::object();

  std::size_t total_shots() const { return n_list.size() * 2 * k * shots; }
};

/// Runs RB on the configured basis. Every (N, randomisation, target) job
/// has its own sequence and noise seeds, so the result does not depend on
/// the thread count.
inline RbResult run_rb(const RbConfig& cfg) {
  cfg.validate();
  const RbCompiler compiler(cfg.basis, cfg.shot_options.engine);
  RbResult out;
  out.basis = cfg.basis.basis;
  out.n_list = cfg.n_list;
  out.k = cfg.k;
  out.shots = cfg.shots;
  out.seed = cfg.seed;
  out.compilation_error = compilation_error(compiler);

  const std::size_t jobs = cfg.n_list.size() * cfg.k * 2;
  std::vector<double> survival(jobs);  // [n][rep][target]
  parallel_for(jobs, resolve_threads(cfg.shot_options.threads), [&](std::size_t j) {
    const std::size_t t = j % 2;
    const std::size_t rep = (j / 2) % cfg.k;
    const std::size_t ni = j / (2 * cfg.k);
    const auto target = t == 0 ? RbTarget::kInitial : RbTarget::kOrthogonal;
    CounterRng rng(derive_seed(cfg.seed, {0x5242535145ULL, ni, rep, t}));
    const RbSequence s = rb_sequence(cfg.n_list[ni], target, rng, compiler.initial_state());
    const std::uint64_t noise_seed = derive_seed(cfg.seed, {0x52424E4FULL, ni, rep, t});
    std::vector<double> v(cfg.shots);
    for (std::size_t shot = 0; shot < cfg.shots; ++shot) {
      const NoiseDraw d = draw_noise(cfg.noise, noise_seed, shot);
      PropagatorCache cache;
      double p0 = compiler.sequence_p0(s, d, &cache);
      p0 = apply_readout(cfg.shot_options.readout, p0, noise_seed, 0, shot);
      v[shot] = target == RbTarget::kInitial ? p0 : 1.0 - p0;
    }
    survival[j] = pairwise_sum(v) / static_cast<double>(cfg.shots);
  });

  std::vector<double> x, y, sig;
  for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
    std::vector<double> a(cfg.k), b(cfg.k), c(cfg.k);
    for (std::size_t rep = 0; rep < cfg.k; ++rep) {
      a[rep] = survival[(ni * cfg.k + rep) * 2];
      b[rep] = survival[(ni * cfg.k + rep) * 2 + 1];
      c[rep] = 0.5 * (a[rep] + b[rep]);
    }
    out.initial.push_back(summarize_shots(a));
    out.orthogonal.push_back(summarize_shots(b));
    out.combined.push_back(summarize_shots(c));
    x.push_back(static_cast<double>(cfg.n_list[ni]));
    y.push_back(out.combined.back().mean);
    sig.push_back(out.combined.back().sem);
  }
  const std::set<std::size_t> distinct(cfg.n_list.begin(), cfg.n_list.end());
  if (distinct.size() >= 3 && cfg.n_list.size() >= 4) {
    out.fit = fit_rb(x, y, sig, cfg.p_inf);
  } else {
    out.fit.flagged = true;
    out.fit.fit.diagnostic = "too few N values to fit";
  }
  if (cfg.bound_rabi_hz > 0.0 && cfg.bound_t2_rabi_s > 0.0) {
    out.bound = fidelity_bound(cfg.bound_rabi_hz, cfg.bound_t2_rabi_s);
  }
  return out;
}

inline void write_rb_csv(std::ostream& os, const RbResult& r) {
  os << "N,target,p_mean,p_sem,k,shots\n";
  const std::vector<std::pair<const char*, const std::vector<ShotStatistics>*>> rows{
      {"initial", &r.initial}, {"orthogonal", &r.orthogonal}, {"combined", &r.combined}};
  for (std::size_t i = 0; i < r.n_list.size(); ++i) {
    for (const auto& [name, stats] : rows) {
      os << r.n_list[i] << ',' << name << ',' << format_double((*stats)[i].mean) << ','
         << format_double((*stats)[i].sem) << ',' << r.k << ',' << r.shots << '\n';
    }
  }
}

inline Json to_json(const RbResult& r) {
  Json j = Json::object();
  j["basis"] = to_string(r.basis);
  j["seed"] = r.seed;
  j["F_C"] = json_number(r.fit.fidelity);
  j["CI"] = json_number(r.fit.fidelity_ci95);
  j["P0"] = json_number(r.fit.p0);
  j["P_inf"] = r.fit.p_inf;
  j["flagged"] = r.fit.flagged;
  if (r.bound) {
    j["Q_R"] = r.bound->q;
    j["UB"] = r.bound->ub;
    j["Q_R_pi"] = r.bound->q_pi;
    j["UB_pi"] = r.bound->ub_pi;
  } else {
    j["Q_R"] = nullptr;
    j["UB"] = nullptr;
  }
  j["k"] = r.k;
  j["shots_per_sequence"] = r.shots;
  j["total_shots"] = r.total_shots();
  j["N"] = r.n_list;
  j["compilation_error"] = json_number(r.compilation_error);
  j["fit"] = to_json(r.fit.fit);
  j["metadata"] = r.metadata;
  return j;
}

}  // namespace smartspin

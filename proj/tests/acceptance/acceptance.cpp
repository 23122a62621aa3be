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

// Acceptance gate: one PASS/FAIL line per criterion, tolerances and runtime
// limits pinned below. Exit status 0 only when every criterion passes.
//
//   smartspin_acceptance [criterion ...]     (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "smartspin/smartspin.hpp"

using namespace smartspin;

namespace {

// ---------------------------------------------------------- tolerances --

constexpr double kSetpointTolS = 1e-9;
constexpr double kFilterLawTol = 1e-6;
constexpr std::size_t kRamseyShots = 200;
constexpr double kBareBandLo = 0.925;
constexpr double kBareBandHi = 0.955;
constexpr double kSmartFloor = 0.99;
constexpr std::size_t kRbK = 50;
constexpr std::size_t kRbShots = 10;
constexpr std::size_t kRbMinShots = 10000;
constexpr double kCalibrationRelTol = 0.25;
constexpr double kIdleImprovementMin = 20.0;
constexpr double kRabiRatioMin = 2.0;
constexpr double kLabFrameTol = 1e-3;
constexpr double kUnitarityTol = 1e-10;
constexpr double kRabiClosedFormTol = 1e-6;
constexpr double kSurvivalTol = 1e-9;       // bare: exact compilation
constexpr double kSurvivalTolModulated = 2e-3;
constexpr double kFitInversionTol = 1e-9;
constexpr double kBoundQ = 42.6;
constexpr double kBoundExpected = 0.9890;
constexpr double kBoundTol = 1e-4;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string ns(double s) { return fmt(s * 1e9, 4) + " ns"; }
std::string us(double s) { return fmt(s * 1e6, 4) + " us"; }

const SmartParams& calibrated_smart() {
  static const SmartParams p = calibrate_smart(SmartParams{}).params;
  return p;
}

// ---------------------------------------------------------- criteria --

void bessel_setpoints(Outcome& o) {
  const double j1 = bessel_j0_zero(0);
  const double j2 = bessel_j0_zero(1);
  const double t1 = j1 / defaults::kRabiHz;
  const double t2 = j2 / defaults::kRabiHz;
  o.detail << "j1 = " << fmt(j1, 6) << ", j2 = " << fmt(j2, 6) << ", T_opt = " << ns(t1) << ", "
           << ns(t2) << "; ";
  o.require(std::round(j1 * 1000.0) == 2405.0, "j1 rounds to 2.405");
  o.require(std::round(j2 * 1000.0) == 5520.0, "j2 rounds to 5.520");
  o.require(std::abs(t1 - 267e-9) <= kSetpointTolS, "T_opt1 = 267 ns +- 1 ns");
  o.require(std::abs(t2 - 613e-9) <= kSetpointTolS, "T_opt2 = 613 ns +- 1 ns");
}

SmartRamseyResult smart_ramsey_run(bool nuclear) {
  ExperimentContext ctx;
  ctx.noise = NoiseModel::calibrated();
  ctx.noise.nuclear_uninitialized = nuclear;
  ctx.shots = kRamseyShots;
  return smart_ramsey(SmartRamseyConfig{}, ctx);
}

void filter_law(Outcome& o) {
  SmartParams p;
  p.omega_peak = 1e6;
  double worst = 0.0;
  for (int i = 1; i <= 800; ++i) {
    const double a = 0.01 * i;
    p.t_mod = a / p.omega_peak;
    const double s = dephasing_sensitivity(smart_segment(p, 1, SmartGate::kIdentity), p.t_mod);
    worst = std::max(worst, std::abs(s - std::abs(bessel_j0(a))));
  }
  o.detail << "max |s - |J0|| over Omega T in (0, 8] = " << fmt(worst, 3) << "; ";
  o.require(worst <= kFilterLawTol, "filter-function law within 1e-6");

  // Monte Carlo in the regime the J0 law describes: bath and amplitude noise,
  // nucleus not contributing a static offset.
  const SmartRamseyResult r = smart_ramsey_run(false);
  const double step = r.t_mod[1] - r.t_mod[0];
  std::vector<double> maxima;
  for (const auto& pk : r.summary.peaks) maxima.push_back(pk.t_mod);
  std::sort(maxima.begin(), maxima.end());
  o.detail << "MC maxima (nucleus off, " << kRamseyShots << " shots) at";
  for (const double m : maxima) o.detail << ' ' << ns(m);
  o.detail << ", grid step " << ns(step) << "; ";
  o.require(maxima.size() == 2, "two distinct coherence maxima");
  if (maxima.size() == 2) {
    o.require(std::abs(maxima[0] - bessel_j0_zero(0) / defaults::kRabiHz) <= step + 1e-12,
              "first maximum within one step of the first J0 zero");
    o.require(std::abs(maxima[1] - bessel_j0_zero(1) / defaults::kRabiHz) <= step + 1e-12,
              "second maximum within one step of the second J0 zero");
  }
  const SmartRamseyResult d = smart_ramsey_run(true);
  o.detail << "info: default noise (nucleus uninitialised) maxima at";
  for (const auto& pk : d.summary.peaks) o.detail << ' ' << ns(pk.t_mod);
  o.detail << "; ";
}

RbResult rb_nuclear_only(Basis b) {
  RbConfig cfg;
  cfg.basis.basis = b;
  if (b == Basis::kSmart) cfg.basis.smart = calibrated_smart();
  cfg.noise = NoiseModel::nuclear_only();
  cfg.k = kRbK;
  cfg.shots = kRbShots;
  return run_rb(cfg);
}

std::string rb_text(const RbResult& r) {
  return fmt(r.fit.fidelity, 4) + " +- " + fmt(r.fit.fidelity_ci95, 1);
}

void bare_rb(Outcome& o) {
  const RbResult r = rb_nuclear_only(Basis::kBare);
  o.detail << "F_C bare = " << rb_text(r) << " (N up to " << r.n_list.back() << ", "
           << r.total_shots() << " shots), band [" << kBareBandLo << ", " << kBareBandHi
           << "]; ";
  o.require(r.total_shots() >= kRbMinShots, ">= 1e4 shots");
  o.require(!r.fit.flagged, "fit not flagged");
  o.require(r.fit.fidelity >= kBareBandLo && r.fit.fidelity <= kBareBandHi, "F_C in band");
}

void smart_rb(Outcome& o) {
  const RbResult bare = rb_nuclear_only(Basis::kBare);
  const RbResult dressed = rb_nuclear_only(Basis::kDressed);
  const RbResult smart = rb_nuclear_only(Basis::kSmart);
  o.detail << "F_C smart = " << rb_text(smart) << ", dressed = " << rb_text(dressed)
           << ", bare = " << rb_text(bare) << "; ";
  o.require(!smart.fit.flagged && !dressed.fit.flagged && !bare.fit.flagged, "fits not flagged");
  o.require(smart.fit.fidelity >= kSmartFloor, "SMART F_C >= 0.99");
  o.require(dressed.fit.fidelity > bare.fit.fidelity && dressed.fit.fidelity < smart.fit.fidelity,
            "bare < dressed < SMART");
}

void coherence(Outcome& o) {
  ExperimentContext ctx;  // calibrated noise, 200 shots
  ctx.noise = NoiseModel::calibrated();

  const SweepResult ramsey_trace = ramsey(RamseyConfig{}, ctx);
  const double t2_star = ramsey_trace.fits.at("decaying_sinusoid").at("T2_star_s").get<double>();

  RabiConfig bare_cfg;
  bare_cfg.t_max_s = 12e-6;
  bare_cfg.n_points = 1201;
  const double t2_bare = fitted_t2_rabi(rabi(bare_cfg, ctx));
  const double t2_dressed = fitted_t2_rabi(dressed_rabi(DressedRabiConfig{}, ctx));
  SmartRabiConfig smart_cfg;
  smart_cfg.params = calibrated_smart();
  const double t2_smart = fitted_t2_rabi(smart_rabi(smart_cfg, ctx));

  const SmartRamseyResult idle = smart_ramsey_run(true);
  const double best_idle = idle.summary.peaks.empty() ? 0.0 : idle.summary.peaks.front().t2;

  o.detail << "T2* = " << us(t2_star) << ", T2_Rabi bare = " << us(t2_bare) << ", dressed = "
           << us(t2_dressed) << ", SMART = " << us(t2_smart) << ", SMART idle best = "
           << us(best_idle) << " (" << fmt(best_idle / t2_star, 3) << "x T2*); ";
  o.require(std::abs(t2_star / defaults::kT2StarSeconds - 1.0) <= kCalibrationRelTol,
            "T2* within 25%");
  o.require(std::abs(t2_bare / defaults::kT2RabiSeconds - 1.0) <= kCalibrationRelTol,
            "bare T2_Rabi within 25%");
  o.require(best_idle >= kIdleImprovementMin * t2_star, "SMART idle >= 20x T2*");
  o.require(t2_smart > t2_dressed && t2_dressed > t2_bare, "T2_Rabi SMART > dressed > bare");
  o.require(t2_smart >= kRabiRatioMin * t2_dressed, "SMART / dressed >= 2");
}

void lab_frame(Outcome& o) {
  const LabFrameModel model{PhysicalConstants{}};
  double worst = 0.0;
  for (const double mi : {-0.5, 0.5}) {
    for (const double detune : {0.0, 2e6}) {
      PulseSequence seq;
      seq.append(constant_segment(200e-9, 9e6, 2e6, detune));
      NoiseDraw d;
      d.nuclear_m = mi;
      d.nuclear_hz = mi * defaults::kHyperfineHz;
      d.delta_offset_hz = model.line_hz(mi) - model.center_hz();
      const double lab =
          evolve_lab_frame(model, seq, model.center_hz(), d, model.eigenstate(0, mi)).p0;
      worst = std::max(worst, std::abs(lab - evolve_two_level(seq, d).p0));
    }
  }
  o.detail << "max |p0_lab - p0_two_level| = " << fmt(worst, 3)
           << " (200 ns, resonant and 2 MHz detuned, both nuclear states); ";
  o.require(worst <= kLabFrameTol, "agreement within 1e-3");
}

void invariants(Outcome& o) {
  // unitarity
  double unit = 0.0;
  SmartParams sp = calibrated_smart();
  for (const SmartGate g : {SmartGate::kPlusY2, SmartGate::kMinusZ2, SmartGate::kIdentity}) {
    for (const double det : {-2e6, 0.0, 1.55e6}) {
      const Su2 u = segment_propagator(smart_segment(sp, 1, g), NoiseDraw::detuned(det));
      unit = std::max(unit, unitarity_defect(u.matrix()));
    }
  }
  const Su2 dg = segment_propagator(dressed_gate(Axis::kPlusY, 1.9e6, 1e-6, 9e6),
                                    NoiseDraw::detuned(0.7e6));
  unit = std::max(unit, unitarity_defect(dg.matrix()));
  o.require(unit <= kUnitarityTol, "unitarity");

  // Clifford group
  const auto& g = clifford_group();
  bool closed = g.elements().size() == 24;
  for (int i = 0; i < 24 && closed; ++i) {
    for (int j = 0; j < 24; ++j) {
      closed = closed && phase_distance(g.element(i).unitary * g.element(j).unitary,
                                        g.element(g.compose(i, j)).unitary) < 1e-7;
    }
    closed = closed && g.compose(i, g.inverse(i)) == g.identity();
  }
  o.require(closed, "Clifford order 24 and closure");

  // noiseless survival
  double surv_bare = 1.0, surv_mod = 1.0;
  for (const Basis b : {Basis::kBare, Basis::kDressed, Basis::kSmart}) {
    RbConfig cfg;
    cfg.basis.basis = b;
    if (b == Basis::kSmart) cfg.basis.smart = calibrated_smart();
    cfg.noise = NoiseModel::none();
    cfg.n_list = {1, 5, 20, 60};
    cfg.k = 5;
    cfg.shots = 1;
    const RbResult r = run_rb(cfg);
    for (const auto& s : r.combined) {
      (b == Basis::kBare ? surv_bare : surv_mod) =
          std::min(b == Basis::kBare ? surv_bare : surv_mod, s.mean);
    }
  }
  o.require(1.0 - surv_bare <= kSurvivalTol, "bare noiseless survival 1");
  o.require(1.0 - surv_mod <= kSurvivalTolModulated, "dressed/SMART noiseless survival 1");

  // fit_rb forward-model inversion
  std::vector<double> n, p;
  for (const double x : {1.0, 3.0, 7.0, 15.0, 30.0, 60.0}) {
    n.push_back(x);
    p.push_back(0.49 * std::pow(2.0 * 0.991 - 1.0, x) + 0.5);
  }
  const RbFit fit = fit_rb(n, p);
  o.require(std::abs(fit.fidelity - 0.991) <= kFitInversionTol, "fit_rb inversion");

  // detuned Rabi closed form, time-dependent integrator
  double rabi_err = 0.0;
  for (const double det : {0.0, 1.55e6, 5e6}) {
    for (const double t : {50e-9, 400e-9, 1.1e-6}) {
      PulseSegment s;
      s.duration = t;
      s.omega_i = [](double) { return 9e6; };
      s.delta = [det](double) { return det; };
      s.bound_hz = 9e6 + det;
      PulseSequence seq;
      seq.append(s);
      const double gen = std::hypot(9e6, det);
      const double sn = std::sin(kPi * gen * t);
      const double exact = 1.0 - 81e12 / (gen * gen) * sn * sn;
      rabi_err = std::max(rabi_err, std::abs(evolve_two_level(seq, NoiseDraw::none()).p0 - exact));
    }
  }
  o.require(rabi_err <= kRabiClosedFormTol, "detuned Rabi closed form");

  // determinism under parallelism
  RbConfig det_cfg;
  det_cfg.n_list = {1, 4, 10, 20};
  det_cfg.k = 8;
  det_cfg.shots = 3;
  det_cfg.shot_options.threads = 1;
  const RbResult a = run_rb(det_cfg);
  det_cfg.shot_options.threads = 4;
  const RbResult b = run_rb(det_cfg);
  bool same = a.fit.fidelity == b.fit.fidelity;
  for (std::size_t i = 0; i < a.combined.size(); ++i) {
    same = same && a.combined[i].mean == b.combined[i].mean;
  }
  ExperimentContext c1, c4;
  c1.shots = c4.shots = 64;
  c1.shot_options.threads = 1;
  c4.shot_options.threads = 4;
  RamseyConfig rc;
  rc.n_points = 31;
  same = same && ramsey(rc, c1).p0_mean == ramsey(rc, c4).p0_mean;
  o.require(same, "bitwise determinism across thread counts");

  o.detail << "unitarity defect " << fmt(unit, 2) << ", noiseless survival bare "
           << fmt(surv_bare, 12) << " / modulated " << fmt(surv_mod, 6) << ", fit_rb F_C "
           << fmt(fit.fidelity, 12) << ", Rabi closed-form error " << fmt(rabi_err, 2) << "; ";
}

void bound_calculator(Outcome& o) {
  const double ub = smartspin::upper_bound(kBoundQ);
  const FidelityBound ref = fidelity_bound(defaults::kRabiHz, defaults::kT2RabiSeconds);
  o.detail << "UB(Q = " << kBoundQ << ") = " << fmt(ub, 6) << "; Omega*T2 convention Q = "
           << fmt(ref.q, 4) << " UB = " << fmt(ref.ub, 6) << "; 2*Omega*T2 convention Q = "
           << fmt(ref.q_pi, 4) << " UB = " << fmt(ref.ub_pi, 6) << "; ";
  o.require(std::abs(ub - kBoundExpected) <= kBoundTol, "UB(42.6) = 0.9890 +- 1e-4");
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "bessel-setpoints", 1.0, bessel_setpoints},
      {2, "filter-function-law", 120.0, filter_law},
      {3, "bare-rb", 300.0, bare_rb},
      {4, "smart-rb", 600.0, smart_rb},
      {5, "coherence-improvement", 600.0, coherence},
      {6, "lab-frame-cross-check", 120.0, lab_frame},
      {7, "oracle-invariants", 60.0, invariants},
      {8, "upper-bound", 1.0, bound_calculator},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!pick.empty() && !pick.count(c.id)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "[exception: " << e.what() << "] ";
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs <= c.limit_s, "runtime limit");
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << " " << c.name << ": "
              << o.detail.str() << "(" << fmt(secs, 3) << " s, limit " << c.limit_s << " s)"
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}

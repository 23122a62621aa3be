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

#include <cmath>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "smartspin/engine/evolve.hpp"
#include "smartspin/engine/lab_frame.hpp"
#include "smartspin/engine/noise.hpp"
#include "smartspin/engine/shots.hpp"
#include "smartspin/waveform/modulated.hpp"

using namespace smartspin;
using Catch::Approx;

namespace {

// Closed-form |0> population after a rectangular drive.
double rabi_p0(double omega, double delta, double t) {
  const double g = std::hypot(omega, delta);
  const double s = std::sin(kPi * g * t);
  return 1.0 - omega * omega / (g * g) * s * s;
}

// The same drive routed through the time-dependent integrator.
PulseSegment as_time_dependent(double duration, double omega, double delta) {
  PulseSegment s;
  s.duration = duration;
  s.omega_i = [omega](double) { return omega; };
  s.delta = [delta](double) { return delta; };
  s.bound_hz = omega + std::abs(delta);
  return s;
}

}  // namespace

TEST_CASE("detuned Rabi matches the closed form", "[engine]") {
  for (const double delta : {0.0, 1.55e6, -3e6, 7e6}) {
    for (const double t : {37e-9, 250e-9, 1.3e-6}) {
      const double exact = rabi_p0(9e6, delta, t);
      PulseSequence a;
      a.append(constant_segment(t, 9e6, 0.0, delta));
      CHECK(evolve_two_level(a, NoiseDraw::none()).p0 == Approx(exact).margin(1e-10));
      PulseSequence b;
      b.append(as_time_dependent(t, 9e6, delta));
      CHECK(evolve_two_level(b, NoiseDraw::none()).p0 == Approx(exact).margin(1e-6));
    }
  }
}

TEST_CASE("noise offsets add to the segment detuning", "[engine]") {
  PulseSequence seq;
  seq.append(constant_segment(200e-9, 9e6, 0.0, 0.5e6));
  const auto d = NoiseDraw::detuned(1e6);
  CHECK(evolve_two_level(seq, d).p0 == Approx(rabi_p0(9e6, 1.5e6, 200e-9)).margin(1e-10));
  NoiseDraw amp;
  amp.amp_factor = 1.01;
  CHECK(evolve_two_level(seq, amp).p0 == Approx(rabi_p0(9.09e6, 0.5e6, 200e-9)).margin(1e-10));
}

TEST_CASE("propagators are unitary", "[engine]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    SmartParams p;
    p.t_mod = 150e-9 + 300e-9 * (0.5 + 0.5 * u(rng));
    const auto seg = smart_tone_segment(p, 1 + k % 3, 2e6 * u(rng), 2e6 * u(rng));
    const NoiseDraw d = NoiseDraw::detuned(2e6 * u(rng));
    const Su2 s = segment_propagator(seg, d);
    CHECK(s.norm_defect() < 1e-10);
    CHECK(unitarity_defect(s.matrix()) < 1e-10);
    const auto g = dressed_gate(Axis::kPlusY, 1.9e6, 4.0 / 9e6, 9e6);
    CHECK(unitarity_defect(segment_propagator(g, d).matrix()) < 1e-10);
  }
}

TEST_CASE("tone-free SMART periods are the identity without noise", "[engine]") {
  SmartParams p;
  const Su2 u = segment_propagator(smart_segment(p, 1, SmartGate::kIdentity), NoiseDraw::none());
  CHECK(phase_distance(u.matrix(), Matrix2c::Identity()) < 1e-3);
  CHECK(std::abs(std::abs(u.w) - 1.0) < 1e-9);
}

TEST_CASE("propagator cache returns the uncached product", "[engine]") {
  SmartParams p;
  p.tone_amp_y = 1.8e6;
  PulseSequence seq;
  for (int i = 0; i < 4; ++i) seq.append(smart_segment(p, 1, SmartGate::kPlusY2));
  const NoiseDraw d = NoiseDraw::detuned(0.3e6);
  PropagatorCache cache;
  const Su2 a = sequence_propagator(seq, d, {}, &cache);
  const Su2 b = sequence_propagator(seq, d);
  CHECK(cache.size() == 1);
  CHECK(std::abs(a.w - b.w) < 1e-14);
  CHECK((a.v - b.v).norm() < 1e-14);
}

TEST_CASE("noise draws are reproducible and have the configured moments", "[engine][noise]") {
  NoiseModel m = NoiseModel::calibrated();
  const NoiseDraw a = draw_noise(m, 42, 17);
  const NoiseDraw b = draw_noise(m, 42, 17);
  CHECK(a.delta_offset_hz == b.delta_offset_hz);
  CHECK(a.amp_factor == b.amp_factor);
  const int n = 40000;
  int up = 0;
  double sb = 0.0, sb2 = 0.0, sa2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const NoiseDraw d = draw_noise(m, 3, static_cast<std::uint64_t>(i));
    up += d.nuclear_m > 0.0 ? 1 : 0;
    CHECK(std::abs(d.nuclear_hz) == Approx(0.5 * m.a_parallel_hz));
    sb += d.bath_hz;
    sb2 += d.bath_hz * d.bath_hz;
    sa2 += (d.amp_factor - 1.0) * (d.amp_factor - 1.0);
  }
  CHECK(std::abs(up - n / 2) < 4.0 * std::sqrt(n / 4.0));
  CHECK(std::abs(sb / n) < 4.0 * m.sigma_bath_hz / std::sqrt(n));
  CHECK(std::sqrt(sb2 / n) == Approx(m.sigma_bath_hz).epsilon(0.02));
  CHECK(std::sqrt(sa2 / n) == Approx(m.sigma_amp).epsilon(0.02));
  CHECK(m.sigma_bath_hz == Approx(std::sqrt(2.0) / (kTwoPi * 1.04e-6)));

  NoiseModel pinned = NoiseModel::none();
  pinned.fixed_nuclear_m = -0.5;
  CHECK(draw_noise(pinned, 1, 0).nuclear_hz == Approx(-0.5 * pinned.a_parallel_hz));
  pinned.fixed_nuclear_m = 0.3;
  CHECK_THROWS_AS(draw_noise(pinned, 1, 0), ConfigError);
}

TEST_CASE("shot statistics are bitwise independent of the thread count", "[engine][determinism]") {
  const NoiseModel m = NoiseModel::calibrated();
  const SequenceBuilder build = [](const NoiseDraw&) {
    PulseSequence s;
    s.append(constant_segment(330e-9, 9e6, 0.0, 0.0));
    return s;
  };
  ShotOptions serial;
  serial.threads = 1;
  ShotOptions parallel;
  parallel.threads = 8;
  const auto a = run_shots(build, m, 501, 11, ground_state(), serial);
  const auto b = run_shots(build, m, 501, 11, ground_state(), parallel);
  CHECK(a.mean == b.mean);
  CHECK(a.sem == b.sem);
  serial.readout.repetitions = 30;
  parallel.readout.repetitions = 30;
  CHECK(run_shots(build, m, 300, 5, ground_state(), serial).mean ==
        run_shots(build, m, 300, 5, ground_state(), parallel).mean);
}

TEST_CASE("readout model", "[engine]") {
  ReadoutModel r;
  CHECK(apply_readout(r, 0.37, 1, 0, 0) == 0.37);
  r.repetitions = 100000;
  CHECK(apply_readout(r, 0.37, 1, 0, 0) == Approx(0.37).margin(0.01));
  r.contrast = 0.5;
  CHECK(apply_readout(r, 1.0, 1, 0, 0) == Approx(0.75).margin(0.01));
  r.contrast = 0.0;
  CHECK_THROWS_AS(r.validate(), ConfigError);
}

TEST_CASE("parallel_for visits each index once and rethrows", "[engine]") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (const int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 7) throw NumericError("boom");
                               }),
                  NumericError);
}

TEST_CASE("lab-frame model agrees with the two-level model", "[engine][labframe]") {
  const LabFrameModel model{PhysicalConstants{}};
  CHECK(model.line_hz(0.5) - model.line_hz(-0.5) == Approx(3.1e6).margin(3e3));
  for (const double detune : {0.0, 2e6}) {
    PulseSequence seq;
    seq.append(constant_segment(200e-9, 9e6, 2e6, detune));
    NoiseDraw d;
    d.nuclear_m = 0.5;
    d.nuclear_hz = 0.5 * 3.1e6;
    d.delta_offset_hz = model.line_hz(0.5) - model.center_hz();
    const double lab =
        evolve_lab_frame(model, seq, model.center_hz(), d, model.eigenstate(0, 0.5)).p0;
    const double two = evolve_two_level(seq, d).p0;
    CHECK(std::abs(lab - two) < 1e-3);
  }
  PulseSequence too_long;
  too_long.append(constant_segment(1.5e-6, 9e6, 0.0, 0.0));
  CHECK_THROWS_AS(
      evolve_lab_frame(model, too_long, model.center_hz(), {}, model.eigenstate(0, 0.5)),
      ConfigError);
}

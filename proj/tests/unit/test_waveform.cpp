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
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "smartspin/numerics/bessel.hpp"
#include "smartspin/waveform/modulated.hpp"
#include "smartspin/waveform/pulse.hpp"
#include "smartspin/waveform/sample.hpp"

using namespace smartspin;
using Catch::Approx;

namespace {

// Two-axis control sequence: Y/2 preparation, two dressed FM rotations,
// SMART y and z gates with fixed tone amplitudes, and an idle.
PulseSequence two_axis_sequence() {
  SmartParams p;
  p.tone_amp_y = 1.8e6;
  p.tone_amp_z = 2.3e6;
  p.tone_mix_z = 0.17e6;
  PulseSequence seq;
  seq.append(bare_pulse(Axis::kMinusY, kPi / 2, 9e6));
  seq.append(dressed_gate(Axis::kPlusX, 1.9e6, 2.0 / 9e6, 9e6));
  seq.append(dressed_gate(Axis::kPlusY, 1.9e6, 2.0 / 9e6, 9e6, 0.0, 2.0 / 9e6));
  seq.append(smart_segment(p, 1, SmartGate::kPlusY2));
  seq.append(smart_segment(p, 1, SmartGate::kMinusZ2));
  seq.append(idle(20e-9));
  return seq;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("constant segment sampling", "[waveform]") {
  PulseSequence seq;
  seq.append(constant_segment(100e-9, 3e6, -1e6, 0.5e6));
  const auto w = sample_sequence(seq, 10e-9);
  REQUIRE(w.t.size() == 10);
  for (std::size_t i = 0; i < w.t.size(); ++i) {
    CHECK(w.omega_i[i] == 3e6);
    CHECK(w.omega_q[i] == -1e6);
    CHECK(w.delta[i] == 0.5e6);
    CHECK(w.t[i] == Approx((static_cast<double>(i) + 0.5) * 10e-9).epsilon(1e-12));
  }
}

TEST_CASE("sampling never straddles a segment boundary", "[waveform]") {
  PulseSequence seq;
  seq.append(constant_segment(25e-9, 1e6, 0.0, 0.0));
  seq.append(constant_segment(15e-9, 2e6, 0.0, 0.0));
  const auto w = sample_sequence(seq, 10e-9);
  REQUIRE(w.t.size() == 5);  // ceil(2.5) + ceil(1.5)
  for (std::size_t i = 0; i < w.t.size(); ++i) {
    CHECK(w.omega_i[i] == (w.t[i] < 25e-9 ? 1e6 : 2e6));
  }
  CHECK_THROWS_AS(sample_sequence(seq, 0.0), InputError);
  CHECK_THROWS_AS(sample_sequence(seq, 20e-9), InputError);
}

TEST_CASE("SMART drive integrates to zero over one period", "[waveform]") {
  SmartParams p;
  PulseSequence seq;
  seq.append(smart_segment(p, 1, SmartGate::kIdentity));
  const auto w = sample_sequence(seq, p.t_mod / 64.0);
  REQUIRE(w.t.size() == 64);
  const double mean = std::accumulate(w.omega_i.begin(), w.omega_i.end(), 0.0) / 64.0;
  CHECK(std::abs(mean) < 1e-6 * p.omega_peak);
  for (const double q : w.omega_q) CHECK(q == 0.0);
}

TEST_CASE("SMART gate envelopes", "[waveform]") {
  SmartParams p;
  CHECK_THROWS_AS(smart_segment(p, 1, SmartGate::kPlusY2), CalibrationError);
  CHECK_NOTHROW(smart_segment(p, 3, SmartGate::kIdentity));
  p.tone_amp_y = 1.5e6;
  p.tone_amp_z = 2.0e6;
  const auto y = smart_segment(p, 1, SmartGate::kPlusY2);
  const auto my = smart_segment(p, 1, SmartGate::kMinusY2);
  const auto z = smart_segment(p, 1, SmartGate::kPlusZ2);
  for (const double t : {0.0, 31e-9, 130e-9, 200e-9}) {
    CHECK(y.omega_i_at(t) == Approx(p.omega_peak * std::sin(kTwoPi * t / p.t_mod)).margin(1e-6));
    CHECK(y.omega_q_at(t) == Approx(1.5e6 * std::cos(kTwoPi * t / p.t_mod)).margin(1e-6));
    CHECK(my.omega_q_at(t) == Approx(-y.omega_q_at(t)).margin(1e-9));
    CHECK(z.omega_q_at(t) == Approx(2.0e6 * std::cos(2.0 * kTwoPi * t / p.t_mod)).margin(1e-6));
  }
  CHECK(y.duration == Approx(p.t_mod));
  CHECK(smart_gate_periods(SmartGate::kY) == 2);
  CHECK(smart_gate_periods(SmartGate::kPlusZ2) == 1);
}

TEST_CASE("Bessel setpoints of the SMART period", "[waveform]") {
  SmartParams p;
  p.t_mod = bessel_j0_zero(0) / p.omega_peak;
  CHECK(p.optimal());
  CHECK(p.t_mod == Approx(267e-9).margin(1e-9));
  p.t_mod = bessel_j0_zero(1) / p.omega_peak;
  CHECK(p.optimal());
  CHECK(p.t_mod == Approx(613e-9).margin(1e-9));
  p.t_mod = 260e-9;
  CHECK_FALSE(p.optimal());
}

TEST_CASE("dephasing sensitivity of sinusoidal modulation is |J0|", "[waveform]") {
  SmartParams p;
  p.omega_peak = 1e6;
  for (double a = 0.05; a <= 8.0; a += 0.05) {
    p.t_mod = a / p.omega_peak;
    const auto s = smart_segment(p, 1, SmartGate::kIdentity);
    CHECK(dephasing_sensitivity(s, p.t_mod) == Approx(std::abs(bessel_j0(a))).margin(1e-6));
  }
}

TEST_CASE("dressed gates", "[waveform]") {
  CHECK(dressed_rabi_hz(1.9e6) == Approx(0.95e6));
  CHECK(dressed_gate_duration(kPi / 2, 1.9e6) == Approx(0.25 / 0.95e6));
  const auto g = dressed_gate(Axis::kPlusY, 1.9e6, 1e-6, 9e6);
  for (const double t : {0.0, 13e-9, 70e-9}) {
    CHECK(g.omega_i_at(t) == 9e6);
    CHECK(g.delta_at(t) == Approx(1.9e6 * std::cos(kTwoPi * 9e6 * t + kPi / 2)).margin(1e-6));
  }
  CHECK(g.period == Approx(1.0 / 9e6));
  CHECK_THROWS_AS(dressed_gate(Axis::kPlusX, 3e6, 1e-6, 9e6), ConfigError);
  CHECK_THROWS_AS(dressed_gate(Axis::kPlusX, 1e6, 1e-6, 9e6, 5e6, 0.0, DressedMode::kCircular),
                  ConfigError);
}

TEST_CASE("bare pulses", "[waveform]") {
  const auto p = bare_pulse(Axis::kMinusY, kPi / 2, 9e6);
  CHECK(p.duration == Approx(1.0 / 36e6));
  CHECK(p.omega_q_at(0.0) == -9e6);
  CHECK(p.omega_i_at(0.0) == 0.0);
  CHECK_THROWS_AS(bare_pulse(Axis::kPlusX, 0.0, 9e6), InputError);
  CHECK_THROWS_AS(constant_segment(1e-6, 2e9, 0.0, 0.0), InvariantError);
}

TEST_CASE("two-axis sequence export matches the golden file", "[waveform][golden]") {
  const auto w = sample_sequence(two_axis_sequence(), 1e-9);
  std::ostringstream os;
  write_waveform_csv(os, w);
  const std::string path = std::string(SMARTSPIN_TEST_DATA_DIR) + "/two_axis_waveform.csv";
  if (std::getenv("SMARTSPIN_REGENERATE_GOLDEN") != nullptr) {
    std::ofstream(path, std::ios::binary) << os.str();
  }
  const std::string golden = read_file(path);
  REQUIRE_FALSE(golden.empty());
  CHECK(os.str() == golden);
}

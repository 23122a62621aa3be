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

#include <array>
#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "smartspin/benchmarking/clifford.hpp"
#include "smartspin/benchmarking/rb.hpp"
#include "smartspin/experiments/calibration.hpp"

using namespace smartspin;
using Catch::Approx;

namespace {

const SmartParams& calibrated_smart() {
  static const SmartParams p = calibrate_smart(SmartParams{}).params;
  return p;
}

RbBasisConfig basis(Basis b) {
  RbBasisConfig c;
  c.basis = b;
  if (b == Basis::kSmart) c.smart = calibrated_smart();
  return c;
}

}  // namespace

TEST_CASE("Clifford group structure", "[clifford]") {
  const auto& g = clifford_group();
  REQUIRE(g.elements().size() == 24);
  for (int i = 0; i < 24; ++i) {
    for (int j = i + 1; j < 24; ++j) {
      CHECK(phase_distance(g.element(i).unitary, g.element(j).unitary) > 0.1);
    }
    CHECK(g.compose(i, g.inverse(i)) == g.identity());
    CHECK(g.compose(g.identity(), i) == i);
    for (int j = 0; j < 24; ++j) {
      const Su2 prod = g.element(i).unitary * g.element(j).unitary;
      CHECK(phase_distance(prod, g.element(g.compose(i, j)).unitary) < 1e-7);
    }
  }
}

TEST_CASE("Clifford decompositions reproduce each element", "[clifford]") {
  const auto& g = clifford_group();
  double xy_len = 0.0;
  for (const auto& e : g.elements()) {
    CHECK(phase_distance(word_unitary(e.xy_word), e.unitary) < 1e-7);
    CHECK(phase_distance(word_unitary(e.yz_word), e.unitary) < 1e-7);
    for (const auto& p : e.xy_word) CHECK(p.axis != 2);
    for (const auto& p : e.yz_word) CHECK(p.axis != 0);
    xy_len += static_cast<double>(e.xy_word.size());
  }
  // Shortest words: one empty, 6 of length 1, 13 of length 2, 4 of length 3.
  CHECK(xy_len == 44.0);
}

TEST_CASE("random Clifford draws are uniform", "[clifford]") {
  CounterRng rng(99);
  std::array<int, 24> counts{};
  constexpr int kDraws = 48000;
  const RbSequence s = rb_sequence(kDraws, RbTarget::kInitial, rng);
  for (const int c : s.cliffords) counts[static_cast<std::size_t>(c)] += 1;
  double chi2 = 0.0;
  const double expect = kDraws / 24.0;
  for (const int c : counts) chi2 += (c - expect) * (c - expect) / expect;
  // 23 degrees of freedom, p = 0.001
  CHECK(chi2 < 49.73);
}

TEST_CASE("recovery returns the initial or the flipped state", "[clifford]") {
  const auto& g = clifford_group();
  CounterRng rng(5);
  for (const Eigen::Vector3d& s0 : {Eigen::Vector3d(0, 0, 1), Eigen::Vector3d(-1, 0, 0)}) {
    for (const auto target : {RbTarget::kInitial, RbTarget::kOrthogonal}) {
      const RbSequence s = rb_sequence(17, target, rng, s0);
      Su2 u = Su2::identity();
      for (const int c : s.cliffords) u = g.element(c).unitary * u;
      u = g.element(s.recovery).unitary * u;
      const Eigen::Vector3d out = bloch_rotation(u) * s0;
      CHECK((out - (target == RbTarget::kInitial ? s0 : Eigen::Vector3d(-s0))).norm() < 1e-12);
    }
  }
  CHECK_THROWS_AS(rb_sequence(0, RbTarget::kInitial, rng), InputError);
}

TEST_CASE("fit_rb inverts its forward model", "[rb]") {
  std::vector<double> n, p;
  for (const double x : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
    n.push_back(x);
    p.push_back(0.47 * std::pow(2.0 * 0.987 - 1.0, x) + 0.5);
  }
  const RbFit f = fit_rb(n, p);
  REQUIRE_FALSE(f.flagged);
  CHECK(f.fidelity == Approx(0.987).margin(1e-9));
  CHECK(f.p0 == Approx(0.47).margin(1e-8));
  CHECK_THROWS_AS(fit_rb(std::vector<double>{1, 1, 2, 2}, std::vector<double>{1, 1, 1, 1}),
                  InputError);
}

TEST_CASE("quality-factor bound", "[rb]") {
  const FidelityBound b = fidelity_bound(9e6, 4.73e-6);
  CHECK(b.q == Approx(42.57));
  CHECK(b.ub == Approx(0.98899).margin(5e-6));
  CHECK(b.ub_pi == Approx(1.0 - 1.875 / (8.0 * 42.57)));
  CHECK_THROWS_AS(fidelity_bound(0.0, 1e-6), InputError);
}

TEST_CASE("compiled Cliffords match their ideal unitaries", "[rb]") {
  CHECK(compilation_error(RbCompiler(basis(Basis::kBare))) < 1e-8);
  CHECK(compilation_error(RbCompiler(basis(Basis::kDressed))) < 1e-3);
  CHECK(compilation_error(RbCompiler(basis(Basis::kSmart))) < 1e-3);
  RbBasisConfig uncalibrated;
  uncalibrated.basis = Basis::kSmart;
  CHECK_THROWS_AS(RbCompiler(uncalibrated), CalibrationError);
}

TEST_CASE("noiseless RB survives with probability one", "[rb]") {
  for (const Basis b : {Basis::kBare, Basis::kDressed, Basis::kSmart}) {
    RbConfig cfg;
    cfg.basis = basis(b);
    cfg.noise = NoiseModel::none();
    cfg.n_list = {1, 4, 9, 16};
    cfg.k = 4;
    cfg.shots = 1;
    const RbResult r = run_rb(cfg);
    for (const auto& s : r.combined) CHECK(s.mean > 1.0 - 2e-3);
  }
}

TEST_CASE("bare RB agrees with the averaged Clifford fidelity", "[rb]") {
  // Oracle: average gate fidelity (2 + |tr E|^2) / 6, E = ideal^dagger actual,
  // over all Cliffords and both nuclear projections.
  const RbCompiler c(basis(Basis::kBare));
  double oracle = 0.0;
  for (const double m : {-0.5, 0.5}) {
    NoiseModel pinned = NoiseModel::nuclear_only();
    pinned.fixed_nuclear_m = m;
    const NoiseDraw d = draw_noise(pinned, 0, 0);
    for (int i = 0; i < CliffordGroup::kOrder; ++i) {
      const Matrix2c e = c.ideal(i).matrix().adjoint() * c.gates_propagator({i}, d).matrix();
      oracle += (2.0 + std::norm(e.trace())) / 6.0;
    }
  }
  oracle /= 2.0 * CliffordGroup::kOrder;

  RbConfig cfg;
  cfg.basis = basis(Basis::kBare);
  cfg.noise = NoiseModel::nuclear_only();
  cfg.n_list = {1, 2, 4, 8, 12, 17, 23, 30};
  cfg.k = 60;
  cfg.shots = 4;
  const RbResult r = run_rb(cfg);
  REQUIRE_FALSE(r.fit.flagged);
  CHECK(r.fit.fidelity == Approx(oracle).margin(0.004));
}

TEST_CASE("RB results do not depend on the thread count", "[rb][determinism]") {
  RbConfig cfg;
  cfg.basis = basis(Basis::kBare);
  cfg.n_list = {1, 3, 6, 10};
  cfg.k = 6;
  cfg.shots = 3;
  cfg.shot_options.threads = 1;
  const RbResult a = run_rb(cfg);
  cfg.shot_options.threads = 4;
  const RbResult b = run_rb(cfg);
  REQUIRE(a.combined.size() == b.combined.size());
  for (std::size_t i = 0; i < a.combined.size(); ++i) {
    CHECK(a.combined[i].mean == b.combined[i].mean);
  }
  CHECK(a.fit.fidelity == b.fit.fidelity);
}

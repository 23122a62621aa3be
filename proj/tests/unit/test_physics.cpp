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

#include <catch2/catch_amalgamated.hpp>

#include "smartspin/numerics/expm.hpp"
#include "smartspin/physics/constants.hpp"
#include "smartspin/physics/hamiltonian.hpp"

using namespace smartspin;
using Catch::Approx;

TEST_CASE("default constants are the reference device values", "[physics]") {
  const PhysicalConstants c;
  CHECK(c.zero_field_splitting_hz == 2.87e9);
  CHECK(c.gamma_e_hz_per_t == 28e9);
  CHECK(c.gamma_n_hz_per_t == -4.316e6);
  CHECK(c.a_parallel_hz == 3.1e6);
  CHECK(c.a_perpendicular_hz == 3.1e6);
  CHECK(c.b0_tesla == 1.85e-3);
  CHECK(c.b0_direction == Eigen::Vector3d::UnitZ());
}

TEST_CASE("lab Hamiltonian is Hermitian and 6-dimensional", "[physics]") {
  const ComplexMatrix h = lab_hamiltonian(PhysicalConstants{});
  REQUIRE(h.rows() == 6);
  REQUIRE(h.cols() == 6);
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hyperfine pair of the |0> <-> |+1> line", "[physics]") {
  const PhysicalConstants c;
  const ComplexMatrix h = lab_hamiltonian(c);
  const double up = plus_one_line_hz(h, 0.5);
  const double down = plus_one_line_hz(h, -0.5);
  // Transverse hyperfine mixing shifts the splitting by ~A_perp^2 / (2D).
  CHECK(std::abs(std::abs(up - down) - c.a_parallel_hz) < 3e3);
  // Secular estimate D + gamma_e B0 +- A/2 holds to the transverse corrections.
  const double centre = c.zero_field_splitting_hz + c.gamma_e_hz_per_t * c.b0_tesla;
  CHECK(std::abs(0.5 * (up + down) - centre) < 1e4);
}

TEST_CASE("transition list has four lines sorted by frequency", "[physics]") {
  const auto t = transition_frequencies(lab_hamiltonian(PhysicalConstants{}));
  REQUIRE(t.size() == 4);
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i].frequency_hz >= t[i - 1].frequency_hz);
  CHECK(t.front().m_s == -1);
  CHECK(t.back().m_s == 1);
}

TEST_CASE("without transverse hyperfine the levels are product states", "[physics]") {
  PhysicalConstants c;
  c.a_perpendicular_hz = 0.0;
  const auto levels = labeled_levels(lab_hamiltonian(c));
  REQUIRE(levels.size() == 6);
  for (const auto& l : levels) CHECK(l.overlap == Approx(1.0).margin(1e-12));
  // Diagonal model: E(m_s, m_I) known in closed form.
  const auto& l = find_level(levels, 1, 0.5);
  const double expect = c.zero_field_splitting_hz + c.gamma_e_hz_per_t * c.b0_tesla -
                        c.gamma_n_hz_per_t * c.b0_tesla * 0.5 + c.a_parallel_hz * 0.5;
  CHECK(l.energy_rad_s / kTwoPi == Approx(expect).epsilon(1e-12));
}

TEST_CASE("misaligned field is rejected unless unit length", "[physics]") {
  PhysicalConstants c;
  c.b0_direction = Eigen::Vector3d(1.0, 1.0, 0.0);
  CHECK_THROWS_AS(lab_hamiltonian(c), InvariantError);
  c.b0_direction.normalize();
  CHECK_NOTHROW(lab_hamiltonian(c));
}

TEST_CASE("rotating-frame Hamiltonian matches the Pauli decomposition", "[physics]") {
  RotatingFrameParams p{2e6, 9e6, -1e6};
  const Matrix2c h = rotating_hamiltonian(p);
  CHECK(std::abs(h(0, 0) - Complex(-kPi * 2e6, 0.0)) < 1e-6);
  CHECK(std::abs(h(0, 1) - Complex(kPi * 9e6, kPi * 1e6)) < 1e-6);
  CHECK(std::abs(h(1, 0) - std::conj(h(0, 1))) < 1e-9);
  p.omega_i_hz = 2e9;
  CHECK_THROWS_AS(rotating_hamiltonian(p), InvariantError);
}

TEST_CASE("dressed transform maps the drive axis to z", "[physics]") {
  const Matrix2c x = pauli::x();
  const Matrix2c z = pauli::z();
  CHECK((dressed_transform(x) - z).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((dressed_transform(dressed_transform(x)) - x).cwiseAbs().maxCoeff() < 1e-15);
}

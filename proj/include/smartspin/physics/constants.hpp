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

#include <Eigen/Core>

#include "smartspin/errors.hpp"

namespace smartspin {

/// NV- ground-state spin constants for a 15N host nucleus. All frequencies
/// are ordinary frequencies (Hz); the 2 pi is applied when a Hamiltonian is
/// built.
struct PhysicalConstants {
  double zero_field_splitting_hz = 2.87e9;   // D
  double gamma_e_hz_per_t = 28e9;
  double gamma_n_hz_per_t = -4.316e6;
  double a_parallel_hz = 3.1e6;
  double a_perpendicular_hz = 3.1e6;
  double b0_tesla = 1.85e-3;
  Eigen::Vector3d b0_direction = Eigen::Vector3d::UnitZ();  // NV axis frame

  void validate() const {
    if (std::abs(b0_direction.norm() - 1.0) > 1e-12) {
      throw InvariantError("PhysicalConstants: B0 direction must be a unit vector");
    }
    if (!(b0_tesla >= 0.0)) throw InvariantError("PhysicalConstants: B0 must be >= 0");
  }

  Eigen::Vector3d b0_vector() const { return b0_tesla * b0_direction; }
};

/// Values used across the experiments.
namespace defaults {

inline constexpr double kRabiHz = 9e6;                 // bare Rabi frequency
inline constexpr double kHyperfineHz = 3.1e6;          // A_parallel
inline constexpr double kT2StarSeconds = 1.04e-6;      // bare Ramsey decay
inline constexpr double kT2RabiSeconds = 4.73e-6;      // bare Rabi decay
inline constexpr double kSmartPeriodSeconds = 260e-9;  // operating T_mod
inline constexpr double kDressedFmDepthHz = 1.9e6;     // 0.95 MHz dressed Rabi
/// Fractional Rabi-amplitude spread that, with the bath and nuclear
/// detunings, gives the bare Rabi decay kT2RabiSeconds.
inline constexpr double kSigmaAmp = 0.00259;

}  // namespace defaults

}  // namespace smartspin

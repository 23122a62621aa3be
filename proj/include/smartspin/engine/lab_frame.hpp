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
#include <vector>

#include <Eigen/Eigenvalues>

#include "smartspin/engine/evolve.hpp"
#include "smartspin/engine/noise.hpp"
#include "smartspin/errors.hpp"
#include "smartspin/numerics/linalg.hpp"
#include "smartspin/physics/constants.hpp"
#include "smartspin/physics/hamiltonian.hpp"
#include "smartspin/waveform/pulse.hpp"

namespace smartspin {

/// Longest sequence the lab-frame model accepts.
inline constexpr double kLabFrameMaxDuration = 1e-6;

struct LabFrameOptions {
  /// Steps per carrier cycle; values below kMinStepsPerCycle are raised.
  double steps_per_carrier_cycle = 64.0;
};

/// Eigenbasis of the static lab Hamiltonian with the drive operators
/// expressed in it.
class LabFrameModel {
 public:
  explicit LabFrameModel(const PhysicalConstants& c) {
    const ComplexMatrix h0 = lab_hamiltonian(c);
    levels_ = labeled_levels(h0);
    const auto n = static_cast<Eigen::Index>(levels_.size());
    basis_ = ComplexMatrix(6, n);
    energies_ = RealVector(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      basis_.col(k) = levels_[static_cast<std::size_t>(k)].vector;
      energies_(k) = levels_[static_cast<std::size_t>(k)].energy_rad_s;
    }
    const auto ops = SpinOperators::make();
    const ComplexMatrix one2 = ComplexMatrix::Identity(2, 2);
    sx_ = basis_.adjoint() * kron(ops.sx, one2) * basis_;
    sy_ = basis_.adjoint() * kron(ops.sy, one2) * basis_;
  }

  const std::vector<LabeledLevel>& levels() const { return levels_; }

  /// Index (in the eigenbasis) of the level labelled |m_s, m_I>.
  Eigen::Index index_of(int m_s, double m_i) const {
    for (std::size_t k = 0; k < levels_.size(); ++k) {
      if (levels_[k].m_s == m_s && levels_[k].m_i == m_i) return static_cast<Eigen::Index>(k);
    }
    throw LabelingError("lab frame: level not found");
  }

  /// Eigenbasis state |m_s, m_I>.
  StateVector eigenstate(int m_s, double m_i) const {
    StateVector v = StateVector::Zero(static_cast<Eigen::Index>(levels_.size()));
    v(index_of(m_s, m_i)) = 1.0;
    return v;
  }

  /// |0> <-> |+1> line for the given nuclear projection, Hz.
  double line_hz(double m_i) const {
    return (energies_(index_of(1, m_i)) - energies_(index_of(0, m_i))) / kTwoPi;
  }

  /// Midpoint of the two |0> <-> |+1> hyperfine lines, Hz.
  double center_hz() const { return 0.5 * (line_hz(0.5) + line_hz(-0.5)); }

  const RealVector& energies() const { return energies_; }
  const ComplexMatrix& sx() const { return sx_; }
  const ComplexMatrix& sy() const { return sy_; }

 private:
  std::vector<LabeledLevel> levels_;
  ComplexMatrix basis_;
  RealVector energies_;
  ComplexMatrix sx_, sy_;
};

namespace detail {

// exp(-i G) for Hermitian G.
inline ComplexMatrix expm_minus_i_hermitian(const ComplexMatrix& g) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(g);
  const RealVector& l = eig.eigenvalues();
  StateVector phases(l.size());
  for (Eigen::Index k = 0; k < l.size(); ++k) phases(k) = std::exp(Complex(0.0, -l(k)));
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace detail

/// Propagates `init` (a vector in the LabFrameModel eigenbasis, in the
/// interaction picture of the static Hamiltonian) through `seq`.
///
/// The drive is the circularly polarised field that reproduces the
/// two-level model's omega_I and omega_Q on the |0> <-> |+1> transition:
///   H_d = 2 pi / sqrt(2) [Re(w e^{-i phi}) Sx - Im(w e^{-i phi}) Sy],
///   w = amp (omega_I + i omega_Q), d phi / dt = 2 pi (carrier - delta(t) - bath).
/// The nuclear detuning is not added: it comes from the hyperfine term of
/// the static Hamiltonian. p0 is the total population of the m_s = 0 levels.
inline ShotResult evolve_lab_frame(const LabFrameModel& model, const PulseSequence& seq,
                                   double carrier_hz, const NoiseDraw& draw,
                                   const StateVector& init, const LabFrameOptions& opt = {}) {
  const double total = seq.duration();
  if (total > kLabFrameMaxDuration * (1.0 + 1e-12)) {
    throw ConfigError("lab-frame model is limited to 1 us; use the two-level model for longer "
                      "sequences");
  }
  if (!(carrier_hz > 0.0)) throw InputError("evolve_lab_frame: carrier must be positive");
  if (init.size() != 6 || std::abs(init.norm() - 1.0) > 1e-10) {
    throw InputError("evolve_lab_frame: initial state must be a normalised 6-vector");
  }
  const double resolution = std::max(opt.steps_per_carrier_cycle, kMinStepsPerCycle);
  const RealVector& e = model.energies();
  constexpr double kC1 = 0.5 - 0.28867513459481288225;
  constexpr double kC2 = 0.5 + 0.28867513459481288225;
  constexpr double kCommutator = 0.28867513459481288225;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  StateVector psi = init;
  double t_abs = 0.0;
  double phase = 0.0;  // drive phase at the start of the current step
  for (const auto& s : seq.segments) {
    s.validate();
    const auto steps = std::max(1L, static_cast<long>(std::ceil(s.duration * carrier_hz *
                                                                resolution)));
    const double h = s.duration / static_cast<double>(steps);
    // H_I(t) in the interaction picture, t local to the segment.
    auto h_int = [&](double t_local, double phi) {
      const Complex w = draw.amp_factor * Complex(s.omega_i_at(t_local), s.omega_q_at(t_local));
      const Complex rot = w * std::exp(Complex(0.0, -phi));
      const ComplexMatrix hd = (kTwoPi * inv_sqrt2) * (rot.real() * model.sx() -
                                                       rot.imag() * model.sy());
      const double t = t_abs + t_local;
      ComplexMatrix out(hd.rows(), hd.cols());
      for (Eigen::Index j = 0; j < hd.rows(); ++j) {
        for (Eigen::Index k = 0; k < hd.cols(); ++k) {
          out(j, k) = hd(j, k) * std::exp(Complex(0.0, (e(j) - e(k)) * t));
        }
      }
      return out;
    };
    // Phase advance over [0, tau] of a step starting at t_local; midpoint
    // rule per sub-interval is exact enough at these step sizes.
    auto phase_at = [&](double t_local, double tau) {
      const double f = carrier_hz - s.delta_at(t_local + 0.5 * tau) - draw.bath_hz;
      return kTwoPi * f * tau;
    };
    for (long k = 0; k < steps; ++k) {
      const double t0 = static_cast<double>(k) * h;
      const double ta = t0 + kC1 * h;
      const double tb = t0 + kC2 * h;
      const ComplexMatrix a = h_int(ta, phase + phase_at(t0, kC1 * h));
      const ComplexMatrix b = h_int(tb, phase + phase_at(t0, kC2 * h));
      // Fourth-order Magnus generator G, U = exp(-i G).
      const ComplexMatrix comm = a * b - b * a;
      const ComplexMatrix g = 0.5 * h * (a + b) + Complex(0.0, kCommutator * 0.5) * h * h * comm;
      psi = detail::expm_minus_i_hermitian(0.5 * (g + g.adjoint())) * psi;
      phase += phase_at(t0, h);
    }
    t_abs += s.duration;
  }
  if (std::abs(psi.norm() - 1.0) > 1e-8) throw NumericError("evolve_lab_frame: norm drift");
  ShotResult r;
  double p0 = 0.0;
  for (std::size_t k = 0; k < model.levels().size(); ++k) {
    if (model.levels()[k].m_s == 0) p0 += std::norm(psi(static_cast<Eigen::Index>(k)));
  }
  r.p0 = std::clamp(p0, 0.0, 1.0);
  r.final_state = psi;
  return r;
}

}  // namespace smartspin

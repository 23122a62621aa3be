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
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "smartspin/errors.hpp"
#include "smartspin/numerics/linalg.hpp"
#include "smartspin/physics/constants.hpp"

namespace smartspin {

/// Spin-1 electron operators on (m_s = +1, 0, -1) and spin-1/2 nuclear
/// operators on (m_I = +1/2, -1/2).
struct SpinOperators {
  ComplexMatrix sx, sy, sz;
  ComplexMatrix ix, iy, iz;

  static SpinOperators make() {
    SpinOperators ops;
    const double r = 1.0 / std::sqrt(2.0);
    ops.sx = ComplexMatrix::Zero(3, 3);
    ops.sy = ComplexMatrix::Zero(3, 3);
    ops.sz = ComplexMatrix::Zero(3, 3);
    ops.sx(0, 1) = ops.sx(1, 0) = ops.sx(1, 2) = ops.sx(2, 1) = r;
    ops.sy(0, 1) = -kI * r;
    ops.sy(1, 0) = kI * r;
    ops.sy(1, 2) = -kI * r;
    ops.sy(2, 1) = kI * r;
    ops.sz(0, 0) = 1.0;
    ops.sz(2, 2) = -1.0;
    ops.ix = 0.5 * pauli::x();
    ops.iy = 0.5 * pauli::y();
    ops.iz = 0.5 * pauli::z();
    return ops;
  }
};

/// Index of |m_s, m_I> in the 6-dimensional electron (x) nucleus basis.
inline int product_index(int m_s, double m_i) {
  const int e = 1 - m_s;              // +1 -> 0, 0 -> 1, -1 -> 2
  const int n = m_i > 0.0 ? 0 : 1;    // +1/2 -> 0, -1/2 -> 1
  return 2 * e + n;
}

/// Lab-frame spin Hamiltonian in rad/s:
/// 2 pi [D Sz^2 + ge B0.S - gn B0.I + A_par Sz Iz + A_perp (Sx Ix + Sy Iy)].
inline ComplexMatrix lab_hamiltonian(const PhysicalConstants& c) {
  c.validate();
  const auto ops = SpinOperators::make();
  const ComplexMatrix one3 = ComplexMatrix::Identity(3, 3);
  const ComplexMatrix one2 = ComplexMatrix::Identity(2, 2);
  const Eigen::Vector3d b = c.b0_vector();
  const ComplexMatrix b_dot_s = b.x() * ops.sx + b.y() * ops.sy + b.z() * ops.sz;
  const ComplexMatrix b_dot_i = b.x() * ops.ix + b.y() * ops.iy + b.z() * ops.iz;
  ComplexMatrix h = c.zero_field_splitting_hz * kron(ops.sz * ops.sz, one2) +
                    c.gamma_e_hz_per_t * kron(b_dot_s, one2) -
                    c.gamma_n_hz_per_t * kron(one3, b_dot_i) +
                    c.a_parallel_hz * kron(ops.sz, ops.iz) +
                    c.a_perpendicular_hz * (kron(ops.sx, ops.ix) + kron(ops.sy, ops.iy));
  h = 0.5 * (h + h.adjoint());
  return kTwoPi * h;
}

/// Eigenstate of a 6x6 spin Hamiltonian matched to its dominant product state.
struct LabeledLevel {
  int m_s = 0;
  double m_i = 0.5;
  double energy_rad_s = 0.0;
  double overlap = 0.0;  // |<m_s, m_I|v>|^2
  StateVector vector;
};

inline constexpr double kLabelOverlapThreshold = 0.6;

/// Diagonalises H and labels each eigenvector by (m_s, m_I).
inline std::vector<LabeledLevel> labeled_levels(const ComplexMatrix& h) {
  if (h.rows() != 6 || h.cols() != 6) throw InputError("labeled_levels: expected 6x6");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (hermiticity_defect(h) > 1e-12 * scale) {
    throw InvariantError("labeled_levels: Hamiltonian is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (h + h.adjoint()));
  const std::array<int, 3> ms_values{1, 0, -1};
  const std::array<double, 2> mi_values{0.5, -0.5};
  std::vector<LabeledLevel> levels;
  std::array<bool, 6> taken{};
  for (int k = 0; k < 6; ++k) {
    const StateVector v = eig.eigenvectors().col(k);
    int best = 0;
    for (int j = 1; j < 6; ++j) {
      if (std::norm(v(j)) > std::norm(v(best))) best = j;
    }
    const double overlap = std::norm(v(best));
    if (overlap < kLabelOverlapThreshold || taken[static_cast<std::size_t>(best)]) {
      throw LabelingError("eigenstate " + std::to_string(k) +
                          " has no dominant product-state label (overlap " +
                          std::to_string(overlap) + ")");
    }
    taken[static_cast<std::size_t>(best)] = true;
    LabeledLevel level;
    level.m_s = ms_values[static_cast<std::size_t>(best / 2)];
    level.m_i = mi_values[static_cast<std::size_t>(best % 2)];
    level.energy_rad_s = eig.eigenvalues()(k);
    level.overlap = overlap;
    level.vector = v;
    levels.push_back(level);
  }
  return levels;
}

inline const LabeledLevel& find_level(const std::vector<LabeledLevel>& levels, int m_s,
                                      double m_i) {
  for (const auto& l : levels) {
    if (l.m_s == m_s && (l.m_i > 0.0) == (m_i > 0.0)) return l;
  }
  throw LabelingError("level not found");
}

/// Electron-spin transition |0, m_I> <-> |m_s, m_I> with the nuclear state kept.
struct Transition {
  int m_s = 1;
  double m_i = 0.5;
  double frequency_hz = 0.0;

  std::string label() const {
    return std::string("|0,") + (m_i > 0 ? "+1/2" : "-1/2") + "> <-> |" +
           (m_s > 0 ? "+1" : "-1") + "," + (m_i > 0 ? "+1/2" : "-1/2") + ">";
  }
};

/// The four nuclear-spin-preserving electron transitions, sorted by frequency.
inline std::vector<Transition> transition_frequencies(const ComplexMatrix& h) {
  const auto levels = labeled_levels(h);
  std::vector<Transition> out;
  for (const int m_s : {1, -1}) {
    for (const double m_i : {0.5, -0.5}) {
      const double e0 = find_level(levels, 0, m_i).energy_rad_s;
      const double e1 = find_level(levels, m_s, m_i).energy_rad_s;
      out.push_back({m_s, m_i, std::abs(e1 - e0) / kTwoPi});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Transition& a, const Transition& b) { return a.frequency_hz < b.frequency_hz; });
  return out;
}

/// The |0> <-> |+1> line for the given nuclear projection.
inline double plus_one_line_hz(const ComplexMatrix& h, double m_i) {
  for (const auto& t : transition_frequencies(h)) {
    if (t.m_s == 1 && (t.m_i > 0.0) == (m_i > 0.0)) return t.frequency_hz;
  }
  throw LabelingError("no |0> <-> |+1> transition found");
}

/// Drive parameters of the effective two-level model on (|0>, |+1>).
///
/// `delta` is the detuning between transition and drive; it enters the
/// Hamiltonian as -(delta/2) sigma_z, i.e. the |+1> level sits delta above
/// |0> in the drive frame (delta = f_transition - f_drive).
struct RotatingFrameParams {
  double delta_hz = 0.0;
  double omega_i_hz = 0.0;
  double omega_q_hz = 0.0;

  void validate() const {
    constexpr double kLimit = 1e9;
    if (!(std::abs(delta_hz) < kLimit && std::abs(omega_i_hz) < kLimit &&
          std::abs(omega_q_hz) < kLimit)) {
      throw InvariantError("RotatingFrameParams: |delta|, |omega| must stay below 1 GHz");
    }
  }
};

/// 2 pi [-(delta/2) sz + (omega_I/2) sx + (omega_Q/2) sy] in rad/s.
inline Matrix2c rotating_hamiltonian(const RotatingFrameParams& p) {
  p.validate();
  return kPi * (-p.delta_hz * pauli::z() + p.omega_i_hz * pauli::x() +
                p.omega_q_hz * pauli::y());
}

/// Hadamard conjugation into the dressed basis: the drive axis x becomes z.
inline Matrix2c hadamard() {
  Matrix2c h;
  const double r = 1.0 / std::sqrt(2.0);
  h << r, r, r, -r;
  return h;
}

inline Matrix2c dressed_transform(const Matrix2c& op) {
  const Matrix2c h = hadamard();
  return h * op * h;
}

inline Vector2c dressed_transform(const Vector2c& psi) { return hadamard() * psi; }

}  // namespace smartspin

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

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "smartspin/engine/noise.hpp"
#include "smartspin/errors.hpp"
#include "smartspin/numerics/linalg.hpp"
#include "smartspin/numerics/su2.hpp"

namespace smartspin {

enum class Basis { kBare, kDressed, kSmart };

inline std::string to_string(Basis b) {
  switch (b) {
    case Basis::kBare: return "bare";
    case Basis::kDressed: return "dressed";
    case Basis::kSmart: return "smart";
  }
  return "?";
}

inline Basis parse_basis(const std::string& s) {
  if (s == "bare") return Basis::kBare;
  if (s == "dressed") return Basis::kDressed;
  if (s == "smart") return Basis::kSmart;
  throw ConfigError("unknown basis '" + s + "' (expected bare, dressed or smart)");
}

/// Rotation by `angle` about a logical axis.
struct Primitive {
  int axis = 0;  // 0 = x, 1 = y, 2 = z
  double angle = 0.0;

  Su2 unitary() const {
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    g(axis) = 0.5 * angle;
    return Su2::exp_pauli(g);
  }

  std::string name() const {
    const char ax = "XYZ"[axis];
    if (std::abs(std::abs(angle) - kPi) < 1e-12) return std::string(1, ax);
    return std::string(angle < 0.0 ? "-" : "+") + ax + "/2";
  }
};

/// {X, +-X/2, Y, +-Y/2} for bare and dressed, {Y, +-Y/2, Z, +-Z/2} for SMART.
inline std::vector<Primitive> primitive_set(Basis b) {
  const int a = b == Basis::kSmart ? 1 : 0;
  const int c = a + 1;
  return {{a, kPi}, {a, kPi / 2}, {a, -kPi / 2}, {c, kPi}, {c, kPi / 2}, {c, -kPi / 2}};
}

/// Bloch-sphere rotation of an SU(2) element.
inline Eigen::Matrix3d bloch_rotation(const Su2& u) {
  Eigen::Matrix3d vx;
  vx << 0.0, -u.v.z(), u.v.y(), u.v.z(), 0.0, -u.v.x(), -u.v.y(), u.v.x(), 0.0;
  return (u.w * u.w - u.v.squaredNorm()) * Eigen::Matrix3d::Identity() + 2.0 * u.w * vx +
         2.0 * u.v * u.v.transpose();
}

/// SU(2) element whose Bloch rotation is r (a proper rotation).
inline Su2 su2_from_rotation(const Eigen::Matrix3d& r) {
  if ((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-8 ||
      r.determinant() < 0.0) {
    throw InputError("su2_from_rotation: not a proper rotation");
  }
  const Eigen::Quaterniond q(r);
  Su2 u;
  u.w = q.w();
  u.v = q.vec();
  u.renormalize();
  return u;
}

/// |<u, v>| with the SU(2) inner product; 1 means equal up to global phase.
inline double phase_overlap(const Su2& a, const Su2& b) {
  return std::abs(a.w * b.w + a.v.dot(b.v));
}

/// Operator distance up to global phase, sqrt(1 - |<a, b>|), bounded by the
/// largest entry-wise difference after phase alignment.
inline double phase_distance(const Su2& a, const Su2& b) {
  return std::sqrt(std::max(0.0, 1.0 - phase_overlap(a, b)));
}

struct CliffordElement {
  int index = 0;
  Su2 unitary;
  std::vector<Primitive> xy_word;  // bare and dressed primitives, first applied first
  std::vector<Primitive> yz_word;  // SMART primitives

  Matrix2c matrix() const { return unitary.matrix(); }

  const std::vector<Primitive>& decomposition(Basis b) const {
    return b == Basis::kSmart ? yz_word : xy_word;
  }
};

inline Su2 word_unitary(const std::vector<Primitive>& word) {
  Su2 u = Su2::identity();
  for (const auto& p : word) u = p.unitary() * u;
  return u;
}

/// The 24-element single-qubit Clifford group with a multiplication table.
class CliffordGroup {
 public:
  static constexpr int kOrder = 24;
  static constexpr std::size_t kMaxWordLength = 5;

  CliffordGroup() {
    const auto xy = breadth_first(primitive_set(Basis::kBare));
    const auto yz = breadth_first(primitive_set(Basis::kSmart));
    if (xy.size() != kOrder || yz.size() != kOrder) {
      throw InvariantError("clifford group: expected 24 elements, found " +
                           std::to_string(xy.size()) + " and " + std::to_string(yz.size()));
    }
    for (int i = 0; i < kOrder; ++i) {
      CliffordElement e;
      e.index = i;
      e.unitary = word_unitary(xy[static_cast<std::size_t>(i)]);
      e.xy_word = xy[static_cast<std::size_t>(i)];
      elements_.push_back(e);
    }
    for (const auto& w : yz) {
      elements_[static_cast<std::size_t>(find(word_unitary(w)))].yz_word = w;
    }
    for (int i = 0; i < kOrder; ++i) {
      for (int j = 0; j < kOrder; ++j) {
        table_[i][j] = find(element(i).unitary * element(j).unitary);  // throws if not closed
      }
    }
    for (int i = 0; i < kOrder; ++i) inverse_[i] = find(element(i).unitary.adjoint());
    identity_ = find(Su2::identity());
  }

  const CliffordElement& element(int i) const {
    if (i < 0 || i >= kOrder) throw InputError("clifford index out of range");
    return elements_[static_cast<std::size_t>(i)];
  }
  const std::vector<CliffordElement>& elements() const { return elements_; }

  /// Index of C_a * C_b (C_b applied first).
  int compose(int a, int b) const { return table_.at(a).at(b); }
  int inverse(int i) const { return inverse_.at(i); }
  int identity() const { return identity_; }

  /// Index of the element equal to u up to global phase.
  int find(const Su2& u) const {
    for (const auto& e : elements_) {
      if (phase_overlap(e.unitary, u) > 1.0 - 1e-9) return e.index;
    }
    throw InvariantError("clifford group: element not found (group not closed)");
  }

 private:
  static std::vector<std::vector<Primitive>> breadth_first(const std::vector<Primitive>& prims) {
    std::vector<std::vector<Primitive>> words{{}};
    std::vector<Su2> seen{Su2::identity()};
    std::size_t begin = 0;
    for (std::size_t len = 1; len <= kMaxWordLength; ++len) {
      const std::size_t end = words.size();
      for (std::size_t k = begin; k < end; ++k) {
        for (const auto& p : prims) {
          const Su2 u = p.unitary() * seen[k];
          bool dup = false;
          for (const auto& s : seen) dup = dup || phase_overlap(s, u) > 1.0 - 1e-9;
          if (dup) continue;
          auto w = words[k];
          w.push_back(p);
          words.push_back(std::move(w));
          seen.push_back(u);
        }
      }
      begin = end;
    }
    return words;
  }

  std::vector<CliffordElement> elements_;
  std::array<std::array<int, kOrder>, kOrder> table_{};
  std::array<int, kOrder> inverse_{};
  int identity_ = 0;
};

inline const CliffordGroup& clifford_group() {
  static const CliffordGroup group;
  return group;
}

enum class RbTarget { kInitial, kOrthogonal };

inline std::string to_string(RbTarget t) {
  return t == RbTarget::kInitial ? "initial" : "orthogonal";
}

struct RbSequence {
  std::vector<int> cliffords;  // applied first to last
  int recovery = 0;
};

/// Net Clifford of a sequence, recovery excluded.
inline int sequence_net(const std::vector<int>& cliffords) {
  const auto& g = clifford_group();
  int net = g.identity();
  for (const int c : cliffords) net = g.compose(c, net);
  return net;
}

/// Fixed pi-flip used for the orthogonal target: about the logical axis
/// least aligned with s0.
inline int orthogonal_flip(const Eigen::Vector3d& s0) {
  Eigen::Index axis = 0;
  s0.cwiseAbs().minCoeff(&axis);
  Eigen::Vector3d g = Eigen::Vector3d::Zero();
  g(axis) = 0.5 * kPi;
  return clifford_group().find(Su2::exp_pauli(g));
}

/// N uniform Clifford draws plus the recovery gate. The recovery undoes the
/// sequence (target kInitial) or undoes it and flips s0 (kOrthogonal), so
/// the ideal final state is s0 or -s0. s0 is the logical Bloch vector of the
/// prepared state and must be a Pauli eigenstate.
inline RbSequence rb_sequence(std::size_t n, RbTarget target, CounterRng& rng,
                              const Eigen::Vector3d& s0 = Eigen::Vector3d::UnitZ()) {
  if (n < 1) throw InputError("rb_sequence: N must be >= 1");
  if (std::abs(s0.cwiseAbs().maxCoeff() - 1.0) > 1e-9 || std::abs(s0.norm() - 1.0) > 1e-9) {
    throw InputError("rb_sequence: initial state must be a Pauli eigenstate");
  }
  const auto& g = clifford_group();
  RbSequence s;
  s.cliffords.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.cliffords.push_back(static_cast<int>(rng.below(CliffordGroup::kOrder)));
  }
  const int undo = g.inverse(sequence_net(s.cliffords));
  s.recovery = target == RbTarget::kInitial ? undo : g.compose(orthogonal_flip(s0), undo);
  const Eigen::Vector3d out =
      bloch_rotation(g.element(g.compose(s.recovery, sequence_net(s.cliffords))).unitary) * s0;
  const Eigen::Vector3d want = target == RbTarget::kInitial ? s0 : Eigen::Vector3d(-s0);
  if ((out - want).norm() > 1e-9) throw InvariantError("rb_sequence: recovery check failed");
  return s;
}

}  // namespace smartspin

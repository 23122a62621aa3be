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
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "smartspin/errors.hpp"
#include "smartspin/numerics/linalg.hpp"

namespace smartspin {

/// Two-sided 95% normal quantile used for every reported interval.
inline constexpr double kCi95 = 1.96;

/// Result of a weighted least-squares fit.
struct FitOutcome {
  std::vector<std::string> names;
  RealVector params;
  RealMatrix covariance;
  double residual_norm = 0.0;  // sqrt(sum ((y - f) / sigma)^2)
  bool converged = false;
  /// Set by model-specific wrappers when the data do not support the model
  /// (e.g. no oscillation in a sinusoid fit); `diagnostic` says why.
  bool flagged = false;
  int iterations = 0;
  std::string diagnostic;

  std::size_t index_of(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw InputError("FitOutcome: no parameter named '" + name + "'");
    return static_cast<std::size_t>(it - names.begin());
  }
  double value(const std::string& name) const {
    return params(static_cast<Eigen::Index>(index_of(name)));
  }
  double stderr_of(const std::string& name) const {
    const auto i = static_cast<Eigen::Index>(index_of(name));
    return std::sqrt(std::max(0.0, covariance(i, i)));
  }
  /// Half-width of the 95% confidence interval, 1.96 sigma.
  double ci95(const std::string& name) const { return kCi95 * stderr_of(name); }
};

using FitModel = std::function<double(double x, const RealVector& p)>;

struct NllsOptions {
  int max_iterations = 400;
  double cost_tolerance = 1e-10;  // relative change of the cost
  double step_tolerance = 1e-12;  // relative parameter step
  double initial_lambda = 1e-3;
  /// Multiply the covariance by the reduced chi^2. Use when sigma only
  /// encodes relative weights.
  bool scale_covariance = false;
};

namespace detail {

inline double weighted_cost(const FitModel& model, const RealVector& p,
                            std::span<const double> x, std::span<const double> y,
                            std::span<const double> sigma, RealVector* residuals) {
  double cost = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = model(x[i], p);
    if (!std::isfinite(f)) {
      throw InputError("nlls_fit: model returned a non-finite value");
    }
    const double r = (y[i] - f) / sigma[i];
    if (residuals) (*residuals)(static_cast<Eigen::Index>(i)) = r;
    cost += r * r;
  }
  return cost;
}

// d r_i / d p_j of the weighted residuals, by central differences.
inline RealMatrix residual_jacobian(const FitModel& model, const RealVector& p,
                                    const RealVector& scale, std::span<const double> x,
                                    std::span<const double> sigma) {
  const auto n = static_cast<Eigen::Index>(x.size());
  RealMatrix jac(n, p.size());
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const double h = 1e-6 * std::max(std::abs(p(j)), scale(j));
    RealVector up = p;
    RealVector dn = p;
    up(j) += h;
    dn(j) -= h;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double fu = model(x[k], up);
      const double fd = model(x[k], dn);
      if (!std::isfinite(fu) || !std::isfinite(fd)) {
        throw InputError("nlls_fit: model returned a non-finite value");
      }
      jac(i, j) = -(fu - fd) / (2.0 * h) / sigma[k];
    }
  }
  return jac;
}

}  // namespace detail

/// Levenberg-Marquardt minimisation of sum ((y - model(x, p)) / sigma)^2.
///
/// Convergence is declared when an accepted step changes the cost by less
/// than cost_tolerance (relative) or moves every parameter by less than
/// step_tolerance (relative). The covariance is (J^T W J)^{-1} at the
/// optimum. A singular normal matrix yields converged = false with the
/// best iterate still reported.
inline FitOutcome nlls_fit(const FitModel& model, std::vector<std::string> names,
                           const RealVector& init, std::span<const double> x,
                           std::span<const double> y, std::span<const double> sigma,
                           const NllsOptions& options = {}) {
  const auto n_params = init.size();
  if (static_cast<Eigen::Index>(names.size()) != n_params) {
    throw InputError("nlls_fit: parameter names do not match the initial vector");
  }
  if (x.size() != y.size() || x.size() != sigma.size()) {
    throw InputError("nlls_fit: x, y and sigma must have equal lengths");
  }
  if (static_cast<Eigen::Index>(x.size()) < n_params + 2) {
    throw InputError("nlls_fit: need at least two more data points than parameters");
  }
  for (const double s : sigma) {
    if (!(s > 0.0)) throw InputError("nlls_fit: sigma must be positive");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw InputError("nlls_fit: data contain non-finite values");
    }
  }

  FitOutcome out;
  out.names = std::move(names);
  RealVector p = init;
  RealVector scale(n_params);
  for (Eigen::Index j = 0; j < n_params; ++j) {
    scale(j) = std::abs(init(j)) > 0.0 ? std::abs(init(j)) : 1e-8;
  }
  const auto n = static_cast<Eigen::Index>(x.size());
  RealVector r(n);
  double cost = detail::weighted_cost(model, p, x, y, sigma, &r);
  double lambda = options.initial_lambda;
  bool singular = false;

  int it = 0;
  for (; it < options.max_iterations; ++it) {
    if (cost == 0.0) {
      out.converged = true;
      break;
    }
    const RealMatrix jac = detail::residual_jacobian(model, p, scale, x, sigma);
    const RealMatrix normal = jac.transpose() * jac;
    const RealVector grad = jac.transpose() * r;
    const RealVector diag = normal.diagonal();
    if (diag.maxCoeff() <= 0.0) {
      singular = true;
      break;
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      RealMatrix damped = normal;
      for (Eigen::Index j = 0; j < n_params; ++j) {
        damped(j, j) += lambda * std::max(diag(j), 1e-30 * diag.maxCoeff());
      }
      const RealVector step = damped.ldlt().solve(-grad);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const RealVector trial = p + step;
      RealVector trial_r(n);
      double trial_cost = INFINITY;
      try {
        trial_cost = detail::weighted_cost(model, trial, x, y, sigma, &trial_r);
      } catch (const InputError&) {
        trial_cost = INFINITY;  // stepped outside the model's domain
      }
      if (trial_cost <= cost) {
        double rel_step = 0.0;
        for (Eigen::Index j = 0; j < n_params; ++j) {
          rel_step = std::max(rel_step,
                              std::abs(step(j)) / std::max(std::abs(p(j)), 1e-300));
        }
        const double rel_cost = (cost - trial_cost) / std::max(cost, 1e-300);
        p = trial;
        r = trial_r;
        cost = trial_cost;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (rel_cost < options.cost_tolerance || rel_step < options.step_tolerance) {
          out.converged = true;
        }
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e16) break;
    }
    if (out.converged) {
      ++it;
      break;
    }
    if (!accepted) {
      // No downhill step at any damping: p is a (numerical) minimum.
      out.converged = true;
      break;
    }
  }
  out.iterations = it;
  out.params = p;
  out.residual_norm = std::sqrt(cost);

  // Work in parameters scaled to O(1) so that the rank test does not depend
  // on units; cov = D (D J^T J D)^+ D.
  const RealMatrix jac = detail::residual_jacobian(model, p, scale, x, sigma);
  RealVector d(n_params);
  for (Eigen::Index j = 0; j < n_params; ++j) d(j) = std::max(std::abs(p(j)), scale(j));
  const RealMatrix normal = d.asDiagonal() * (jac.transpose() * jac) * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(normal);
  const double max_ev = eig.eigenvalues().cwiseAbs().maxCoeff();
  const double min_ev = eig.eigenvalues().minCoeff();
  const double cutoff = 1e-13 * max_ev;
  RealVector inv_ev = RealVector::Zero(n_params);
  for (Eigen::Index j = 0; j < n_params; ++j) {
    if (eig.eigenvalues()(j) > cutoff) inv_ev(j) = 1.0 / eig.eigenvalues()(j);
  }
  // pseudo-inverse keeps the covariance PSD even for degenerate fits
  RealMatrix cov = d.asDiagonal() *
                   (eig.eigenvectors() * inv_ev.asDiagonal() * eig.eigenvectors().transpose()) *
                   d.asDiagonal();
  cov = 0.5 * (cov + cov.transpose());
  if (singular || !(max_ev > 0.0) || min_ev <= cutoff) {
    out.converged = false;
    out.diagnostic = "singular normal equations";
  }
  if (options.scale_covariance) {
    const double dof = static_cast<double>(n - n_params);
    cov *= cost / dof;
  }
  out.covariance = cov;
  if (!out.converged && out.diagnostic.empty()) {
    out.diagnostic = "iteration limit reached";
  }
  return out;
}

}  // namespace smartspin

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
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "smartspin/errors.hpp"
#include "smartspin/numerics/bessel.hpp"
#include "smartspin/numerics/linalg.hpp"
#include "smartspin/numerics/nlls.hpp"

namespace smartspin {

enum class DecayEnvelope { kExponential, kGaussian };

inline std::string to_string(DecayEnvelope e) {
  return e == DecayEnvelope::kExponential ? "exponential" : "gaussian";
}

inline double envelope_value(DecayEnvelope e, double t, double t2) {
  const double r = t / std::abs(t2);
  return e == DecayEnvelope::kExponential ? std::exp(-r) : std::exp(-r * r);
}

namespace detail {

// Reported intervals always include the reduced chi^2, so they stay
// meaningful when sigma is absent or only relative.
inline NllsOptions fit_options() {
  NllsOptions o;
  o.scale_covariance = true;
  return o;
}

inline std::vector<double> sigma_or_unit(std::span<const double> sigma, std::size_t n,
                                         double floor) {
  std::vector<double> s(n, 1.0);
  if (sigma.empty()) return s;
  if (sigma.size() != n) throw InputError("fit: sigma length does not match the data");
  for (std::size_t i = 0; i < n; ++i) s[i] = std::max(sigma[i], floor);
  return s;
}

inline void require_finite(std::span<const double> v, const char* what) {
  for (const double x : v) {
    if (!std::isfinite(x)) throw InputError(std::string(what) + " contains non-finite values");
  }
}

}  // namespace detail

/// Peak of the discrete spectrum of y - mean(y), searched on a 4x
/// oversampled grid from one bin up to the Nyquist frequency of the median
/// spacing. Works on non-uniform grids (direct sums).
struct SpectralPeak {
  double frequency = 0.0;
  double phase = 0.0;      // arg of the DFT at the peak (cosine phase)
  double amplitude = 0.0;  // 2 |X| / n
  double contrast = 0.0;   // peak power over median power
};

inline SpectralPeak spectral_peak(std::span<const double> t, std::span<const double> y) {
  const std::size_t n = t.size();
  if (n < 4 || y.size() != n) throw InputError("spectral_peak: need >= 4 matching samples");
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  const double span = t.back() - t.front();
  if (!(span > 0.0)) throw InputError("spectral_peak: time axis must increase");
  std::vector<double> dt(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) dt[i] = t[i + 1] - t[i];
  std::nth_element(dt.begin(), dt.begin() + static_cast<long>(dt.size() / 2), dt.end());
  const double nyquist = 0.5 / dt[dt.size() / 2];
  const double df = 1.0 / (4.0 * span);
  const auto bins = static_cast<std::size_t>(std::floor(nyquist / df));
  SpectralPeak best;
  std::vector<double> power;
  power.reserve(bins);
  for (std::size_t k = 4; k <= bins; ++k) {  // skip the DC lobe
    const double f = df * static_cast<double>(k);
    Complex acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += (y[i] - mean) * std::exp(Complex(0.0, -kTwoPi * f * (t[i] - t.front())));
    }
    const double p = std::norm(acc);
    power.push_back(p);
    if (p > best.amplitude) {
      best.amplitude = p;
      best.frequency = f;
      // y ~ A cos(2 pi f (t - t0) + phi)  =>  X ~ (n A / 2) e^{i phi}
      best.phase = std::arg(acc) - kTwoPi * f * t.front();
    }
  }
  if (power.empty()) return best;
  std::vector<double> sorted = power;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2),
                   sorted.end());
  const double median = sorted[sorted.size() / 2];
  best.contrast = median > 0.0 ? best.amplitude / median : std::numeric_limits<double>::infinity();
  best.amplitude = 2.0 * std::sqrt(best.amplitude) / static_cast<double>(n);
  return best;
}

/// Fitted T2 beyond this multiple of the time span counts as unresolved.
inline constexpr double kUnresolvedDecayFactor = 100.0;

/// Parameters: A, f, phi, T2, c for A env(t/T2) cos(2 pi f t + phi) + c.
///
/// Flagged when the data are flat or when no spectral peak stands above
/// the noise floor. sigma may be empty (unit weights).
inline FitOutcome fit_decaying_sinusoid(std::span<const double> t, std::span<const double> y,
                                        DecayEnvelope envelope,
                                        std::span<const double> sigma = {}) {
  if (t.size() != y.size()) throw InputError("fit_decaying_sinusoid: length mismatch");
  if (t.size() < 8) throw InputError("fit_decaying_sinusoid: need at least 8 points");
  detail::require_finite(t, "time axis");
  detail::require_finite(y, "data");
  FitOutcome out;
  out.names = {"A", "f", "phi", "T2", "c"};
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const double range = *hi - *lo;
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  if (range <= 1e-9 * std::max(1.0, std::abs(mean))) {
    out.params = RealVector::Zero(5);
    out.params(4) = mean;
    out.covariance = RealMatrix::Zero(5, 5);
    out.flagged = true;
    out.diagnostic = "flat data: frequency undefined";
    return out;
  }
  const SpectralPeak peak = spectral_peak(t, y);
  if (peak.contrast < 4.0) {
    out.params = RealVector::Zero(5);
    out.params(4) = mean;
    out.covariance = RealMatrix::Zero(5, 5);
    out.flagged = true;
    out.diagnostic = "no spectral peak above the noise floor";
    return out;
  }
  const std::vector<double> s = detail::sigma_or_unit(sigma, t.size(), 1e-6 * range);
  const FitModel model = [envelope](double x, const RealVector& p) {
    return p(0) * envelope_value(envelope, x, p(3)) * std::cos(kTwoPi * p(1) * x + p(2)) + p(4);
  };
  const double span = t.back() - t.front();
  FitOutcome best;
  bool have = false;
  for (const double t2_factor : {0.1, 0.3, 1.0, 3.0, 30.0}) {
    RealVector init(5);
    init << std::max(peak.amplitude, 0.5 * range), peak.frequency, peak.phase,
        t2_factor * span, mean;
    FitOutcome f = nlls_fit(model, out.names, init, t, y, s, detail::fit_options());
    if (!have || f.residual_norm < best.residual_norm) {
      best = f;
      have = true;
    }
  }
  // Canonical signs: A > 0, T2 > 0, f > 0, phi in (-pi, pi].
  RealVector& p = best.params;
  if (p(1) < 0.0) {
    p(1) = -p(1);
    p(2) = -p(2);
  }
  if (p(0) < 0.0) {
    p(0) = -p(0);
    p(2) += kPi;
  }
  p(3) = std::abs(p(3));
  p(2) = std::remainder(p(2), kTwoPi);
  if (!best.converged && p(3) > kUnresolvedDecayFactor * span) {
    // T2 ran off along a flat direction: the oscillation is fitted, the decay is not.
    best.diagnostic = "decay not resolved within the window";
  } else if (!best.converged) {
    best.flagged = true;
    best.diagnostic = "fit did not converge";
  }
  return best;
}

/// Parameters: A, T2, c for A env(t/T2) + c.
inline FitOutcome fit_decay(std::span<const double> t, std::span<const double> y,
                            DecayEnvelope envelope, std::span<const double> sigma = {}) {
  if (t.size() != y.size() || t.size() < 5) {
    throw InputError("fit_decay: need at least 5 matching points");
  }
  detail::require_finite(t, "time axis");
  detail::require_finite(y, "data");
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const double range = *hi - *lo;
  FitOutcome out;
  out.names = {"A", "T2", "c"};
  if (range <= 1e-9) {
    out.params = RealVector(3);
    out.params << 0.0, std::numeric_limits<double>::infinity(), y.front();
    out.covariance = RealMatrix::Zero(3, 3);
    out.flagged = true;
    out.diagnostic = "flat data: no decay";
    return out;
  }
  const std::vector<double> s = detail::sigma_or_unit(sigma, t.size(), 1e-6 * range);
  const FitModel model = [envelope](double x, const RealVector& p) {
    return p(0) * envelope_value(envelope, x, p(1)) + p(2);
  };
  const double span = t.back() - t.front();
  FitOutcome best;
  bool have = false;
  for (const double t2_factor : {0.1, 0.3, 1.0, 3.0, 30.0}) {
    RealVector init(3);
    init << y.front() - y.back(), t2_factor * span, y.back();
    FitOutcome f = nlls_fit(model, out.names, init, t, y, s, detail::fit_options());
    if (!have || f.residual_norm < best.residual_norm) {
      best = f;
      have = true;
    }
  }
  best.params(1) = std::abs(best.params(1));
  if (!best.converged && best.params(1) > kUnresolvedDecayFactor * span) {
    best.diagnostic = "decay not resolved within the window";
  } else if (!best.converged) {
    best.flagged = true;
    best.diagnostic = "fit did not converge";
  }
  return best;
}

/// Coherence time of a trace that may or may not oscillate.
struct CoherenceEstimate {
  double t2 = 0.0;           // s; +inf when no decay is resolved
  double t2_ci95 = 0.0;      // half-width, s
  double frequency = 0.0;    // Hz; 0 for a pure decay
  bool no_decay = false;
  bool oscillating = false;
  bool flagged = false;
  std::string diagnostic;
  FitOutcome fit;
};

/// Fits both a pure decay and a decaying sinusoid with the given envelope
/// and keeps the one with lower AIC. A T2 beyond `no_decay_factor` times the
/// time span is reported as the no-decay sentinel.
inline CoherenceEstimate estimate_coherence(std::span<const double> t, std::span<const double> y,
                                            DecayEnvelope envelope,
                                            std::span<const double> sigma = {},
                                            double no_decay_factor = kUnresolvedDecayFactor) {
  CoherenceEstimate est;
  const double span = t.back() - t.front();
  FitOutcome decay = fit_decay(t, y, envelope, sigma);
  if (decay.flagged && decay.diagnostic.rfind("flat", 0) == 0) {
    est.no_decay = true;
    est.t2 = std::numeric_limits<double>::infinity();
    est.fit = decay;
    est.diagnostic = "no decay";
    return est;
  }
  FitOutcome chosen = decay;
  if (t.size() >= 8) {
    FitOutcome osc = fit_decaying_sinusoid(t, y, envelope, sigma);
    if (!osc.flagged) {
      // Without sigma the residuals carry no scale, so use the Gaussian
      // likelihood with the variance profiled out.
      const auto aic = [&](const FitOutcome& f, double k) {
        const double chi2 = f.residual_norm * f.residual_norm;
        if (!sigma.empty()) return chi2 + 2.0 * k;
        const double n = static_cast<double>(t.size());
        return n * std::log(std::max(chi2, 1e-300) / n) + 2.0 * k;
      };
      const double aic_decay = aic(decay, 3.0);
      const double aic_osc = aic(osc, 5.0);
      if (aic_osc < aic_decay) {
        chosen = osc;
        est.oscillating = true;
        est.frequency = osc.value("f");
      }
    }
  }
  est.fit = chosen;
  est.t2 = chosen.value("T2");
  est.t2_ci95 = chosen.ci95("T2");
  est.flagged = chosen.flagged;
  est.diagnostic = chosen.diagnostic;
  if (est.t2 > no_decay_factor * span) {
    est.no_decay = true;
    est.t2 = std::numeric_limits<double>::infinity();
    est.diagnostic = "no decay resolved within the window";
  }
  return est;
}

/// scale |J0(omega_eff t_mod)| + floor, omega_eff in Hz, so that the zeros
/// sit at T_opt = j_i / omega_eff.
inline double bessel_coherence_model(double t_mod, double scale, double omega_eff,
                                     double floor) {
  return scale * std::abs(bessel_j0(omega_eff * t_mod)) + floor;
}

/// Fits bessel_coherence_model to 1/T2 data, starting from omega_rabi.
inline FitOutcome fit_bessel_coherence(std::span<const double> t_mod,
                                       std::span<const double> inv_t2,
                                       std::span<const double> sigma, double omega_rabi) {
  if (t_mod.size() != inv_t2.size() || t_mod.size() < 6) {
    throw InputError("fit_bessel_coherence: need at least 6 matching points");
  }
  if (!(omega_rabi > 0.0)) throw InputError("fit_bessel_coherence: Rabi frequency must be positive");
  detail::require_finite(t_mod, "t_mod");
  detail::require_finite(inv_t2, "1/T2");
  const double ymax = *std::max_element(inv_t2.begin(), inv_t2.end());
  const double ymin = *std::min_element(inv_t2.begin(), inv_t2.end());
  const std::vector<double> s =
      detail::sigma_or_unit(sigma, t_mod.size(), 1e-6 * std::max(1e-300, ymax - ymin));
  const FitModel model = [](double x, const RealVector& p) {
    return bessel_coherence_model(x, p(0), p(1), p(2));
  };
  RealVector init(3);
  init << ymax - ymin, omega_rabi, ymin;
  FitOutcome f = nlls_fit(model, {"scale", "omega_eff", "floor"}, init, t_mod, inv_t2, s,
                          detail::fit_options());
  const double w = f.value("omega_eff");
  if (!f.converged) {
    f.flagged = true;
    f.diagnostic = "fit did not converge";
  } else if (w < 0.5 * omega_rabi || w > 2.0 * omega_rabi) {
    f.flagged = true;
    f.diagnostic = "omega_eff left [0.5, 2] x Omega_R: degenerate data";
  } else if (std::abs(f.value("scale")) <= 1e-6 * std::max(std::abs(ymax), 1e-300)) {
    f.flagged = true;
    f.diagnostic = "vanishing Bessel scale";
  }
  return f;
}

struct CoherencePeak {
  std::size_t index = 0;
  double t_mod = 0.0;
  double t2 = 0.0;
  double improvement = 0.0;  // t2 / bare T2*
};

struct CoherenceSummary {
  std::vector<double> inv_t2_normalized;  // NaN where the sentinel applies
  std::vector<CoherencePeak> peaks;       // best first
  std::size_t no_decay_points = 0;
};

/// Locates distinct local maxima of T2(t_mod) and their ratios to the bare
/// T2*. Two maxima are distinct when T2 falls below half the smaller one
/// somewhere between them. No-decay points (T2 = inf) are excluded.
inline CoherenceSummary summarize_coherence(std::span<const double> t_mod,
                                            std::span<const double> t2, double bare_t2_star,
                                            std::size_t max_peaks = 2) {
  if (t_mod.size() != t2.size() || t_mod.empty()) {
    throw InputError("summarize_coherence: need matching, non-empty inputs");
  }
  if (!(bare_t2_star > 0.0)) throw InputError("summarize_coherence: bare T2* must be positive");
  const std::size_t n = t2.size();
  CoherenceSummary out;
  double max_inv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isfinite(t2[i]) && t2[i] > 0.0) {
      max_inv = std::max(max_inv, 1.0 / t2[i]);
    } else {
      ++out.no_decay_points;
    }
  }
  out.inv_t2_normalized.resize(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isfinite(t2[i]) && t2[i] > 0.0 && max_inv > 0.0) {
      out.inv_t2_normalized[i] = (1.0 / t2[i]) / max_inv;
    }
  }
  auto finite = [&](std::size_t i) { return std::isfinite(t2[i]) && t2[i] > 0.0; };
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    if (!finite(i)) continue;
    const bool left = i == 0 || !finite(i - 1) || t2[i] >= t2[i - 1];
    const bool right = i + 1 == n || !finite(i + 1) || t2[i] >= t2[i + 1];
    if (left && right) candidates.push_back(i);
  }
  std::sort(candidates.begin(), candidates.end(),
            [&](std::size_t a, std::size_t b) { return t2[a] > t2[b]; });
  std::vector<std::size_t> accepted;
  for (const std::size_t c : candidates) {
    bool distinct = true;
    for (const std::size_t a : accepted) {
      const std::size_t from = std::min(a, c);
      const std::size_t to = std::max(a, c);
      double valley = std::numeric_limits<double>::infinity();
      for (std::size_t k = from; k <= to; ++k) {
        if (finite(k)) valley = std::min(valley, t2[k]);
      }
      if (!(valley < 0.5 * std::min(t2[a], t2[c]))) distinct = false;
    }
    if (distinct) accepted.push_back(c);
    if (accepted.size() == max_peaks) break;
  }
  for (const std::size_t i : accepted) {
    out.peaks.push_back({i, t_mod[i], t2[i], t2[i] / bare_t2_star});
  }
  return out;
}

}  // namespace smartspin

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
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "smartspin/analysis/fits.hpp"
#include "smartspin/engine/noise.hpp"
#include "smartspin/engine/shots.hpp"
#include "smartspin/errors.hpp"
#include "smartspin/physics/constants.hpp"
#include "smartspin/waveform/sample.hpp"

namespace smartspin {

using Json = nlohmann::ordered_json;

/// Settings shared by every experiment.
struct ExperimentContext {
  PhysicalConstants physics;
  NoiseModel noise;
  std::size_t shots = 200;
  std::uint64_t seed = 1;
  ShotOptions shot_options;
};

/// One data trace: p0 against a swept axis.
struct SweepResult {
  std::string experiment;
  std::string axis_name;  // e.g. "t"
  std::string axis_unit;  // e.g. "s"
  std::vector<double> axis_values;
  std::vector<double> p0_mean;
  std::vector<double> p0_sem;
  Json metadata = Json::object();  // configuration echo
  Json fits = Json::object();

  void validate() const {
    if (axis_values.size() != p0_mean.size() || axis_values.size() != p0_sem.size()) {
      throw InvariantError("SweepResult: axis, mean and sem lengths differ");
    }
    for (std::size_t i = 0; i < p0_mean.size(); ++i) {
      if (!(p0_mean[i] >= -1e-12 && p0_mean[i] <= 1.0 + 1e-12) || !(p0_sem[i] >= 0.0)) {
        throw InvariantError("SweepResult: p0 outside [0, 1]");
      }
    }
  }

  void assign(const std::vector<ShotStatistics>& stats) {
    p0_mean.resize(stats.size());
    p0_sem.resize(stats.size());
    for (std::size_t i = 0; i < stats.size(); ++i) {
      p0_mean[i] = stats[i].mean;
      p0_sem[i] = stats[i].sem;
    }
  }
};

inline void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  r.validate();
  os << r.axis_name << '_' << r.axis_unit << ",p0_mean,p0_sem\n";
  for (std::size_t i = 0; i < r.axis_values.size(); ++i) {
    os << format_double(r.axis_values[i]) << ',' << format_double(r.p0_mean[i]) << ','
       << format_double(r.p0_sem[i]) << '\n';
  }
}

/// JSON number, with non-finite values mapped to null.
inline Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json to_json(const FitOutcome& f) {
  Json j = Json::object();
  Json params = Json::object();
  for (std::size_t i = 0; i < f.names.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const bool have = f.params.size() > k;
    Json p = Json::object();
    p["value"] = json_number(have ? f.params(k) : std::numeric_limits<double>::quiet_NaN());
    p["ci95"] = json_number(f.covariance.rows() > k ? f.ci95(f.names[i])
                                                    : std::numeric_limits<double>::quiet_NaN());
    params[f.names[i]] = p;
  }
  j["params"] = params;
  j["converged"] = f.converged;
  j["flagged"] = f.flagged;
  j["diagnostic"] = f.diagnostic;
  j["residual_norm"] = json_number(f.residual_norm);
  return j;
}

inline Json to_json(const NoiseModel& n) {
  Json j = Json::object();
  j["nuclear_uninitialized"] = n.nuclear_uninitialized;
  j["a_parallel_Hz"] = n.a_parallel_hz;
  j["sigma_bath_Hz"] = n.sigma_bath_hz;
  j["sigma_amp"] = n.sigma_amp;
  j["fixed_nuclear_m"] = n.fixed_nuclear_m ? Json(*n.fixed_nuclear_m) : Json(nullptr);
  return j;
}

inline Json to_json(const ExperimentContext& c) {
  Json j = Json::object();
  j["shots"] = c.shots;
  j["seed"] = c.seed;
  j["steps_per_cycle"] = c.shot_options.engine.steps_per_cycle;
  j["readout_repetitions"] = c.shot_options.readout.repetitions;
  j["noise"] = to_json(c.noise);
  return j;
}

/// n points from lo to hi inclusive.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n < 2) throw InputError("linspace: need at least two points");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

}  // namespace smartspin

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
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "smartspin/benchmarking/rb.hpp"
#include "smartspin/cli/config.hpp"
#include "smartspin/cli/svg.hpp"
#include "smartspin/experiments/calibration.hpp"
#include "smartspin/experiments/experiments.hpp"
#include "smartspin/version.hpp"

namespace smartspin::cli {

// ------------------------------------------------------------ builders --

inline PhysicalConstants make_physics(const Config& c) {
  PhysicalConstants p;
  p.zero_field_splitting_hz = c.real("physics.zero_field_splitting");
  p.gamma_e_hz_per_t = c.real("physics.gamma_e");
  p.gamma_n_hz_per_t = c.real("physics.gamma_n");
  p.a_parallel_hz = c.real("physics.a_parallel");
  p.a_perpendicular_hz = c.real("physics.a_perpendicular");
  p.b0_tesla = c.real("physics.b0");
  const double th = c.real("physics.b0_theta");
  const double ph = c.real("physics.b0_phi");
  p.b0_direction = Eigen::Vector3d(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                                   std::cos(th));
  try {
    p.validate();
  } catch (const InvariantError& e) {
    throw ConfigError(std::string("physics: ") + e.what());
  }
  return p;
}

inline NoiseModel make_noise(const Config& c) {
  NoiseModel n;
  n.nuclear_uninitialized = c.flag("noise.nuclear_uninitialized");
  n.a_parallel_hz = c.real("physics.a_parallel");
  n.sigma_bath_hz = c.real("noise.sigma_bath");
  n.sigma_amp = c.real("noise.sigma_amp");
  const double m = c.real("noise.nuclear_m");
  if (m != 0.0) n.fixed_nuclear_m = m;
  n.validate();
  return n;
}

inline ShotOptions make_shot_options(const Config& c) {
  ShotOptions o;
  o.engine.steps_per_cycle = c.real("engine.steps_per_cycle");
  o.readout.repetitions = static_cast<int>(c.count("readout.repetitions"));
  o.readout.contrast = c.real("readout.contrast");
  o.threads = static_cast<int>(c.count("threads"));
  o.readout.validate();
  return o;
}

inline ExperimentContext make_context(const Config& c) {
  ExperimentContext ctx;
  ctx.physics = make_physics(c);
  ctx.noise = make_noise(c);
  ctx.shots = c.count("shots");
  if (ctx.shots < 1) throw ConfigError("config key 'shots' must be >= 1");
  ctx.seed = static_cast<std::uint64_t>(c.count("seed"));
  ctx.shot_options = make_shot_options(c);
  return ctx;
}

inline DressedMode parse_dressed_mode(const std::string& s) {
  return s == "circular" ? DressedMode::kCircular : DressedMode::kFrequencyModulated;
}

/// SMART parameters; both tone amplitudes 0 means calibrate them here.
inline SmartParams make_smart(const Config& c, const EngineOptions& engine, Json* info = nullptr) {
  SmartParams p;
  p.omega_peak = c.real("smart.omega_peak");
  p.t_mod = c.real("smart.t_mod");
  p.validate();
  const double ay = c.real("smart.tone_amp_y");
  const double az = c.real("smart.tone_amp_z");
  if ((ay == 0.0) != (az == 0.0)) {
    throw ConfigError("config keys 'smart.tone_amp_y' and 'smart.tone_amp_z' must both be set "
                      "or both be 0 (calibrate)");
  }
  if (ay != 0.0) {
    p.tone_amp_y = ay;
    p.tone_amp_z = az;
    p.tone_mix_z = c.real("smart.tone_mix_z");
    if (info) (*info)["calibrated_here"] = false;
    return p;
  }
  ToneCalibrationOptions o;
  o.engine = engine;
  const SmartCalibration cal = calibrate_smart(p, kPi / 2, o);
  if (info) {
    (*info)["calibrated_here"] = true;
    (*info)["tone_amp_y_Hz"] = *cal.params.tone_amp_y;
    (*info)["tone_amp_z_Hz"] = *cal.params.tone_amp_z;
    (*info)["tone_mix_z_Hz"] = cal.params.tone_mix_z;
  }
  return cal.params;
}

// ------------------------------------------------------------- outputs --

/// What one experiment run produced.
struct RunOutput {
  std::string stem;  // file name without extension
  Json sidecar = Json::object();
  std::string csv;
  std::vector<std::pair<std::string, std::string>> extra_csv;  // suffix, content
  Plot plot;
  Json summary = Json::object();  // short digest for the terminal
};

inline Json sidecar_head(const std::string& experiment, const Config& c) {
  Json j = Json::object();
  j["experiment"] = experiment;
  j["version"] = kVersion;
  j["seed"] = c.integer("seed");
  j["config"] = c.to_json();
  j["config_units"] = Config::units();
  return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw ConfigError("write failed for '" + path.string() + "'");
}

/// Writes <dir>/<stem>.csv, .json and optionally .svg; returns the paths.
inline std::vector<std::string> write_outputs(const RunOutput& r, const std::string& dir,
                                              bool svg) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base = std::filesystem::path(dir) / r.stem;
  std::vector<std::string> files;
  const auto put = [&](const std::string& suffix, const std::string& text) {
    const std::filesystem::path p = base.string() + suffix;
    write_text(p, text);
    files.push_back(p.string());
  };
  put(".csv", r.csv);
  for (const auto& [suffix, text] : r.extra_csv) put(suffix + ".csv", text);
  put(".json", r.sidecar.dump(2) + "\n");
  if (svg && !r.plot.series.empty()) {
    std::ostringstream os;
    write_svg(os, r.plot);
    put(".svg", os.str());
  }
  return files;
}

// ------------------------------------------------------------- runners --

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"odmr",        "rabi",       "ramsey", "smart-ramsey",
                                              "dressed-rabi", "smart-rabi", "rb"};
  return names;
}

/// Config sections searched for undotted keys of an experiment.
inline std::vector<std::string> experiment_sections(const std::string& name) {
  if (name == "smart-ramsey") return {"smart_ramsey", "smart"};
  if (name == "dressed-rabi") return {"dressed_rabi", "dressed"};
  if (name == "smart-rabi") return {"smart_rabi", "smart"};
  if (name == "rb") return {"rb", "smart", "dressed"};
  if (name == "calibrate") return {"calibrate", "smart"};
  return {name};
}

namespace detail {

inline std::string csv_of(const std::function<void(std::ostream&)>& f) {
  std::ostringstream os;
  f(os);
  return os.str();
}

inline double fit_value(const Json& fits, const char* key) {
  if (!fits.contains("decaying_sinusoid")) return std::nan("");
  const Json& f = fits.at("decaying_sinusoid");
  if (!f.contains(key) || f.at(key).is_null()) return std::nan("");
  return f.at(key).get<double>();
}

inline RunOutput sweep_output(const std::string& experiment, const SweepResult& r,
                              const Config& c, const std::string& title, double x_scale,
                              const std::string& x_label) {
  RunOutput out;
  out.stem = experiment + "-" + std::to_string(c.integer("seed"));
  out.csv = csv_of([&](std::ostream& os) { write_sweep_csv(os, r); });
  out.sidecar = sidecar_head(experiment, c);
  Json res = Json::object();
  res["axis"] = r.axis_name + "_" + r.axis_unit;
  res["n_points"] = r.axis_values.size();
  res["metadata"] = r.metadata;
  res["fits"] = r.fits;
  out.sidecar["results"] = res;
  out.plot.title = title;
  out.plot.x_label = x_label;
  out.plot.y_label = "P(|0>)";
  out.plot.x_scale = x_scale;
  out.plot.series.push_back({experiment, r.axis_values, r.p0_mean, r.p0_sem, true, false});
  return out;
}

inline Json sweep_digest(const SweepResult& r, const char* t2_key) {
  Json d = Json::object();
  d["frequency_Hz"] = json_number(fit_value(r.fits, "frequency_Hz"));
  d[t2_key] = json_number(fit_value(r.fits, t2_key));
  return d;
}

}  // namespace detail

inline RunOutput run_odmr(const Config& c) {
  const ExperimentContext ctx = make_context(c);
  OdmrConfig o;
  o.f_min_hz = c.real("odmr.f_min");
  o.f_max_hz = c.real("odmr.f_max");
  o.n_points = c.count("odmr.n_points");
  o.pulse_len_s = c.real("odmr.pulse_len");
  o.omega_hz = c.real("odmr.omega");
  const SweepResult r = odmr_sweep(o, ctx);
  RunOutput out = detail::sweep_output("odmr", r, c, "ODMR", 1e-9, "drive frequency (GHz)");
  const auto dips = odmr_dips(r, 1e6);
  Json d = Json::object();
  d["dips_Hz"] = dips;
  d["dip_splitting_Hz"] = dips.size() == 2 ? Json(dips[1] - dips[0]) : Json(nullptr);
  d["line_splitting_Hz"] = r.fits["splitting_Hz"];
  out.sidecar["results"]["dips"] = d;
  out.summary = d;
  return out;
}

inline RunOutput run_rabi(const Config& c) {
  const ExperimentContext ctx = make_context(c);
  RabiConfig o;
  o.t_max_s = c.real("rabi.t_max");
  o.n_points = c.count("rabi.n_points");
  o.omega_hz = c.real("rabi.omega");
  o.detune_hz = c.real("rabi.detune");
  const SweepResult r = rabi(o, ctx);
  RunOutput out = detail::sweep_output("rabi", r, c, "Rabi", 1e6, "pulse length (us)");
  out.summary = detail::sweep_digest(r, "T2_rabi_s");
  return out;
}

inline RunOutput run_ramsey(const Config& c) {
  const ExperimentContext ctx = make_context(c);
  RamseyConfig o;
  o.tau_max_s = c.real("ramsey.tau_max");
  o.n_points = c.count("ramsey.n_points");
  o.omega_hz = c.real("ramsey.omega");
  o.detune_hz = c.real("ramsey.detune");
  const SweepResult r = ramsey(o, ctx);
  RunOutput out = detail::sweep_output("ramsey", r, c, "Ramsey", 1e6, "free evolution (us)");
  out.summary = detail::sweep_digest(r, "T2_star_s");
  return out;
}

inline RunOutput run_smart_ramsey(const Config& c) {
  const ExperimentContext ctx = make_context(c);
  SmartRamseyConfig o;
  const std::size_t n = c.count("smart_ramsey.n_t_mod");
  if (n < 2) throw ConfigError("config key 'smart_ramsey.n_t_mod' must be >= 2");
  o.t_mod_list = linspace(c.real("smart_ramsey.t_mod_min"), c.real("smart_ramsey.t_mod_max"), n);
  for (const double t : o.t_mod_list) {
    if (!(t > 0.0)) throw ConfigError("smart_ramsey: periods must be positive");
  }
  o.omega_peak_hz = c.real("smart.omega_peak");
  o.pulse_omega_hz = c.real("smart_ramsey.pulse_omega");
  o.n_points = c.count("smart_ramsey.n_points");
  o.window_factor = c.real("smart_ramsey.window_factor");
  o.window_min_s = c.real("smart_ramsey.window_min");
  o.window_max_s = c.real("smart_ramsey.window_max");
  const SmartRamseyResult r = smart_ramsey(o, ctx);

  RunOutput out;
  out.stem = "smart-ramsey-" + std::to_string(c.integer("seed"));
  out.csv = detail::csv_of([&](std::ostream& os) { write_smart_ramsey_csv(os, r); });
  out.extra_csv.emplace_back("-traces", detail::csv_of([&](std::ostream& os) {
                               write_smart_ramsey_traces_csv(os, r);
                             }));
  out.sidecar = sidecar_head("smart-ramsey", c);
  out.sidecar["results"] = to_json(r);
  out.plot.title = "SMART Ramsey coherence";
  out.plot.x_label = "T_mod (ns)";
  out.plot.y_label = "T2 (us)";
  out.plot.x_scale = 1e9;
  out.plot.y_scale = 1e6;
  std::vector<double> t2 = r.t2();
  for (auto& v : t2) {
    if (!std::isfinite(v)) v = std::nan("");
  }
  out.plot.series.push_back({"T2", r.t_mod, t2, {}, true, true});
  out.summary["coherence_maxima"] = out.sidecar["results"]["coherence_maxima"];
  out.summary["bessel_zeros_s"] =
      out.sidecar["results"]["bessel_fit"].is_object() &&
              out.sidecar["results"]["bessel_fit"].contains("zeros_s")
          ? out.sidecar["results"]["bessel_fit"]["zeros_s"]
          : Json(nullptr);
  out.summary["bare_T2_star_s"] = r.bare_t2_star;
  return out;
}

inline RunOutput run_dressed_rabi(const Config& c) {
  const ExperimentContext ctx = make_context(c);
  DressedRabiConfig o;
  o.fm_depth_hz = c.real("dressed.fm_depth");
  o.carrier_hz = c.real("dressed.carrier");
  o.fm_frequency_hz = c.real("dressed.fm_frequency");
  o.mode = parse_dressed_mode(c.text("dressed.mode"));
  o.t_max_s = c.real("dressed_rabi.t_max");
  o.step_periods = static_cast<long>(c.integer("dressed_rabi.step_periods"));
  o.prep_omega_hz = c.real("rabi.omega");
  const SweepResult r = dressed_rabi(o, ctx);
  RunOutput out =
      detail::sweep_output("dressed-rabi", r, c, "Dressed Rabi", 1e6, "drive length (us)");
  out.summary = detail::sweep_digest(r, "T2_rabi_s");
  return out;
}

inline RunOutput run_smart_rabi(const Config& c) {
  const ExperimentContext ctx = make_context(c);
  SmartRabiConfig o;
  Json cal = Json::object();
  o.params = make_smart(c, ctx.shot_options.engine, &cal);
  o.axis = c.text("smart_rabi.axis") == "y" ? ToneAxis::kY : ToneAxis::kZ;
  o.n_periods_max = static_cast<long>(c.integer("smart_rabi.n_periods_max"));
  o.step_periods = static_cast<long>(c.integer("smart_rabi.step_periods"));
  o.prep_omega_hz = c.real("rabi.omega");
  const SweepResult r = smart_rabi(o, ctx);
  RunOutput out = detail::sweep_output("smart-rabi", r, c, "SMART Rabi (" + to_string(o.axis) + ")",
                                       1e6, "drive length (us)");
  out.sidecar["results"]["calibration"] = cal;
  out.summary = detail::sweep_digest(r, "T2_rabi_s");
  return out;
}

inline RbConfig make_rb_config(const Config& c, const ExperimentContext& ctx) {
  RbConfig o;
  o.basis.basis = parse_basis(c.text("rb.basis"));
  o.basis.bare_omega_hz = c.real("rabi.omega");
  o.basis.prep_omega_hz = c.real("rabi.omega");
  o.basis.dressed_carrier_hz = c.real("dressed.carrier");
  o.basis.dressed_fm_depth_hz = c.real("dressed.fm_depth");
  o.basis.dressed_mode = parse_dressed_mode(c.text("rb.dressed_mode"));
  if (o.basis.basis == Basis::kSmart) o.basis.smart = make_smart(c, ctx.shot_options.engine);
  o.n_list.clear();
  for (const long long n : c.integers("rb.n_list")) {
    if (n < 1) throw ConfigError("config key 'rb.n_list': lengths must be >= 1");
    o.n_list.push_back(static_cast<std::size_t>(n));
  }
  o.k = c.count("rb.k");
  o.shots = c.count("rb.shots");
  o.noise = ctx.noise;
  o.seed = ctx.seed;
  o.p_inf = c.real("rb.p_inf");
  o.shot_options = ctx.shot_options;
  o.bound_rabi_hz = c.real("rb.bound_rabi");
  o.bound_t2_rabi_s = c.real("rb.bound_t2_rabi");
  o.validate();
  return o;
}

inline RunOutput run_rb_experiment(const Config& c) {
  const ExperimentContext ctx = make_context(c);
  const RbConfig o = make_rb_config(c, ctx);
  const RbResult r = run_rb(o);
  RunOutput out;
  out.stem = "rb-" + std::to_string(c.integer("seed"));
  out.csv = detail::csv_of([&](std::ostream& os) { write_rb_csv(os, r); });
  out.sidecar = sidecar_head("rb", c);
  out.sidecar["results"] = to_json(r);
  out.plot.title = "Randomised benchmarking";
  out.plot.x_label = "number of Cliffords N";
  out.plot.y_label = "survival";
  std::vector<double> x, y, e, fit;
  for (std::size_t i = 0; i < r.n_list.size(); ++i) {
    x.push_back(static_cast<double>(r.n_list[i]));
    y.push_back(r.combined[i].mean);
    e.push_back(r.combined[i].sem);
  }
  const std::string name = to_string(r.basis);
  out.plot.series.push_back({name, x, y, e, false, true});
  if (!r.fit.flagged) {
    std::vector<double> xf, yf;
    for (double n = 0.0; n <= x.back(); n += 0.5) {
      xf.push_back(n);
      yf.push_back(r.fit.p0 * std::pow(2.0 * r.fit.fidelity - 1.0, n) + r.fit.p_inf);
    }
    out.plot.series.push_back({name + " fit", xf, yf, {}, true, false});
  }
  out.summary["basis"] = name;
  out.summary["F_C"] = json_number(r.fit.fidelity);
  out.summary["CI"] = json_number(r.fit.fidelity_ci95);
  out.summary["flagged"] = r.fit.flagged;
  return out;
}

inline RunOutput run_experiment(const std::string& name, const Config& c) {
  if (name == "odmr") return run_odmr(c);
  if (name == "rabi") return run_rabi(c);
  if (name == "ramsey") return run_ramsey(c);
  if (name == "smart-ramsey") return run_smart_ramsey(c);
  if (name == "dressed-rabi") return run_dressed_rabi(c);
  if (name == "smart-rabi") return run_smart_rabi(c);
  if (name == "rb") return run_rb_experiment(c);
  std::string all;
  for (const auto& n : experiment_names()) all += (all.empty() ? "" : ", ") + n;
  throw ConfigError("unknown experiment '" + name + "' (expected one of " + all + ")");
}

// ------------------------------------------------------------ calibrate --

inline RunOutput run_calibrate(const Config& c) {
  const ExperimentContext ctx = make_context(c);
  SmartParams p;
  p.omega_peak = c.real("smart.omega_peak");
  p.t_mod = c.real("smart.t_mod");
  p.validate();
  ToneCalibrationOptions o;
  o.engine = ctx.shot_options.engine;
  const SmartCalibration cal = calibrate_smart(p, kPi / 2, o);
  Json j = Json::object();
  j["t_mod_s"] = p.t_mod;
  j["omega_peak_Hz"] = p.omega_peak;
  j["optimal_t_mod"] = p.optimal();
  j["idle_sensitivity"] = smart_idle_sensitivity(p, 0.0, 1e3, o.engine);
  j["tone_amp_y_Hz"] = *cal.params.tone_amp_y;
  j["tone_amp_z_Hz"] = *cal.params.tone_amp_z;
  j["tone_mix_z_Hz"] = cal.params.tone_mix_z;
  j["angle_y_rad"] = cal.angle_y;
  j["angle_z_rad"] = cal.angle_z;
  j["axis_y"] = {cal.axis_y.x(), cal.axis_y.y(), cal.axis_y.z()};
  j["axis_z"] = {cal.axis_z.x(), cal.axis_z.y(), cal.axis_z.z()};
  j["smart_rabi_Hz"] = 1.0 / (4.0 * p.t_mod);

  std::ostringstream conf;
  conf << "smart.omega_peak = " << format_double(p.omega_peak) << '\n'
       << "smart.t_mod = " << format_double(p.t_mod) << '\n'
       << "smart.tone_amp_y = " << format_double(*cal.params.tone_amp_y) << '\n'
       << "smart.tone_amp_z = " << format_double(*cal.params.tone_amp_z) << '\n'
       << "smart.tone_mix_z = " << format_double(cal.params.tone_mix_z) << '\n';

  if (c.flag("calibrate.sigma_amp")) {
    AmpCalibrationConfig ac;
    ac.target_t2_rabi_s = c.real("calibrate.t2_rabi");
    ac.rabi.omega_hz = c.real("rabi.omega");
    const AmpCalibration a = calibrate_sigma_amp(ac, ctx);
    j["sigma_amp"] = a.sigma_amp;
    j["sigma_amp_T2_rabi_s"] = a.t2_rabi_s;
    j["T2_rabi_without_amp_noise_s"] = a.t2_rabi_at_zero_s;
    conf << "noise.sigma_amp = " << format_double(a.sigma_amp) << '\n';
  }

  RunOutput out;
  out.stem = "calibrate-" + std::to_string(c.integer("seed"));
  out.csv = "key,value\n";
  for (const auto& [k, v] : j.items()) {
    if (v.is_number()) out.csv += k + "," + format_double(v.get<double>()) + "\n";
  }
  out.sidecar = sidecar_head("calibrate", c);
  out.sidecar["results"] = j;
  out.summary = j;
  out.summary["config_snippet"] = conf.str();
  return out;
}

// ------------------------------------------------------------ reproduce --

/// One panel of a figure: an experiment plus preset config values.
struct FigurePanel {
  std::string name;
  std::string experiment;
  std::vector<std::pair<std::string, std::string>> preset;
};

struct FigureSpec {
  std::string id;
  std::string caption;
  std::vector<FigurePanel> panels;
};

inline const std::vector<FigureSpec>& figures() {
  static const std::vector<FigureSpec> f{
      {"fig1b", "ODMR of the hyperfine-split |0> <-> |+1> transition", {{"odmr", "odmr", {}}}},
      {"fig1c", "Bare Rabi oscillation at 9 MHz", {{"rabi", "rabi", {}}}},
      {"fig1d", "Bare Ramsey fringes from the +-1.55 MHz nuclear detuning",
       {{"ramsey", "ramsey", {}}}},
      {"fig2", "SMART Ramsey coherence versus modulation period",
       {{"default", "smart-ramsey", {}},
        {"no-nuclear", "smart-ramsey", {{"noise.nuclear_uninitialized", "false"}}}}},
      {"fig3", "Two-axis control: dressed and SMART Rabi oscillations",
       {{"dressed", "dressed-rabi",
         {{"dressed_rabi.t_max", "5e-6"}, {"dressed_rabi.step_periods", "1"}}},
        {"smart-y", "smart-rabi", {{"smart_rabi.axis", "y"}, {"smart_rabi.n_periods_max", "40"}}},
        {"smart-z", "smart-rabi", {{"smart_rabi.axis", "z"}, {"smart_rabi.n_periods_max", "40"}}}}},
      {"fig4", "Long dressed and SMART Rabi drives: Rabi decay times",
       {{"bare", "rabi", {{"rabi.t_max", "1.2e-5"}, {"rabi.n_points", "1201"}}},
        {"dressed", "dressed-rabi", {}},
        {"smart", "smart-rabi", {}}}},
      {"fig5", "Randomised benchmarking of bare, dressed and SMART gates",
       {{"bare", "rb", {{"rb.basis", "bare"}}},
        {"dressed", "rb", {{"rb.basis", "dressed"}}},
        {"smart", "rb", {{"rb.basis", "smart"}}}}},
  };
  return f;
}

inline const FigureSpec& figure(const std::string& id) {
  for (const auto& f : figures()) {
    if (f.id == id) return f;
  }
  std::string all;
  for (const auto& f : figures()) all += (all.empty() ? "" : ", ") + f.id;
  throw ConfigError("unknown figure '" + id + "' (expected one of " + all + ")");
}

/// Builds a config: schema defaults, preset, files in order, then overrides.
inline Config build_config(const std::vector<std::string>& files,
                           const std::vector<std::string>& overrides,
                           const std::vector<std::string>& sections,
                           const std::vector<std::pair<std::string, std::string>>& preset = {}) {
  Config c;
  for (const auto& [k, v] : preset) c.set(k, v);
  for (const auto& f : files) c.load_file(f, sections);
  c.apply_overrides(overrides, sections);
  return c;
}

struct FigureOutput {
  std::vector<std::pair<std::string, RunOutput>> panels;
  Json summary = Json::object();
  Plot plot;
};

/// Runs every panel of a figure; panel stems are <fig>-<panel>-<seed>.
inline FigureOutput reproduce_figure(const std::string& id, const std::vector<std::string>& files,
                                     const std::vector<std::string>& overrides) {
  const FigureSpec& spec = figure(id);
  FigureOutput out;
  out.summary["figure"] = spec.id;
  out.summary["caption"] = spec.caption;
  out.plot.title = spec.caption;
  Json panels = Json::object();
  for (const auto& p : spec.panels) {
    const Config c = build_config(files, overrides, experiment_sections(p.experiment), p.preset);
    RunOutput r = run_experiment(p.experiment, c);
    r.stem = spec.id + "-" + p.name + "-" + std::to_string(c.integer("seed"));
    Json s = r.summary;
    s["experiment"] = p.experiment;
    panels[p.name] = s;
    if (out.plot.series.empty()) {
      out.plot.x_label = r.plot.x_label;
      out.plot.y_label = r.plot.y_label;
      out.plot.x_scale = r.plot.x_scale;
      out.plot.y_scale = r.plot.y_scale;
    }
    for (auto series : r.plot.series) {
      series.label = p.name + (series.label.find(" fit") != std::string::npos ? " fit" : "");
      out.plot.series.push_back(std::move(series));
    }
    out.panels.emplace_back(p.name, std::move(r));
  }
  out.summary["panels"] = panels;
  return out;
}

}  // namespace smartspin::cli

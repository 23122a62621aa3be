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
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "smartspin/engine/noise.hpp"
#include "smartspin/errors.hpp"
#include "smartspin/physics/constants.hpp"

namespace smartspin::cli {

using Json = nlohmann::ordered_json;

enum class ValueKind { kBool, kInt, kReal, kText, kRealList, kIntList };

inline const char* to_string(ValueKind k) {
  switch (k) {
    case ValueKind::kBool: return "a boolean (true/false)";
    case ValueKind::kInt: return "an integer";
    case ValueKind::kReal: return "a real number";
    case ValueKind::kText: return "a string";
    case ValueKind::kRealList: return "a comma-separated list of reals";
    case ValueKind::kIntList: return "a comma-separated list of integers";
  }
  return "?";
}

struct ConfigKey {
  ConfigKey(std::string n, ValueKind k, std::string d, std::string u, std::string h,
            std::vector<std::string> c = {})
      : name(std::move(n)), kind(k), default_value(std::move(d)), unit(std::move(u)),
        help(std::move(h)), choices(std::move(c)) {}

  std::string name;
  ValueKind kind = ValueKind::kReal;
  std::string default_value;
  std::string unit;  // empty when dimensionless
  std::string help;
  std::vector<std::string> choices;  // kText only; empty = free text
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

inline bool parse_real(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && errno == 0 && std::isfinite(out);
}

inline bool parse_int(const std::string& s, long long& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtoll(s.c_str(), &end, 10);
  return end == s.c_str() + s.size() && errno == 0;
}

inline bool parse_bool(const std::string& s, bool& out) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") {
    out = true;
    return true;
  }
  if (s == "false" || s == "0" || s == "no" || s == "off") {
    out = false;
    return true;
  }
  return false;
}

// Typed JSON value of `text`, or a ConfigError naming the key.
inline Json typed_value(const ConfigKey& k, const std::string& text) {
  const auto bad = [&] {
    return ConfigError("config key '" + k.name + "': expected " + to_string(k.kind) + ", got '" +
                       text + "'");
  };
  switch (k.kind) {
    case ValueKind::kBool: {
      bool b = false;
      if (!parse_bool(text, b)) throw bad();
      return b;
    }
    case ValueKind::kInt: {
      long long v = 0;
      if (!parse_int(text, v)) throw bad();
      return v;
    }
    case ValueKind::kReal: {
      double v = 0.0;
      if (!parse_real(text, v)) throw bad();
      return v;
    }
    case ValueKind::kText: {
      if (!k.choices.empty() &&
          std::find(k.choices.begin(), k.choices.end(), text) == k.choices.end()) {
        std::string all;
        for (const auto& c : k.choices) all += (all.empty() ? "" : ", ") + c;
        throw ConfigError("config key '" + k.name + "': '" + text + "' is not one of " + all);
      }
      return text;
    }
    case ValueKind::kRealList: {
      Json a = Json::array();
      for (const auto& item : split_list(text)) {
        double v = 0.0;
        if (!parse_real(item, v)) throw bad();
        a.push_back(v);
      }
      if (a.empty()) throw bad();
      return a;
    }
    case ValueKind::kIntList: {
      Json a = Json::array();
      for (const auto& item : split_list(text)) {
        long long v = 0;
        if (!parse_int(item, v)) throw bad();
        a.push_back(v);
      }
      if (a.empty()) throw bad();
      return a;
    }
  }
  throw bad();
}

inline std::string real_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// Every accepted key with its default. Defaults are the reference device
/// and noise calibration.
inline const std::vector<ConfigKey>& config_schema() {
  using K = ValueKind;
  static const std::vector<ConfigKey> schema = [] {
    const auto r = detail::real_text;
    const PhysicalConstants pc;
    std::vector<ConfigKey> s{
        {"seed", K::kInt, "1", "", "master seed"},
        {"shots", K::kInt, "200", "", "noise draws per sweep point"},
        {"threads", K::kInt, "0", "", "worker threads, 0 = SMARTSPIN_THREADS or all cores"},
        {"output.dir", K::kText, "out", "", "output directory"},
        {"output.svg", K::kBool, "true", "", "also write an SVG plot"},
        {"engine.steps_per_cycle", K::kReal, "256", "", "integrator steps per drive cycle"},
        {"readout.repetitions", K::kInt, "0", "", "binomial readout trials per shot, 0 = exact"},
        {"readout.contrast", K::kReal, "1", "", "readout contrast in (0, 1]"},

        {"physics.zero_field_splitting", K::kReal, r(pc.zero_field_splitting_hz), "Hz", "D"},
        {"physics.gamma_e", K::kReal, r(pc.gamma_e_hz_per_t), "Hz/T", "electron gyromagnetic ratio"},
        {"physics.gamma_n", K::kReal, r(pc.gamma_n_hz_per_t), "Hz/T", "15N gyromagnetic ratio"},
        {"physics.a_parallel", K::kReal, r(pc.a_parallel_hz), "Hz", "hyperfine A_par"},
        {"physics.a_perpendicular", K::kReal, r(pc.a_perpendicular_hz), "Hz", "hyperfine A_perp"},
        {"physics.b0", K::kReal, r(pc.b0_tesla), "T", "static field magnitude"},
        {"physics.b0_theta", K::kReal, "0", "rad", "field polar angle from the NV axis"},
        {"physics.b0_phi", K::kReal, "0", "rad", "field azimuth"},

        {"noise.nuclear_uninitialized", K::kBool, "true", "", "draw m_I = +-1/2 per shot"},
        {"noise.nuclear_m", K::kReal, "0", "", "pin m_I to +-0.5; 0 = not pinned"},
        {"noise.sigma_bath", K::kReal, r(sigma_bath_for_t2star(defaults::kT2StarSeconds)), "Hz",
         "static Gaussian detuning spread"},
        {"noise.sigma_amp", K::kReal, r(defaults::kSigmaAmp), "", "fractional amplitude spread"},

        {"odmr.f_min", K::kReal, "0", "Hz", "sweep start; f_min = f_max = 0 centres on the pair"},
        {"odmr.f_max", K::kReal, "0", "Hz", "sweep end"},
        {"odmr.n_points", K::kInt, "201", "", "frequencies"},
        {"odmr.pulse_len", K::kReal, "0", "s", "pulse length, 0 = pi pulse"},
        {"odmr.omega", K::kReal, "5e5", "Hz", "Rabi frequency"},

        {"rabi.t_max", K::kReal, "1e-6", "s", "longest pulse"},
        {"rabi.n_points", K::kInt, "201", "", "durations"},
        {"rabi.omega", K::kReal, r(defaults::kRabiHz), "Hz", "Rabi frequency"},
        {"rabi.detune", K::kReal, "0", "Hz", "drive detuning"},

        {"ramsey.tau_max", K::kReal, "3e-6", "s", "longest delay"},
        {"ramsey.n_points", K::kInt, "151", "", "delays"},
        {"ramsey.omega", K::kReal, r(defaults::kRabiHz), "Hz", "pulse Rabi frequency"},
        {"ramsey.detune", K::kReal, "0", "Hz", "drive detuning"},

        {"smart.omega_peak", K::kReal, r(defaults::kRabiHz), "Hz", "SMART drive amplitude"},
        {"smart.t_mod", K::kReal, r(defaults::kSmartPeriodSeconds), "s", "modulation period"},
        {"smart.tone_amp_y", K::kReal, "0", "Hz", "y tone, 0 = calibrate"},
        {"smart.tone_amp_z", K::kReal, "0", "Hz", "z tone, 0 = calibrate"},
        {"smart.tone_mix_z", K::kReal, "0", "Hz", "z gate fundamental admixture (with tone_amp_z)"},

        {"smart_ramsey.t_mod_min", K::kReal, "1e-7", "s", "first period"},
        {"smart_ramsey.t_mod_max", K::kReal, "7e-7", "s", "last period"},
        {"smart_ramsey.n_t_mod", K::kInt, "61", "", "periods in the sweep"},
        {"smart_ramsey.n_points", K::kInt, "64", "", "delays per period"},
        {"smart_ramsey.pulse_omega", K::kReal, r(defaults::kRabiHz), "Hz", "+-Y/2 Rabi frequency"},
        {"smart_ramsey.window_factor", K::kReal, "3", "", "trace length in units of T2*/sensitivity"},
        {"smart_ramsey.window_min", K::kReal, "4e-6", "s", "shortest trace"},
        {"smart_ramsey.window_max", K::kReal, "1.5e-4", "s", "longest trace"},

        {"dressed.fm_depth", K::kReal, r(defaults::kDressedFmDepthHz), "Hz", "detuning modulation depth"},
        {"dressed.carrier", K::kReal, r(defaults::kRabiHz), "Hz", "always-on drive amplitude"},
        {"dressed.fm_frequency", K::kReal, "0", "Hz", "modulation frequency, 0 = carrier"},
        {"dressed.mode", K::kText, "fm", "", "fm or circular", {"fm", "circular"}},

        {"dressed_rabi.t_max", K::kReal, "8e-5", "s", "longest drive"},
        {"dressed_rabi.step_periods", K::kInt, "2", "", "modulation periods between samples"},

        {"smart_rabi.axis", K::kText, "z", "", "tone axis", {"y", "z"}},
        {"smart_rabi.n_periods_max", K::kInt, "600", "", "longest drive in periods"},
        {"smart_rabi.step_periods", K::kInt, "1", "", "periods between samples"},

        {"rb.basis", K::kText, "bare", "", "bare, dressed or smart", {"bare", "dressed", "smart"}},
        {"rb.n_list", K::kIntList, "1,2,3,5,8,12,17,23,30,40,50,60", "", "sequence lengths"},
        {"rb.k", K::kInt, "50", "", "randomisations per length and target"},
        {"rb.shots", K::kInt, "10", "", "noise draws per randomisation"},
        {"rb.p_inf", K::kReal, "0.5", "", "fixed asymptote"},
        {"rb.dressed_mode", K::kText, "circular", "", "dressed gate drive", {"fm", "circular"}},
        {"rb.bound_rabi", K::kReal, r(defaults::kRabiHz), "Hz", "Rabi frequency for the bound, 0 = off"},
        {"rb.bound_t2_rabi", K::kReal, r(defaults::kT2RabiSeconds), "s", "Rabi decay for the bound"},

        {"calibrate.sigma_amp", K::kBool, "false", "", "also fit sigma_amp to calibrate.t2_rabi"},
        {"calibrate.t2_rabi", K::kReal, r(defaults::kT2RabiSeconds), "s", "target bare Rabi decay"},
    };
    return s;
  }();
  return schema;
}

/// Resolved configuration: schema defaults, then file values, then flag
/// overrides. Unknown keys and malformed values raise ConfigError naming
/// the key.
class Config {
 public:
  Config() {
    for (const auto& k : config_schema()) {
      index_[k.name] = &k;
      values_[k.name] = detail::typed_value(k, k.default_value);
    }
  }

  static bool known(const std::string& key) {
    const auto& s = config_schema();
    return std::any_of(s.begin(), s.end(), [&](const ConfigKey& k) { return k.name == key; });
  }

  /// Maps an undotted key to `<section>.key` when that exists, else keeps it.
  /// Top-level keys (seed, shots, threads) always mean themselves.
  static std::string qualify(const std::string& key, const std::vector<std::string>& sections) {
    if (key.find('.') != std::string::npos || known(key)) return key;
    for (const auto& s : sections) {
      if (known(s + "." + key)) return s + "." + key;
    }
    return key;
  }

  void set(const std::string& key, const std::string& text) {
    const auto it = index_.find(key);
    if (it == index_.end()) throw ConfigError("unknown config key '" + key + "'");
    values_[key] = detail::typed_value(*it->second, detail::trim(text));
  }

  /// `key = value` lines; '#' starts a comment. A key may appear once.
  void load_text(const std::string& text, const std::string& origin,
                 const std::vector<std::string>& sections = {}) {
    std::istringstream in(text);
    std::string line;
    std::set<std::string> seen;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      const std::string where = origin + ":" + std::to_string(lineno);
      if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
      const std::string key = qualify(detail::trim(line.substr(0, eq)), sections);
      if (key.empty()) throw ConfigError(where + ": empty key");
      if (!seen.insert(key).second) throw ConfigError(where + ": config key '" + key + "' repeated");
      try {
        set(key, line.substr(eq + 1));
      } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + e.what());
      }
    }
  }

  void load_file(const std::string& path, const std::vector<std::string>& sections = {}) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    load_text(ss.str(), path, sections);
  }

  /// `--key=value` or `key=value` overrides.
  void apply_overrides(const std::vector<std::string>& args,
                       const std::vector<std::string>& sections = {}) {
    for (std::string a : args) {
      if (a.rfind("--", 0) == 0) a.erase(0, 2);
      const auto eq = a.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("override '" + a + "' must have the form --key=value");
      }
      set(qualify(a.substr(0, eq), sections), a.substr(eq + 1));
    }
  }

  const Json& raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
  }

  double real(const std::string& key) const { return raw(key).get<double>(); }
  long long integer(const std::string& key) const { return raw(key).get<long long>(); }
  bool flag(const std::string& key) const { return raw(key).get<bool>(); }
  std::string text(const std::string& key) const { return raw(key).get<std::string>(); }
  std::vector<double> reals(const std::string& key) const {
    return raw(key).get<std::vector<double>>();
  }
  std::vector<long long> integers(const std::string& key) const {
    return raw(key).get<std::vector<long long>>();
  }

  /// Non-negative integer, else ConfigError naming the key.
  std::size_t count(const std::string& key) const {
    const long long v = integer(key);
    if (v < 0) throw ConfigError("config key '" + key + "' must be >= 0");
    return static_cast<std::size_t>(v);
  }

  /// Flat key -> value echo in schema order.
  Json to_json() const {
    Json j = Json::object();
    for (const auto& k : config_schema()) j[k.name] = values_.at(k.name);
    return j;
  }

  static Json units() {
    Json j = Json::object();
    for (const auto& k : config_schema()) {
      if (!k.unit.empty()) j[k.name] = k.unit;
    }
    return j;
  }

 private:
  std::map<std::string, const ConfigKey*> index_;
  std::map<std::string, Json> values_;
};

/// Renders the schema as a commented config file of defaults.
inline std::string describe_schema() {
  std::ostringstream os;
  for (const auto& k : config_schema()) {
    os << k.name << " = " << k.default_value << "  # " << k.help;
    if (!k.unit.empty()) os << " [" << k.unit << "]";
    os << '\n';
  }
  return os.str();
}

}  // namespace smartspin::cli

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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "smartspin/cli/commands.hpp"

using namespace smartspin;
using namespace smartspin::cli;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "smartspin-test-cli" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RunOutput small_rabi(const std::string& threads) {
  const Config c = build_config({},
                                {"--shots=40", "--threads=" + threads, "--rabi.n_points=41"},
                                experiment_sections("rabi"));
  return run_experiment("rabi", c);
}

}  // namespace

TEST_CASE("defaults are the reference device", "[cli]") {
  const Config c;
  CHECK(c.real("rabi.omega") == 9e6);
  CHECK(c.real("physics.b0") == 1.85e-3);
  CHECK(c.real("physics.a_parallel") == 3.1e6);
  CHECK(c.real("smart.t_mod") == 260e-9);
  CHECK(c.real("noise.sigma_amp") == 0.00259);
  CHECK(c.flag("noise.nuclear_uninitialized"));
  const auto n = c.integers("rb.n_list");
  CHECK(n.front() == 1);
  CHECK(n.back() == 60);
  CHECK(make_physics(c).b0_tesla == 1.85e-3);
}

TEST_CASE("overrides take precedence over the config file", "[cli]") {
  const auto dir = scratch("precedence");
  const auto file = dir / "a.conf";
  std::ofstream(file) << "# comment\nseed = 7\nomega = 5e6   # undotted, rabi section\nshots=12\n";
  const Config c =
      build_config({file.string()}, {"--shots=33"}, experiment_sections("rabi"));
  CHECK(c.integer("seed") == 7);
  CHECK(c.real("rabi.omega") == 5e6);
  CHECK(c.integer("shots") == 33);
  const auto second = dir / "b.conf";
  std::ofstream(second) << "seed = 9\n";
  const Config d = build_config({file.string(), second.string()}, {}, experiment_sections("rabi"));
  CHECK(d.integer("seed") == 9);
  CHECK(d.integer("shots") == 12);
  // undotted keys resolve to the first section that has them
  CHECK(Config::qualify("t_mod", experiment_sections("smart-rabi")) == "smart.t_mod");
  CHECK(Config::qualify("n_points", experiment_sections("smart-ramsey")) == "smart_ramsey.n_points");
  CHECK(Config::qualify("shots", experiment_sections("rb")) == "shots");
  CHECK(Config::qualify("basis", experiment_sections("rb")) == "rb.basis");
}

TEST_CASE("config errors name the offending key", "[cli]") {
  Config c;
  CHECK_THROWS_WITH(c.set("rabi.omeg", "1"), Catch::Matchers::ContainsSubstring("rabi.omeg"));
  CHECK_THROWS_WITH(c.set("rabi.omega", "fast"), Catch::Matchers::ContainsSubstring("rabi.omega"));
  CHECK_THROWS_AS(c.set("shots", "2.5"), ConfigError);
  CHECK_THROWS_AS(c.set("dressed.mode", "square"), ConfigError);
  CHECK_THROWS_WITH(c.load_text("seed = 1\nseed = 2\n", "x.conf"),
                    Catch::Matchers::ContainsSubstring("x.conf:2"));
  CHECK_THROWS_AS(c.load_text("just words\n", "x.conf"), ConfigError);
  CHECK_THROWS_AS(c.apply_overrides({"--seed"}), ConfigError);
  CHECK_THROWS_AS(build_config({"/nonexistent/file.conf"}, {}, {}), ConfigError);
  CHECK_THROWS_AS(run_experiment("nope", c), ConfigError);
  CHECK_THROWS_AS(figure("fig9"), ConfigError);
  c.set("smart.tone_amp_y", "1e6");
  CHECK_THROWS_AS(make_smart(c, {}), ConfigError);
}

TEST_CASE("outputs are byte-identical across thread counts and reruns", "[cli][determinism]") {
  const RunOutput a = small_rabi("1");
  const RunOutput b = small_rabi("4");
  const RunOutput c = small_rabi("1");
  CHECK(a.csv == b.csv);
  CHECK(a.csv == c.csv);
  // The sidecar echoes the thread setting; everything else must agree.
  Json ja = a.sidecar, jb = b.sidecar;
  ja["config"].erase("threads");
  jb["config"].erase("threads");
  CHECK(ja.dump() == jb.dump());
}

TEST_CASE("written outputs carry the sidecar fields", "[cli]") {
  const auto dir = scratch("outputs");
  const RunOutput r = small_rabi("1");
  const auto files = write_outputs(r, dir.string(), true);
  REQUIRE(files.size() == 3);
  const Json side = Json::parse(slurp(dir / (r.stem + ".json")));
  for (const char* k : {"experiment", "version", "seed", "config", "config_units", "results"}) {
    CHECK(side.contains(k));
  }
  CHECK(side["experiment"] == "rabi");
  CHECK(side["config"]["shots"] == 40);
  CHECK(side["config_units"]["rabi.omega"] == "Hz");
  const std::string csv = slurp(dir / (r.stem + ".csv"));
  CHECK(csv.rfind("t_s,p0_mean,p0_sem\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 42);
  const std::string svg = slurp(dir / (r.stem + ".svg"));
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("every experiment has a figure and sections", "[cli]") {
  for (const auto& f : figures()) {
    CHECK_FALSE(f.panels.empty());
    for (const auto& p : f.panels) {
      CHECK(std::find(experiment_names().begin(), experiment_names().end(), p.experiment) !=
            experiment_names().end());
      for (const auto& [k, v] : p.preset) CHECK(Config::known(k));
    }
  }
  CHECK(describe_schema().find("rabi.omega = ") != std::string::npos);
}

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

// smartspin command-line front end.
//
//   smartspin run <experiment> [-c file ...] [--key=value ...]
//   smartspin reproduce <figure> [-c file] [--key=value ...]
//   smartspin calibrate [-c file] [--key=value ...]
//   smartspin version
//
// Exit codes: 0 success, 2 configuration error, 3 numerical or runtime error.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "smartspin/cli/commands.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr const char* kConfigHelp = "key = value config file; repeatable, later files win";

using smartspin::cli::Config;
using smartspin::cli::Json;

void report(const std::vector<std::string>& files, const Json& summary) {
  for (const auto& f : files) std::cout << "wrote " << f << '\n';
  std::cout << summary.dump(2) << '\n';
}

int cmd_run(const std::string& experiment, const std::vector<std::string>& configs,
            const std::vector<std::string>& overrides) {
  const auto sections = smartspin::cli::experiment_sections(experiment);
  const Config c = smartspin::cli::build_config(configs, overrides, sections);
  const auto r = smartspin::cli::run_experiment(experiment, c);
  report(smartspin::cli::write_outputs(r, c.text("output.dir"), c.flag("output.svg")), r.summary);
  return 0;
}

int cmd_reproduce(const std::string& fig, const std::vector<std::string>& configs,
                  const std::vector<std::string>& overrides) {
  smartspin::cli::figure(fig);  // unknown names fail before any work
  const Config c = smartspin::cli::build_config(configs, overrides, {});
  const std::string dir = c.text("output.dir");
  const bool svg = c.flag("output.svg");
  const auto out = smartspin::cli::reproduce_figure(fig, configs, overrides);
  std::vector<std::string> files;
  for (const auto& [name, r] : out.panels) {
    for (const auto& f : smartspin::cli::write_outputs(r, dir, svg)) files.push_back(f);
  }
  smartspin::cli::RunOutput combined;
  combined.stem = fig + "-" + std::to_string(c.integer("seed"));
  combined.sidecar = out.summary;
  combined.sidecar["version"] = smartspin::kVersion;
  combined.plot = out.plot;
  std::filesystem::create_directories(dir);
  const std::filesystem::path base = std::filesystem::path(dir) / combined.stem;
  smartspin::cli::write_text(base.string() + ".json", combined.sidecar.dump(2) + "\n");
  files.push_back(base.string() + ".json");
  if (svg && out.panels.size() > 1) {
    std::ostringstream os;
    smartspin::cli::write_svg(os, out.plot);
    smartspin::cli::write_text(base.string() + ".svg", os.str());
    files.push_back(base.string() + ".svg");
  }
  report(files, out.summary);
  return 0;
}

int cmd_calibrate(const std::vector<std::string>& configs,
                  const std::vector<std::string>& overrides) {
  const auto sections = smartspin::cli::experiment_sections("calibrate");
  const Config c = smartspin::cli::build_config(configs, overrides, sections);
  auto r = smartspin::cli::run_calibrate(c);
  const std::string snippet = r.summary["config_snippet"].get<std::string>();
  r.summary.erase("config_snippet");
  auto files = smartspin::cli::write_outputs(r, c.text("output.dir"), false);
  const std::filesystem::path conf =
      std::filesystem::path(c.text("output.dir")) / (r.stem + ".conf");
  smartspin::cli::write_text(conf, snippet);
  files.push_back(conf.string());
  report(files, r.summary);
  std::cout << "# paste into a config file:\n" << snippet;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smartspin: pulse-level NV electron-spin qubit simulator"};
  app.require_subcommand(1);
  bool print_keys = false;
  app.add_flag("--print-defaults", print_keys, "print every config key with its default and exit");

  std::string experiment, figure_id;
  std::vector<std::string> configs;
  std::vector<std::string> files;
  std::string experiments_help = "experiment:";
  for (const auto& n : smartspin::cli::experiment_names()) experiments_help += " " + n;
  std::string figures_help = "figure:";
  for (const auto& f : smartspin::cli::figures()) figures_help += " " + f.id;

  auto* run = app.add_subcommand("run", "run one experiment");
  run->add_option("experiment", experiment, experiments_help)->required();
  run->add_option("-c,--config", configs, kConfigHelp);
  run->allow_extras();

  auto* reproduce = app.add_subcommand("reproduce", "regenerate the data behind a figure");
  reproduce->add_option("figure", figure_id, figures_help)->required();
  reproduce->add_option("-c,--config", configs, kConfigHelp);
  reproduce->allow_extras();

  auto* calibrate = app.add_subcommand("calibrate", "calibrate SMART tones (and optionally sigma_amp)");
  calibrate->add_option("-c,--config", configs, kConfigHelp);
  calibrate->allow_extras();

  app.add_subcommand("version", "print the version");

  if (argc > 1 && std::string(argv[1]) == "--print-defaults") {
    std::cout << smartspin::cli::describe_schema();
    return 0;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (app.got_subcommand("version")) {
      std::cout << "smartspin " << smartspin::kVersion << '\n';
      return 0;
    }
    // Fail early on a malformed thread cap.
    smartspin::resolve_threads(0);
    if (app.got_subcommand(run)) return cmd_run(experiment, configs, run->remaining());
    if (app.got_subcommand(reproduce)) {
      return cmd_reproduce(figure_id, configs, reproduce->remaining());
    }
    if (app.got_subcommand(calibrate)) return cmd_calibrate(configs, calibrate->remaining());
  } catch (const smartspin::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const smartspin::InputError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitConfig;
}

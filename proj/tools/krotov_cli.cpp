#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "krotov/config.hpp"
#include "krotov/runner.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::string out_dir = ".";
  std::optional<long long> seed;
  std::optional<long long> max_iter;
  bool strict = false;
  bool dry_run = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration")->required();
  cmd->add_option("--out-dir", f.out_dir, "directory for convergence, field and overlap files");
  cmd->add_option("--seed", f.seed, "seed for sampled bounds (overrides the config)");
  cmd->add_option("--max-iter", f.max_iter, "iteration limit (overrides the config)");
  cmd->add_flag("--strict-monotonic", f.strict, "exit with status 2 on any non-monotonic iteration");
  cmd->add_flag("--dry-run", f.dry_run, "validate and print the resolved problem only");
}

krotov::RunConfig load(const CommonFlags& f) {
  std::ifstream in(f.config);
  if (!in) {
    throw krotov::ConfigError("config: cannot open '" + f.config + "'");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw krotov::ConfigError("config: '" + f.config + "' is not valid JSON: " + e.what());
  }
  if (f.seed) {
    j["seed"] = *f.seed;
  }
  if (f.max_iter) {
    if (!j.contains("stopping") || j["stopping"].is_null()) {
      j["stopping"] = nlohmann::json::object();
    }
    j["stopping"]["max_iter"] = *f.max_iter;
  }
  const auto dir = std::filesystem::path(f.config).parent_path();
  return krotov::parse_config(j, dir.empty() ? "." : dir.string());
}

krotov::RunSettings settings_of(const CommonFlags& f) {
  krotov::RunSettings s;
  s.out_dir = f.out_dir;
  s.strict_monotonic = f.strict;
  s.dry_run = f.dry_run;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Krotov optimization of quantum controls"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "optimize one configuration");
  add_common(run_cmd, run_flags);

  CommonFlags scan_flags;
  std::string parameter;
  std::vector<double> values;
  auto* scan_cmd = app.add_subcommand("scan", "repeat a run for several values of one parameter");
  add_common(scan_cmd, scan_flags);
  scan_cmd->add_option("--param", parameter, "dotted parameter path, e.g. sigma.A_bar")
      ->required();
  scan_cmd->add_option("--values", values, "values to scan")->delimiter(',');

  std::string validate_config;
  auto* validate_cmd = app.add_subcommand("validate", "check a configuration and exit");
  validate_cmd->add_option("--config", validate_config, "JSON run configuration")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const auto config = load(run_flags);
      const auto outcome = krotov::run(config, settings_of(run_flags), std::cout);
      return outcome.exit_code;
    }
    if (*scan_cmd) {
      const auto config = load(scan_flags);
      if (scan_flags.dry_run) {
        for (double v : values) {
          krotov::parse_config(krotov::with_parameter(config.raw, parameter, v), config.base_dir);
        }
        std::cout << krotov::describe(config, krotov::build_problem(config));
        std::cout << "scan " << parameter << " over " << values.size() << " value(s)\n";
        return 0;
      }
      const auto rows = krotov::scan(config, parameter, values, settings_of(scan_flags),
                                     krotov::worker_limit(), std::cout);
      int status = 0;
      for (const auto& r : rows) {
        if (r.exit_code == 1) {
          status = 1;
        } else if (r.exit_code == 2 && status == 0) {
          status = 2;
        }
      }
      return status;
    }
    if (*validate_cmd) {
      CommonFlags f;
      f.config = validate_config;
      const auto config = load(f);
      krotov::build_problem(config);
      std::cout << "ok: " << validate_config << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

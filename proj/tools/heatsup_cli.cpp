#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "heatsup/config.hpp"
#include "heatsup/errors.hpp"
#include "heatsup/experiment.hpp"

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kConfigError = 2, kRuntimeError = 3 };

void print_checks(const std::vector<heatsup::CheckResult>& checks) {
  for (const auto& c : checks) {
    std::printf("%-4s  %-40s value=%-14.6g target=%-10.4g tol=%-10.4g %s\n", c.pass ? "PASS" : "FAIL",
                c.name.c_str(), c.value, c.target, c.tolerance, c.detail.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supremum statistics of the stochastic heat equation on [0,1]"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed, paths;
  std::string out_dir;
  bool resume = false;
  bool quiet = false;

  auto* validate = app.add_subcommand("validate", "Check a configuration against every admissibility constraint");
  validate->add_option("--config", config_path, "Configuration file")->required();

  auto* run = app.add_subcommand("run", "Run the configured experiment");
  run->add_option("--config", config_path, "Configuration file")->required();
  run->add_option("--seed", seed, "Override the master seed");
  run->add_option("--paths", paths, "Override the number of Monte Carlo paths");
  run->add_option("--out", out_dir, "Output directory");
  run->add_flag("--resume", resume, "Reuse matching batch checkpoints");
  run->add_flag("-q,--quiet", quiet, "Only print the check table");

  auto* report = app.add_subcommand("report", "Print the checks of a finished run");
  report->add_option("--out", out_dir, "Output directory of the run");
  report->add_option("--config", config_path, "Configuration whose output directory is used");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*validate) {
      const heatsup::ExperimentConfig c = heatsup::load_config(config_path);
      const auto checks = heatsup::validate(c);
      for (const auto& k : checks)
        std::printf("%-4s  %-60s lhs=%-12.6g rhs=%-12.6g margin=%.6g\n", k.pass ? "PASS" : "FAIL", k.name.c_str(),
                    k.lhs, k.rhs, k.margin());
      return heatsup::all_pass(checks) ? kOk : kCheckFailed;
    }
    if (*run) {
      heatsup::ExperimentConfig c = heatsup::load_config(config_path);
      if (seed) c.mc.seed = *seed;
      if (paths) c.mc.n_paths = *paths;
      heatsup::RunOptions opt;
      opt.out_dir = out_dir;
      opt.resume = resume;
      opt.log = quiet ? nullptr : &std::cerr;
      const heatsup::ExperimentOutcome o = heatsup::run_experiment(c, opt);
      print_checks(o.checks);
      std::printf("%s  %s (%.1f s)\n", o.pass() ? "PASS" : "FAIL", heatsup::to_string(o.kind), o.wall_seconds);
      return heatsup::exit_code(o);
    }
    if (*report) {
      if (out_dir.empty()) {
        if (config_path.empty()) throw heatsup::ConfigurationError("report needs --out or --config");
        out_dir = heatsup::load_config(config_path).output_dir;
      }
      const auto checks = heatsup::read_results(out_dir);
      print_checks(checks);
      for (const auto& c : checks)
        if (!c.pass) return kCheckFailed;
      return kOk;
    }
  } catch (const heatsup::ConfigurationError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeError;
  }
  return kOk;
}

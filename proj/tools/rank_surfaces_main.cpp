#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "bench/runner.hpp"
#include "ranksurf/errors.hpp"
#include "ranksurf/version.hpp"

namespace {

int default_jobs() {
  if (const char* env = std::getenv("RANK_SURFACES_JOBS")) {
    const int jobs = std::atoi(env);
    if (jobs > 0) return jobs;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive ranking of stochastic response surfaces"};
  app.set_version_flag("--version", std::string(ranksurf::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = default_jobs();

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config (JSON)")
        ->required();
    cmd->add_option("--jobs", jobs, "parallel replications");
    cmd->add_option("--seed", seed, "override the configured seed")
        ->each([&](const std::string&) { seed_set = true; });
    cmd->add_option("--out", out_dir, "override the output directory");
  };

  CLI::App* cmd_run = app.add_subcommand("run", "one seeded experiment");
  CLI::App* cmd_bench =
      app.add_subcommand("bench", "replication sweep across methods");
  CLI::App* cmd_sir = app.add_subcommand("sir", "the epidemic case study");
  add_common(cmd_run);
  add_common(cmd_bench);
  add_common(cmd_sir);

  CLI11_PARSE(app, argc, argv);

  ranksurf::bench::CliOverrides overrides;
  overrides.jobs = jobs;
  if (seed_set) overrides.seed = seed;
  if (!out_dir.empty()) overrides.out_dir = out_dir;

  try {
    const auto config = ranksurf::bench::ExperimentConfig::parse_file(config_path);
    if (cmd_run->parsed()) {
      ranksurf::bench::run_single(config, overrides);
    } else if (cmd_bench->parsed()) {
      ranksurf::bench::run_bench(config, overrides);
    } else {
      ranksurf::bench::run_sir(config, overrides);
    }
  } catch (const ranksurf::bench::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ranksurf::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

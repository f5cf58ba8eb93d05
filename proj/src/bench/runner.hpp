#pragma once

#include <string>

#include "bench/experiment_config.hpp"

namespace ranksurf::bench {

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  int jobs = 1;
};

/// One seeded run; writes design.csv, trace.csv, classifier.csv and
/// summary.json into the output directory.
void run_single(ExperimentConfig config, const CliOverrides& overrides);

/// Replication sweep across the configured methods (parallel across
/// replications); writes bench.csv and bench_summary.csv.
void run_bench(ExperimentConfig config, const CliOverrides& overrides);

/// The epidemic case study: a single run plus noise_surfaces.csv.
void run_sir(ExperimentConfig config, const CliOverrides& overrides);

}  // namespace ranksurf::bench

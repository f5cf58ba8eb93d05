#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ranksurf/designer.hpp"
#include "ranksurf/problems.hpp"

namespace ranksurf::bench {

/// Config-file parse/schema error, with a file:line anchor where one can be
/// determined. The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ProblemConfig {
  std::string name;  // toy1d | synth2d | sir
  SirParams sir;
  Box sir_domain;  // s_range x i_range
};

struct MethodEntry {
  std::string label;
  AcquisitionSpec acquisition;
};

struct MetricsConfig {
  std::optional<int> points_per_dim;        // uniform grids
  std::optional<std::vector<int>> strides;  // lattice subsampling (sir)
  std::string weight_file;                  // optional, one weight per row
};

struct ReplicationConfig {
  int count = 1;
  std::uint64_t base_seed = 0;
  std::vector<MethodEntry> methods;
};

struct OutputConfig {
  std::string dir = "out";
};

struct ExperimentConfig {
  ProblemConfig problem;
  DesignerConfig designer;
  MetricsConfig metrics;
  std::optional<ReplicationConfig> replication;
  OutputConfig output;
  std::string echo;  // the raw document, echoed into summary.json

  static ExperimentConfig parse_file(const std::string& path);
  static ExperimentConfig parse(const std::string& text,
                                const std::string& filename);
};

/// Instantiate the samplers for the configured problem.
SamplerFamily make_family(const ProblemConfig& problem);

/// Test grid with weights (uniform unless a weight file is given):
/// 1000 points on a 1-D interval, 51 x 51 on a 2-D box, and the restricted
/// lattice subsampled by the configured strides for sir.
TestGrid make_grid(const ProblemConfig& problem, const MetricsConfig& metrics,
                   const SamplerFamily& family);

}  // namespace ranksurf::bench

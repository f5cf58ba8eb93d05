#include "bench/runner.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "ranksurf/version.hpp"

namespace ranksurf::bench {

namespace {

namespace fs = std::filesystem;

// Shortest round-trip decimal representation.
std::string fmt(double value) {
  char buffer[32];
  const auto result =
      std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);  // LF line endings
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  return out;
}

void apply_overrides(ExperimentConfig* config, const CliOverrides& overrides) {
  if (overrides.seed) {
    config->designer.seed = *overrides.seed;
    if (config->replication) config->replication->base_seed = *overrides.seed;
  }
  if (overrides.out_dir) config->output.dir = *overrides.out_dir;
}

struct PreparedRun {
  SamplerFamily family;
  TestGrid grid;
};

PreparedRun prepare(const ExperimentConfig& config) {
  PreparedRun prepared;
  prepared.family = make_family(config.problem);
  prepared.grid = make_grid(config.problem, config.metrics, prepared.family);
  // Surface config errors (rather than run-time errors) for a bad designer
  // block before any sampling starts.
  try {
    config.designer.validate(prepared.family);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("designer config: ") + e.what());
  }
  return prepared;
}

void write_design_csv(const fs::path& dir, const RunReport& report, int dim) {
  std::ofstream out = open_out(dir, "design.csv");
  out << "step";
  for (int i = 1; i <= dim; ++i) out << ",x" << i;
  out << ",surface,sample_mean,noise_var,batch_size\n";
  for (const DesignRecord& record : report.design.records) {
    out << record.step;
    for (int i = 0; i < dim; ++i) out << "," << fmt(record.location[i]);
    out << "," << (record.surface + 1) << "," << fmt(record.sample_mean) << ","
        << fmt(record.noise_variance_estimate) << "," << record.batch_size
        << "\n";
  }
}

void write_trace_csv(const fs::path& dir, const RunReport& report) {
  std::ofstream out = open_out(dir, "trace.csv");
  const bool with_truth =
      !report.trace.empty() && report.trace.front().true_loss.has_value();
  out << (with_truth ? "step,empirical_loss,true_loss,error_prob\n"
                     : "step,empirical_loss,error_prob\n");
  for (const TraceRow& row : report.trace) {
    out << row.step << "," << fmt(row.empirical_loss);
    if (with_truth) out << "," << fmt(row.true_loss.value());
    out << "," << fmt(row.error_prob) << "\n";
  }
}

void write_classifier_csv(const fs::path& dir, const RunReport& report,
                          const TestGrid& grid) {
  std::ofstream out = open_out(dir, "classifier.csv");
  const int dim = static_cast<int>(grid.points.cols());
  for (int i = 1; i <= dim; ++i) out << "x" << i << ",";
  out << "chosen,m_gap,p_best\n";
  for (Eigen::Index row = 0; row < grid.points.rows(); ++row) {
    for (int i = 0; i < dim; ++i) out << fmt(grid.points(row, i)) << ",";
    out << (report.classifier_on_grid[static_cast<std::size_t>(row)] + 1) << ","
        << fmt(report.m_gap_on_grid[row]) << "," << fmt(report.p_best_on_grid[row])
        << "\n";
  }
}

void write_summary_json(const fs::path& dir, const ExperimentConfig& config,
                        const RunReport& report, double wall_seconds) {
  nlohmann::json summary;
  summary["version"] = kVersion;
  summary["wall_time_s"] = wall_seconds;
  const TraceRow& last = report.trace.back();
  summary["final"]["step"] = last.step;
  summary["final"]["empirical_loss"] = last.empirical_loss;
  summary["final"]["error_prob"] = last.error_prob;
  if (last.true_loss) summary["final"]["true_loss"] = *last.true_loss;
  summary["d_counts"] = report.design.per_surface_counts;
  summary["stopped_early"] = report.stopped_early;
  summary["m_gap_clamps"] = m_gap_clamp_count();
  summary["config"] = nlohmann::json::parse(config.echo);
  std::ofstream out = open_out(dir, "summary.json");
  out << summary.dump(2) << "\n";
}

RunReport execute(const ExperimentConfig& config, const PreparedRun& prepared) {
  return run(config.designer, prepared.family, prepared.grid);
}

void write_noise_surfaces_csv(const fs::path& dir, const ExperimentConfig& config,
                              const PreparedRun& prepared,
                              const RunReport& report) {
  std::ofstream out = open_out(dir, "noise_surfaces.csv");
  out << "s,i,sigma_no_action,sigma_action\n";
  for (Eigen::Index row = 0; row < prepared.grid.points.rows(); ++row) {
    const Vec x = prepared.grid.points.row(row).transpose();
    out << fmt(prepared.grid.points(row, 0)) << ","
        << fmt(prepared.grid.points(row, 1));
    for (int l = 0; l < prepared.family.count(); ++l) {
      const double mean_var = expected_noise_variance(
          config.designer, prepared.family, report.design, report.models, l, x);
      out << "," << fmt(std::sqrt(mean_var * config.designer.batch_size));
    }
    out << "\n";
  }
}

struct BenchRow {
  std::string method;
  int replicate;
  std::uint64_t seed;
  bool failed = false;
  std::string error;
  double empirical_loss = 0.0;
  std::optional<double> true_loss;
  double error_prob = 0.0;
  std::vector<int> d_counts;
};

void write_bench_csv(const fs::path& dir, const std::vector<BenchRow>& rows,
                     int num_surfaces) {
  std::ofstream out = open_out(dir, "bench.csv");
  out << "method,replicate,seed,failed,empirical_loss,true_loss,error_prob";
  for (int l = 1; l <= num_surfaces; ++l) out << ",d_" << l;
  out << "\n";
  for (const BenchRow& row : rows) {
    out << row.method << "," << row.replicate << "," << row.seed << ","
        << (row.failed ? 1 : 0) << ",";
    if (!row.failed) out << fmt(row.empirical_loss);
    out << ",";
    if (!row.failed && row.true_loss) out << fmt(*row.true_loss);
    out << ",";
    if (!row.failed) out << fmt(row.error_prob);
    for (int l = 0; l < num_surfaces; ++l) {
      out << ",";
      if (!row.failed) out << row.d_counts[static_cast<std::size_t>(l)];
    }
    out << "\n";
  }
}

struct Moments {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
};

Moments column_moments(const std::vector<double>& values) {
  Moments out;
  const std::size_t n = values.size();
  if (n == 0) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(n);
  if (n == 1) {
    out.se = 0.0;
    return out;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.se = std::sqrt(ss / static_cast<double>(n - 1)) /
           std::sqrt(static_cast<double>(n));
  return out;
}

void write_bench_summary_csv(const fs::path& dir,
                             const std::vector<MethodEntry>& methods,
                             const std::vector<BenchRow>& rows) {
  std::ofstream out = open_out(dir, "bench_summary.csv");
  out << "method,emp_loss_mean,emp_loss_se,true_loss_mean,true_loss_se,"
         "err_prob_mean,err_prob_se,replicates,failures\n";
  for (const MethodEntry& method : methods) {
    std::vector<double> emp, truth, err;
    int failures = 0, total = 0;
    for (const BenchRow& row : rows) {
      if (row.method != method.label) continue;
      ++total;
      if (row.failed) {
        ++failures;
        continue;
      }
      emp.push_back(row.empirical_loss);
      if (row.true_loss) truth.push_back(*row.true_loss);
      err.push_back(row.error_prob);
    }
    const Moments e = column_moments(emp);
    const Moments t = column_moments(truth);
    const Moments p = column_moments(err);
    out << method.label << "," << fmt(e.mean) << "," << fmt(e.se) << ","
        << fmt(t.mean) << "," << fmt(t.se) << "," << fmt(p.mean) << ","
        << fmt(p.se) << "," << total << "," << failures << "\n";
  }
}

}  // namespace

void run_single(ExperimentConfig config, const CliOverrides& overrides) {
  apply_overrides(&config, overrides);
  const PreparedRun prepared = prepare(config);
  const auto start = std::chrono::steady_clock::now();
  const RunReport report = execute(config, prepared);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  const fs::path dir(config.output.dir);
  write_design_csv(dir, report, prepared.family.box.dim());
  write_trace_csv(dir, report);
  write_classifier_csv(dir, report, prepared.grid);
  write_summary_json(dir, config, report, wall);
}

void run_bench(ExperimentConfig config, const CliOverrides& overrides) {
  apply_overrides(&config, overrides);
  if (!config.replication) {
    throw ConfigError("bench needs a replication block");
  }
  const PreparedRun prepared = prepare(config);
  const ReplicationConfig& replication = *config.replication;

  // Validate each method against the problem up front (e.g. known_gap_ucb
  // on a problem without truths must fail before any run starts).
  for (const MethodEntry& method : replication.methods) {
    DesignerConfig designer = config.designer;
    designer.acquisition = method.acquisition;
    try {
      designer.validate(prepared.family);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("method '" + method.label + "': " + e.what());
    }
  }

  struct Task {
    std::size_t method_index;
    int replicate;
  };
  std::vector<Task> tasks;
  for (std::size_t m = 0; m < replication.methods.size(); ++m) {
    for (int r = 0; r < replication.count; ++r) tasks.push_back({m, r});
  }
  std::vector<BenchRow> rows(tasks.size());

  std::atomic<std::size_t> next{0};
  const int jobs = std::max(1, overrides.jobs);
  auto worker = [&]() {
    while (true) {
      const std::size_t index = next.fetch_add(1);
      if (index >= tasks.size()) return;
      const Task& task = tasks[index];
      const MethodEntry& method = replication.methods[task.method_index];
      BenchRow& row = rows[index];
      row.method = method.label;
      row.replicate = task.replicate;
      row.seed = replication.base_seed + static_cast<std::uint64_t>(task.replicate);
      try {
        ExperimentConfig local = config;
        local.designer.acquisition = method.acquisition;
        local.designer.seed = row.seed;
        const RunReport report =
            run(local.designer, prepared.family, prepared.grid);
        const TraceRow& last = report.trace.back();
        row.empirical_loss = last.empirical_loss;
        row.true_loss = last.true_loss;
        row.error_prob = last.error_prob;
        row.d_counts = report.design.per_surface_counts;
      } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  const fs::path dir(config.output.dir);
  write_bench_csv(dir, rows, prepared.family.count());
  write_bench_summary_csv(dir, replication.methods, rows);
}

void run_sir(ExperimentConfig config, const CliOverrides& overrides) {
  apply_overrides(&config, overrides);
  if (config.problem.name != "sir") {
    throw ConfigError("the sir command needs problem.name = \"sir\"");
  }
  const PreparedRun prepared = prepare(config);
  const auto start = std::chrono::steady_clock::now();
  const RunReport report = execute(config, prepared);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  const fs::path dir(config.output.dir);
  write_design_csv(dir, report, prepared.family.box.dim());
  write_trace_csv(dir, report);
  write_classifier_csv(dir, report, prepared.grid);
  write_noise_surfaces_csv(dir, config, prepared, report);
  write_summary_json(dir, config, report, wall);
}

}  // namespace ranksurf::bench

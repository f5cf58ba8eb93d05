#include "bench/experiment_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ranksurf::bench {

namespace {

using nlohmann::json;

int line_of_byte(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

struct Ctx {
  const std::string* text;
  const std::string* filename;

  // Best-effort line anchor: first occurrence of the quoted key.
  std::string anchor(const std::string& key) const {
    const std::size_t pos = text->find("\"" + key + "\"");
    if (pos == std::string::npos) return *filename;
    return *filename + ":" + std::to_string(line_of_byte(*text, pos));
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError(anchor(key) + ": " + msg);
  }
};

void check_keys(const Ctx& ctx, const json& obj, const std::string& block,
                const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.contains(item.key())) {
      ctx.fail(item.key(),
               "unknown key '" + item.key() + "' in " + block + " block");
    }
  }
}

template <typename T>
T get_as(const Ctx& ctx, const json& obj, const std::string& key) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    ctx.fail(key, "bad value for '" + key + "': " + e.what());
  }
}

template <typename T>
T get_or(const Ctx& ctx, const json& obj, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return get_as<T>(ctx, obj, key);
}

AcquisitionSpec parse_acquisition(const Ctx& ctx, const json& obj,
                                  const std::string& block) {
  check_keys(ctx, obj, block, {"method", "ucb_scale", "epsilon", "gamma_variant",
                               "label"});
  AcquisitionSpec spec;
  try {
    spec.method = parse_method(get_as<std::string>(ctx, obj, "method"));
    spec.ucb_scale = get_or<double>(ctx, obj, "ucb_scale", 0.0);
    spec.epsilon = get_or<double>(ctx, obj, "epsilon", 0.0);
    if (obj.contains("gamma_variant")) {
      spec.gamma_variant =
          parse_gamma_variant(get_as<std::string>(ctx, obj, "gamma_variant"));
    }
    spec.validate();
  } catch (const std::invalid_argument& e) {
    ctx.fail("method", std::string(e.what()) + " (in " + block + " block)");
  }
  return spec;
}

ProblemConfig parse_problem(const Ctx& ctx, const json& obj) {
  check_keys(ctx, obj, "problem",
             {"name", "population", "beta_no_action", "beta_action", "recovery",
              "intervention_cost", "s_range", "i_range"});
  ProblemConfig problem;
  problem.name = get_as<std::string>(ctx, obj, "name");
  if (problem.name == "toy1d" || problem.name == "synth2d") {
    return problem;
  }
  if (problem.name != "sir") {
    ctx.fail("name", "unknown problem '" + problem.name + "'");
  }
  problem.sir.population = get_or<int>(ctx, obj, "population", 2000);
  problem.sir.beta_no_action = get_or<double>(ctx, obj, "beta_no_action", 0.75);
  problem.sir.beta_action = get_or<double>(ctx, obj, "beta_action", 0.5);
  problem.sir.recovery = get_or<double>(ctx, obj, "recovery", 0.5);
  problem.sir.intervention_cost =
      get_or<double>(ctx, obj, "intervention_cost", 0.25);
  const auto s_range =
      get_or<std::vector<double>>(ctx, obj, "s_range", {1200.0, 1800.0});
  const auto i_range =
      get_or<std::vector<double>>(ctx, obj, "i_range", {0.0, 200.0});
  if (s_range.size() != 2 || i_range.size() != 2 || s_range[0] > s_range[1] ||
      i_range[0] > i_range[1]) {
    ctx.fail("s_range", "ranges must be [lo, hi]");
  }
  problem.sir_domain.lo = Vec(2);
  problem.sir_domain.hi = Vec(2);
  problem.sir_domain.lo << s_range[0], i_range[0];
  problem.sir_domain.hi << s_range[1], i_range[1];
  try {
    problem.sir.validate();
  } catch (const std::invalid_argument& e) {
    ctx.fail("population", e.what());
  }
  return problem;
}

void parse_designer(const Ctx& ctx, const json& obj, DesignerConfig* config) {
  check_keys(ctx, obj, "designer",
             {"initial_size", "budget", "candidate_count", "batch_size",
              "refit_schedule", "noise_mode", "init_design", "stop_cost",
              "seed", "acquisition"});
  config->initial_size = get_as<int>(ctx, obj, "initial_size");
  config->budget = get_as<int>(ctx, obj, "budget");
  config->candidate_count = get_or<int>(ctx, obj, "candidate_count", 100);
  config->batch_size = get_or<int>(ctx, obj, "batch_size", 1);
  config->stop_cost = get_or<double>(ctx, obj, "stop_cost", 0.0);
  config->seed = get_or<std::uint64_t>(ctx, obj, "seed", 0);
  const std::string refit =
      get_or<std::string>(ctx, obj, "refit_schedule", "never");
  if (refit == "never") {
    config->refit_schedule = RefitSchedule::Never;
  } else if (refit == "doubling") {
    config->refit_schedule = RefitSchedule::Doubling;
  } else {
    ctx.fail("refit_schedule", "must be 'never' or 'doubling'");
  }
  const std::string noise = get_or<std::string>(ctx, obj, "noise_mode", "known");
  if (noise == "known") {
    config->noise_mode = NoiseMode::Known;
  } else if (noise == "batch_estimated") {
    config->noise_mode = NoiseMode::BatchEstimated;
  } else {
    ctx.fail("noise_mode", "must be 'known' or 'batch_estimated'");
  }
  const std::string init = get_or<std::string>(ctx, obj, "init_design", "lhs");
  if (init == "lhs") {
    config->init_design = InitDesign::Lhs;
  } else if (init == "lattice") {
    config->init_design = InitDesign::Lattice;
  } else {
    ctx.fail("init_design", "must be 'lhs' or 'lattice'");
  }
  if (!obj.contains("acquisition")) {
    ctx.fail("designer", "designer block needs an acquisition block");
  }
  config->acquisition = parse_acquisition(ctx, obj.at("acquisition"), "acquisition");
}

void parse_kernels(const Ctx& ctx, const json& obj, int dim,
                   KernelPolicy* policy) {
  check_keys(ctx, obj, "kernels",
             {"mode", "convention", "surfaces", "restarts", "fit_nugget",
              "trend"});
  const std::string mode = get_as<std::string>(ctx, obj, "mode");
  if (mode == "fit") {
    policy->fit = true;
    policy->fit_options.restarts = get_or<int>(ctx, obj, "restarts", 5);
    policy->fit_options.fit_nugget = get_or<bool>(ctx, obj, "fit_nugget", false);
    if (obj.contains("trend")) {
      policy->fit_options.fit_trend = false;
      policy->fit_options.fixed_trend = get_as<double>(ctx, obj, "trend");
    }
    return;
  }
  if (mode != "fixed") {
    ctx.fail("mode", "kernels.mode must be 'fixed' or 'fit'");
  }
  policy->fit = false;
  const std::string convention =
      get_or<std::string>(ctx, obj, "convention", "lengthscale");
  if (convention != "lengthscale" && convention != "theta") {
    ctx.fail("convention", "must be 'lengthscale' (theta = 1/L^2) or 'theta'");
  }
  if (!obj.contains("surfaces") || !obj.at("surfaces").is_array()) {
    ctx.fail("surfaces", "fixed kernels need a surfaces array");
  }
  for (const json& entry : obj.at("surfaces")) {
    check_keys(ctx, entry, "kernel", {"scale", "lengthscales", "trend"});
    const double scale = get_as<double>(ctx, entry, "scale");
    const auto ls = get_as<std::vector<double>>(ctx, entry, "lengthscales");
    const double trend = get_or<double>(ctx, entry, "trend", 0.0);
    if (static_cast<int>(ls.size()) != dim) {
      ctx.fail("lengthscales", "expected " + std::to_string(dim) +
                                   " lengthscales for this problem");
    }
    Vec raw = Eigen::Map<const Vec>(ls.data(), static_cast<Eigen::Index>(ls.size()));
    try {
      KernelSpec spec;
      if (convention == "lengthscale") {
        spec = KernelSpec::from_lengthscales(scale, raw, trend);
      } else {
        spec.scale = scale;
        spec.lengthscales = raw;
        spec.trend = trend;
        spec.validate();
      }
      policy->fixed.push_back(spec);
    } catch (const std::invalid_argument& e) {
      ctx.fail("scale", e.what());
    }
  }
}

MetricsConfig parse_metrics(const Ctx& ctx, const json& obj) {
  check_keys(ctx, obj, "metrics", {"grid", "weight_file"});
  MetricsConfig metrics;
  if (obj.contains("grid")) {
    const json& grid = obj.at("grid");
    check_keys(ctx, grid, "metrics.grid", {"points_per_dim", "strides"});
    if (grid.contains("points_per_dim")) {
      metrics.points_per_dim = get_as<int>(ctx, grid, "points_per_dim");
    }
    if (grid.contains("strides")) {
      metrics.strides = get_as<std::vector<int>>(ctx, grid, "strides");
    }
  }
  metrics.weight_file = get_or<std::string>(ctx, obj, "weight_file", "");
  return metrics;
}

ReplicationConfig parse_replication(const Ctx& ctx, const json& obj) {
  check_keys(ctx, obj, "replication", {"count", "base_seed", "methods"});
  ReplicationConfig rep;
  rep.count = get_as<int>(ctx, obj, "count");
  if (rep.count < 1) ctx.fail("count", "replication count must be >= 1");
  rep.base_seed = get_or<std::uint64_t>(ctx, obj, "base_seed", 0);
  if (!obj.contains("methods") || !obj.at("methods").is_array() ||
      obj.at("methods").empty()) {
    ctx.fail("methods", "replication needs a non-empty methods array");
  }
  for (const json& entry : obj.at("methods")) {
    MethodEntry method;
    method.acquisition = parse_acquisition(ctx, entry, "methods");
    method.label = entry.contains("label")
                       ? get_as<std::string>(ctx, entry, "label")
                       : method_name(method.acquisition.method);
    rep.methods.push_back(std::move(method));
  }
  return rep;
}

int problem_dim(const std::string& name) { return name == "toy1d" ? 1 : 2; }

}  // namespace

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path);
}

ExperimentConfig ExperimentConfig::parse(const std::string& text,
                                         const std::string& filename) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(filename + ":" + std::to_string(line_of_byte(text, e.byte)) +
                      ": " + e.what());
  }
  const Ctx ctx{&text, &filename};
  if (!doc.is_object()) {
    throw ConfigError(filename + ":1: top level must be an object");
  }
  check_keys(ctx, doc, "top-level",
             {"problem", "designer", "kernels", "metrics", "replication",
              "output"});
  if (!doc.contains("problem")) {
    throw ConfigError(filename + ": missing problem block");
  }
  if (!doc.contains("designer")) {
    throw ConfigError(filename + ": missing designer block");
  }
  if (!doc.contains("kernels")) {
    throw ConfigError(filename + ": missing kernels block");
  }

  ExperimentConfig config;
  config.echo = text;
  config.problem = parse_problem(ctx, doc.at("problem"));
  parse_designer(ctx, doc.at("designer"), &config.designer);
  parse_kernels(ctx, doc.at("kernels"), problem_dim(config.problem.name),
                &config.designer.kernels);
  if (doc.contains("metrics")) {
    config.metrics = parse_metrics(ctx, doc.at("metrics"));
  }
  if (doc.contains("replication")) {
    config.replication = parse_replication(ctx, doc.at("replication"));
  }
  if (doc.contains("output")) {
    const json& out = doc.at("output");
    check_keys(ctx, out, "output", {"dir"});
    config.output.dir = get_or<std::string>(ctx, out, "dir", "out");
  }

  // Cross-field checks that need the whole document.
  if (!config.designer.kernels.fit &&
      config.problem.name == "toy1d" &&
      config.designer.kernels.fixed.size() != 2) {
    ctx.fail("surfaces", "toy1d needs exactly 2 fixed kernels");
  }
  if (!config.designer.kernels.fit && config.problem.name == "synth2d" &&
      config.designer.kernels.fixed.size() != 5) {
    ctx.fail("surfaces", "synth2d needs exactly 5 fixed kernels");
  }
  if (!config.designer.kernels.fit && config.problem.name == "sir" &&
      config.designer.kernels.fixed.size() != 2) {
    ctx.fail("surfaces", "sir needs exactly 2 fixed kernels");
  }
  return config;
}

SamplerFamily make_family(const ProblemConfig& problem) {
  if (problem.name == "toy1d") return toy1d_family();
  if (problem.name == "synth2d") return synth2d_family();
  if (problem.name == "sir") return sir_family(problem.sir, problem.sir_domain);
  throw ConfigError("unknown problem '" + problem.name + "'");
}

TestGrid make_grid(const ProblemConfig& problem, const MetricsConfig& metrics,
                   const SamplerFamily& family) {
  TestGrid grid;
  if (problem.name == "toy1d") {
    const int m = metrics.points_per_dim.value_or(1000);
    grid.points = Mat(m, 1);
    for (int j = 1; j <= m; ++j) {
      grid.points(j - 1, 0) = static_cast<double>(j) / m;
    }
  } else if (problem.name == "synth2d") {
    const int m = metrics.points_per_dim.value_or(51);
    grid.points = Mat(m * m, 2);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        grid.points(a * m + b, 0) =
            family.box.lo[0] + (family.box.hi[0] - family.box.lo[0]) * a / (m - 1);
        grid.points(a * m + b, 1) =
            family.box.lo[1] + (family.box.hi[1] - family.box.lo[1]) * b / (m - 1);
      }
    }
  } else {
    std::vector<int> strides = metrics.strides.value_or(std::vector<int>{8, 5});
    if (strides.size() != 2 || strides[0] < 1 || strides[1] < 1) {
      throw ConfigError("metrics.grid.strides must be two positive integers");
    }
    std::vector<double> s_values, i_values;
    for (double s = family.box.lo[0]; s <= family.box.hi[0]; s += strides[0]) {
      s_values.push_back(s);
    }
    for (double i = family.box.lo[1]; i <= family.box.hi[1]; i += strides[1]) {
      i_values.push_back(i);
    }
    grid.points = Mat(static_cast<Eigen::Index>(s_values.size() * i_values.size()), 2);
    Eigen::Index row = 0;
    for (double s : s_values) {
      for (double i : i_values) {
        grid.points(row, 0) = s;
        grid.points(row, 1) = i;
        ++row;
      }
    }
  }

  const Eigen::Index g = grid.points.rows();
  if (!metrics.weight_file.empty()) {
    std::ifstream in(metrics.weight_file);
    if (!in) throw ConfigError(metrics.weight_file + ": cannot open weight file");
    grid.weights = Vec(g);
    double value = 0.0;
    Eigen::Index row = 0;
    while (in >> value) {
      if (row >= g) throw ConfigError(metrics.weight_file + ": too many weights");
      if (value < 0.0) throw ConfigError(metrics.weight_file + ": negative weight");
      grid.weights[row++] = value;
    }
    if (row != g) {
      throw ConfigError(metrics.weight_file + ": expected " + std::to_string(g) +
                        " weights, got " + std::to_string(row));
    }
    const double total = grid.weights.sum();
    if (!(total > 0.0)) throw ConfigError(metrics.weight_file + ": zero total weight");
    grid.weights /= total;
  } else {
    grid.weights = Vec::Constant(g, 1.0 / static_cast<double>(g));
  }
  return grid;
}

}  // namespace ranksurf::bench

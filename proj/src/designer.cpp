#include "ranksurf/designer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ranksurf {

void Design::append(DesignRecord record) {
  const int needed = record.surface + 1;
  if (static_cast<int>(per_surface_counts.size()) < needed) {
    per_surface_counts.resize(static_cast<std::size_t>(needed), 0);
  }
  ++per_surface_counts[static_cast<std::size_t>(record.surface)];
  records.push_back(std::move(record));
}

void DesignerConfig::validate(const SamplerFamily& family) const {
  acquisition.validate();
  if (initial_size < 1) throw std::invalid_argument("initial_size must be >= 1");
  if (budget < initial_size) {
    throw std::invalid_argument("budget must be >= initial_size");
  }
  if (candidate_count < 1) {
    throw std::invalid_argument("candidate_count must be >= 1");
  }
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (stop_cost < 0.0) throw std::invalid_argument("stop_cost must be >= 0");
  if (noise_mode == NoiseMode::BatchEstimated && batch_size < 2) {
    throw std::invalid_argument(
        "batch_estimated noise needs batch_size >= 2 (the variance estimator "
        "divides by r - 1)");
  }
  if (noise_mode == NoiseMode::Known && !family.has_known_noise()) {
    throw std::invalid_argument(
        "noise_mode=known requires the problem to expose noise levels");
  }
  if (!kernels.fit) {
    if (static_cast<int>(kernels.fixed.size()) != family.count()) {
      throw std::invalid_argument("need one fixed kernel per surface");
    }
    for (const KernelSpec& spec : kernels.fixed) spec.validate();
  }
  if (acquisition.method == AcqMethod::KnownGapUcb && !family.has_truth()) {
    throw std::invalid_argument(
        "known_gap_ucb requires a problem with known true means");
  }
}

Mat lhs_candidates(const Box& box, int count, Rng& rng) {
  if (count < 1) throw std::invalid_argument("lhs_candidates: count must be >= 1");
  const int dim = box.dim();
  Mat points(count, dim);
  std::vector<int> strata(static_cast<std::size_t>(count));
  for (int axis = 0; axis < dim; ++axis) {
    std::iota(strata.begin(), strata.end(), 0);
    // Fisher-Yates with our own stream
    for (int i = count - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(i) + 1));
      std::swap(strata[static_cast<std::size_t>(i)], strata[static_cast<std::size_t>(j)]);
    }
    const double width = box.hi[axis] - box.lo[axis];
    for (int i = 0; i < count; ++i) {
      const double u = (strata[static_cast<std::size_t>(i)] + rng.uniform01()) / count;
      points(i, axis) = box.lo[axis] + width * u;
    }
  }
  return points;
}

namespace {

Mat snap_to_lattice(const Mat& points) {
  Mat snapped = points.array().round();
  return snapped;
}

// Deduplicate rows, keeping first occurrences in order.
Mat dedup_rows(const Mat& points) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    bool seen = false;
    for (const Eigen::Index j : keep) {
      if (points.row(i) == points.row(j)) {
        seen = true;
        break;
      }
    }
    if (!seen) keep.push_back(i);
  }
  Mat out(static_cast<Eigen::Index>(keep.size()), points.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = points.row(keep[i]);
  }
  return out;
}

Mat fresh_candidates(const DesignerConfig& config, const SamplerFamily& family,
                     Rng& rng) {
  Mat candidates = lhs_candidates(family.box, config.candidate_count, rng);
  if (family.integer_lattice) {
    candidates = dedup_rows(snap_to_lattice(candidates));
  }
  return candidates;
}

// Rectangular initial lattice: per-axis inclusive linspace with
// sites_per_surface = m^d points.
Mat initial_lattice(const Box& box, int sites_per_surface, bool integer_lattice) {
  const int dim = box.dim();
  const int per_axis = static_cast<int>(
      std::llround(std::pow(static_cast<double>(sites_per_surface), 1.0 / dim)));
  long long total = 1;
  for (int i = 0; i < dim; ++i) total *= per_axis;
  if (total != sites_per_surface) {
    throw std::invalid_argument(
        "lattice init: initial_size / L must be a perfect d-th power, got " +
        std::to_string(sites_per_surface));
  }
  Mat points(sites_per_surface, dim);
  for (int idx = 0; idx < sites_per_surface; ++idx) {
    int rest = idx;
    for (int axis = 0; axis < dim; ++axis) {
      const int slot = rest % per_axis;
      rest /= per_axis;
      double coord =
          per_axis == 1
              ? box.lo[axis]
              : box.lo[axis] + (box.hi[axis] - box.lo[axis]) * slot / (per_axis - 1);
      if (integer_lattice) coord = std::round(coord);
      points(idx, axis) = coord;
    }
  }
  return points;
}

struct SampleResult {
  double mean;
  double noise_variance;  // variance of the stored mean
};

SampleResult draw_batch(const DesignerConfig& config, const SamplerFamily& family,
                        int ell, const Vec& x, Rng& rng) {
  const Sampler& sampler = family.surfaces[static_cast<std::size_t>(ell)];
  const int r = config.batch_size;
  if (config.noise_mode == NoiseMode::BatchEstimated) {
    const BatchResult batch = batch_sample(sampler, x, r, rng);
    return {batch.mean, batch.variance_of_mean};
  }
  double sum = 0.0;
  for (int i = 0; i < r; ++i) sum += sampler.sample(x, rng);
  const double sd = sampler.noise_sd(x);
  return {sum / r, sd * sd / r};
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Group a surface's observations out of the design.
ObservationSet surface_observations(const Design& design, int ell, int dim) {
  ObservationSet obs = ObservationSet::empty(dim);
  for (const DesignRecord& record : design.records) {
    if (record.surface == ell) {
      obs.append(record.location, record.sample_mean,
                 record.noise_variance_estimate);
    }
  }
  return obs;
}

KrigingModel fitted_model(const DesignerConfig& config, ObservationSet obs,
                          int ell, std::uint64_t salt) {
  FitOptions options = config.kernels.fit_options;
  // deterministic but distinct per (surface, refit occasion)
  options.seed = config.seed ^ (0x9e3779b97f4a7c15ULL * (salt * 31 + ell + 1));
  const FitResult fit = fit_hyperparameters(obs, options);
  if (fit.nugget > 0.0) {
    obs.noise_variances.array() += fit.nugget;
  }
  return KrigingModel(fit.spec, std::move(obs));
}

void maybe_refit(DesignerState& state, const DesignerConfig& config, int ell,
                 int dim) {
  if (config.refit_schedule != RefitSchedule::Doubling || !config.kernels.fit) {
    return;
  }
  const int count = state.design.per_surface_counts[static_cast<std::size_t>(ell)];
  if (!is_power_of_two(count)) return;
  state.models[static_cast<std::size_t>(ell)] = fitted_model(
      config, surface_observations(state.design, ell, dim), ell,
      static_cast<std::uint64_t>(count));
}

SelectionContext make_context(const DesignerConfig& config,
                              const SamplerFamily& family,
                              const DesignerState& state) {
  SelectionContext context;
  context.noise_variance = [&config, &family, &state](int ell, const Vec& x) {
    return expected_noise_variance(config, family, state.design, state.models,
                                   ell, x);
  };
  if (family.has_truth()) {
    context.true_means = [&family](const Vec& x) { return family.true_means(x); };
  }
  return context;
}

void sample_and_update(DesignerState& state, const DesignerConfig& config,
                       const SamplerFamily& family, int ell, const Vec& x) {
  const SampleResult sample = draw_batch(config, family, ell, x, state.sampler_rng);
  DesignRecord record;
  record.location = x;
  record.surface = ell;
  record.sample_mean = sample.mean;
  record.noise_variance_estimate = sample.noise_variance;
  record.batch_size = config.batch_size;
  record.step = state.design.size() + 1;
  state.design.append(std::move(record));
  state.models[static_cast<std::size_t>(ell)] =
      state.models[static_cast<std::size_t>(ell)].with_observation(
          x, sample.mean, sample.noise_variance);
  maybe_refit(state, config, ell, family.box.dim());
}

}  // namespace

double expected_noise_variance(const DesignerConfig& config,
                               const SamplerFamily& family,
                               const Design& design,
                               const std::vector<KrigingModel>& models, int ell,
                               const Vec& x) {
  const int r = config.batch_size;
  if (config.noise_mode == NoiseMode::Known) {
    const double sd = family.surfaces[static_cast<std::size_t>(ell)].noise_sd(x);
    return sd * sd / r;
  }
  // Per-draw variance sigma_tilde^2 at the nearest design site of surface
  // ell; each stored record holds sigma_tilde^2 / batch_size.
  double best_dist = std::numeric_limits<double>::infinity();
  double nearest_var = -1.0;
  double sum = 0.0;
  int n = 0;
  for (const DesignRecord& record : design.records) {
    if (record.surface != ell) continue;
    const double per_draw = record.noise_variance_estimate * record.batch_size;
    sum += per_draw;
    ++n;
    const double dist = (record.location - x).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      nearest_var = per_draw;
    }
  }
  if (n == 0) {
    return models[static_cast<std::size_t>(ell)].kernel().scale / r;
  }
  if (nearest_var <= 0.0) nearest_var = sum / n;  // degenerate batch fallback
  return nearest_var / r;
}

DesignerState initialize(const DesignerConfig& config,
                         const SamplerFamily& family) {
  config.validate(family);
  const int count = family.count();
  const int dim = family.box.dim();
  DesignerState state(config.seed);
  state.design.per_surface_counts.assign(static_cast<std::size_t>(count), 0);

  Mat sites;
  std::vector<int> site_surface;
  if (config.init_design == InitDesign::Lattice) {
    if (config.initial_size % count != 0) {
      throw std::invalid_argument("lattice init: initial_size must divide by L");
    }
    const Mat lattice =
        initial_lattice(family.box, config.initial_size / count,
                        family.integer_lattice);
    sites = Mat(config.initial_size, dim);
    for (int l = 0; l < count; ++l) {
      for (Eigen::Index i = 0; i < lattice.rows(); ++i) {
        sites.row(l * lattice.rows() + i) = lattice.row(i);
        site_surface.push_back(l);
      }
    }
  } else {
    sites = lhs_candidates(family.box, config.initial_size, state.candidate_rng);
    if (family.integer_lattice) sites = snap_to_lattice(sites);
    for (int i = 0; i < config.initial_size; ++i) {
      site_surface.push_back(i % count);  // round-robin, remainder to low indices
    }
  }

  // Sample every initial site, then build the models.
  std::vector<ObservationSet> per_surface(
      static_cast<std::size_t>(count), ObservationSet::empty(dim));
  for (int i = 0; i < config.initial_size; ++i) {
    const int ell = site_surface[static_cast<std::size_t>(i)];
    const Vec x = sites.row(i).transpose();
    SampleResult sample;
    try {
      sample = draw_batch(config, family, ell, x, state.sampler_rng);
    } catch (const std::exception& e) {
      throw std::runtime_error("initialize: sampler failed at surface " +
                               std::to_string(ell + 1) + ": " + e.what());
    }
    DesignRecord record;
    record.location = x;
    record.surface = ell;
    record.sample_mean = sample.mean;
    record.noise_variance_estimate = sample.noise_variance;
    record.batch_size = config.batch_size;
    record.step = state.design.size() + 1;
    state.design.append(record);
    per_surface[static_cast<std::size_t>(ell)].append(x, sample.mean,
                                                      sample.noise_variance);
  }
  for (int l = 0; l < count; ++l) {
    if (config.kernels.fit) {
      state.models.push_back(
          fitted_model(config, std::move(per_surface[static_cast<std::size_t>(l)]),
                       l, /*salt=*/0));
    } else {
      state.models.emplace_back(config.kernels.fixed[static_cast<std::size_t>(l)],
                                std::move(per_surface[static_cast<std::size_t>(l)]));
    }
  }
  return state;
}

void step(DesignerState& state, const DesignerConfig& config,
          const SamplerFamily& family) {
  if (state.design.size() >= config.budget) {
    throw std::logic_error("step: budget already exhausted");
  }
  const Mat candidates = fresh_candidates(config, family, state.candidate_rng);
  const SelectionContext context = make_context(config, family, state);
  const Selection choice =
      select_pair(config.acquisition, state.models, candidates,
                  state.design.size(), state.selection_rng, context);
  if (choice.surface == kAllSurfaces) {
    for (int l = 0; l < family.count(); ++l) {
      sample_and_update(state, config, family, l, choice.location);
    }
  } else {
    sample_and_update(state, config, family, choice.surface, choice.location);
  }
}

bool stop_rule(const std::vector<TraceRow>& trace, double stop_cost) {
  if (stop_cost <= 0.0 || trace.size() < 2) return false;
  constexpr std::size_t kWindow = 5;
  constexpr int kRequiredIncreases = 3;
  std::vector<double> averages;
  for (std::size_t i = kWindow - 1; i < trace.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = i + 1 - kWindow; j <= i; ++j) {
      sum += trace[j].empirical_loss + stop_cost * trace[j].step;
    }
    averages.push_back(sum / kWindow);
  }
  if (averages.size() < kRequiredIncreases + 1) return false;
  const std::size_t last = averages.size() - 1;
  for (int j = 0; j < kRequiredIncreases; ++j) {
    if (!(averages[last - j] > averages[last - j - 1])) return false;
  }
  return true;
}

namespace {

struct GridMetrics {
  double empirical_loss;
  double error_prob;
  std::optional<double> true_loss;
  std::vector<int> classifier;
  Vec m_gap_values;
  Vec p_best;
};

GridMetrics grid_metrics(const std::vector<KrigingModel>& models,
                         const TestGrid& grid,
                         const std::optional<Mat>& truths) {
  const int count = static_cast<int>(models.size());
  const Eigen::Index g = grid.points.rows();
  Mat means(g, count), vars(g, count);
  for (int l = 0; l < count; ++l) {
    const PosteriorBatch post =
        models[static_cast<std::size_t>(l)].posterior(grid.points);
    means.col(l) = post.means;
    vars.col(l) = post.variances;
  }
  GridMetrics out;
  out.classifier.resize(static_cast<std::size_t>(g));
  out.m_gap_values = Vec(g);
  out.p_best = Vec(g);
  double loss = 0.0, err = 0.0, tl = 0.0;
  PosteriorAtPoint post;
  for (Eigen::Index i = 0; i < g; ++i) {
    post.means = means.row(i).transpose();
    post.variances = vars.row(i).transpose();
    const int chosen = classify(post);
    const double gap = m_gap(post);
    const Vec probs = min_prob(post);
    out.classifier[static_cast<std::size_t>(i)] = chosen;
    out.m_gap_values[i] = gap;
    out.p_best[i] = probs[chosen];
    loss += grid.weights[i] * gap;
    err += grid.weights[i] * (1.0 - probs[chosen]);
    if (truths) {
      tl += grid.weights[i] *
            ((*truths)(i, chosen) - truths->row(i).minCoeff());
    }
  }
  out.empirical_loss = loss;
  out.error_prob = err;
  if (truths) out.true_loss = tl;
  return out;
}

}  // namespace

RunReport run(const DesignerConfig& config, const SamplerFamily& family,
              const TestGrid& grid) {
  if (grid.points.rows() != grid.weights.size()) {
    throw std::invalid_argument("run: grid weights length mismatch");
  }
  if (std::abs(grid.weights.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("run: grid weights must sum to 1");
  }
  std::optional<Mat> truths;
  if (family.has_truth()) {
    Mat t(grid.points.rows(), family.count());
    for (Eigen::Index i = 0; i < grid.points.rows(); ++i) {
      t.row(i) = family.true_means(grid.points.row(i).transpose()).transpose();
    }
    truths = std::move(t);
  }

  DesignerState state = initialize(config, family);
  RunReport report;
  GridMetrics metrics = grid_metrics(state.models, grid, truths);
  report.trace.push_back({state.design.size(), metrics.empirical_loss,
                          metrics.error_prob, metrics.true_loss});

  while (state.design.size() < config.budget) {
    step(state, config, family);
    metrics = grid_metrics(state.models, grid, truths);
    report.trace.push_back({state.design.size(), metrics.empirical_loss,
                            metrics.error_prob, metrics.true_loss});
    if (config.stop_cost > 0.0 && stop_rule(report.trace, config.stop_cost)) {
      report.stopped_early = true;
      break;
    }
  }
  report.design = std::move(state.design);
  report.models = std::move(state.models);
  report.classifier_on_grid = std::move(metrics.classifier);
  report.m_gap_on_grid = std::move(metrics.m_gap_values);
  report.p_best_on_grid = std::move(metrics.p_best);
  return report;
}

}  // namespace ranksurf

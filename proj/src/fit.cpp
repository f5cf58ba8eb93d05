#include "ranksurf/fit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "ranksurf/errors.hpp"
#include "ranksurf/rng.hpp"

namespace ranksurf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Objective {
  const ObservationSet* obs;
  const FitOptions* options;
  int dim;

  // z = (log theta_1..d, log s^2 [, log nugget])
  double operator()(const Vec& z, double* trend_out = nullptr) const {
    KernelSpec spec;
    spec.lengthscales = z.head(dim).array().exp();
    spec.scale = std::exp(z[dim]);
    const double nugget = options->fit_nugget ? std::exp(z[dim + 1]) : 0.0;

    const int n = obs->size();
    Mat a = kernel_gram(spec, obs->locations);
    a.diagonal() += obs->noise_variances;
    a.diagonal().array() += nugget + 1e-10 * spec.scale;
    Eigen::LLT<Mat> llt(a);
    if (llt.info() != Eigen::Success) return kNegInf;

    double trend = options->fixed_trend;
    if (options->fit_trend) {
      const Vec ones = Vec::Ones(n);
      const Vec ainv_ones = llt.solve(ones);
      const double denom = ones.dot(ainv_ones);
      if (!(denom > 0.0)) return kNegInf;
      trend = obs->values.dot(ainv_ones) / denom;
    }
    if (trend_out != nullptr) *trend_out = trend;

    const Vec resid = obs->values.array() - trend;
    const double quad = resid.dot(llt.solve(resid));
    const double logdet =
        2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double ll =
        -0.5 * quad - 0.5 * logdet - 0.5 * n * std::log(2.0 * M_PI);
    return std::isfinite(ll) ? ll : kNegInf;
  }
};

Vec clamp_to_box(Vec z, const Vec& lo, const Vec& hi) {
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    z[i] = std::clamp(z[i], lo[i], hi[i]);
  }
  return z;
}

// Nelder-Mead maximization with box clamping; returns the best point found.
std::pair<Vec, double> simplex_max(const std::function<double(const Vec&)>& f,
                                   const Vec& start, const Vec& lo,
                                   const Vec& hi, int max_iterations) {
  const int n = static_cast<int>(start.size());
  std::vector<Vec> pts(n + 1);
  std::vector<double> vals(n + 1);
  pts[0] = clamp_to_box(start, lo, hi);
  vals[0] = f(pts[0]);
  for (int i = 0; i < n; ++i) {
    Vec p = pts[0];
    p[i] += 0.5;
    pts[i + 1] = clamp_to_box(p, lo, hi);
    vals[i + 1] = f(pts[i + 1]);
  }

  std::vector<int> order(n + 1);
  for (int iter = 0; iter < max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return vals[a] > vals[b]; });
    const int best = order[0], second_worst = order[n - 1], worst = order[n];
    if (std::isfinite(vals[best]) && std::isfinite(vals[worst]) &&
        vals[best] - vals[worst] < 1e-9 * (1.0 + std::abs(vals[best]))) {
      break;
    }
    Vec centroid = Vec::Zero(n);
    for (int i = 0; i <= n; ++i) {
      if (i != worst) centroid += pts[i];
    }
    centroid /= n;

    const Vec reflected =
        clamp_to_box(centroid + (centroid - pts[worst]), lo, hi);
    const double f_reflected = f(reflected);
    if (f_reflected > vals[best]) {
      const Vec expanded =
          clamp_to_box(centroid + 2.0 * (centroid - pts[worst]), lo, hi);
      const double f_expanded = f(expanded);
      if (f_expanded > f_reflected) {
        pts[worst] = expanded;
        vals[worst] = f_expanded;
      } else {
        pts[worst] = reflected;
        vals[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected > vals[second_worst]) {
      pts[worst] = reflected;
      vals[worst] = f_reflected;
      continue;
    }
    const Vec contracted =
        clamp_to_box(centroid + 0.5 * (pts[worst] - centroid), lo, hi);
    const double f_contracted = f(contracted);
    if (f_contracted > vals[worst]) {
      pts[worst] = contracted;
      vals[worst] = f_contracted;
      continue;
    }
    for (int i = 0; i <= n; ++i) {  // shrink toward the best vertex
      if (i == best) continue;
      pts[i] = clamp_to_box(pts[best] + 0.5 * (pts[i] - pts[best]), lo, hi);
      vals[i] = f(pts[i]);
    }
  }
  const auto best_it = std::max_element(vals.begin(), vals.end());
  return {pts[static_cast<std::size_t>(best_it - vals.begin())], *best_it};
}

}  // namespace

double log_marginal_likelihood(const ObservationSet& obs,
                               const KernelSpec& spec, double nugget) {
  FitOptions options;
  options.fit_trend = false;
  options.fixed_trend = spec.trend;
  options.fit_nugget = nugget > 0.0;
  Objective objective{&obs, &options, spec.input_dim()};
  Vec z(spec.input_dim() + (nugget > 0.0 ? 2 : 1));
  z.head(spec.input_dim()) = spec.lengthscales.array().log();
  z[spec.input_dim()] = std::log(spec.scale);
  if (nugget > 0.0) z[spec.input_dim() + 1] = std::log(nugget);
  return objective(z);
}

FitResult fit_hyperparameters(const ObservationSet& obs,
                              const FitOptions& options) {
  obs.validate();
  const int n = obs.size();
  const int dim = obs.dim();
  const int needed = 2 * (dim + 2);
  if (n < needed) {
    throw InsufficientDataError("fit_hyperparameters: need at least " +
                                std::to_string(needed) + " observations, got " +
                                std::to_string(n));
  }

  // Data-derived default bounds where the caller left them unset.
  Vec width(dim);
  for (int i = 0; i < dim; ++i) {
    const double w =
        obs.locations.col(i).maxCoeff() - obs.locations.col(i).minCoeff();
    width[i] = w > 0.0 ? w : 1.0;
  }
  const double y_mean = obs.values.mean();
  const double y_var =
      (obs.values.array() - y_mean).square().sum() / std::max(1, n - 1);
  const double var_ref = y_var > 0.0 ? y_var : 1e-12;

  Vec theta_lo = options.bounds.theta_lo, theta_hi = options.bounds.theta_hi;
  if (theta_lo.size() == 0) {
    theta_lo = (10.0 * width.array()).square().inverse();  // lengthscale <= 10w
  }
  if (theta_hi.size() == 0) {
    theta_hi = (1e-3 * width.array()).square().inverse();  // lengthscale >= w/1000
  }
  const double scale_lo =
      options.bounds.scale_lo > 0.0 ? options.bounds.scale_lo : 1e-9 * var_ref;
  const double scale_hi =
      options.bounds.scale_hi > 0.0 ? options.bounds.scale_hi : 1e3 * var_ref;
  const double nugget_lo = options.bounds.nugget_lo > 0.0
                               ? options.bounds.nugget_lo
                               : 1e-12 * var_ref;
  const double nugget_hi =
      options.bounds.nugget_hi > 0.0 ? options.bounds.nugget_hi : 10.0 * var_ref;

  const int nz = dim + 1 + (options.fit_nugget ? 1 : 0);
  Vec lo(nz), hi(nz);
  lo.head(dim) = theta_lo.array().log();
  hi.head(dim) = theta_hi.array().log();
  lo[dim] = std::log(scale_lo);
  hi[dim] = std::log(scale_hi);
  if (options.fit_nugget) {
    lo[dim + 1] = std::log(nugget_lo);
    hi[dim + 1] = std::log(nugget_hi);
  }

  Objective objective{&obs, &options, dim};
  auto f = [&](const Vec& z) { return objective(z); };

  // First start: median-distance lengthscale heuristic; the rest are
  // stratified draws over the log box.
  std::vector<Vec> starts;
  {
    Vec z0(nz);
    for (int i = 0; i < dim; ++i) {
      std::vector<double> dists;
      for (int a = 0; a < std::min(n, 64); ++a) {
        for (int b = a + 1; b < std::min(n, 64); ++b) {
          const double d = std::abs(obs.locations(a, i) - obs.locations(b, i));
          if (d > 0.0) dists.push_back(d);
        }
      }
      double ell = width[i] * 0.5;
      if (!dists.empty()) {
        std::nth_element(dists.begin(), dists.begin() + dists.size() / 2,
                         dists.end());
        ell = dists[dists.size() / 2];
      }
      z0[i] = std::log(1.0 / (ell * ell));
    }
    z0[dim] = std::log(var_ref);
    if (options.fit_nugget) z0[dim + 1] = std::log(0.1 * var_ref);
    starts.push_back(clamp_to_box(z0, lo, hi));
  }
  Rng rng(options.seed, /*stream=*/0x66697473ULL);
  const int restarts = std::max(1, options.restarts);
  for (int s = 1; s < restarts; ++s) {
    Vec z(nz);
    for (int i = 0; i < nz; ++i) {
      // one stratum per restart, jittered
      const double u = (s - 1 + rng.uniform01()) / std::max(1, restarts - 1);
      z[i] = lo[i] + u * (hi[i] - lo[i]);
    }
    starts.push_back(z);
  }

  Vec best_z;
  double best_ll = kNegInf;
  for (const Vec& start : starts) {
    const auto [z, ll] = simplex_max(f, start, lo, hi, options.max_iterations);
    if (ll > best_ll) {
      best_ll = ll;
      best_z = z;
    }
  }
  if (!std::isfinite(best_ll)) {
    throw NumericalError(
        "fit_hyperparameters: every start point failed to factorize");
  }

  FitResult result;
  double trend = options.fixed_trend;
  objective(best_z, &trend);
  result.spec.lengthscales = best_z.head(dim).array().exp();
  result.spec.scale = std::exp(best_z[dim]);
  result.spec.trend = trend;
  result.nugget = options.fit_nugget ? std::exp(best_z[dim + 1]) : 0.0;
  result.log_likelihood = best_ll;
  return result;
}

}  // namespace ranksurf

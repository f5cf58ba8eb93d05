#pragma once

#include <cstdint>

#include "ranksurf/kriging.hpp"

namespace ranksurf {

/// Box constraints for the kernel search, all in KernelSpec units (theta is
/// the multiplicative weight, scale is s^2). Empty/zero entries are replaced
/// by data-derived defaults.
struct FitBounds {
  Vec theta_lo, theta_hi;
  double scale_lo = 0.0, scale_hi = 0.0;
  double nugget_lo = 0.0, nugget_hi = 0.0;
};

struct FitOptions {
  FitBounds bounds;
  int restarts = 5;
  bool fit_nugget = false;  // estimate a constant observation-noise term
  bool fit_trend = true;    // generalized-least-squares intercept
  double fixed_trend = 0.0; // used when fit_trend is false
  int max_iterations = 200; // per simplex run
  std::uint64_t seed = 0;   // start-point generation
};

struct FitResult {
  KernelSpec spec;
  double nugget = 0.0;  // 0 unless fit_nugget
  double log_likelihood = 0.0;
};

/// Maximize the Gaussian log marginal likelihood over the bounds with a
/// multi-start Nelder-Mead simplex on log-parameters. Deterministic given
/// options.seed. Requires n >= 2*(d+2) observations
/// (InsufficientDataError otherwise); NumericalError if every start fails.
FitResult fit_hyperparameters(const ObservationSet& obs,
                              const FitOptions& options = {});

/// Log marginal likelihood of the data under the given kernel (plus an
/// optional constant nugget added to every noise variance).
double log_marginal_likelihood(const ObservationSet& obs,
                               const KernelSpec& spec, double nugget = 0.0);

}  // namespace ranksurf

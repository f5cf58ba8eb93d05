#pragma once

#include <Eigen/Dense>

#include "ranksurf/kernel.hpp"

namespace ranksurf {

/// Design data for one surface: locations x^{1:n} (rows), observed values
/// y (batched sample means), and the per-entry observation-noise variances
/// (the diagonal of Sigma).
struct ObservationSet {
  Mat locations;        // n x d
  Vec values;           // n
  Vec noise_variances;  // n, each >= 0

  int size() const { return static_cast<int>(values.size()); }
  int dim() const { return static_cast<int>(locations.cols()); }

  void validate() const;
  void append(const Vec& x, double y, double noise_var);

  static ObservationSet empty(int dim);
};

struct PosteriorBatch {
  Vec means;
  Vec variances;  // clamped at 0
  Mat covariance; // empty unless requested
};

/// Gaussian-process posterior for one surface.
///
/// Holds the observations together with the lower Cholesky factor of
/// (K + Sigma + jitter*I) and the precomputed solve of (y - t) against it.
/// Immutable after construction: with_observation() returns a new model
/// whose factor is extended in O(n^2), exactly equivalent to a refit.
///
/// Jitter starts at 1e-10 * s^2 and escalates tenfold up to 1e-4 * s^2;
/// if the factorization still fails a NumericalError reports the attempted
/// levels.
class KrigingModel {
 public:
  KrigingModel(KernelSpec spec, ObservationSet obs);

  const KernelSpec& kernel() const { return spec_; }
  const ObservationSet& observations() const { return obs_; }
  int size() const { return obs_.size(); }
  int dim() const { return obs_.dim(); }
  double jitter() const { return jitter_; }

  /// Posterior means/variances (and covariance if `with_cov`) at the given
  /// query rows. With no observations this is the prior: mean = trend,
  /// variance = s^2.
  PosteriorBatch posterior(const Mat& query, bool with_cov = false) const;

  /// Single-point fast path.
  void posterior_at(const Vec& x, double& mean, double& var) const;

  /// Posterior covariance v(a, b) between two points.
  double posterior_cov(const Vec& a, const Vec& b) const;

  /// Model with (x, y, noise_var) assimilated. Equivalent to refitting on
  /// the augmented ObservationSet; the covariance factor is extended by one
  /// row instead of rebuilt (a full rebuild happens only if the new pivot
  /// is numerically unsafe).
  KrigingModel with_observation(const Vec& x, double y, double noise_var) const;

  /// Posterior variance at `query` after a hypothetical observation at
  /// `x_cand` with the given noise variance. Independent of the value that
  /// would be observed:
  ///   lambda = v(query, x_cand) / (noise_var + delta^2(x_cand))
  ///   var'   = delta^2(query) - lambda * v(query, x_cand)
  double variance_after_hypothetical(const Vec& x_cand, double noise_var,
                                     const Vec& query) const;

 private:
  void factorize();

  KernelSpec spec_;
  ObservationSet obs_;
  Mat chol_;      // lower-triangular factor, n x n
  Vec alpha_;     // (K + Sigma + jitter I)^{-1} (y - t 1)
  double jitter_ = 0.0;
};

}  // namespace ranksurf

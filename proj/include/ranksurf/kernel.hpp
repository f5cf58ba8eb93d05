#pragma once

#include <Eigen/Dense>

namespace ranksurf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Matern-5/2 hyperparameters for one response surface.
///
/// `lengthscales` holds the per-dimension weights theta of the scaled norm
/// ||x - x'||_theta^2 = sum_i theta_i (x_i - x'_i)^2, i.e. theta acts
/// multiplicatively on squared coordinate distances (an inverse squared
/// lengthscale). Use from_lengthscales() to build a spec from conventional
/// lengthscales L, which maps theta = 1/L^2.
struct KernelSpec {
  double scale = 1.0;  // s^2, response-amplitude variance
  Vec lengthscales;    // theta, one positive entry per input dimension
  double trend = 0.0;  // constant trend t

  int input_dim() const { return static_cast<int>(lengthscales.size()); }

  /// Throws std::invalid_argument unless scale > 0 and all theta > 0.
  void validate() const;

  static KernelSpec from_lengthscales(double scale, const Vec& conventional,
                                      double trend);
};

/// Matern-5/2 covariance K(x, x'; s, theta)
///   = s^2 (1 + sqrt(5) r + (5/3) r^2) exp(-sqrt(5) r),  r = ||x - x'||_theta.
/// Symmetric, equals s^2 at zero distance. Throws std::invalid_argument on
/// dimension mismatch.
double kernel_eval(const KernelSpec& spec, const Vec& x, const Vec& x2);

/// Cross-covariance matrix between row-point sets A (n x d) and B (m x d).
Mat kernel_cross(const KernelSpec& spec, const Mat& a, const Mat& b);

/// Symmetric Gram matrix of a row-point set (n x d).
Mat kernel_gram(const KernelSpec& spec, const Mat& points);

}  // namespace ranksurf

#include "ranksurf/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace ranksurf {

namespace {
constexpr double kSqrt5 = 2.2360679774997896964091736687747;
}  // namespace

void KernelSpec::validate() const {
  if (!(scale > 0.0)) {
    throw std::invalid_argument("KernelSpec: scale must be > 0");
  }
  if (lengthscales.size() == 0) {
    throw std::invalid_argument("KernelSpec: empty lengthscales");
  }
  for (Eigen::Index i = 0; i < lengthscales.size(); ++i) {
    if (!(lengthscales[i] > 0.0)) {
      throw std::invalid_argument("KernelSpec: lengthscales must be > 0");
    }
  }
}

KernelSpec KernelSpec::from_lengthscales(double scale, const Vec& conventional,
                                         double trend) {
  KernelSpec spec;
  spec.scale = scale;
  spec.trend = trend;
  spec.lengthscales = conventional.array().square().inverse();
  spec.validate();
  return spec;
}

double kernel_eval(const KernelSpec& spec, const Vec& x, const Vec& x2) {
  if (x.size() != spec.input_dim() || x2.size() != spec.input_dim()) {
    throw std::invalid_argument("kernel_eval: point dimension mismatch");
  }
  const double r2 =
      (spec.lengthscales.array() * (x - x2).array().square()).sum();
  const double r = std::sqrt(r2);
  return spec.scale * (1.0 + kSqrt5 * r + (5.0 / 3.0) * r2) * std::exp(-kSqrt5 * r);
}

Mat kernel_cross(const KernelSpec& spec, const Mat& a, const Mat& b) {
  if (a.cols() != spec.input_dim() || b.cols() != spec.input_dim()) {
    throw std::invalid_argument("kernel_cross: point dimension mismatch");
  }
  Mat out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      const double r2 = (spec.lengthscales.array() *
                         (a.row(i) - b.row(j)).transpose().array().square())
                            .sum();
      const double r = std::sqrt(r2);
      out(i, j) = spec.scale * (1.0 + kSqrt5 * r + (5.0 / 3.0) * r2) * std::exp(-kSqrt5 * r);
    }
  }
  return out;
}

Mat kernel_gram(const KernelSpec& spec, const Mat& points) {
  if (points.cols() != spec.input_dim()) {
    throw std::invalid_argument("kernel_gram: point dimension mismatch");
  }
  const Eigen::Index n = points.rows();
  Mat out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, i) = spec.scale;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double r2 =
          (spec.lengthscales.array() *
           (points.row(i) - points.row(j)).transpose().array().square())
              .sum();
      const double r = std::sqrt(r2);
      const double k =
          spec.scale * (1.0 + kSqrt5 * r + (5.0 / 3.0) * r2) * std::exp(-kSqrt5 * r);
      out(i, j) = k;
      out(j, i) = k;
    }
  }
  return out;
}

}  // namespace ranksurf

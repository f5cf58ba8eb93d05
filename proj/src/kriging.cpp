#include "ranksurf/kriging.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "ranksurf/errors.hpp"

namespace ranksurf {

namespace {
constexpr double kJitterRelStart = 1e-10;
constexpr double kJitterRelMax = 1e-4;
}  // namespace

void ObservationSet::validate() const {
  const Eigen::Index n = values.size();
  if (locations.rows() != n || noise_variances.size() != n) {
    throw std::invalid_argument(
        "ObservationSet: locations, values, noise_variances must have equal "
        "length");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(noise_variances[i] >= 0.0)) {
      throw std::invalid_argument("ObservationSet: negative noise variance");
    }
  }
}

void ObservationSet::append(const Vec& x, double y, double noise_var) {
  if (x.size() != locations.cols()) {
    throw std::invalid_argument("ObservationSet::append: dimension mismatch");
  }
  if (!(noise_var >= 0.0)) {
    throw std::invalid_argument("ObservationSet::append: negative noise");
  }
  const Eigen::Index n = values.size();
  locations.conservativeResize(n + 1, Eigen::NoChange);
  locations.row(n) = x.transpose();
  values.conservativeResize(n + 1);
  values[n] = y;
  noise_variances.conservativeResize(n + 1);
  noise_variances[n] = noise_var;
}

ObservationSet ObservationSet::empty(int dim) {
  ObservationSet obs;
  obs.locations = Mat(0, dim);
  obs.values = Vec(0);
  obs.noise_variances = Vec(0);
  return obs;
}

KrigingModel::KrigingModel(KernelSpec spec, ObservationSet obs)
    : spec_(std::move(spec)), obs_(std::move(obs)) {
  spec_.validate();
  obs_.validate();
  if (obs_.size() > 0 && obs_.dim() != spec_.input_dim()) {
    throw std::invalid_argument("KrigingModel: observation dimension mismatch");
  }
  factorize();
}

void KrigingModel::factorize() {
  const int n = obs_.size();
  if (n == 0) {
    chol_ = Mat(0, 0);
    alpha_ = Vec(0);
    jitter_ = kJitterRelStart * spec_.scale;
    return;
  }
  const Mat gram = kernel_gram(spec_, obs_.locations);
  std::ostringstream attempted;
  for (double rel = kJitterRelStart; rel <= kJitterRelMax * 1.0001; rel *= 10.0) {
    const double jitter = rel * spec_.scale;
    Mat a = gram;
    a.diagonal() += obs_.noise_variances;
    a.diagonal().array() += jitter;
    Eigen::LLT<Mat> llt(a);
    if (llt.info() == Eigen::Success) {
      chol_ = llt.matrixL();
      jitter_ = jitter;
      const Vec resid = obs_.values.array() - spec_.trend;
      alpha_ = llt.solve(resid);
      return;
    }
    attempted << jitter << " ";
  }
  throw NumericalError(
      "KrigingModel: covariance not positive definite; attempted jitter "
      "levels: " +
      attempted.str());
}

PosteriorBatch KrigingModel::posterior(const Mat& query, bool with_cov) const {
  if (query.cols() != spec_.input_dim()) {
    throw std::invalid_argument("posterior: query dimension mismatch");
  }
  const Eigen::Index m = query.rows();
  PosteriorBatch out;
  if (obs_.size() == 0) {
    out.means = Vec::Constant(m, spec_.trend);
    out.variances = Vec::Constant(m, spec_.scale);
    if (with_cov) out.covariance = kernel_gram(spec_, query);
    return out;
  }
  const Mat cross = kernel_cross(spec_, obs_.locations, query);  // n x m
  out.means = Vec::Constant(m, spec_.trend) + cross.transpose() * alpha_;
  const Mat solved =
      chol_.triangularView<Eigen::Lower>().solve(cross);  // n x m
  out.variances =
      (Vec::Constant(m, spec_.scale) - solved.colwise().squaredNorm().transpose())
          .cwiseMax(0.0);
  if (with_cov) {
    out.covariance = kernel_gram(spec_, query) - solved.transpose() * solved;
    out.covariance.diagonal() = out.variances;
  }
  return out;
}

void KrigingModel::posterior_at(const Vec& x, double& mean, double& var) const {
  if (obs_.size() == 0) {
    mean = spec_.trend;
    var = spec_.scale;
    return;
  }
  const Mat cross = kernel_cross(spec_, obs_.locations, x.transpose());
  const Vec solved = chol_.triangularView<Eigen::Lower>().solve(cross.col(0));
  mean = spec_.trend + cross.col(0).dot(alpha_);
  var = std::max(0.0, spec_.scale - solved.squaredNorm());
}

double KrigingModel::posterior_cov(const Vec& a, const Vec& b) const {
  if (obs_.size() == 0) return kernel_eval(spec_, a, b);
  const Mat ka = kernel_cross(spec_, obs_.locations, a.transpose());
  const Mat kb = kernel_cross(spec_, obs_.locations, b.transpose());
  const Vec sa = chol_.triangularView<Eigen::Lower>().solve(ka.col(0));
  const Vec sb = chol_.triangularView<Eigen::Lower>().solve(kb.col(0));
  return kernel_eval(spec_, a, b) - sa.dot(sb);
}

KrigingModel KrigingModel::with_observation(const Vec& x, double y,
                                            double noise_var) const {
  if (!(noise_var >= 0.0)) {
    throw std::invalid_argument("with_observation: negative noise variance");
  }
  KrigingModel next(*this);
  next.obs_.append(x, y, noise_var);

  const int n = obs_.size();
  if (n == 0) {
    next.factorize();
    return next;
  }
  // Extend the Cholesky factor by one row; fall back to a full
  // refactorization when the new pivot is numerically unsafe.
  const Mat cross = kernel_cross(spec_, obs_.locations, x.transpose());
  const Vec c = chol_.triangularView<Eigen::Lower>().solve(cross.col(0));
  const double diag = spec_.scale + noise_var + jitter_;
  const double pivot2 = diag - c.squaredNorm();
  if (pivot2 < 1e-12 * diag) {
    next.factorize();
    return next;
  }
  next.chol_ = Mat::Zero(n + 1, n + 1);
  next.chol_.topLeftCorner(n, n) = chol_;
  next.chol_.row(n).head(n) = c.transpose();
  next.chol_(n, n) = std::sqrt(pivot2);
  const Vec resid = next.obs_.values.array() - spec_.trend;
  const Vec tmp = next.chol_.triangularView<Eigen::Lower>().solve(resid);
  next.alpha_ =
      next.chol_.transpose().triangularView<Eigen::Upper>().solve(tmp);
  return next;
}

double KrigingModel::variance_after_hypothetical(const Vec& x_cand,
                                                 double noise_var,
                                                 const Vec& query) const {
  if (!(noise_var >= 0.0)) {
    throw std::invalid_argument(
        "variance_after_hypothetical: negative noise variance");
  }
  Mat pair(2, spec_.input_dim());
  pair.row(0) = query.transpose();
  pair.row(1) = x_cand.transpose();
  const PosteriorBatch post = posterior(pair, /*with_cov=*/true);
  const double var_query = post.variances[0];
  const double var_cand = post.variances[1];
  const double cov_qc = post.covariance(0, 1);
  const double denom = noise_var + var_cand;
  if (denom <= 0.0) return var_query;  // nothing left to learn at x_cand
  return std::max(0.0, var_query - cov_qc * cov_qc / denom);
}

}  // namespace ranksurf

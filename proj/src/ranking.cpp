#include "ranksurf/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ranksurf/errors.hpp"

namespace ranksurf {

namespace {
std::atomic<long> g_mgap_clamps{0};
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

void PosteriorAtPoint::validate() const {
  if (means.size() != variances.size()) {
    throw std::invalid_argument("PosteriorAtPoint: length mismatch");
  }
  if (means.size() < 2) {
    throw std::invalid_argument("PosteriorAtPoint: need at least 2 surfaces");
  }
  for (Eigen::Index i = 0; i < variances.size(); ++i) {
    if (!(variances[i] >= 0.0)) {
      throw std::invalid_argument("PosteriorAtPoint: negative variance");
    }
  }
}

int classify(const PosteriorAtPoint& post) {
  post.validate();
  int best = 0;
  for (int l = 1; l < post.count(); ++l) {
    if (post.means[l] < post.means[best]) best = l;
  }
  return best;
}

GapResult gaps(const PosteriorAtPoint& post) {
  post.validate();
  const int count = post.count();
  GapResult out;
  out.per_surface = Vec(count);
  // smallest and second-smallest means
  double m1 = std::numeric_limits<double>::infinity();
  double m2 = std::numeric_limits<double>::infinity();
  for (int l = 0; l < count; ++l) {
    const double v = post.means[l];
    if (v < m1) {
      m2 = m1;
      m1 = v;
    } else if (v < m2) {
      m2 = v;
    }
  }
  const bool min_is_tied = (post.means.array() == m1).count() > 1;
  for (int l = 0; l < count; ++l) {
    // min over j != l equals m1 unless l is the unique argmin
    const double other = (post.means[l] == m1 && !min_is_tied) ? m2 : m1;
    out.per_surface[l] = std::abs(post.means[l] - other);
  }
  out.min_gap = std::abs(m1 - m2);
  return out;
}

Eigen::Vector2d min_prob_two(double mu1, double var1, double mu2, double var2) {
  if (!(var1 >= 0.0) || !(var2 >= 0.0)) {
    throw std::invalid_argument("min_prob_two: negative variance");
  }
  const double total = var1 + var2;
  if (total <= 0.0) {
    if (mu1 < mu2) return {1.0, 0.0};
    if (mu1 > mu2) return {0.0, 1.0};
    return {0.5, 0.5};
  }
  const double p1 = normal_cdf((mu2 - mu1) / std::sqrt(total));
  return {p1, 1.0 - p1};
}

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Golub-Welsch, cached.
struct GaussLegendre {
  Vec nodes, weights;
  explicit GaussLegendre(int n) {
    Mat jacobi = Mat::Zero(n, n);
    for (int i = 1; i < n; ++i) {
      const double b = i / std::sqrt(4.0 * i * i - 1.0);
      jacobi(i, i - 1) = b;
      jacobi(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Mat> eig(jacobi);
    nodes = eig.eigenvalues();
    weights = 2.0 * eig.eigenvectors().row(0).transpose().array().square();
  }
};

// P(X <= h, Y <= k) for standard bivariate normal with correlation rho,
// through the tetrachoric integral
//   Phi2 = Phi(h)Phi(k)
//        + (1/2pi) int_0^{asin rho} exp(-(h^2 - 2hk sin t + k^2)/(2cos^2 t)) dt.
double bvn_cdf(double h, double k, double rho) {
  if (rho >= 1.0 - 1e-14) return normal_cdf(std::min(h, k));
  if (rho <= -1.0 + 1e-14) {
    return std::max(0.0, normal_cdf(h) + normal_cdf(k) - 1.0);
  }
  static const GaussLegendre quad(96);
  const double upper = std::asin(rho);
  double integral = 0.0;
  for (Eigen::Index i = 0; i < quad.nodes.size(); ++i) {
    const double t = 0.5 * upper * (quad.nodes[i] + 1.0);
    const double cos2 = std::cos(t) * std::cos(t);
    integral += quad.weights[i] *
                std::exp(-(h * h - 2.0 * h * k * std::sin(t) + k * k) /
                         (2.0 * cos2));
  }
  integral *= 0.5 * upper / (2.0 * M_PI);
  return std::clamp(normal_cdf(h) * normal_cdf(k) + integral, 0.0, 1.0);
}

// Moments of min over the surfaces j != l, folded in index order.
MinMoments fold_without(const PosteriorAtPoint& post, int skip) {
  MinMoments acc{0.0, 0.0};
  bool first = true;
  for (int j = 0; j < post.count(); ++j) {
    if (j == skip) continue;
    if (first) {
      acc = {post.means[j], post.means[j] * post.means[j] + post.variances[j]};
      first = false;
      continue;
    }
    const double var = std::max(0.0, acc.second_moment - acc.mean * acc.mean);
    acc = min_moments_two(acc.mean, var, post.means[j], post.variances[j]);
  }
  return acc;
}

}  // namespace

Vec min_prob(const PosteriorAtPoint& post) {
  post.validate();
  const int count = post.count();
  if (count == 2) {
    const Eigen::Vector2d p = min_prob_two(post.means[0], post.variances[0],
                                           post.means[1], post.variances[1]);
    return Vec(p);
  }
  const double mean_scale = post.means.cwiseAbs().maxCoeff();
  const double floor =
      1e-12 * (mean_scale > 0.0 ? mean_scale * mean_scale : 1e-300);
  const Vec vars = post.variances.cwiseMax(floor);

  Vec probs(count);
  if (count == 3) {
    // Exact: p_l is the orthant probability of the two contrasts
    // (M_l - M_a, M_l - M_b), a correlated bivariate Gaussian.
    for (int l = 0; l < 3; ++l) {
      const int a = (l + 1) % 3, b = (l + 2) % 3;
      const double va = vars[l] + vars[a];
      const double vb = vars[l] + vars[b];
      if (!(va > 0.0) || !(vb > 0.0)) {
        throw NumericalError(
            "min_prob: contrast covariance singular for surface index " +
            std::to_string(l));
      }
      const double rho = vars[l] / std::sqrt(va * vb);
      probs[l] = bvn_cdf((post.means[a] - post.means[l]) / std::sqrt(va),
                         (post.means[b] - post.means[l]) / std::sqrt(vb), rho);
    }
    return probs;
  }
  // L >= 4: approximate min_{j != l} M_j by a moment-matched Gaussian and
  // apply the two-surface closed form against it.
  for (int l = 0; l < count; ++l) {
    const MinMoments other = fold_without(post, l);
    const double other_var =
        std::max(0.0, other.second_moment - other.mean * other.mean);
    probs[l] = min_prob_two(post.means[l], vars[l], other.mean, other_var)[0];
  }
  return probs;
}

MinMoments min_moments_two(double mu1, double var1, double mu2, double var2) {
  if (!(var1 >= 0.0) || !(var2 >= 0.0)) {
    throw std::invalid_argument("min_moments_two: negative variance");
  }
  const double total = var1 + var2;
  if (total <= 0.0) {
    const double m = std::min(mu1, mu2);
    return {m, m * m};
  }
  const double spread = std::sqrt(total);
  const double a = (mu1 - mu2) / spread;
  const double cdf_minus = normal_cdf(-a);
  const double cdf_plus = normal_cdf(a);
  const double pdf = normal_pdf(a);
  MinMoments out;
  out.mean = mu1 * cdf_minus + mu2 * cdf_plus - spread * pdf;
  out.second_moment = (mu1 * mu1 + var1) * cdf_minus +
                      (mu2 * mu2 + var2) * cdf_plus -
                      (mu1 + mu2) * spread * pdf;
  return out;
}

double min_mean(const PosteriorAtPoint& post) {
  post.validate();
  MinMoments acc = min_moments_two(post.means[0], post.variances[0],
                                   post.means[1], post.variances[1]);
  for (int l = 2; l < post.count(); ++l) {
    const double var = std::max(0.0, acc.second_moment - acc.mean * acc.mean);
    acc = min_moments_two(acc.mean, var, post.means[l], post.variances[l]);
  }
  return acc.mean;
}

double m_gap(const PosteriorAtPoint& post) {
  post.validate();
  if (post.count() == 2) {
    // Cancellation-safe closed form: with a = -|mu_1 - mu_2| / d,
    //   mu_(1) - E[min] = d (phi(a) + a Phi(a)) >= 0 termwise.
    const double spread = std::sqrt(post.variances[0] + post.variances[1]);
    if (spread <= 0.0) return 0.0;
    const double a = -std::abs(post.means[0] - post.means[1]) / spread;
    return std::max(0.0, spread * (normal_pdf(a) + a * normal_cdf(a)));
  }
  const double best_mean = post.means.minCoeff();
  const double gap = best_mean - min_mean(post);
  if (gap < 0.0) {
    g_mgap_clamps.fetch_add(1, std::memory_order_relaxed);
    return 0.0;
  }
  return gap;
}

long m_gap_clamp_count() {
  return g_mgap_clamps.load(std::memory_order_relaxed);
}

void m_gap_clamp_reset() { g_mgap_clamps.store(0, std::memory_order_relaxed); }

RankingSummary ranking_summary(const PosteriorAtPoint& post) {
  RankingSummary out;
  out.classifier_index = classify(post);
  const GapResult g = gaps(post);
  out.gap_per_surface = g.per_surface;
  out.min_gap = g.min_gap;
  out.min_probs = min_prob(post);
  out.min_mean = min_mean(post);
  out.m_gap = m_gap(post);
  return out;
}

namespace {
void check_weights(std::size_t n, const Vec& weights) {
  if (static_cast<std::size_t>(weights.size()) != n) {
    throw std::invalid_argument("weights length does not match grid");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("weights must sum to 1");
  }
}
}  // namespace

double empirical_loss(std::span<const PosteriorAtPoint> posteriors,
                      const Vec& weights) {
  check_weights(posteriors.size(), weights);
  double acc = 0.0;
  for (std::size_t i = 0; i < posteriors.size(); ++i) {
    acc += weights[static_cast<Eigen::Index>(i)] * m_gap(posteriors[i]);
  }
  return acc;
}

double true_loss(const std::vector<int>& classifier_on_grid,
                 const Mat& truths_on_grid, const Vec& weights) {
  check_weights(classifier_on_grid.size(), weights);
  if (truths_on_grid.rows() != static_cast<Eigen::Index>(classifier_on_grid.size())) {
    throw std::invalid_argument("true_loss: truths length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < classifier_on_grid.size(); ++i) {
    const Eigen::Index row = static_cast<Eigen::Index>(i);
    acc += weights[row] * (truths_on_grid(row, classifier_on_grid[i]) -
                           truths_on_grid.row(row).minCoeff());
  }
  return acc;
}

double error_probability(std::span<const PosteriorAtPoint> posteriors,
                         const Vec& weights) {
  check_weights(posteriors.size(), weights);
  double acc = 0.0;
  for (std::size_t i = 0; i < posteriors.size(); ++i) {
    const Vec probs = min_prob(posteriors[i]);
    acc += weights[static_cast<Eigen::Index>(i)] *
           (1.0 - probs[classify(posteriors[i])]);
  }
  return acc;
}

}  // namespace ranksurf

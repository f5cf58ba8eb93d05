#pragma once

#include <atomic>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ranksurf/kernel.hpp"

namespace ranksurf {

/// Independent Gaussian posteriors of the L surfaces at one location:
/// means mu_l and variances delta_l^2.
struct PosteriorAtPoint {
  Vec means;
  Vec variances;

  int count() const { return static_cast<int>(means.size()); }
  void validate() const;
};

struct GapResult {
  Vec per_surface;  // |mu_l - min_{j != l} mu_j|
  double min_gap;   // |mu_(1) - mu_(2)|
};

struct MinMoments {
  double mean;
  double second_moment;
};

/// Ranking statistics at one location, all derived from a PosteriorAtPoint.
struct RankingSummary {
  int classifier_index;  // 0-based argmin of the means
  Vec gap_per_surface;
  double min_gap;
  Vec min_probs;
  double min_mean;
  double m_gap;
};

double normal_cdf(double x);
double normal_pdf(double x);

/// Index (0-based) of the smallest posterior mean; ties break to the lowest
/// index.
int classify(const PosteriorAtPoint& post);

GapResult gaps(const PosteriorAtPoint& post);

/// Exact two-surface probabilities that each posterior is the minimum:
/// p_1 = Phi((mu_2 - mu_1) / sqrt(d1^2 + d2^2)), p_2 = 1 - p_1. With both
/// variances zero the result is degenerate ((1,0), (0,1), or (0.5,0.5) on a
/// tie).
Eigen::Vector2d min_prob_two(double mu1, double var1, double mu2, double var2);

/// Probability that each surface attains the minimum. Exact for L = 2
/// (reduces to min_prob_two) and L = 3 (orthant probability of the
/// correlated contrast pair, by quadrature); for L >= 4 the minimum of the
/// other surfaces is moment-matched to a Gaussian and the two-surface form
/// applied, so the vector is approximate and need not sum to 1. A variance
/// floor of 1e-12 * max|mu|^2 keeps degenerate surfaces well-posed.
Vec min_prob(const PosteriorAtPoint& post);

/// First two moments of min(N(mu1, var1), N(mu2, var2)) for independent
/// Gaussians. Both variances zero degenerates to the pointwise minimum.
MinMoments min_moments_two(double mu1, double var1, double mu2, double var2);

/// Expected minimum of the L posteriors. Exact for L = 2; for L > 2 the
/// surfaces are folded in index order, moment-matching a Gaussian after
/// each pairwise minimum.
double min_mean(const PosteriorAtPoint& post);

/// M-gap: min_l mu_l - E[min_l M_l] >= 0. For L = 2 this is evaluated in a
/// cancellation-safe form that is nonnegative termwise; the L > 2 recursion
/// can produce a tiny negative value, which is clamped to 0 and counted
/// (see m_gap_clamp_count).
double m_gap(const PosteriorAtPoint& post);

/// Number of m_gap clamps since process start (or the last reset).
long m_gap_clamp_count();
void m_gap_clamp_reset();

RankingSummary ranking_summary(const PosteriorAtPoint& post);

/// Weighted average of the M-gap over a test grid. Weights must sum to 1
/// (within 1e-9) and match the grid length.
double empirical_loss(std::span<const PosteriorAtPoint> posteriors,
                      const Vec& weights);

/// Weighted average of mu_true[chosen] - min_l mu_true[l] over the grid;
/// needs the true surface values (synthetic problems).
double true_loss(const std::vector<int>& classifier_on_grid,
                 const Mat& truths_on_grid, const Vec& weights);

/// Weighted average of 1 - p_{chosen}(x) over the grid.
double error_probability(std::span<const PosteriorAtPoint> posteriors,
                         const Vec& weights);

}  // namespace ranksurf

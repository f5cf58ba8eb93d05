#include <doctest.h>

#include <cmath>
#include <vector>

#include "ranksurf/errors.hpp"
#include "ranksurf/ranking.hpp"
#include "ranksurf/rng.hpp"
#include "support/oracles.hpp"

using namespace ranksurf;

namespace {
PosteriorAtPoint make_post(std::initializer_list<double> means,
                           std::initializer_list<double> vars) {
  PosteriorAtPoint post;
  post.means = Vec(static_cast<Eigen::Index>(means.size()));
  post.variances = Vec(static_cast<Eigen::Index>(vars.size()));
  Eigen::Index i = 0;
  for (double m : means) post.means[i++] = m;
  i = 0;
  for (double v : vars) post.variances[i++] = v;
  return post;
}
}  // namespace

TEST_CASE("classify picks the smallest mean, ties to the lowest index") {
  CHECK(classify(make_post({0.5, 0.3, 0.9}, {1, 1, 1})) == 1);
  CHECK(classify(make_post({0.3, 0.3}, {1, 1})) == 0);
}

TEST_CASE("gaps") {
  SUBCASE("two surfaces share one gap") {
    const GapResult g = gaps(make_post({0.2, 0.9}, {1, 1}));
    CHECK(g.per_surface[0] == doctest::Approx(0.7));
    CHECK(g.per_surface[1] == doctest::Approx(0.7));
    CHECK(g.min_gap == doctest::Approx(0.7));
  }
  SUBCASE("three surfaces") {
    // |mu_l - min_{j != l} mu_j| per surface
    const GapResult g = gaps(make_post({0.0, 1.0, 3.0}, {1, 1, 1}));
    CHECK(g.per_surface[0] == doctest::Approx(1.0));
    CHECK(g.per_surface[1] == doctest::Approx(1.0));
    CHECK(g.per_surface[2] == doctest::Approx(3.0));
    CHECK(g.min_gap == doctest::Approx(1.0));
  }
  SUBCASE("identical means give zero gaps") {
    const GapResult g = gaps(make_post({0.4, 0.4, 0.4}, {1, 1, 1}));
    CHECK(g.per_surface.maxCoeff() == 0.0);
    CHECK(g.min_gap == 0.0);
  }
  SUBCASE("min_gap equals the classified surface's gap") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      PosteriorAtPoint post;
      const int count = 2 + static_cast<int>(rng.uniform_int(4));
      post.means = Vec(count);
      post.variances = Vec::Ones(count);
      for (int l = 0; l < count; ++l) post.means[l] = rng.uniform(-1, 1);
      const GapResult g = gaps(post);
      CHECK(g.per_surface[classify(post)] == doctest::Approx(g.min_gap));
    }
  }
}

TEST_CASE("min_prob_two") {
  SUBCASE("tied means split evenly") {
    const Eigen::Vector2d p = min_prob_two(0.3, 0.5, 0.3, 0.2);
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("unit spread reproduces Phi(1)") {
    const Eigen::Vector2d p = min_prob_two(0.0, 0.5, 1.0, 0.5);
    CHECK(p[0] == doctest::Approx(0.84134474606854294859).epsilon(1e-12));
    CHECK(p[0] == doctest::Approx(oracles::normal_cdf(1.0)).epsilon(1e-12));
  }
  SUBCASE("degenerate limits") {
    CHECK(min_prob_two(0.0, 0.0, 1.0, 0.0)[0] == 1.0);
    CHECK(min_prob_two(1.0, 0.0, 0.0, 0.0)[0] == 0.0);
    CHECK(min_prob_two(0.5, 0.0, 0.5, 0.0)[0] == 0.5);
  }
}

TEST_CASE("min_prob reduces to the two-surface closed form") {
  Rng rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    PosteriorAtPoint post = make_post({rng.uniform(-2, 2), rng.uniform(-2, 2)},
                                      {rng.uniform(0, 1), rng.uniform(0, 1)});
    const Vec p = min_prob(post);
    const Eigen::Vector2d q = min_prob_two(post.means[0], post.variances[0],
                                           post.means[1], post.variances[1]);
    CHECK(std::abs(p[0] - q[0]) < 1e-12);
    CHECK(std::abs(p[0] + p[1] - 1.0) < 1e-12);
  }
}

TEST_CASE("min_prob symmetric three-way case") {
  const Vec p = min_prob(make_post({0.0, 0.0, 0.0}, {0.25, 0.25, 0.25}));
  for (int l = 0; l < 3; ++l) {
    CHECK(p[l] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  }
}

TEST_CASE("min_prob tracks a Monte-Carlo oracle for three surfaces") {
  Rng rng(101);
  for (int trial = 0; trial < 5; ++trial) {
    Vec means(3), sds(3);
    for (int l = 0; l < 3; ++l) {
      means[l] = rng.uniform(-1.0, 1.0);
      sds[l] = rng.uniform(0.05, 0.8);
    }
    PosteriorAtPoint post;
    post.means = means;
    post.variances = sds.array().square();
    const Vec p = min_prob(post);
    Rng mc_rng(555 + trial);
    const Vec ref = oracles::mc_min_probs(means, sds, 400000, mc_rng);
    for (int l = 0; l < 3; ++l) {
      CHECK(std::abs(p[l] - ref[l]) < 0.01);
    }
    CHECK(std::abs(p.sum() - 1.0) < 1e-9);  // orthants partition the space
  }
}

TEST_CASE("min_prob beyond three surfaces is a sane approximation") {
  Rng rng(202);
  Vec means(5), sds(5);
  for (int l = 0; l < 5; ++l) {
    means[l] = rng.uniform(-0.5, 0.5);
    sds[l] = rng.uniform(0.1, 0.6);
  }
  PosteriorAtPoint post;
  post.means = means;
  post.variances = sds.array().square();
  const Vec p = min_prob(post);
  Rng mc_rng(303);
  const Vec ref = oracles::mc_min_probs(means, sds, 400000, mc_rng);
  for (int l = 0; l < 5; ++l) {
    CHECK(p[l] >= 0.0);
    CHECK(p[l] <= 1.0);
    CHECK(std::abs(p[l] - ref[l]) < 0.05);
  }
}

TEST_CASE("min_moments_two") {
  SUBCASE("degenerate variances give the plain minimum") {
    const MinMoments m = min_moments_two(0.7, 0.0, 0.2, 0.0);
    CHECK(m.mean == 0.2);
    CHECK(m.second_moment == doctest::Approx(0.04));
  }
  SUBCASE("symmetric standard case equals -1/sqrt(pi)") {
    const MinMoments m = min_moments_two(0.0, 1.0, 0.0, 1.0);
    CHECK(m.mean == doctest::Approx(-0.56418958354775628695).epsilon(1e-12));
  }
  SUBCASE("moments match Monte Carlo within 3 standard errors") {
    Vec means(2), sds(2);
    means << 0.2, 0.7;
    sds << 0.3, 0.1;
    const MinMoments m = min_moments_two(means[0], sds[0] * sds[0], means[1],
                                         sds[1] * sds[1]);
    Rng rng(777);
    const auto ref = oracles::mc_min_moments(means, sds, 1000000, rng);
    CHECK(std::abs(m.mean - ref.mean) < 3.0 * ref.mean_se);
    CHECK(std::abs(m.second_moment - ref.second_moment) < 3.0 * ref.second_se);
  }
  SUBCASE("second moment dominates the squared mean") {
    Rng rng(29);
    for (int trial = 0; trial < 200; ++trial) {
      const MinMoments m =
          min_moments_two(rng.uniform(-2, 2), rng.uniform(0, 2),
                          rng.uniform(-2, 2), rng.uniform(0, 2));
      CHECK(m.second_moment >= m.mean * m.mean - 1e-12);
    }
  }
}

TEST_CASE("min_mean") {
  SUBCASE("degenerate posteriors give the minimum of means") {
    CHECK(min_mean(make_post({0.8, 0.3, 0.5}, {0, 0, 0})) ==
          doctest::Approx(0.3));
  }
  SUBCASE("two surfaces match the closed form") {
    const PosteriorAtPoint post = make_post({0.1, 0.4}, {0.09, 0.04});
    CHECK(min_mean(post) == doctest::Approx(min_moments_two(0.1, 0.09, 0.4, 0.04).mean));
  }
  SUBCASE("three-surface recursion lands near Monte Carlo") {
    Vec means(3), sds(3);
    means << 0.0, 0.2, 0.4;
    sds << 0.25, 0.25, 0.25;
    PosteriorAtPoint post;
    post.means = means;
    post.variances = sds.array().square();
    Rng rng(888);
    const auto ref = oracles::mc_min_moments(means, sds, 1000000, rng);
    CHECK(std::abs(min_mean(post) - ref.mean) < 0.01);
  }
}

TEST_CASE("m_gap") {
  SUBCASE("zero for degenerate posteriors") {
    CHECK(m_gap(make_post({0.8, 0.3}, {0, 0})) == 0.0);
  }
  SUBCASE("symmetric tie with unit variance equals 1/sqrt(pi)") {
    CHECK(m_gap(make_post({0.4, 0.4}, {1.0, 1.0})) ==
          doctest::Approx(0.56418958354775628695).epsilon(1e-12));
  }
  SUBCASE("widely separated surfaces have negligible gap") {
    CHECK(m_gap(make_post({0.0, 100.0}, {1.0, 1.0})) < 1e-10);
  }
  SUBCASE("always nonnegative; exact for two surfaces") {
    Rng rng(31);
    m_gap_clamp_reset();
    for (int trial = 0; trial < 500; ++trial) {
      const double gap = m_gap(make_post({rng.uniform(-2, 2), rng.uniform(-2, 2)},
                                         {rng.uniform(0, 1), rng.uniform(0, 1)}));
      CHECK(gap >= 0.0);
    }
    CHECK(m_gap_clamp_count() == 0);  // L = 2 never needs the clamp
  }
  SUBCASE("inflating the non-minimal surface's sd never shrinks it") {
    Rng rng(37);
    for (int trial = 0; trial < 100; ++trial) {
      const double mu_low = rng.uniform(-1, 0), mu_high = rng.uniform(0, 1);
      const double var_low = rng.uniform(0.01, 1.0);
      double previous = -1.0;
      for (double var_high = 0.05; var_high <= 1.6; var_high += 0.25) {
        const double gap =
            m_gap(make_post({mu_low, mu_high}, {var_low, var_high}));
        CHECK(gap >= previous - 1e-12);
        previous = gap;
      }
    }
  }
}

TEST_CASE("shift and affine invariances") {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const int count = 2 + static_cast<int>(rng.uniform_int(3));
    PosteriorAtPoint post;
    post.means = Vec(count);
    post.variances = Vec(count);
    for (int l = 0; l < count; ++l) {
      post.means[l] = rng.uniform(-1, 1);
      post.variances[l] = rng.uniform(0.01, 1.0);
    }
    const double shift = rng.uniform(-5, 5);
    PosteriorAtPoint shifted = post;
    shifted.means.array() += shift;

    const Vec p0 = min_prob(post), p1 = min_prob(shifted);
    for (int l = 0; l < count; ++l) CHECK(p0[l] == doctest::Approx(p1[l]).epsilon(1e-9));
    CHECK(min_mean(shifted) == doctest::Approx(min_mean(post) + shift).epsilon(1e-9));

    PosteriorAtPoint scaled = post;
    const double slope = rng.uniform(0.1, 3.0);
    scaled.means = slope * post.means.array() + shift;
    CHECK(classify(scaled) == classify(post));
  }
}

TEST_CASE("grid losses") {
  std::vector<PosteriorAtPoint> grid;
  grid.push_back(make_post({0.1, 0.6}, {0, 0}));
  grid.push_back(make_post({0.9, 0.2}, {0, 0}));
  const Vec weights = Vec::Constant(2, 0.5);

  SUBCASE("degenerate posteriors have zero loss and error") {
    CHECK(empirical_loss(grid, weights) == 0.0);
    CHECK(error_probability(grid, weights) == 0.0);
  }
  SUBCASE("true loss vanishes for a perfect classifier") {
    Mat truths(2, 2);
    truths << 0.1, 0.6, 0.9, 0.2;
    CHECK(true_loss({0, 1}, truths, weights) == 0.0);
    // flipping a choice pays the gap at that point
    CHECK(true_loss({1, 1}, truths, weights) == doctest::Approx(0.25));
  }
  SUBCASE("weight validation") {
    CHECK_THROWS_AS(empirical_loss(grid, Vec::Constant(3, 1.0 / 3)),
                    std::invalid_argument);
    CHECK_THROWS_AS(empirical_loss(grid, Vec::Constant(2, 0.4)),
                    std::invalid_argument);
  }
}

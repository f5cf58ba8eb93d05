#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ranksurf/kriging.hpp"
#include "ranksurf/ranking.hpp"
#include "ranksurf/rng.hpp"

namespace ranksurf {

enum class AcqMethod {
  GapSur,       // expected one-step M-gap reduction
  GapUcb,       // -gap + gamma_k * posterior sd
  GapAlc,       // -gap + gamma_k * expected sd decline
  GammaEntUcb,  // posterior entropy + gamma_k * sd
  GammaBvsbUcb, // best-versus-second-best + gamma_k * sd
  GammaBestUcb, // -p_best + gamma_k * sd
  ConcGamma,    // location score + gamma_k * sum of sds; samples all surfaces
  PureMgap,     // x = argmax M-gap, surface = argmax variance
  TwoStep,      // x = argmin gap, surface = argmax sd
  Uniform,      // uniform over candidates x surfaces
  KnownGapUcb,  // GapUcb with the true gaps substituted
  Lhs,          // space-filling: score = posterior sd
};

/// Location criterion used by the Gamma-UCB and concurrent methods.
enum class GammaVariant { Ent, Bvsb, Best, Mgap };

struct AcquisitionSpec {
  AcqMethod method = AcqMethod::GapSur;
  double ucb_scale = 0.0;  // c in gamma_k = c sqrt(log k)
  double epsilon = 0.0;    // epsilon-greedy rate in [0, 1]
  GammaVariant gamma_variant = GammaVariant::Best;

  void validate() const;
};

AcqMethod parse_method(const std::string& name);
std::string method_name(AcqMethod method);
GammaVariant parse_gamma_variant(const std::string& name);
std::string gamma_variant_name(GammaVariant variant);

/// Exploration weight gamma_k = c sqrt(log k); k below 2 is treated as 2.
double gamma_schedule(const AcquisitionSpec& spec, double k);

/// -gap_l(x) + gamma * sd_l(x); higher is better.
double gap_ucb_score(const PosteriorAtPoint& post, int ell, double gamma);

/// Expected reduction of the M-gap at x from one more (batched) observation
/// of surface `ell` with the given observation-noise variance. Means are
/// unchanged by the hypothetical sample; only sd_l(x) shrinks by the
/// noise/variance ratio. Clamped at 0.
double gap_sur_score(const PosteriorAtPoint& post, int ell, double noise_var);

/// Model-based form of gap_sur_score: evaluates the hypothetical variance
/// through the kriging update at x.
double gap_sur_score(const std::vector<KrigingModel>& models, const Vec& x,
                     int ell, double noise_var);

/// -gap_l(x) + gamma * (sd_l(x) - sd_after).
double gap_alc_score(const PosteriorAtPoint& post, int ell, double gamma,
                     double sd_after);

/// Location complexity score: entropy of the min-probabilities, negative
/// best-versus-second-best margin, negative p_best, or the M-gap.
double gamma_score(const PosteriorAtPoint& post, GammaVariant variant);

/// Problem hooks select_pair needs for some methods: the observation-noise
/// variance a new batched sample at (x, ell) would carry (GapSur/GapAlc),
/// and the true surface means (KnownGapUcb).
struct SelectionContext {
  std::function<double(int ell, const Vec& x)> noise_variance;
  std::function<Vec(const Vec& x)> true_means;
};

inline constexpr int kAllSurfaces = -1;

struct Selection {
  Vec location;
  int surface;  // kAllSurfaces when every surface should be sampled
  int candidate_index;
  bool exploratory;  // picked by the epsilon coin
};

/// Greedy argmax of the spec's score over candidates x surfaces, with
/// epsilon-greedy randomization. Ties break to the lowest candidate index,
/// then the lowest surface. Deterministic given (spec, models, candidates,
/// k, rng state).
Selection select_pair(const AcquisitionSpec& spec,
                      const std::vector<KrigingModel>& models,
                      const Mat& candidates, int k, Rng& rng,
                      const SelectionContext& context = {});

}  // namespace ranksurf

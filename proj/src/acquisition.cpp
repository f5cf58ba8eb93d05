#include "ranksurf/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ranksurf {

void AcquisitionSpec::validate() const {
  if (!(ucb_scale >= 0.0)) {
    throw std::invalid_argument("AcquisitionSpec: ucb_scale must be >= 0");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("AcquisitionSpec: epsilon must be in [0, 1]");
  }
}

AcqMethod parse_method(const std::string& name) {
  if (name == "gap_sur") return AcqMethod::GapSur;
  if (name == "gap_ucb") return AcqMethod::GapUcb;
  if (name == "gap_alc") return AcqMethod::GapAlc;
  if (name == "gamma_ent_ucb") return AcqMethod::GammaEntUcb;
  if (name == "gamma_bvsb_ucb") return AcqMethod::GammaBvsbUcb;
  if (name == "gamma_best_ucb") return AcqMethod::GammaBestUcb;
  if (name == "conc_gamma") return AcqMethod::ConcGamma;
  if (name == "pure_mgap") return AcqMethod::PureMgap;
  if (name == "two_step") return AcqMethod::TwoStep;
  if (name == "uniform") return AcqMethod::Uniform;
  if (name == "known_gap_ucb") return AcqMethod::KnownGapUcb;
  if (name == "lhs") return AcqMethod::Lhs;
  throw std::invalid_argument("unknown acquisition method: " + name);
}

std::string method_name(AcqMethod method) {
  switch (method) {
    case AcqMethod::GapSur: return "gap_sur";
    case AcqMethod::GapUcb: return "gap_ucb";
    case AcqMethod::GapAlc: return "gap_alc";
    case AcqMethod::GammaEntUcb: return "gamma_ent_ucb";
    case AcqMethod::GammaBvsbUcb: return "gamma_bvsb_ucb";
    case AcqMethod::GammaBestUcb: return "gamma_best_ucb";
    case AcqMethod::ConcGamma: return "conc_gamma";
    case AcqMethod::PureMgap: return "pure_mgap";
    case AcqMethod::TwoStep: return "two_step";
    case AcqMethod::Uniform: return "uniform";
    case AcqMethod::KnownGapUcb: return "known_gap_ucb";
    case AcqMethod::Lhs: return "lhs";
  }
  throw std::invalid_argument("method_name: bad enum value");
}

GammaVariant parse_gamma_variant(const std::string& name) {
  if (name == "ent") return GammaVariant::Ent;
  if (name == "bvsb") return GammaVariant::Bvsb;
  if (name == "best") return GammaVariant::Best;
  if (name == "mgap") return GammaVariant::Mgap;
  throw std::invalid_argument("unknown gamma variant: " + name);
}

std::string gamma_variant_name(GammaVariant variant) {
  switch (variant) {
    case GammaVariant::Ent: return "ent";
    case GammaVariant::Bvsb: return "bvsb";
    case GammaVariant::Best: return "best";
    case GammaVariant::Mgap: return "mgap";
  }
  throw std::invalid_argument("gamma_variant_name: bad enum value");
}

double gamma_schedule(const AcquisitionSpec& spec, double k) {
  return spec.ucb_scale * std::sqrt(std::log(std::max(k, 2.0)));
}

double gap_ucb_score(const PosteriorAtPoint& post, int ell, double gamma) {
  const GapResult g = gaps(post);
  return -g.per_surface[ell] + gamma * std::sqrt(post.variances[ell]);
}

double gap_sur_score(const PosteriorAtPoint& post, int ell, double noise_var) {
  const double var = post.variances[ell];
  if (var <= 0.0) return 0.0;
  const double current = m_gap(post);
  PosteriorAtPoint after = post;
  after.variances[ell] =
      noise_var + var > 0.0 ? var * noise_var / (noise_var + var) : 0.0;
  return std::max(0.0, current - m_gap(after));
}

double gap_sur_score(const std::vector<KrigingModel>& models, const Vec& x,
                     int ell, double noise_var) {
  const int count = static_cast<int>(models.size());
  PosteriorAtPoint post;
  post.means = Vec(count);
  post.variances = Vec(count);
  for (int l = 0; l < count; ++l) {
    models[static_cast<std::size_t>(l)].posterior_at(x, post.means[l],
                                                     post.variances[l]);
  }
  const double current = m_gap(post);
  PosteriorAtPoint after = post;
  after.variances[ell] =
      models[static_cast<std::size_t>(ell)].variance_after_hypothetical(
          x, noise_var, x);
  return std::max(0.0, current - m_gap(after));
}

double gap_alc_score(const PosteriorAtPoint& post, int ell, double gamma,
                     double sd_after) {
  const GapResult g = gaps(post);
  const double decline = std::sqrt(post.variances[ell]) - sd_after;
  return -g.per_surface[ell] + gamma * decline;
}

double gamma_score(const PosteriorAtPoint& post, GammaVariant variant) {
  if (variant == GammaVariant::Mgap) return m_gap(post);
  const Vec probs = min_prob(post);
  switch (variant) {
    case GammaVariant::Ent: {
      double entropy = 0.0;
      for (Eigen::Index l = 0; l < probs.size(); ++l) {
        if (probs[l] > 0.0) entropy -= probs[l] * std::log(probs[l]);
      }
      return entropy;
    }
    case GammaVariant::Bvsb: {
      const int best = classify(post);
      // surface with the second-lowest posterior mean
      int second = -1;
      for (int l = 0; l < post.count(); ++l) {
        if (l == best) continue;
        if (second < 0 || post.means[l] < post.means[second]) second = l;
      }
      return -(probs[best] - probs[second]);
    }
    case GammaVariant::Best:
      return -probs[classify(post)];
    case GammaVariant::Mgap:
      break;
  }
  throw std::invalid_argument("gamma_score: bad variant");
}

namespace {

double next_noise_variance(const SelectionContext& context, int ell,
                           const Vec& x, const char* method) {
  if (!context.noise_variance) {
    throw std::invalid_argument(std::string(method) +
                                " needs a noise_variance hook");
  }
  return context.noise_variance(ell, x);
}

}  // namespace

Selection select_pair(const AcquisitionSpec& spec,
                      const std::vector<KrigingModel>& models,
                      const Mat& candidates, int k, Rng& rng,
                      const SelectionContext& context) {
  spec.validate();
  const int num_candidates = static_cast<int>(candidates.rows());
  const int count = static_cast<int>(models.size());
  if (num_candidates == 0) {
    throw std::invalid_argument("select_pair: empty candidate set");
  }
  if (count < 2) {
    throw std::invalid_argument("select_pair: need at least 2 surfaces");
  }

  const auto uniform_pick = [&](bool exploratory) {
    const auto idx = rng.uniform_int(
        static_cast<std::uint64_t>(num_candidates) * count);
    const int cand = static_cast<int>(idx / count);
    const int ell = static_cast<int>(idx % count);
    return Selection{candidates.row(cand).transpose(), ell, cand, exploratory};
  };

  if (spec.epsilon > 0.0 && rng.uniform01() < spec.epsilon) {
    return uniform_pick(true);
  }
  if (spec.method == AcqMethod::Uniform) {
    return uniform_pick(false);
  }

  // Posterior summaries of every surface at every candidate.
  Mat means(num_candidates, count), vars(num_candidates, count);
  for (int l = 0; l < count; ++l) {
    const PosteriorBatch post =
        models[static_cast<std::size_t>(l)].posterior(candidates);
    means.col(l) = post.means;
    vars.col(l) = post.variances;
  }
  const auto posterior_at = [&](int cand) {
    PosteriorAtPoint post;
    post.means = means.row(cand).transpose();
    post.variances = vars.row(cand).transpose();
    return post;
  };
  const double gamma = gamma_schedule(spec, k);

  // Hierarchical methods: pick the location first, then the surface.
  if (spec.method == AcqMethod::TwoStep || spec.method == AcqMethod::PureMgap ||
      spec.method == AcqMethod::ConcGamma) {
    int best_cand = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int cand = 0; cand < num_candidates; ++cand) {
      const PosteriorAtPoint post = posterior_at(cand);
      double score = 0.0;
      switch (spec.method) {
        case AcqMethod::TwoStep:
          score = -gaps(post).min_gap;
          break;
        case AcqMethod::PureMgap:
          score = m_gap(post);
          break;
        case AcqMethod::ConcGamma:
          score = gamma_score(post, spec.gamma_variant) +
                  gamma * post.variances.array().sqrt().sum();
          break;
        default:
          break;
      }
      if (score > best_score) {
        best_score = score;
        best_cand = cand;
      }
    }
    const Vec location = candidates.row(best_cand).transpose();
    if (spec.method == AcqMethod::ConcGamma) {
      return {location, kAllSurfaces, best_cand, false};
    }
    int best_ell = 0;  // argmax posterior variance (same argmax as sd)
    for (int l = 1; l < count; ++l) {
      if (vars(best_cand, l) > vars(best_cand, best_ell)) best_ell = l;
    }
    return {location, best_ell, best_cand, false};
  }

  // Joint argmax over candidates x surfaces.
  int best_cand = 0, best_ell = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int cand = 0; cand < num_candidates; ++cand) {
    const PosteriorAtPoint post = posterior_at(cand);
    const Vec location = candidates.row(cand).transpose();
    const GapResult gap = gaps(post);
    double location_score = 0.0;
    if (spec.method == AcqMethod::GammaEntUcb ||
        spec.method == AcqMethod::GammaBvsbUcb ||
        spec.method == AcqMethod::GammaBestUcb) {
      const GammaVariant variant =
          spec.method == AcqMethod::GammaEntUcb    ? GammaVariant::Ent
          : spec.method == AcqMethod::GammaBvsbUcb ? GammaVariant::Bvsb
                                                   : GammaVariant::Best;
      location_score = gamma_score(post, variant);
    }
    Vec true_gaps;
    if (spec.method == AcqMethod::KnownGapUcb) {
      if (!context.true_means) {
        throw std::invalid_argument("known_gap_ucb needs a true_means hook");
      }
      PosteriorAtPoint truth;
      truth.means = context.true_means(location);
      truth.variances = Vec::Zero(count);
      true_gaps = gaps(truth).per_surface;
    }
    for (int l = 0; l < count; ++l) {
      const double sd = std::sqrt(post.variances[l]);
      double score = 0.0;
      switch (spec.method) {
        case AcqMethod::GapSur:
          score = gap_sur_score(
              post, l, next_noise_variance(context, l, location, "gap_sur"));
          break;
        case AcqMethod::GapUcb:
          score = -gap.per_surface[l] + gamma * sd;
          break;
        case AcqMethod::GapAlc: {
          const double noise =
              next_noise_variance(context, l, location, "gap_alc");
          const double var = post.variances[l];
          const double sd_after =
              (noise + var > 0.0) ? std::sqrt(var * noise / (noise + var)) : 0.0;
          score = -gap.per_surface[l] + gamma * (sd - sd_after);
          break;
        }
        case AcqMethod::GammaEntUcb:
        case AcqMethod::GammaBvsbUcb:
        case AcqMethod::GammaBestUcb:
          score = location_score + gamma * sd;
          break;
        case AcqMethod::KnownGapUcb:
          score = -true_gaps[l] + gamma * sd;
          break;
        case AcqMethod::Lhs:
          score = sd;
          break;
        default:
          throw std::invalid_argument("select_pair: unhandled method");
      }
      if (score > best_score) {
        best_score = score;
        best_cand = cand;
        best_ell = l;
      }
    }
  }
  return {candidates.row(best_cand).transpose(), best_ell, best_cand, false};
}

}  // namespace ranksurf

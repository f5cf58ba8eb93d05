#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ranksurf/kernel.hpp"
#include "ranksurf/rng.hpp"

namespace ranksurf {

/// Axis-aligned input box.
struct Box {
  Vec lo, hi;
  int dim() const { return static_cast<int>(lo.size()); }
};

/// One stochastic simulator Y(x) = mu(x) + eps(x). `noise_sd` and
/// `true_mean` are present only when the problem exposes them.
struct Sampler {
  std::function<double(const Vec&, Rng&)> sample;
  std::function<double(const Vec&)> noise_sd;   // may be empty
  std::function<double(const Vec&)> true_mean;  // may be empty
};

/// The L simulators of one ranking problem plus its input space.
struct SamplerFamily {
  std::vector<Sampler> surfaces;
  Box box;
  bool integer_lattice = false;  // inputs restricted to integer coordinates
  std::vector<std::string> names;

  int count() const { return static_cast<int>(surfaces.size()); }
  bool has_truth() const;
  bool has_known_noise() const;
  /// True means of all surfaces at x (requires has_truth()).
  Vec true_means(const Vec& x) const;
};

/// 1-D pair on [0,1]: an oscillatory surface (noise sd 0.2) against the
/// constant 0.5 (noise sd 0.1). Truths and noise levels are exposed.
/// Samples outside [0,1] throw std::invalid_argument.
Sampler toy1d(int ell);
SamplerFamily toy1d_family();

/// Five 2-D surfaces on [-2,2]^2, all with noise sd 0.5.
Sampler synth2d(int ell);
SamplerFamily synth2d_family();

/// SIR epidemic parameters. Rates are per unit time; intervention scales the
/// contact rate down (beta_action < beta_no_action) at a per-susceptible
/// price of intervention_cost.
struct SirParams {
  int population = 2000;         // M
  double beta_no_action = 0.75;  // contact rate, no intervention
  double beta_action = 0.5;      // contact rate under intervention
  double recovery = 0.5;         // gamma
  double intervention_cost = 0.25;

  void validate() const;
};

enum class SirRegime { NoAction, Action };

struct SirOutcome {
  int final_susceptibles;
  long event_count;
};

/// Exact Gillespie simulation of the SIR jump chain from (s0, i0) until the
/// infected pool empties. From state (S, I): infection fires at rate
/// beta*S*I/M and moves (S,I) -> (S-1, I+1); recovery fires at rate gamma*I
/// and moves (S,I) -> (S, I-1). Two uniforms are consumed per event (sojourn
/// and channel); sojourn times are not accumulated since costs depend only
/// on the final state.
SirOutcome sir_trajectory(const SirParams& params, SirRegime regime, int s0,
                          int i0, Rng& rng);

/// Pathwise outbreak cost at x = (s, i): the number of susceptibles who
/// ever got infected, plus intervention_cost * s under the action regime.
/// Points must be on the integer lattice inside `domain`.
Sampler sir_cost_sampler(const SirParams& params, SirRegime regime,
                         const Box& domain);
SamplerFamily sir_family(const SirParams& params, const Box& domain);

struct BatchResult {
  double mean;              // ybar
  double variance_of_mean;  // sigma_tilde^2 / r
};

/// r >= 2 repeated draws at one site; returns the sample mean and the
/// variance of that mean (unbiased sample variance / r).
BatchResult batch_sample(const Sampler& sampler, const Vec& x, int r, Rng& rng);

}  // namespace ranksurf

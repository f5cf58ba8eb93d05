#include "ranksurf/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace ranksurf {

bool SamplerFamily::has_truth() const {
  for (const Sampler& s : surfaces) {
    if (!s.true_mean) return false;
  }
  return !surfaces.empty();
}

bool SamplerFamily::has_known_noise() const {
  for (const Sampler& s : surfaces) {
    if (!s.noise_sd) return false;
  }
  return !surfaces.empty();
}

Vec SamplerFamily::true_means(const Vec& x) const {
  Vec out(count());
  for (int l = 0; l < count(); ++l) out[l] = surfaces[l].true_mean(x);
  return out;
}

namespace {

void check_in_box(const Vec& x, const Box& box, const char* where) {
  if (x.size() != box.lo.size()) {
    throw std::invalid_argument(std::string(where) + ": dimension mismatch");
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < box.lo[i] || x[i] > box.hi[i]) {
      throw std::invalid_argument(std::string(where) + ": point outside domain");
    }
  }
}

double toy1d_mean1(double x) {
  return 0.625 * (std::sin(10.0 * x) / (1.0 + x) +
                  2.0 * x * x * x * std::cos(5.0 * x) + 0.841);
}

Box unit_interval() {
  Box box;
  box.lo = Vec::Constant(1, 0.0);
  box.hi = Vec::Constant(1, 1.0);
  return box;
}

double synth2d_mean(int ell, double x1, double x2) {
  switch (ell) {
    case 0: return 2.0 - x1 * x1 - 0.5 * x2 * x2;
    case 1: return 2.0 * (x1 - 1.0) * (x1 - 1.0) + 2.0 * x2 * x2 - 2.0;
    case 2: return 2.0 * std::sin(2.0 * x1) + 2.0;
    case 3: return 8.0 * (x1 - 1.0) * (x1 - 1.0) + 8.0 * x2 * x2 - 3.0;
    case 4: return 0.5 * (x1 + 3.0) * (x1 + 3.0) + 16.0 * x2 * x2 - 6.0;
    default: throw std::invalid_argument("synth2d: surface index out of range");
  }
}

Box square2()  {
  Box box;
  box.lo = Vec::Constant(2, -2.0);
  box.hi = Vec::Constant(2, 2.0);
  return box;
}

}  // namespace

Sampler toy1d(int ell) {
  if (ell != 0 && ell != 1) {
    throw std::invalid_argument("toy1d: surface index must be 0 or 1");
  }
  const Box box = unit_interval();
  const double sd = (ell == 0) ? 0.2 : 0.1;
  Sampler s;
  s.true_mean = [box, ell](const Vec& x) {
    check_in_box(x, box, "toy1d");
    return ell == 0 ? toy1d_mean1(x[0]) : 0.5;
  };
  s.noise_sd = [sd](const Vec&) { return sd; };
  s.sample = [box, ell, sd](const Vec& x, Rng& rng) {
    check_in_box(x, box, "toy1d");
    const double mean = ell == 0 ? toy1d_mean1(x[0]) : 0.5;
    return mean + sd * rng.normal();
  };
  return s;
}

SamplerFamily toy1d_family() {
  SamplerFamily family;
  family.surfaces = {toy1d(0), toy1d(1)};
  family.box = unit_interval();
  family.names = {"surface1", "surface2"};
  return family;
}

Sampler synth2d(int ell) {
  if (ell < 0 || ell > 4) {
    throw std::invalid_argument("synth2d: surface index out of range");
  }
  const Box box = square2();
  Sampler s;
  s.true_mean = [box, ell](const Vec& x) {
    check_in_box(x, box, "synth2d");
    return synth2d_mean(ell, x[0], x[1]);
  };
  s.noise_sd = [](const Vec&) { return 0.5; };
  s.sample = [box, ell](const Vec& x, Rng& rng) {
    check_in_box(x, box, "synth2d");
    return synth2d_mean(ell, x[0], x[1]) + 0.5 * rng.normal();
  };
  return s;
}

SamplerFamily synth2d_family() {
  SamplerFamily family;
  for (int l = 0; l < 5; ++l) family.surfaces.push_back(synth2d(l));
  family.box = square2();
  family.names = {"surface1", "surface2", "surface3", "surface4", "surface5"};
  return family;
}

void SirParams::validate() const {
  if (population <= 0) throw std::invalid_argument("SirParams: population <= 0");
  if (!(beta_no_action > 0.0) || !(beta_action > 0.0) || !(recovery > 0.0)) {
    throw std::invalid_argument("SirParams: rates must be > 0");
  }
  if (!(beta_action < beta_no_action)) {
    throw std::invalid_argument(
        "SirParams: beta_action must be < beta_no_action");
  }
  if (intervention_cost < 0.0) {
    throw std::invalid_argument("SirParams: negative intervention cost");
  }
}

SirOutcome sir_trajectory(const SirParams& params, SirRegime regime, int s0,
                          int i0, Rng& rng) {
  params.validate();
  if (s0 < 0 || i0 < 0 || s0 + i0 > params.population) {
    throw std::invalid_argument("sir_trajectory: invalid initial state");
  }
  const double beta =
      regime == SirRegime::Action ? params.beta_action : params.beta_no_action;
  const double m = static_cast<double>(params.population);
  int susceptible = s0;
  int infected = i0;
  long events = 0;
  while (infected > 0) {
    const double infection_rate = beta * susceptible * infected / m;
    const double recovery_rate = params.recovery * infected;
    const double total = infection_rate + recovery_rate;
    rng.exponential(total);  // sojourn; unused, costs depend on S_T only
    if (rng.uniform01() * total < infection_rate) {
      --susceptible;
      ++infected;
    } else {
      --infected;
    }
    ++events;
  }
  return {susceptible, events};
}

Sampler sir_cost_sampler(const SirParams& params, SirRegime regime,
                         const Box& domain) {
  params.validate();
  if (domain.dim() != 2) {
    throw std::invalid_argument("sir_cost_sampler: domain must be 2-D (s, i)");
  }
  Sampler sampler;
  sampler.sample = [params, regime, domain](const Vec& x, Rng& rng) {
    check_in_box(x, domain, "sir_cost_sampler");
    const double s_round = std::round(x[0]);
    const double i_round = std::round(x[1]);
    if (x[0] != s_round || x[1] != i_round) {
      throw std::invalid_argument("sir_cost_sampler: point not on the lattice");
    }
    const int s0 = static_cast<int>(s_round);
    const int i0 = static_cast<int>(i_round);
    const SirOutcome outcome = sir_trajectory(params, regime, s0, i0, rng);
    double cost = static_cast<double>(s0 - outcome.final_susceptibles);
    if (regime == SirRegime::Action) cost += params.intervention_cost * s0;
    return cost;
  };
  return sampler;
}

SamplerFamily sir_family(const SirParams& params, const Box& domain) {
  SamplerFamily family;
  family.surfaces = {sir_cost_sampler(params, SirRegime::NoAction, domain),
                     sir_cost_sampler(params, SirRegime::Action, domain)};
  family.box = domain;
  family.integer_lattice = true;
  family.names = {"no_action", "action"};
  return family;
}

BatchResult batch_sample(const Sampler& sampler, const Vec& x, int r,
                         Rng& rng) {
  if (r < 2) {
    throw std::invalid_argument("batch_sample: batch size must be >= 2");
  }
  double sum = 0.0;
  std::vector<double> draws(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) {
    draws[static_cast<std::size_t>(i)] = sampler.sample(x, rng);
    sum += draws[static_cast<std::size_t>(i)];
  }
  const double mean = sum / r;
  double ss = 0.0;
  for (double d : draws) ss += (d - mean) * (d - mean);
  const double sample_var = ss / (r - 1);
  return {mean, sample_var / r};
}

}  // namespace ranksurf

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ranksurf/acquisition.hpp"
#include "ranksurf/fit.hpp"
#include "ranksurf/kriging.hpp"
#include "ranksurf/problems.hpp"

namespace ranksurf {

/// One (possibly batched) design entry.
struct DesignRecord {
  Vec location;
  int surface;
  double sample_mean;              // ybar over the batch
  double noise_variance_estimate;  // variance of that mean
  int batch_size;
  int step;  // running record count at insertion (1-based)
};

struct Design {
  std::vector<DesignRecord> records;
  std::vector<int> per_surface_counts;

  int size() const { return static_cast<int>(records.size()); }
  void append(DesignRecord record);
};

enum class RefitSchedule { Never, Doubling };
enum class NoiseMode { Known, BatchEstimated };
enum class InitDesign { Lhs, Lattice };

/// Per-surface kernels: either fixed specs or fitted from data (at
/// initialization and, under the doubling schedule, whenever a surface's
/// record count reaches a power of two).
struct KernelPolicy {
  bool fit = false;
  std::vector<KernelSpec> fixed;
  FitOptions fit_options;
};

struct DesignerConfig {
  int initial_size = 10;      // K0
  int budget = 100;           // K (total records)
  int candidate_count = 100;  // fresh LHS candidates per step
  int batch_size = 1;         // r samples per chosen site
  AcquisitionSpec acquisition;
  RefitSchedule refit_schedule = RefitSchedule::Never;
  NoiseMode noise_mode = NoiseMode::Known;
  InitDesign init_design = InitDesign::Lhs;
  double stop_cost = 0.0;  // 0 disables the stopping rule
  std::uint64_t seed = 0;
  KernelPolicy kernels;

  void validate(const SamplerFamily& family) const;
};

/// Plain Latin hypercube sample: `count` strata per axis, one uniform point
/// per stratum, strata permuted independently per axis. A zero-width axis
/// collapses to its single coordinate.
Mat lhs_candidates(const Box& box, int count, Rng& rng);

struct DesignerState {
  Design design;
  std::vector<KrigingModel> models;
  Rng candidate_rng, selection_rng, sampler_rng;

  DesignerState(std::uint64_t seed)
      : candidate_rng(seed, 1), selection_rng(seed, 2), sampler_rng(seed, 3) {}
};

/// LHS (or lattice) initial design, round-robin across surfaces, sampled and
/// fitted per the config.
DesignerState initialize(const DesignerConfig& config,
                         const SamplerFamily& family);

/// One acquisition step: fresh candidates, select_pair, batch-sample the
/// chosen pair (or all surfaces under the concurrent method), update the
/// models incrementally, and refit on the doubling schedule.
void step(DesignerState& state, const DesignerConfig& config,
          const SamplerFamily& family);

struct TraceRow {
  int step;  // design size after this row's update
  double empirical_loss;
  double error_prob;
  std::optional<double> true_loss;
};

/// Fires when the 5-wide moving average of EL_k + stop_cost * k has
/// increased for 3 consecutive trace rows. stop_cost = 0 never fires.
bool stop_rule(const std::vector<TraceRow>& trace, double stop_cost);

struct TestGrid {
  Mat points;   // G x d
  Vec weights;  // sums to 1
};

struct RunReport {
  Design design;
  std::vector<TraceRow> trace;
  std::vector<int> classifier_on_grid;  // final, 0-based surface indices
  Vec m_gap_on_grid;
  Vec p_best_on_grid;
  std::vector<KrigingModel> models;
  bool stopped_early = false;
};

/// Full sequential run: initialize, then step until the budget (or the
/// stopping rule) while tracing empirical loss, error probability and — when
/// the problem knows its true means — true loss on the test grid.
RunReport run(const DesignerConfig& config, const SamplerFamily& family,
              const TestGrid& grid);

/// Observation-noise variance a new batch at (x, ell) is expected to carry;
/// known noise uses sigma^2(x)/r, estimated noise looks up the nearest
/// design site of that surface (falling back to the surface average).
double expected_noise_variance(const DesignerConfig& config,
                               const SamplerFamily& family,
                               const Design& design,
                               const std::vector<KrigingModel>& models, int ell,
                               const Vec& x);

}  // namespace ranksurf

#pragma once

#include <vector>

#include "sgm/estimator.hpp"
#include "sgm/rng.hpp"
#include "sgm/types.hpp"

namespace sgm {

struct StabilityConfig {
  int replicates = 50;
  double threshold = 0.9;     // edge keep frequency
  int mean_block_len = 0;     // 0 -> ceil(sqrt(n))
  CombinationRule rule = CombinationRule::And;
  LassoConfig solver;
  std::uint64_t seed = 0;
  int threads = 0;
};

struct StabilityProfile {
  Eigen::MatrixXd freq;  // p x p symmetric, zero diagonal, entries in [0,1]
  int replicates = 0;
  int failures = 0;      // replicates that errored; they count as all-edges-absent
};

// Resample n rows by concatenating circular blocks: geometric lengths with the
// given mean, uniform random starts, wrapping past the last row; truncated to
// exactly n rows. mean_block_len == 1 degenerates to iid row resampling.
Dataset stationary_block_bootstrap(const Dataset& data, int mean_block_len, CounterRng& rng);

// Edge selection frequencies across bootstrap refits at fixed (nu, lambda).
// Replicate r is keyed by derive(seed, r), so results are schedule-independent.
StabilityProfile edge_stability(const Dataset& data, ShapeParam nu, double lambda,
                                const StabilityConfig& cfg);

// Edges at or above the threshold; thresholds nest (higher threshold -> subgraph).
Graph select_stable_graph(const StabilityProfile& profile, double threshold);

struct StabilitySelection {
  int nu = 0;
  double lambda = 0.0;
  Graph graph{1};
  StabilityProfile profile;                   // the winning grid point's profile
  std::vector<StabilityProfile> all_profiles; // nu-major, lambda-minor grid order
};

// Grid search maximizing the stable-edge count at cfg.threshold; ties prefer the
// larger penalty, then the smaller tail exponent. Grid point (i,j) reseeds as
// derive(derive(seed, i), j), independent of evaluation order.
StabilitySelection stability_tune(const Dataset& data, const std::vector<int>& nu_grid,
                                  const std::vector<double>& lambda_grid,
                                  const StabilityConfig& cfg);

}  // namespace sgm

#pragma once

#include "sgm/core.hpp"
#include "sgm/rng.hpp"
#include "sgm/types.hpp"

namespace sgm {

// Order in which a sweep visits the nodes. Systematic always scans 0..p-1, so
// a recorded row holds each node drawn against the pre-sweep values of the
// nodes visited after it — for shape 2 that recording is an exact draw from
// the implied Gaussian, but for higher shapes it leaves each node pair's
// relation strongest in the lower-to-higher direction. RandomPermutation
// reshuffles the visiting order every sweep, which symmetrizes that pattern
// across rows at the cost of mixing the two directions within every row.
enum class ScanOrder { Systematic, RandomPermutation };

struct GibbsConfig {
  int burn_in = 500;
  int thinning = 2;       // record every thinning-th sweep after burn-in
  std::uint64_t seed = 0;
  std::uint64_t chain = 0;  // stream id; distinct chains give independent runs
  ScanOrder scan = ScanOrder::Systematic;
};

// One draw from the standard density exp(-|x|^nu)/(2*Gamma((nu+1)/nu)):
// signed power of a gamma variate, exact (no approximation beyond the RNG).
double sample_standard_subbotin(ShapeParam nu, CounterRng& rng);

// Gibbs sampler over the node conditionals. Every variate is keyed by
// (seed, chain, sweep, node) — not by visit position — so output is
// bit-reproducible and independent of any surrounding evaluation order.
// Errors if the model is not normalizable.
Dataset gibbs_sample(const ParamMatrix& theta, ShapeParam nu, int n, const GibbsConfig& config = {});

}  // namespace sgm

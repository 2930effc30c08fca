#pragma once

#include <string>

#include "sgm/rng.hpp"
#include "sgm/sampler.hpp"
#include "sgm/types.hpp"

namespace sgm {

enum class GraphKind { SmallWorldCliques, Chain, ErdosRenyi };

struct GraphSpec {
  GraphKind kind = GraphKind::SmallWorldCliques;
  int p = 30;
  int cliques = 5;            // SmallWorldCliques: number of near-equal cliques
  double rewire_prob = 0.1;   // SmallWorldCliques: per-edge rewiring probability
  double edge_prob = 0.1;     // ErdosRenyi
};

enum class SignScheme { AllPositive, RandomSign };

struct ThetaSpec {
  double magnitude = 0.3;
  SignScheme signs = SignScheme::RandomSign;
  double pd_margin = 0.05;
};

// Clique/chain/random topologies; rewiring moves one endpoint of a clique edge to
// a uniformly chosen non-neighbor and preserves the edge count.
Graph make_graph(const GraphSpec& spec, std::uint64_t seed);

// Unit-diagonal interaction matrix supported exactly on the graph: +-magnitude on
// edges, then (if the smallest eigenvalue is <= pd_margin) a diagonal lift rescaled
// back to unit diagonal. Errors if the repair leaves couplings below 1e-4.
ParamMatrix make_theta(const Graph& graph, const ThetaSpec& spec, std::uint64_t seed = 0);

// Model samples via the Gibbs sampler (burn-in 500, thinning 2).
Dataset gen_subbotin(const ParamMatrix& theta, ShapeParam nu, int n, std::uint64_t seed);

struct BlockMaximaSpec {
  int n_blocks = 500;
  int block_size = 10;
  double gumbel_mean = 5.0;   // mean of the per-block extreme (location = mean - Euler gamma)
  double filler_corr = 0.1;   // equicorrelation of the sub-extreme filler rows
};

// Latent Gaussian with precision theta -> per-column Gumbel quantile transform:
// each block holds one extreme per column at a uniform position (placement drawn
// per column), remaining cells strictly below that column's block extreme.
// Output has n_blocks * block_size rows; the truth graph is theta's support.
Dataset gen_block_maxima(const ParamMatrix& theta, const BlockMaximaSpec& spec, std::uint64_t seed);

struct PotSpec {
  int n = 4000;                        // rows = time units
  double threshold = 10.0;
  double decay = 1.0;                  // exponential kernel rate
  double branching = 0.5;              // spectral radius of the excitation matrix (< 1)
  double extremes_per_row = 1.0 / 400; // stationary event rate per node
  double filler_corr = 0.1;
};

// Mutually exciting events (exponential-kernel Hawkes, cross-excitation on truth
// edges only, thinning simulation). An event at time t in node j writes
// threshold + positive-Gumbel excess into row floor(t); background cells are weakly
// correlated Gaussians truncated below the threshold.
Dataset gen_pot(const Graph& truth, const PotSpec& spec, std::uint64_t seed);

enum class ScenarioKind { Subbotin, BlockMaxima, Pot };

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::Subbotin;
  GraphSpec graph;
  ThetaSpec theta;
  int nu_true = 8;   // Subbotin scenario
  int n = 2000;      // Subbotin scenario rows
  BlockMaximaSpec block;
  PotSpec pot;
};

struct GeneratedData {
  Graph truth{1};
  Dataset data;
};

std::string scenario_name(ScenarioKind kind);
GeneratedData generate_scenario(const ScenarioSpec& spec, std::uint64_t seed);

}  // namespace sgm

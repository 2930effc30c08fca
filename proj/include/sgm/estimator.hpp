#pragma once

#include <utility>
#include <vector>

#include "sgm/solver.hpp"
#include "sgm/types.hpp"

namespace sgm {

enum class CombinationRule { And, Or };

struct NeighborhoodFit {
  int node = 0;
  Eigen::VectorXd coef;  // length p, coef[node] == 0
  FitResult fit;
};

// Penalized regression of column `node` on the remaining columns. Expects
// standardized data (fit_graph standardizes for you).
NeighborhoodFit fit_neighborhood(const Dataset& std_data, int node, ShapeParam nu, double lambda,
                                 const LassoConfig& cfg = {});

// Symmetrize the node-wise supports: And keeps an edge when both directions are
// active, Or when either is. Coefficients below zero_tol count as absent, so the
// And graph is always a subgraph of the Or graph.
Graph assemble_graph(const std::vector<NeighborhoodFit>& fits, CombinationRule rule,
                     double zero_tol = 1e-7);

// Standardize, fit all neighborhoods (in parallel), symmetrize. Deterministic:
// per-node work is independent of schedule.
Graph fit_graph(const Dataset& data, ShapeParam nu, double lambda,
                CombinationRule rule = CombinationRule::And, const LassoConfig& cfg = {},
                int threads = 0);

// Penalty grid shared by all neighborhoods: starts at the largest node-wise
// lambda_max, so the first grid point always yields the empty graph.
double graph_lambda_max(const Dataset& std_data, ShapeParam nu);

// (lambda, edge count) along the grid, warm-started per node. Counts need not be
// monotone; they are reported as computed.
std::vector<std::pair<double, int>> edge_path(const Dataset& data, ShapeParam nu,
                                              const std::vector<double>& lambdas,
                                              CombinationRule rule = CombinationRule::And,
                                              const LassoConfig& cfg = {}, int threads = 0);

struct OracleSelection {
  double lambda = 0.0;
  Graph graph{1};
};

// Index of the best (lambda, count) candidate: closest count to target, ties
// toward fewer edges, then larger lambda. Exposed for direct testing.
int oracle_pick(const std::vector<std::pair<double, int>>& lambda_counts, int target_edges);

// Scan the default 50-point grid (3 decades below the graph lambda_max), then
// refine by up to 6 log-scale bisections inside the bracketing interval. Returns
// the best candidate under the oracle_pick ordering.
OracleSelection oracle_tune(const Dataset& data, ShapeParam nu, int target_edges,
                            CombinationRule rule = CombinationRule::And,
                            const LassoConfig& cfg = {}, int threads = 0);

}  // namespace sgm

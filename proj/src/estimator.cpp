#include "sgm/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "sgm/core.hpp"
#include "sgm/parallel.hpp"

namespace sgm {

namespace {

// design = data without column `node`, response = column `node`
void split_node(const Eigen::MatrixXd& v, int node, Eigen::MatrixXd& X, Eigen::VectorXd& y) {
  const int n = static_cast<int>(v.rows()), p = static_cast<int>(v.cols());
  X.resize(n, p - 1);
  if (node > 0) X.leftCols(node) = v.leftCols(node);
  if (node < p - 1) X.rightCols(p - 1 - node) = v.rightCols(p - 1 - node);
  y = v.col(node);
}

Eigen::VectorXd embed(const Eigen::VectorXd& beta, int node) {
  Eigen::VectorXd full(beta.size() + 1);
  full.head(node) = beta.head(node);
  full[node] = 0.0;
  full.tail(beta.size() - node) = beta.tail(beta.size() - node);
  return full;
}

Graph graph_from_coefs(const std::vector<Eigen::VectorXd>& coef, CombinationRule rule, double zero_tol) {
  const int p = static_cast<int>(coef.size());
  Graph g(p);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      const bool ij = std::abs(coef[i][j]) > zero_tol;
      const bool ji = std::abs(coef[j][i]) > zero_tol;
      const bool keep = rule == CombinationRule::And ? (ij && ji) : (ij || ji);
      if (keep) g.add_edge(i, j);
    }
  return g;
}

// per-node warm-started coefficient paths on an already-standardized dataset
std::vector<std::vector<Eigen::VectorXd>> node_paths(const Dataset& std_data, ShapeParam nu,
                                                     const std::vector<double>& grid,
                                                     const LassoConfig& cfg, int threads) {
  const int p = std_data.p();
  std::vector<std::vector<Eigen::VectorXd>> coefs(p);
  parallel_for(p, threads, [&](int node) {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    split_node(std_data.values, node, X, y);
    auto fits = path(X, y, nu, grid, cfg);
    coefs[node].reserve(fits.size());
    for (auto& f : fits) coefs[node].push_back(embed(f.beta, node));
  });
  return coefs;
}

}  // namespace

NeighborhoodFit fit_neighborhood(const Dataset& std_data, int node, ShapeParam nu, double lambda,
                                 const LassoConfig& cfg) {
  const int p = std_data.p();
  if (p < 2) fail("invalid_argument", "need at least two variables");
  if (node < 0 || node >= p) fail("invalid_argument", "node index out of range");
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  split_node(std_data.values, node, X, y);
  NeighborhoodFit out;
  out.node = node;
  out.fit = fit(X, y, nu, lambda, cfg);
  out.coef = embed(out.fit.beta, node);
  return out;
}

Graph assemble_graph(const std::vector<NeighborhoodFit>& fits, CombinationRule rule, double zero_tol) {
  if (fits.empty()) fail("invalid_argument", "no neighborhood fits given");
  const int p = static_cast<int>(fits.size());
  std::vector<Eigen::VectorXd> coef(p);
  std::vector<bool> seen(p, false);
  for (auto& f : fits) {
    if (f.node < 0 || f.node >= p || seen[f.node])
      fail("invalid_argument", "neighborhood fits must cover each node exactly once");
    if (f.coef.size() != p) fail("dimension_mismatch", "neighborhood coefficient length mismatch");
    seen[f.node] = true;
    coef[f.node] = f.coef;
  }
  return graph_from_coefs(coef, rule, zero_tol);
}

Graph fit_graph(const Dataset& data, ShapeParam nu, double lambda, CombinationRule rule,
                const LassoConfig& cfg, int threads) {
  const Dataset std_data = standardize(data);
  const int p = std_data.p();
  if (p < 2) fail("invalid_argument", "need at least two variables");
  std::vector<Eigen::VectorXd> coef(p);
  parallel_for(p, threads, [&](int node) {
    coef[node] = fit_neighborhood(std_data, node, nu, lambda, cfg).coef;
  });
  return graph_from_coefs(coef, rule, 1e-7);
}

double graph_lambda_max(const Dataset& std_data, ShapeParam nu) {
  const int p = std_data.p();
  if (p < 2) fail("invalid_argument", "need at least two variables");
  double lmax = 0.0;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  for (int node = 0; node < p; ++node) {
    split_node(std_data.values, node, X, y);
    lmax = std::max(lmax, lambda_max(X, y, nu));
  }
  return lmax;
}

std::vector<std::pair<double, int>> edge_path(const Dataset& data, ShapeParam nu,
                                              const std::vector<double>& lambdas,
                                              CombinationRule rule, const LassoConfig& cfg,
                                              int threads) {
  const Dataset std_data = standardize(data);
  auto coefs = node_paths(std_data, nu, lambdas, cfg, threads);
  const int p = std_data.p();
  std::vector<std::pair<double, int>> out;
  out.reserve(lambdas.size());
  std::vector<Eigen::VectorXd> slice(p);
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    for (int i = 0; i < p; ++i) slice[i] = coefs[i][k];
    out.emplace_back(lambdas[k], graph_from_coefs(slice, rule, 1e-7).edge_count());
  }
  return out;
}

int oracle_pick(const std::vector<std::pair<double, int>>& lambda_counts, int target_edges) {
  if (lambda_counts.empty()) fail("invalid_argument", "no candidates to pick from");
  int best = 0;
  auto key = [&](int k) {
    return std::make_tuple(std::abs(lambda_counts[k].second - target_edges),
                           lambda_counts[k].second, -lambda_counts[k].first);
  };
  for (int k = 1; k < static_cast<int>(lambda_counts.size()); ++k)
    if (key(k) < key(best)) best = k;
  return best;
}

OracleSelection oracle_tune(const Dataset& data, ShapeParam nu, int target_edges,
                            CombinationRule rule, const LassoConfig& cfg, int threads) {
  if (target_edges < 0) fail("invalid_argument", "target edge count must be non-negative");
  const Dataset std_data = standardize(data);
  const int p = std_data.p();
  const auto grid = default_lambda_grid(graph_lambda_max(std_data, nu));
  auto coefs = node_paths(std_data, nu, grid, cfg, threads);

  struct Candidate { double lambda; int count; Graph graph; };
  std::vector<Candidate> cands;
  cands.reserve(grid.size() + 6);
  std::vector<Eigen::VectorXd> slice(p);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (int i = 0; i < p; ++i) slice[i] = coefs[i][k];
    Graph g = graph_from_coefs(slice, rule, 1e-7);
    cands.push_back({grid[k], g.edge_count(), std::move(g)});
  }

  // bracketing pair (descending lambda) with the target strictly between the counts
  int bracket = -1;
  for (std::size_t k = 0; k + 1 < cands.size(); ++k)
    if (cands[k].count < target_edges && target_edges < cands[k + 1].count) {
      bracket = static_cast<int>(k);
      break;
    }

  bool exact = false;
  for (auto& c : cands) exact = exact || c.count == target_edges;

  if (!exact && bracket >= 0) {
    double hi = cands[bracket].lambda, lo = cands[bracket + 1].lambda;
    // warm starts travel from the sparse (large-lambda) side
    std::vector<Eigen::VectorXd> warm(p);
    for (int i = 0; i < p; ++i) warm[i] = coefs[i][bracket];
    for (int iter = 0; iter < 6; ++iter) {
      const double mid = std::sqrt(hi * lo);  // log-scale midpoint: the grid is log-spaced
      std::vector<Eigen::VectorXd> mid_coef(p);
      parallel_for(p, threads, [&](int node) {
        Eigen::MatrixXd X;
        Eigen::VectorXd y;
        split_node(std_data.values, node, X, y);
        Eigen::VectorXd w(p - 1);
        w.head(node) = warm[node].head(node);
        w.tail(p - 1 - node) = warm[node].tail(p - 1 - node);
        mid_coef[node] = embed(fit(X, y, nu, mid, cfg, &w).beta, node);
      });
      Graph g = graph_from_coefs(mid_coef, rule, 1e-7);
      const int c = g.edge_count();
      cands.push_back({mid, c, std::move(g)});
      if (c == target_edges) break;
      if (c < target_edges) {
        hi = mid;
        warm = std::move(mid_coef);
      } else {
        lo = mid;
      }
    }
  }

  std::vector<std::pair<double, int>> pairs;
  pairs.reserve(cands.size());
  for (auto& c : cands) pairs.emplace_back(c.lambda, c.count);
  const int best = oracle_pick(pairs, target_edges);
  return {cands[best].lambda, cands[best].graph};
}

}  // namespace sgm

#pragma once

#include <vector>

#include "sgm/estimator.hpp"
#include "sgm/types.hpp"

namespace sgm {

// Gaussian neighborhood selection: exactly the graph fit with tail exponent 2.
Graph gaussian_ns(const Dataset& data, double lambda, CombinationRule rule = CombinationRule::And,
                  const LassoConfig& cfg = {}, int threads = 0);

// Tilted absolute ("check") loss smoothed by a quadratic of half-width h around
// the kink; converges uniformly to the exact loss as h -> 0 (max gap h/4).
double smoothed_check_loss(double u, double tau, double h);
double smoothed_check_derivative(double u, double tau, double h);

NeighborhoodFit quantile_neighborhood(const Dataset& std_data, int node, double tau, double lambda,
                                      double h = 1e-3, const LassoConfig& cfg = {});

Graph quantile_graph(const Dataset& data, double tau, double lambda, double h = 1e-3,
                     CombinationRule rule = CombinationRule::And, const LassoConfig& cfg = {},
                     int threads = 0);

// Smallest penalty with an all-zero solution for one quantile regression.
double quantile_lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double tau,
                           double h = 1e-3);

// Largest node-wise quantile_lambda_max over a standardized dataset.
double quantile_graph_lambda_max(const Dataset& std_data, double tau, double h = 1e-3);

// (lambda, edge count) along a decreasing grid, warm-started per node; also
// returns the graphs so callers can tune without refitting.
std::vector<std::pair<double, int>> quantile_edge_path(const Dataset& data, double tau,
                                                       const std::vector<double>& lambdas,
                                                       double h, CombinationRule rule,
                                                       const LassoConfig& cfg, int threads,
                                                       std::vector<Graph>* graphs_out = nullptr);

struct GevParams {
  double location = 0.0;
  double scale = 1.0;
  double shape = 0.0;  // Gumbel limit taken for |shape| < 1e-4
};

double gev_log_pdf(double x, const GevParams& p);
double gev_cdf(double x, const GevParams& p);
double gev_quantile(double u, const GevParams& p);

// Maximum likelihood via derivative-free simplex search started from
// probability-weighted-moment estimates. Errors on constant samples, samples
// smaller than 20, or failure to converge within 1e4 evaluations.
GevParams gev_fit(const std::vector<double>& sample);

// Column-wise maxima over consecutive blocks of block_size rows (remainder dropped).
Eigen::MatrixXd block_maxima(const Dataset& data, int block_size);

// Block maxima -> per-column GEV fit -> CDF (clipped to [1e-10, 1-1e-10]) -> normal scores.
Dataset copula_transform(const Dataset& data, int block_size);

// Gaussian neighborhood selection on the copula-transformed block maxima.
Graph copula_blockmax_graph(const Dataset& data, int block_size, double lambda,
                            CombinationRule rule = CombinationRule::And,
                            const LassoConfig& cfg = {}, int threads = 0);

}  // namespace sgm

#include "sgm/solver.hpp"

#include <algorithm>
#include <cmath>

namespace sgm {

double objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                 ShapeParam nu, double lambda) {
  PowerLoss loss(X, y, nu);
  if (beta.size() != X.cols()) fail("dimension_mismatch", "coefficient vector has wrong length");
  loss.prepare(beta);
  return loss.value() + lambda * beta.lpNorm<1>();
}

Eigen::VectorXd loss_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& beta, ShapeParam nu) {
  PowerLoss loss(X, y, nu);
  if (beta.size() != X.cols()) fail("dimension_mismatch", "coefficient vector has wrong length");
  loss.prepare(beta);
  Eigen::VectorXd g(X.cols());
  loss.grad_into(g);
  return g;
}

double lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, ShapeParam nu) {
  return loss_gradient(X, y, Eigen::VectorXd::Zero(X.cols()), nu).lpNorm<Eigen::Infinity>();
}

FitResult fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, ShapeParam nu, double lambda,
              const LassoConfig& cfg, const Eigen::VectorXd* warm) {
  PowerLoss loss(X, y, nu);
  return prox_gradient(loss, lambda, cfg, warm);
}

std::vector<FitResult> path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, ShapeParam nu,
                            const std::vector<double>& lambdas, const LassoConfig& cfg) {
  if (lambdas.empty()) fail("invalid_argument", "empty penalty grid");
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] > 0.0)) fail("invalid_argument", "penalty grid must be strictly positive");
    if (k > 0 && !(lambdas[k] < lambdas[k - 1]))
      fail("invalid_argument", "penalty grid must be strictly decreasing");
  }
  PowerLoss loss(X, y, nu);
  std::vector<FitResult> out;
  out.reserve(lambdas.size());
  const Eigen::VectorXd* warm = nullptr;
  for (double lam : lambdas) {
    out.push_back(prox_gradient(loss, lam, cfg, warm));
    warm = &out.back().beta;
  }
  return out;
}

std::vector<double> default_lambda_grid(double lmax, int count, double decades) {
  if (!(lmax > 0.0)) fail("invalid_argument", "lambda_max must be positive (is the response identically zero?)");
  if (count < 2 || decades <= 0.0) fail("invalid_argument", "bad grid shape");
  std::vector<double> grid(count);
  for (int k = 0; k < count; ++k)
    grid[k] = lmax * std::pow(10.0, -decades * k / (count - 1));
  grid[0] = lmax;  // exact despite rounding
  return grid;
}

}  // namespace sgm

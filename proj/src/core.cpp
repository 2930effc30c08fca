#include "sgm/core.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace sgm {

namespace {

// x^k for small non-negative integer k, exact sign handling
double ipow(double x, int k) {
  double r = 1.0;
  for (double b = x; k > 0; k >>= 1, b *= b)
    if (k & 1) r *= b;
  return r;
}

}  // namespace

double log_normalizing_constant(ShapeParam nu) {
  const double v = nu.as_double();
  return std::log(2.0) + std::lgamma((v + 1.0) / v);
}

double univariate_log_density(double x, ShapeParam nu) {
  return -ipow(std::abs(x), nu.value()) - log_normalizing_constant(nu);
}

double standard_subbotin_variance(ShapeParam nu) {
  const double v = nu.as_double();
  return std::exp(std::lgamma(3.0 / v) - std::lgamma(1.0 / v));
}

double conditional_location(const ParamMatrix& theta, int i, const Eigen::VectorXd& x) {
  const int p = theta.size();
  if (i < 0 || i >= p) fail("invalid_argument", "node index out of range");
  if (x.size() != p) fail("dimension_mismatch", "state vector length does not match parameter size");
  double s = 0.0;
  for (int j = 0; j < p; ++j)
    if (j != i) s += theta.coupling(i, j) * x[j];
  return s / theta.diag(i);
}

double conditional_scale(const ParamMatrix& theta, int i) {
  if (i < 0 || i >= theta.size()) fail("invalid_argument", "node index out of range");
  return 1.0 / theta.diag(i);
}

double q_component(const ParamMatrix& theta, int i, const Eigen::VectorXd& x, ShapeParam nu) {
  const int p = theta.size();
  if (i < 0 || i >= p) fail("invalid_argument", "node index out of range");
  if (x.size() != p) fail("dimension_mismatch", "state vector length does not match parameter size");
  double prefix = 0.0;  // couplings of nodes preceding i in the fixed order
  for (int j = 0; j < i; ++j) prefix += theta.coupling(i, j) * x[j];
  return -ipow(theta.diag(i) * x[i] - prefix, nu.value()) + ipow(prefix, nu.value());
}

double log_unnormalized_density(const ParamMatrix& theta, const Eigen::VectorXd& x, ShapeParam nu) {
  double q = 0.0;
  for (int i = 0; i < theta.size(); ++i) q += q_component(theta, i, x, nu);
  return q;
}

bool check_normalizable(const ParamMatrix& theta) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(theta.matrix(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail("numerical_divergence", "eigenvalue computation failed");
  const double min_eig = es.eigenvalues().minCoeff();
  const double max_diag = theta.matrix().diagonal().maxCoeff();
  return min_eig > 1e-10 * max_diag;
}

Eigen::MatrixXd precision_from_theta(const ParamMatrix& theta, ShapeParam nu) {
  const double v = nu.as_double();
  const double ratio = std::exp(std::lgamma(1.0 / v) - std::lgamma(3.0 / v));
  return ratio * theta.matrix();
}

Dataset standardize(const Dataset& data) {
  const int n = data.n(), p = data.p();
  if (n < 2) fail("invalid_argument", "standardization needs at least two rows");
  Eigen::MatrixXd out(n, p);
  for (int j = 0; j < p; ++j) {
    const double mean = data.values.col(j).mean();
    const double ss = (data.values.col(j).array() - mean).square().sum();
    const double sd = std::sqrt(ss / (n - 1));
    if (!(sd > 0.0) || !std::isfinite(sd))
      fail("degenerate_column", "column " + std::to_string(j) + " has zero variance");
    out.col(j) = (data.values.col(j).array() - mean) / sd;
  }
  return Dataset(std::move(out));
}

}  // namespace sgm

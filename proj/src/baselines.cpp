#include "sgm/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "sgm/core.hpp"
#include "sgm/normal.hpp"
#include "sgm/parallel.hpp"

namespace sgm {

namespace {

constexpr double kEulerGamma = 0.57721566490153286;
constexpr double kGumbelShapeCut = 1e-4;  // |shape| below this uses the Gumbel limit

void check_tau_h(double tau, double h) {
  if (!(tau > 0.0) || !(tau < 1.0)) fail("invalid_argument", "quantile level must lie in (0,1)");
  if (!(h > 0.0)) fail("invalid_argument", "smoothing width must be positive");
}

// l(u2) - l(u1) as the signed integral of the derivative over [u1, u2], split at
// the two kinks: every piece is a product with the (tiny) interval length, so the
// delta keeps full accuracy when the two arguments agree to many digits.
double smoothed_check_delta(double u1, double u2, double tau, double h) {
  const double s = u2 >= u1 ? 1.0 : -1.0;
  const double a = std::min(u1, u2), b = std::max(u1, u2);
  double total = 0.0;
  if (a < -h) total += (tau - 1.0) * (std::min(b, -h) - a);
  const double c1 = std::max(a, -h), c2 = std::min(b, h);
  if (c2 > c1) total += (c2 - c1) * ((tau - 0.5) + (c1 + c2) / (4.0 * h));
  if (b > h) total += tau * (b - std::max(a, h));
  return s * total;
}

// Smooth-loss counterpart of PowerLoss for the proximal gradient engine.
class QuantileLoss {
 public:
  QuantileLoss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double tau, double h)
      : X_(X), y_(y), tau_(tau), h_(h) {
    if (X_.rows() != y_.size()) fail("dimension_mismatch", "design and response sizes differ");
    r_.resize(X_.rows());
    trial_r_.resize(X_.rows());
  }
  int dim() const { return static_cast<int>(X_.cols()); }
  void prepare(const Eigen::VectorXd& beta) { r_ = y_ - X_ * beta; }
  double value() const {
    double s = 0.0;
    for (int t = 0; t < r_.size(); ++t) s += smoothed_check_loss(r_[t], tau_, h_);
    return s / static_cast<double>(r_.size());
  }
  void grad_into(Eigen::VectorXd& g) const {
    Eigen::VectorXd psi(r_.size());
    for (int t = 0; t < r_.size(); ++t) psi[t] = smoothed_check_derivative(r_[t], tau_, h_);
    g.noalias() = X_.transpose() * (-psi / static_cast<double>(r_.size()));
  }
  double trial_delta(const Eigen::VectorXd& diff) {
    trial_r_.noalias() = r_ - X_ * diff;
    double total = 0.0;
    for (int t = 0; t < r_.size(); ++t) total += smoothed_check_delta(r_[t], trial_r_[t], tau_, h_);
    return total / static_cast<double>(r_.size());
  }
  void commit_trial() { r_.swap(trial_r_); }

 private:
  const Eigen::MatrixXd& X_;
  const Eigen::VectorXd& y_;
  double tau_, h_;
  Eigen::VectorXd r_;
  Eigen::VectorXd trial_r_;
};

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

Graph graph_from_coefs(const std::vector<Eigen::VectorXd>& coef, CombinationRule rule, double tol) {
  const int p = static_cast<int>(coef.size());
  Graph g(p);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      const bool ij = std::abs(coef[i][j]) > tol, ji = std::abs(coef[j][i]) > tol;
      if (rule == CombinationRule::And ? (ij && ji) : (ij || ji)) g.add_edge(i, j);
    }
  return g;
}

}  // namespace

Graph gaussian_ns(const Dataset& data, double lambda, CombinationRule rule, const LassoConfig& cfg,
                  int threads) {
  return fit_graph(data, ShapeParam(2), lambda, rule, cfg, threads);
}

double smoothed_check_loss(double u, double tau, double h) {
  if (u > h) return tau * u;
  if (u < -h) return (tau - 1.0) * u;
  return (tau - 0.5) * u + u * u / (4.0 * h) + h / 4.0;
}

double smoothed_check_derivative(double u, double tau, double h) {
  if (u > h) return tau;
  if (u < -h) return tau - 1.0;
  return (tau - 0.5) + u / (2.0 * h);
}

NeighborhoodFit quantile_neighborhood(const Dataset& std_data, int node, double tau, double lambda,
                                      double h, const LassoConfig& cfg) {
  check_tau_h(tau, h);
  const int p = std_data.p();
  if (p < 2) fail("invalid_argument", "need at least two variables");
  if (node < 0 || node >= p) fail("invalid_argument", "node index out of range");
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  split_node(std_data.values, node, X, y);
  QuantileLoss loss(X, y, tau, h);
  NeighborhoodFit out;
  out.node = node;
  out.fit = prox_gradient(loss, lambda, cfg);
  out.coef = embed(out.fit.beta, node);
  return out;
}

Graph quantile_graph(const Dataset& data, double tau, double lambda, double h,
                     CombinationRule rule, const LassoConfig& cfg, int threads) {
  check_tau_h(tau, h);
  const Dataset std_data = standardize(data);
  const int p = std_data.p();
  if (p < 2) fail("invalid_argument", "need at least two variables");
  std::vector<Eigen::VectorXd> coef(p);
  parallel_for(p, threads, [&](int node) {
    coef[node] = quantile_neighborhood(std_data, node, tau, lambda, h, cfg).coef;
  });
  return graph_from_coefs(coef, rule, 1e-7);
}

double quantile_lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double tau, double h) {
  check_tau_h(tau, h);
  QuantileLoss loss(X, y, tau, h);
  loss.prepare(Eigen::VectorXd::Zero(X.cols()));
  Eigen::VectorXd g(X.cols());
  loss.grad_into(g);
  return g.lpNorm<Eigen::Infinity>();
}

double quantile_graph_lambda_max(const Dataset& std_data, double tau, double h) {
  const int p = std_data.p();
  if (p < 2) fail("invalid_argument", "need at least two variables");
  double lmax = 0.0;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  for (int node = 0; node < p; ++node) {
    split_node(std_data.values, node, X, y);
    lmax = std::max(lmax, quantile_lambda_max(X, y, tau, h));
  }
  return lmax;
}

std::vector<std::pair<double, int>> quantile_edge_path(const Dataset& data, double tau,
                                                       const std::vector<double>& lambdas,
                                                       double h, CombinationRule rule,
                                                       const LassoConfig& cfg, int threads,
                                                       std::vector<Graph>* graphs_out) {
  check_tau_h(tau, h);
  if (lambdas.empty()) fail("invalid_argument", "empty penalty grid");
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] > 0.0)) fail("invalid_argument", "penalty grid must be strictly positive");
    if (k > 0 && !(lambdas[k] < lambdas[k - 1]))
      fail("invalid_argument", "penalty grid must be strictly decreasing");
  }
  const Dataset std_data = standardize(data);
  const int p = std_data.p();
  std::vector<std::vector<Eigen::VectorXd>> coefs(p);
  parallel_for(p, threads, [&](int node) {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    split_node(std_data.values, node, X, y);
    QuantileLoss loss(X, y, tau, h);
    coefs[node].reserve(lambdas.size());
    const Eigen::VectorXd* warm = nullptr;
    Eigen::VectorXd prev;
    for (double lam : lambdas) {
      FitResult r = prox_gradient(loss, lam, cfg, warm);
      prev = r.beta;
      warm = &prev;
      coefs[node].push_back(embed(r.beta, node));
    }
  });
  std::vector<std::pair<double, int>> out;
  out.reserve(lambdas.size());
  std::vector<Eigen::VectorXd> slice(p);
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    for (int i = 0; i < p; ++i) slice[i] = coefs[i][k];
    Graph g = graph_from_coefs(slice, rule, 1e-7);
    out.emplace_back(lambdas[k], g.edge_count());
    if (graphs_out) graphs_out->push_back(std::move(g));
  }
  return out;
}

double gev_log_pdf(double x, const GevParams& p) {
  if (!(p.scale > 0.0)) fail("invalid_argument", "scale must be positive");
  const double z = (x - p.location) / p.scale;
  if (std::abs(p.shape) < kGumbelShapeCut)
    return -std::log(p.scale) - z - std::exp(-z);
  const double t = 1.0 + p.shape * z;
  if (t <= 0.0) return -std::numeric_limits<double>::infinity();
  return -std::log(p.scale) - (1.0 + 1.0 / p.shape) * std::log(t) - std::pow(t, -1.0 / p.shape);
}

double gev_cdf(double x, const GevParams& p) {
  if (!(p.scale > 0.0)) fail("invalid_argument", "scale must be positive");
  const double z = (x - p.location) / p.scale;
  if (std::abs(p.shape) < kGumbelShapeCut) return std::exp(-std::exp(-z));
  const double t = 1.0 + p.shape * z;
  if (t <= 0.0) return p.shape > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::pow(t, -1.0 / p.shape));
}

double gev_quantile(double u, const GevParams& p) {
  if (!(p.scale > 0.0)) fail("invalid_argument", "scale must be positive");
  if (!(u > 0.0) || !(u < 1.0)) fail("invalid_argument", "quantile level must lie in (0,1)");
  if (std::abs(p.shape) < kGumbelShapeCut) return p.location - p.scale * std::log(-std::log(u));
  return p.location + p.scale * (std::pow(-std::log(u), -p.shape) - 1.0) / p.shape;
}

namespace {

// negative log-likelihood in the (location, log scale, shape) chart
double gev_nll(const std::vector<double>& x, const Eigen::Vector3d& q) {
  GevParams p{q[0], std::exp(q[1]), q[2]};
  double nll = 0.0;
  for (double v : x) {
    const double lp = gev_log_pdf(v, p);
    if (!std::isfinite(lp)) return std::numeric_limits<double>::infinity();
    nll -= lp;
  }
  return nll;
}

// Standard Nelder–Mead on R^3; returns best vertex, counts evaluations in `evals`.
Eigen::Vector3d nelder_mead(const std::function<double(const Eigen::Vector3d&)>& f,
                            Eigen::Vector3d start, Eigen::Vector3d steps, int max_eval,
                            int& evals, bool& converged) {
  constexpr int n = 3;
  std::array<Eigen::Vector3d, n + 1> v;
  std::array<double, n + 1> fv;
  v[0] = start;
  for (int i = 0; i < n; ++i) {
    v[i + 1] = start;
    v[i + 1][i] += steps[i];
  }
  for (int i = 0; i <= n; ++i) { fv[i] = f(v[i]); ++evals; }

  converged = false;
  while (evals < max_eval) {
    std::array<int, n + 1> idx{0, 1, 2, 3};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    std::array<Eigen::Vector3d, n + 1> sv;
    std::array<double, n + 1> sf;
    for (int i = 0; i <= n; ++i) { sv[i] = v[idx[i]]; sf[i] = fv[idx[i]]; }
    v = sv;
    fv = sf;

    double spread = 0.0;
    for (int i = 0; i < n; ++i)
      spread = std::max(spread, (v[n] - v[0]).cwiseAbs().maxCoeff());
    if (std::abs(fv[n] - fv[0]) <= 1e-13 * (1.0 + std::abs(fv[0])) && spread <= 1e-9) {
      converged = true;
      break;
    }

    const Eigen::Vector3d centroid = (v[0] + v[1] + v[2]) / 3.0;
    const Eigen::Vector3d refl = centroid + (centroid - v[n]);
    const double fr = f(refl);
    ++evals;
    if (fr < fv[0]) {
      const Eigen::Vector3d exp_pt = centroid + 2.0 * (centroid - v[n]);
      const double fe = f(exp_pt);
      ++evals;
      if (fe < fr) { v[n] = exp_pt; fv[n] = fe; } else { v[n] = refl; fv[n] = fr; }
    } else if (fr < fv[n - 1]) {
      v[n] = refl;
      fv[n] = fr;
    } else {
      const Eigen::Vector3d contr =
          fr < fv[n] ? centroid + 0.5 * (refl - centroid) : centroid + 0.5 * (v[n] - centroid);
      const double fc = f(contr);
      ++evals;
      if (fc < std::min(fr, fv[n])) {
        v[n] = contr;
        fv[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          v[i] = v[0] + 0.5 * (v[i] - v[0]);
          fv[i] = f(v[i]);
          ++evals;
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (fv[i] < fv[best]) best = i;
  return v[best];
}

}  // namespace

GevParams gev_fit(const std::vector<double>& sample) {
  const int n = static_cast<int>(sample.size());
  if (n < 20) fail("insufficient_data", "GEV fit needs at least 20 observations");
  std::vector<double> x = sample;
  std::sort(x.begin(), x.end());
  if (!std::isfinite(x.front()) || !std::isfinite(x.back()))
    fail("invalid_value", "GEV sample contains non-finite values");
  if (x.back() - x.front() <= 1e-12 * (1.0 + std::abs(x.back())))
    fail("degenerate_sample", "GEV fit is undefined for a constant sample");

  // probability-weighted moments (ascending order statistics)
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  for (int i = 0; i < n; ++i) {
    b0 += x[i];
    b1 += x[i] * i / static_cast<double>(n - 1);
    b2 += x[i] * i * (i - 1.0) / (static_cast<double>(n - 1) * (n - 2));
  }
  b0 /= n; b1 /= n; b2 /= n;

  double loc0, scale0, shape0;
  const double c = (2.0 * b1 - b0) / (3.0 * b2 - b0) - std::log(2.0) / std::log(3.0);
  double k = 7.8590 * c + 2.9554 * c * c;  // Hosking's convention: k = -shape
  if (!std::isfinite(k)) k = 0.0;
  k = std::clamp(k, -0.9, 0.9);
  if (std::abs(k) < 1e-6) {
    scale0 = (2.0 * b1 - b0) / std::log(2.0);
    loc0 = b0 - kEulerGamma * scale0;
    shape0 = 0.0;
  } else {
    const double g = std::tgamma(1.0 + k);
    scale0 = k * (2.0 * b1 - b0) / (g * (1.0 - std::pow(2.0, -k)));
    loc0 = b0 + scale0 * (g - 1.0) / k;
    shape0 = -k;
  }
  if (!(scale0 > 0.0) || !std::isfinite(scale0) || !std::isfinite(loc0)) {
    scale0 = std::max((2.0 * b1 - b0) / std::log(2.0), 1e-8);
    loc0 = b0 - kEulerGamma * scale0;
    shape0 = 0.0;
  }

  auto f = [&x](const Eigen::Vector3d& q) { return gev_nll(x, q); };
  int evals = 0;
  bool converged = false;
  Eigen::Vector3d q0(loc0, std::log(scale0), shape0);
  Eigen::Vector3d q = nelder_mead(f, q0, Eigen::Vector3d(0.5 * scale0, 0.25, 0.1), 10000, evals, converged);
  if (converged && evals < 10000) {  // polish from the incumbent with a tight simplex
    bool c2 = false;
    q = nelder_mead(f, q, Eigen::Vector3d(0.02 * scale0, 0.01, 0.005), 10000 - evals, evals, c2);
  }
  if (!converged) fail("fit_failure", "GEV likelihood search did not converge within 10000 evaluations");
  if (!std::isfinite(f(q))) fail("fit_failure", "GEV likelihood is not finite at the optimum");
  return GevParams{q[0], std::exp(q[1]), q[2]};
}

Eigen::MatrixXd block_maxima(const Dataset& data, int block_size) {
  if (block_size < 1) fail("invalid_argument", "block size must be positive");
  if (block_size > data.n())
    fail("invalid_argument", "block size exceeds the number of rows");
  const int nb = data.n() / block_size;
  Eigen::MatrixXd m(nb, data.p());
  for (int b = 0; b < nb; ++b)
    m.row(b) = data.values.middleRows(b * block_size, block_size).colwise().maxCoeff();
  return m;
}

Dataset copula_transform(const Dataset& data, int block_size) {
  Eigen::MatrixXd maxima = block_maxima(data, block_size);
  const int nb = static_cast<int>(maxima.rows()), p = static_cast<int>(maxima.cols());
  Eigen::MatrixXd z(nb, p);
  for (int j = 0; j < p; ++j) {
    std::vector<double> col(maxima.col(j).data(), maxima.col(j).data() + nb);
    GevParams params;
    try {
      params = gev_fit(col);
    } catch (const Error& e) {
      const std::string prefix = "error:" + e.category() + ": ";
      std::string msg = e.what();
      if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
      fail(e.category(), "column " + std::to_string(j) + ": " + msg);
    }
    for (int b = 0; b < nb; ++b) {
      const double u = std::clamp(gev_cdf(maxima(b, j), params), 1e-10, 1.0 - 1e-10);
      z(b, j) = normal_quantile(u);
    }
  }
  return Dataset(std::move(z));
}

Graph copula_blockmax_graph(const Dataset& data, int block_size, double lambda,
                            CombinationRule rule, const LassoConfig& cfg, int threads) {
  return gaussian_ns(copula_transform(data, block_size), lambda, rule, cfg, threads);
}

}  // namespace sgm

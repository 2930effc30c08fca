#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "sgm/types.hpp"

namespace sgm {

struct LassoConfig {
  double tol = 1e-8;        // convergence: kkt_residual <= tol
  int max_iter = 50000;
  double step_shrink = 0.5; // backtracking factor
  double init_step = 1.0;   // starting step size (adapted in both directions afterwards)
};

struct FitResult {
  Eigen::VectorXd beta;
  double objective = 0.0;   // smooth loss + l1 penalty at beta
  int iterations = 0;
  bool converged = false;
  double kkt_residual = std::numeric_limits<double>::infinity();
};

inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// l-infinity distance of -grad from lambda * (subdifferential of the l1 norm) at beta.
inline double kkt_residual(const Eigen::VectorXd& grad, const Eigen::VectorXd& beta, double lambda) {
  double worst = 0.0;
  for (int k = 0; k < beta.size(); ++k) {
    const double v = beta[k] != 0.0
                         ? std::abs(grad[k] + (beta[k] > 0.0 ? lambda : -lambda))
                         : std::max(std::abs(grad[k]) - lambda, 0.0);
    worst = std::max(worst, v);
  }
  return worst;
}

// Proximal gradient with backtracking on the quadratic majorization. The penalized
// objective is non-increasing across accepted steps (guaranteed by the prox step
// under the accepted majorization). Loss concept: dim(), prepare(beta) caches the
// residual state, value() and grad_into(g) read it, trial_delta(diff) evaluates
// loss(beta + diff) - loss(beta) against the cached state in a cancellation-free
// form, and commit_trial() advances the state to the last trial point. The stable
// delta is essential: near the minimum the decrease per step sinks far below the
// rounding noise of the loss itself, and a naive value comparison would either
// stall the line search or accept noise-level non-descent moves forever.
// `on_step(iter, objective)` is an optional observer of accepted steps.
// Convergence is certified by the KKT residual alone, so a warm start at a
// solution returns immediately with iterations == 0.
template <class Loss>
FitResult prox_gradient(Loss& loss, double lambda, const LassoConfig& cfg = {},
                        const Eigen::VectorXd* warm = nullptr,
                        const std::function<void(int, double)>& on_step = {}) {
  if (!(lambda >= 0.0)) fail("invalid_argument", "penalty level must be non-negative");
  if (cfg.tol <= 0.0 || cfg.max_iter < 1 || cfg.step_shrink <= 0.0 || cfg.step_shrink >= 1.0 || cfg.init_step <= 0.0)
    fail("invalid_argument", "bad solver configuration");

  const int p = loss.dim();
  FitResult res;
  res.beta = warm ? *warm : Eigen::VectorXd::Zero(p);
  if (res.beta.size() != p) fail("dimension_mismatch", "warm start has wrong length");

  loss.prepare(res.beta);
  double f = loss.value();
  if (!std::isfinite(f)) fail("numerical_divergence", "loss is not finite at the starting point");

  Eigen::VectorXd grad(p), cand(p), diff(p);
  double step = cfg.init_step;

  for (; res.iterations < cfg.max_iter; ++res.iterations) {
    loss.grad_into(grad);
    res.kkt_residual = kkt_residual(grad, res.beta, lambda);
    if (res.kkt_residual <= cfg.tol) { res.converged = true; break; }

    bool stalled = false;
    double delta = 0.0;
    for (;;) {
      for (int k = 0; k < p; ++k) cand[k] = soft_threshold(res.beta[k] - step * grad[k], step * lambda);
      diff = cand - res.beta;
      delta = loss.trial_delta(diff);
      // Majorized decrease; both sides scale with the step, so the comparison
      // stays meaningful long after f itself stops resolving the change.
      const double quad = grad.dot(diff) + diff.squaredNorm() / (2.0 * step);
      if (std::isfinite(delta) && delta <= quad + 1e-12 * std::abs(quad)) break;
      step *= cfg.step_shrink;
      if (step < 1e-18) { stalled = true; break; }
    }
    if (stalled) break;      // fp noise dominates; stop at the current iterate
    res.beta.swap(cand);
    loss.commit_trial();
    f += delta;
    if (on_step) on_step(res.iterations, f + lambda * res.beta.lpNorm<1>());
    // Let the step grow past its starting value: the power loss flattens out near
    // its minimum (vanishing curvature for shapes > 2), where a bounded step would
    // crawl. Backtracking reins the growth in whenever the majorization fails.
    step = std::min(step / cfg.step_shrink, 1e12);
  }

  if (!res.converged && res.iterations == cfg.max_iter) {  // report kkt at the final iterate
    loss.grad_into(grad);
    res.kkt_residual = kkt_residual(grad, res.beta, lambda);
  }
  res.objective = loss.value() + lambda * res.beta.lpNorm<1>();
  return res;
}

// Smooth part (1/(nu*N)) * sum_t (y_t - x_t' beta)^nu with even nu: convex, with
// gradient -(1/N) X' r^{nu-1} (odd power keeps the residual sign).
class PowerLoss {
 public:
  PowerLoss(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, ShapeParam nu)
      : X_(X), y_(y), nu_(nu.value()) {
    if (X_.rows() != y_.size()) fail("dimension_mismatch", "design and response sizes differ");
    if (X_.rows() < 1) fail("invalid_argument", "empty design");
    r_.resize(X_.rows());
    trial_r_.resize(X_.rows());
    rpow_.resize(X_.rows());
  }

  int dim() const { return static_cast<int>(X_.cols()); }

  void prepare(const Eigen::VectorXd& beta) {
    r_ = y_ - X_ * beta;
    refresh_powers();
  }

  double value() const {
    const double n = static_cast<double>(r_.size());
    return (rpow_ * r_.array().square()).sum() / (nu_ * n);
  }

  void grad_into(Eigen::VectorXd& g) const {
    const double n = static_cast<double>(r_.size());
    g.noalias() = X_.transpose() * (-(rpow_ * r_.array()) / n).matrix();
  }

  // loss(beta + diff) - loss(beta), without forming the two nearly equal values.
  // Per sample, a^nu - b^nu = (a - b) * sum_{i<nu} a^i b^{nu-1-i}: the factor sum
  // has no sign cancellation when a and b agree in sign (the regime of small
  // steps), so the delta keeps full relative accuracy however tiny it gets.
  double trial_delta(const Eigen::VectorXd& diff) {
    trial_r_.noalias() = r_ - X_ * diff;
    double total = 0.0;
    const int n = static_cast<int>(r_.size());
    for (int t = 0; t < n; ++t) {
      const double a = trial_r_[t], b = r_[t];
      double sum = 0.0, bk = 1.0;          // Horner in a: sum_{i<nu} a^i b^{nu-1-i}
      for (int k = 0; k < nu_; ++k) {
        sum = sum * a + bk;
        bk *= b;
      }
      total += (a - b) * sum;
    }
    return total / (nu_ * static_cast<double>(n));
  }

  void commit_trial() {
    r_.swap(trial_r_);
    refresh_powers();
  }

 private:
  void refresh_powers() {
    // rpow_ = r^{nu-2} elementwise via squares (even exponent, sign-free)
    const int half = nu_ / 2 - 1;
    Eigen::ArrayXd s = r_.array().square();
    rpow_.setOnes(r_.size());
    Eigen::ArrayXd b = s;
    for (int k = half; k > 0; k >>= 1) {
      if (k & 1) rpow_ *= b;
      if (k > 1) b = b.square();
    }
  }

  const Eigen::MatrixXd& X_;
  const Eigen::VectorXd& y_;
  int nu_;
  Eigen::VectorXd r_;
  Eigen::VectorXd trial_r_;
  Eigen::ArrayXd rpow_;
};

// Penalized objective (1/(nu*N)) sum (y - X beta)^nu + lambda * |beta|_1.
double objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                 ShapeParam nu, double lambda);

// Gradient of the smooth part at beta.
Eigen::VectorXd loss_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& beta, ShapeParam nu);

// Smallest penalty with an all-zero solution: (1/N) * max_k |X_k' y^{nu-1}|.
double lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, ShapeParam nu);

FitResult fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, ShapeParam nu, double lambda,
              const LassoConfig& cfg = {}, const Eigen::VectorXd* warm = nullptr);

// Warm-started fits along a strictly decreasing positive grid; same order as the input.
std::vector<FitResult> path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, ShapeParam nu,
                            const std::vector<double>& lambdas, const LassoConfig& cfg = {});

// count log-spaced values from lmax down through `decades` decades; grid[0] == lmax.
std::vector<double> default_lambda_grid(double lmax, int count = 50, double decades = 3.0);

}  // namespace sgm

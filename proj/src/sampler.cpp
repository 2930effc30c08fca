#include "sgm/sampler.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace sgm {

double sample_standard_subbotin(ShapeParam nu, CounterRng& rng) {
  // |X|^nu ~ Gamma(1/nu): X = sign * G^{1/nu}
  const double g = draw_gamma(1.0 / nu.as_double(), rng);
  const double x = std::pow(g, 1.0 / nu.as_double());
  return rng.uniform() < 0.5 ? -x : x;
}

Dataset gibbs_sample(const ParamMatrix& theta, ShapeParam nu, int n, const GibbsConfig& config) {
  if (n < 1) fail("invalid_argument", "sample size must be positive");
  if (config.burn_in < 0 || config.thinning < 1)
    fail("invalid_argument", "burn_in must be >= 0 and thinning >= 1");
  if (!check_normalizable(theta))
    fail("not_normalizable", "interaction matrix is not positive definite; the joint density has no finite normalizer");

  const int p = theta.size();
  const std::uint64_t key = derive_str(config.seed, "gibbs");
  const std::uint64_t scan_key = derive_str(key, "scan");
  Eigen::MatrixXd out(n, p);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(p);
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);

  const long total_sweeps = static_cast<long>(config.burn_in) + static_cast<long>(n - 1) * config.thinning + 1;
  int row = 0;
  for (long sweep = 0; sweep < total_sweeps; ++sweep) {
    if (config.scan == ScanOrder::RandomPermutation) {
      // Fisher-Yates shuffle of the visiting order; innovation streams stay
      // keyed by the node index, not the visit position.
      CounterRng scan_rng = make_rng(scan_key, {config.chain, static_cast<std::uint64_t>(sweep)});
      for (int k = p - 1; k > 0; --k)
        std::swap(order[k], order[scan_rng.uniform_int(static_cast<std::uint64_t>(k) + 1)]);
    }
    for (int k = 0; k < p; ++k) {
      const int i = order[k];
      CounterRng rng = make_rng(key, {config.chain, static_cast<std::uint64_t>(sweep), static_cast<std::uint64_t>(i)});
      const double eps = sample_standard_subbotin(nu, rng);
      x[i] = conditional_location(theta, i, x) + conditional_scale(theta, i) * eps;
    }
    if (sweep >= config.burn_in && (sweep - config.burn_in) % config.thinning == 0)
      out.row(row++) = x.transpose();
  }
  return Dataset(std::move(out));
}

}  // namespace sgm

#include "sgm/stability.hpp"

#include <cmath>
#include <cstdio>
#include <tuple>

#include "sgm/parallel.hpp"

namespace sgm {

Dataset stationary_block_bootstrap(const Dataset& data, int mean_block_len, CounterRng& rng) {
  const int n = data.n();
  if (n < 1) fail("invalid_argument", "cannot resample an empty dataset");
  if (mean_block_len < 1) fail("invalid_argument", "mean block length must be >= 1");
  Eigen::MatrixXd out(n, data.p());
  int row = 0;
  while (row < n) {
    const int start = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    int len = 1;
    if (mean_block_len > 1) {
      // geometric with mean m: L = 1 + floor(log(u) / log(1 - 1/m))
      const double u = rng.uniform();
      len = 1 + static_cast<int>(std::log(u) / std::log(1.0 - 1.0 / mean_block_len));
      len = std::min(len, n);  // longer blocks than n wrap into duplicates anyway
    }
    for (int k = 0; k < len && row < n; ++k, ++row)
      out.row(row) = data.values.row((start + k) % n);
  }
  return Dataset(std::move(out));
}

StabilityProfile edge_stability(const Dataset& data, ShapeParam nu, double lambda,
                                const StabilityConfig& cfg) {
  if (cfg.replicates < 1) fail("invalid_argument", "need at least one replicate");
  if (cfg.threshold <= 0.0 || cfg.threshold > 1.0) fail("invalid_argument", "threshold must be in (0,1]");
  const int n = data.n(), p = data.p();
  const int block = cfg.mean_block_len > 0
                        ? cfg.mean_block_len
                        : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));

  struct Slot { Graph graph{1}; bool failed = false; };
  std::vector<Slot> slots(cfg.replicates);
  parallel_for(cfg.replicates, cfg.threads, [&](int r) {
    CounterRng rng = make_rng(cfg.seed, {static_cast<std::uint64_t>(r)});
    Dataset resample = stationary_block_bootstrap(data, block, rng);
    try {
      slots[r].graph = fit_graph(resample, nu, lambda, cfg.rule, cfg.solver, 1);
    } catch (const Error& e) {
      slots[r].failed = true;  // counts as all-edges-absent
      std::fprintf(stderr, "stability replicate %d failed: %s\n", r, e.what());
    }
  });

  StabilityProfile prof;
  prof.freq = Eigen::MatrixXd::Zero(p, p);
  prof.replicates = cfg.replicates;
  for (auto& s : slots) {
    if (s.failed) { ++prof.failures; continue; }
    for (auto& e : s.graph.edges()) {
      prof.freq(e.first, e.second) += 1.0;
      prof.freq(e.second, e.first) += 1.0;
    }
  }
  prof.freq /= static_cast<double>(cfg.replicates);
  return prof;
}

Graph select_stable_graph(const StabilityProfile& profile, double threshold) {
  if (threshold <= 0.0 || threshold > 1.0) fail("invalid_argument", "threshold must be in (0,1]");
  const int p = static_cast<int>(profile.freq.rows());
  Graph g(p);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (profile.freq(i, j) >= threshold) g.add_edge(i, j);
  return g;
}

StabilitySelection stability_tune(const Dataset& data, const std::vector<int>& nu_grid,
                                  const std::vector<double>& lambda_grid,
                                  const StabilityConfig& cfg) {
  if (nu_grid.empty() || lambda_grid.empty()) fail("invalid_argument", "empty tuning grid");
  for (double l : lambda_grid)
    if (!(l > 0.0)) fail("invalid_argument", "penalty grid must be strictly positive");

  StabilitySelection best;
  best.all_profiles.reserve(nu_grid.size() * lambda_grid.size());
  int best_count = -1;
  for (std::size_t ni = 0; ni < nu_grid.size(); ++ni) {
    const ShapeParam nu(nu_grid[ni]);  // validates the grid entry
    for (std::size_t li = 0; li < lambda_grid.size(); ++li) {
      StabilityConfig point = cfg;
      point.seed = derive(derive(cfg.seed, ni), li);
      StabilityProfile prof = edge_stability(data, nu, lambda_grid[li], point);
      Graph g = select_stable_graph(prof, cfg.threshold);
      const int count = g.edge_count();
      // maximize count; ties -> larger lambda, then smaller nu
      const bool better =
          count > best_count ||
          (count == best_count &&
           std::make_tuple(-lambda_grid[li], nu_grid[ni]) < std::make_tuple(-best.lambda, best.nu));
      if (better) {
        best_count = count;
        best.nu = nu_grid[ni];
        best.lambda = lambda_grid[li];
        best.graph = std::move(g);
        best.profile = prof;
      }
      best.all_profiles.push_back(std::move(prof));
    }
  }
  return best;
}

}  // namespace sgm

#include "sgm/simgen.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "sgm/normal.hpp"

namespace sgm {

namespace {

constexpr double kEulerGamma = 0.57721566490153286;

// draw from N(0,1) conditioned on being strictly below `bound`
double truncated_normal_below(double bound, CounterRng& rng) {
  const double cap = normal_cdf(bound);
  const double u = std::clamp(rng.uniform() * cap, 1e-300, 1.0 - 1e-16);
  return normal_quantile(u);
}

Eigen::MatrixXd equicorrelation_chol(int p, double corr) {
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(p, p, corr);
  sigma.diagonal().setOnes();
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    fail("invalid_argument", "filler correlation does not give a valid covariance");
  return llt.matrixL();
}

Eigen::VectorXd gaussian_row(const Eigen::MatrixXd& chol, CounterRng& rng) {
  Eigen::VectorXd z(chol.rows());
  for (int i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return chol * z;
}

}  // namespace

Graph make_graph(const GraphSpec& spec, std::uint64_t seed) {
  if (spec.p < 2) fail("invalid_argument", "graphs need at least two nodes");
  Graph g(spec.p);
  CounterRng rng(derive_str(seed, "graph_topology"));

  switch (spec.kind) {
    case GraphKind::Chain:
      for (int i = 0; i + 1 < spec.p; ++i) g.add_edge(i, i + 1);
      return g;

    case GraphKind::ErdosRenyi: {
      if (spec.edge_prob < 0.0 || spec.edge_prob > 1.0)
        fail("invalid_argument", "edge probability must be in [0,1]");
      for (int i = 0; i < spec.p; ++i)
        for (int j = i + 1; j < spec.p; ++j)
          if (rng.uniform() < spec.edge_prob) g.add_edge(i, j);
      return g;
    }

    case GraphKind::SmallWorldCliques: {
      if (spec.cliques < 1 || spec.cliques > spec.p)
        fail("invalid_argument", "clique count must be between 1 and p");
      // near-equal clique sizes: the first p % k cliques get the extra node
      const int base = spec.p / spec.cliques, extra = spec.p % spec.cliques;
      int node = 0;
      for (int c = 0; c < spec.cliques; ++c) {
        const int size = base + (c < extra ? 1 : 0);
        for (int a = 0; a < size; ++a)
          for (int b = a + 1; b < size; ++b) g.add_edge(node + a, node + b);
        node += size;
      }
      // rewire: move one endpoint of an edge to a uniformly chosen non-neighbor
      std::vector<std::pair<int, int>> edges(g.edges().begin(), g.edges().end());
      for (auto& e : edges) {
        if (rng.uniform() >= spec.rewire_prob) continue;
        const int keep = rng.uniform() < 0.5 ? e.first : e.second;
        g.remove_edge(e.first, e.second);
        std::vector<int> candidates;
        for (int v = 0; v < spec.p; ++v)
          if (v != keep && !g.has_edge(keep, v)) candidates.push_back(v);
        if (candidates.empty()) {
          g.add_edge(e.first, e.second);  // nothing to rewire to
          continue;
        }
        g.add_edge(keep, candidates[rng.uniform_int(candidates.size())]);
      }
      return g;
    }
  }
  fail("invalid_argument", "unknown graph kind");
}

ParamMatrix make_theta(const Graph& graph, const ThetaSpec& spec, std::uint64_t seed) {
  if (!(spec.magnitude > 0.0)) fail("invalid_argument", "coupling magnitude must be positive");
  if (!(spec.pd_margin > 0.0)) fail("invalid_argument", "definiteness margin must be positive");
  const int p = graph.nodes();
  CounterRng rng(derive_str(seed, "theta_signs"));
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(p, p);
  for (auto& e : graph.edges()) {
    const double sign =
        spec.signs == SignScheme::AllPositive ? 1.0 : (rng.uniform() < 0.5 ? 1.0 : -1.0);
    m(e.first, e.second) = m(e.second, e.first) = sign * spec.magnitude;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig <= spec.pd_margin) {
    const double lift = spec.pd_margin - min_eig;
    m = (m + lift * Eigen::MatrixXd::Identity(p, p)) / (1.0 + lift);
  }

  for (auto& e : graph.edges())
    if (std::abs(m(e.first, e.second)) < 1e-4)
      fail("degenerate_theta", "definiteness repair shrank couplings below 1e-4");

  ParamMatrix theta{m};
  if (theta.support() != graph) fail("degenerate_theta", "support changed during construction");
  if (!check_normalizable(theta)) fail("degenerate_theta", "repair failed to reach positive definiteness");
  return theta;
}

Dataset gen_subbotin(const ParamMatrix& theta, ShapeParam nu, int n, std::uint64_t seed) {
  GibbsConfig cfg;
  cfg.seed = seed;
  return gibbs_sample(theta, nu, n, cfg);
}

Dataset gen_block_maxima(const ParamMatrix& theta, const BlockMaximaSpec& spec, std::uint64_t seed) {
  if (spec.n_blocks < 1 || spec.block_size < 1)
    fail("invalid_argument", "block counts and sizes must be positive");
  if (!check_normalizable(theta))
    fail("not_normalizable", "latent Gaussian precision must be positive definite");
  const int p = theta.size();

  Eigen::LLT<Eigen::MatrixXd> prec_llt(theta.matrix());
  const Eigen::MatrixXd cov = prec_llt.solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd cov_chol = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
  const Eigen::VectorXd marg_sd = cov.diagonal().cwiseSqrt();
  const Eigen::MatrixXd fill_chol = equicorrelation_chol(p, spec.filler_corr);

  const double loc = spec.gumbel_mean - kEulerGamma;
  const std::uint64_t lat_key = derive_str(seed, "bm_latent");
  const std::uint64_t pos_key = derive_str(seed, "bm_pos");
  const std::uint64_t fill_key = derive_str(seed, "bm_fill");

  Eigen::MatrixXd out(spec.n_blocks * spec.block_size, p);
  for (int b = 0; b < spec.n_blocks; ++b) {
    CounterRng lat_rng(derive(lat_key, b));
    const Eigen::VectorXd z = gaussian_row(cov_chol, lat_rng);
    Eigen::VectorXd extreme(p);
    std::vector<int> pos(p);
    CounterRng pos_rng(derive(pos_key, b));
    for (int j = 0; j < p; ++j) {
      const double u = std::clamp(normal_cdf(z[j] / marg_sd[j]), 1e-16, 1.0 - 1e-16);
      extreme[j] = loc - std::log(-std::log(u));
      pos[j] = static_cast<int>(pos_rng.uniform_int(spec.block_size));
    }
    for (int r = 0; r < spec.block_size; ++r) {
      const int row = b * spec.block_size + r;
      CounterRng fill_rng(derive(derive(fill_key, b), r));
      Eigen::VectorXd w = gaussian_row(fill_chol, fill_rng);
      for (int j = 0; j < p; ++j) {
        if (r == pos[j]) {
          out(row, j) = extreme[j];
        } else {
          out(row, j) = w[j] < extreme[j] ? w[j] : truncated_normal_below(extreme[j], fill_rng);
        }
      }
    }
  }
  return Dataset(std::move(out));
}

Dataset gen_pot(const Graph& truth, const PotSpec& spec, std::uint64_t seed) {
  if (spec.n < 1) fail("invalid_argument", "need at least one row");
  if (!(spec.branching >= 0.0) || spec.branching >= 1.0)
    fail("invalid_argument", "branching (spectral radius of the excitation) must be in [0,1)");
  if (!(spec.decay > 0.0)) fail("invalid_argument", "kernel decay must be positive");
  if (!(spec.extremes_per_row > 0.0)) fail("invalid_argument", "extreme rate must be positive");
  const int p = truth.nodes();

  // excitation alpha on edges scaled so the branching matrix (alpha/decay)*A has
  // the requested spectral radius; clipped so baseline rates stay positive
  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(p, p);
  for (auto& e : truth.edges()) adj(e.first, e.second) = adj(e.second, e.first) = 1.0;
  double alpha = 0.0;
  if (truth.edge_count() > 0 && spec.branching > 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(adj, Eigen::EigenvaluesOnly);
    const double sr = es.eigenvalues().maxCoeff();
    alpha = spec.branching * spec.decay / sr;
    int max_deg = 0;
    for (int d : truth.degrees()) max_deg = std::max(max_deg, d);
    if (max_deg > 0) alpha = std::min(alpha, 0.9 * spec.decay / max_deg);
  }

  // stationary per-node rate == extremes_per_row: mu = (I - B) rate
  const double rate = spec.extremes_per_row;
  Eigen::VectorXd mu(p);
  const auto degs = truth.degrees();
  for (int i = 0; i < p; ++i) mu[i] = rate * (1.0 - alpha / spec.decay * degs[i]);

  std::vector<std::vector<int>> nbrs(p);
  for (auto& e : truth.edges()) {
    nbrs[e.first].push_back(e.second);
    nbrs[e.second].push_back(e.first);
  }

  // Ogata thinning: between events the intensity only decays, so the total
  // intensity at the last change bounds it until the next proposal.
  CounterRng rng(derive_str(seed, "pot_events"));
  Eigen::VectorXd excite = Eigen::VectorXd::Zero(p);
  double t = 0.0;
  std::map<std::pair<int, int>, double> extremes;  // (row, node) -> value, collisions keep the max
  const double mu_sum = mu.sum();
  long guard = 0;
  const long guard_max = 10000 + 400L * static_cast<long>(rate * spec.n * p + 10);
  for (;;) {
    if (++guard > guard_max) fail("numerical_divergence", "event simulation failed to terminate");
    const double bound = mu_sum + excite.sum();
    const double dt = -std::log(rng.uniform()) / bound;
    t += dt;
    if (t >= static_cast<double>(spec.n)) break;
    excite *= std::exp(-spec.decay * dt);
    const double total = mu_sum + excite.sum();
    if (rng.uniform() * bound > total) continue;  // thinned proposal
    double target = rng.uniform() * total;
    int node = p - 1;
    for (int i = 0; i < p; ++i) {
      target -= mu[i] + excite[i];
      if (target <= 0.0) { node = i; break; }
    }
    const double value = spec.threshold + draw_gumbel_positive(rng);
    const std::pair<int, int> cell(static_cast<int>(t), node);
    auto it = extremes.find(cell);
    if (it == extremes.end() || it->second < value) extremes[cell] = value;
    for (int k : nbrs[node]) excite[k] += alpha;
  }

  const Eigen::MatrixXd fill_chol = equicorrelation_chol(p, spec.filler_corr);
  const std::uint64_t fill_key = derive_str(seed, "pot_fill");
  Eigen::MatrixXd out(spec.n, p);
  for (int r = 0; r < spec.n; ++r) {
    CounterRng fill_rng(derive(fill_key, r));
    const Eigen::VectorXd w = gaussian_row(fill_chol, fill_rng);
    for (int j = 0; j < p; ++j)
      out(r, j) = w[j] < spec.threshold ? w[j] : truncated_normal_below(spec.threshold, fill_rng);
  }
  for (auto& [cell, value] : extremes) out(cell.first, cell.second) = value;
  return Dataset(std::move(out));
}

std::string scenario_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Subbotin: return "subbotin";
    case ScenarioKind::BlockMaxima: return "block_maxima";
    case ScenarioKind::Pot: return "pot";
  }
  fail("invalid_argument", "unknown scenario kind");
}

GeneratedData generate_scenario(const ScenarioSpec& spec, std::uint64_t seed) {
  Graph graph = make_graph(spec.graph, derive_str(seed, "graph"));
  GeneratedData out{graph, Dataset{}};
  switch (spec.kind) {
    case ScenarioKind::Subbotin: {
      ParamMatrix theta = make_theta(graph, spec.theta, derive_str(seed, "theta"));
      out.truth = theta.support();
      out.data = gen_subbotin(theta, ShapeParam(spec.nu_true), spec.n, derive_str(seed, "data"));
      return out;
    }
    case ScenarioKind::BlockMaxima: {
      ParamMatrix theta = make_theta(graph, spec.theta, derive_str(seed, "theta"));
      out.truth = theta.support();
      out.data = gen_block_maxima(theta, spec.block, derive_str(seed, "data"));
      return out;
    }
    case ScenarioKind::Pot: {
      out.truth = graph;
      out.data = gen_pot(graph, spec.pot, derive_str(seed, "data"));
      return out;
    }
  }
  fail("invalid_argument", "unknown scenario kind");
}

}  // namespace sgm

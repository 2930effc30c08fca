#include "sgm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>

#include "sgm/baselines.hpp"
#include "sgm/core.hpp"
#include "sgm/parallel.hpp"
#include "sgm/rng.hpp"

namespace sgm {

MethodSpec MethodSpec::subbotin(int nu) {
  MethodSpec m;
  m.kind = MethodKind::Subbotin;
  m.nu = ShapeParam(nu).value();
  return m;
}

MethodSpec MethodSpec::gaussian_ns() {
  MethodSpec m;
  m.kind = MethodKind::GaussianNs;
  m.nu = 2;
  return m;
}

MethodSpec MethodSpec::quantile(double tau, double smoothing) {
  MethodSpec m;
  m.kind = MethodKind::Quantile;
  m.tau = tau;
  m.smoothing = smoothing;
  return m;
}

MethodSpec MethodSpec::copula(int block_size) {
  MethodSpec m;
  m.kind = MethodKind::CopulaBlockMax;
  m.block_size = block_size;
  return m;
}

std::string MethodSpec::name() const {
  char buf[64];
  switch (kind) {
    case MethodKind::Subbotin:
      std::snprintf(buf, sizeof buf, "subbotin_nu%d", nu);
      return buf;
    case MethodKind::GaussianNs:
      return "gaussian_ns";
    case MethodKind::Quantile: {
      std::snprintf(buf, sizeof buf, "%g", tau);
      return std::string("quantile_") + buf;
    }
    case MethodKind::CopulaBlockMax:
      std::snprintf(buf, sizeof buf, "copula_%d", block_size);
      return buf;
  }
  fail("invalid_argument", "unknown method kind");
}

Scores f1_score(const Graph& estimate, const Graph& truth) {
  if (estimate.nodes() != truth.nodes())
    fail("dimension_mismatch", "estimate and truth have different node counts");
  int tp = 0;
  for (const auto& [i, j] : estimate.edges())
    if (truth.has_edge(i, j)) ++tp;
  const int fp = estimate.edge_count() - tp;
  const int fn = truth.edge_count() - tp;

  Scores s;
  if (estimate.edge_count() == 0 && truth.edge_count() == 0) return {1.0, 1.0, 0.0};
  s.tpr = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 1.0;
  s.fdr = tp + fp > 0 ? static_cast<double>(fp) / (tp + fp) : 0.0;
  const double precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  s.f1 = precision + s.tpr > 0.0 ? 2.0 * precision * s.tpr / (precision + s.tpr) : 0.0;
  return s;
}

namespace {

// Mirrors the tail-exponent oracle tuner: grid scan over the default penalty
// grid, then up to 6 log-scale bisections inside the bracketing interval.
OracleSelection quantile_oracle_tune(const Dataset& data, double tau, double h, int target_edges,
                                     CombinationRule rule, const LassoConfig& cfg, int threads) {
  const Dataset std_data = standardize(data);
  const double lmax = quantile_graph_lambda_max(std_data, tau, h);
  const auto grid = default_lambda_grid(lmax);

  struct Candidate {
    double lambda;
    int count;
    Graph graph;
  };
  std::vector<Candidate> cands;
  cands.reserve(grid.size() + 6);
  {
    std::vector<Graph> graphs;
    const auto counts = quantile_edge_path(data, tau, grid, h, rule, cfg, threads, &graphs);
    for (std::size_t k = 0; k < counts.size(); ++k)
      cands.push_back({counts[k].first, counts[k].second, std::move(graphs[k])});
  }

  int bracket = -1;
  for (std::size_t k = 0; k + 1 < cands.size(); ++k)
    if (cands[k].count < target_edges && target_edges < cands[k + 1].count) {
      bracket = static_cast<int>(k);
      break;
    }
  bool exact = false;
  for (const auto& c : cands) exact = exact || c.count == target_edges;

  if (!exact && bracket >= 0) {
    double hi = cands[bracket].lambda, lo = cands[bracket + 1].lambda;
    for (int iter = 0; iter < 6; ++iter) {
      const double mid = std::sqrt(hi * lo);
      Graph g = quantile_graph(data, tau, mid, h, rule, cfg, threads);
      const int c = g.edge_count();
      cands.push_back({mid, c, std::move(g)});
      if (c == target_edges) break;
      (c < target_edges ? hi : lo) = mid;
    }
  }

  std::vector<std::pair<double, int>> pairs;
  pairs.reserve(cands.size());
  for (const auto& c : cands) pairs.emplace_back(c.lambda, c.count);
  const int best = oracle_pick(pairs, target_edges);
  return {cands[best].lambda, cands[best].graph};
}

struct MethodOutcome {
  Graph graph{1};
  double lambda = 0.0;
  int nu = -1;
};

MethodOutcome run_method(const MethodSpec& m, const Dataset& data, int target_edges,
                         CombinationRule rule, const LassoConfig& solver, int threads) {
  MethodOutcome out;
  switch (m.kind) {
    case MethodKind::Subbotin:
    case MethodKind::GaussianNs: {
      const int nu = m.kind == MethodKind::GaussianNs ? 2 : m.nu;
      OracleSelection sel = oracle_tune(data, ShapeParam(nu), target_edges, rule, solver, threads);
      out = {std::move(sel.graph), sel.lambda, nu};
      break;
    }
    case MethodKind::Quantile: {
      OracleSelection sel =
          quantile_oracle_tune(data, m.tau, m.smoothing, target_edges, rule, solver, threads);
      out = {std::move(sel.graph), sel.lambda, -1};
      break;
    }
    case MethodKind::CopulaBlockMax: {
      const Dataset z = copula_transform(data, m.block_size);
      OracleSelection sel = oracle_tune(z, ShapeParam(2), target_edges, rule, solver, threads);
      out = {std::move(sel.graph), sel.lambda, 2};
      break;
    }
  }
  return out;
}

void append_scores(std::string& line, const ResultRow& r) {
  char buf[160];
  if (r.failed) {
    line += ",nan,nan,nan,nan,-1,-1";
    return;
  }
  std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f,%.10g,%d,%d", r.f1, r.tpr, r.fdr,
                r.selected_lambda, r.selected_nu, r.edge_count);
  line += buf;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.replicates < 1) fail("invalid_argument", "need at least one replicate");
  if (cfg.methods.empty()) fail("invalid_argument", "need at least one method");
  {
    std::set<std::string> names;
    for (const auto& m : cfg.methods)
      if (!names.insert(m.name()).second)
        fail("invalid_argument", "duplicate method name '" + m.name() + "'");
  }

  const std::string scen = scenario_name(cfg.scenario.kind);
  const int nm = static_cast<int>(cfg.methods.size());
  std::vector<ResultRow> rows(static_cast<std::size_t>(cfg.replicates) * nm);

  parallel_for(cfg.replicates, cfg.threads, [&](int r) {
    const std::uint64_t rep_seed = derive(derive_str(cfg.seed, scen), static_cast<std::uint64_t>(r));
    const GeneratedData gen = generate_scenario(cfg.scenario, rep_seed);
    const int target = gen.truth.edge_count();
    for (int m = 0; m < nm; ++m) {
      ResultRow& row = rows[static_cast<std::size_t>(r) * nm + m];
      row.scenario = scen;
      row.method = cfg.methods[m].name();
      row.replicate = r;
      row.seed = rep_seed;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        MethodOutcome out = run_method(cfg.methods[m], gen.data, target, cfg.rule, cfg.solver, 1);
        const Scores s = f1_score(out.graph, gen.truth);
        row.f1 = s.f1;
        row.tpr = s.tpr;
        row.fdr = s.fdr;
        row.selected_lambda = out.lambda;
        row.selected_nu = out.nu;
        row.edge_count = out.graph.edge_count();
      } catch (const std::exception& e) {
        row.failed = true;
        row.f1 = row.tpr = row.fdr = std::numeric_limits<double>::quiet_NaN();
        row.selected_lambda = std::numeric_limits<double>::quiet_NaN();
        row.selected_nu = -1;
        row.edge_count = -1;
        std::fprintf(stderr, "replicate %d method %s failed: %s\n", r, row.method.c_str(),
                     e.what());
      }
      const auto t1 = std::chrono::steady_clock::now();
      row.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
  });
  return rows;
}

std::string format_rows_csv(const std::vector<ResultRow>& rows, bool include_timing) {
  std::string out =
      "scenario,method,replicate,f1,tpr,fdr,selected_lambda,selected_nu,edge_count,wall_time_ms,"
      "seed\n";
  char buf[96];
  for (const auto& r : rows) {
    std::string line = r.scenario + ',' + r.method + ',' + std::to_string(r.replicate);
    append_scores(line, r);
    std::snprintf(buf, sizeof buf, ",%.3f,%llu", include_timing ? r.wall_time_ms : 0.0,
                  static_cast<unsigned long long>(r.seed));
    line += buf;
    out += line;
    out += '\n';
  }
  return out;
}

std::string format_summary_csv(const std::vector<ResultRow>& rows) {
  std::vector<std::string> order;
  for (const auto& r : rows)
    if (std::find(order.begin(), order.end(), r.method) == order.end()) order.push_back(r.method);

  std::string out = "method,mean_f1,sd_f1,mean_tpr,mean_fdr,replicates\n";
  char buf[200];
  for (const auto& name : order) {
    int n = 0;
    double sf = 0.0, sf2 = 0.0, st = 0.0, sd = 0.0;
    for (const auto& r : rows) {
      if (r.method != name || r.failed) continue;
      ++n;
      sf += r.f1;
      sf2 += r.f1 * r.f1;
      st += r.tpr;
      sd += r.fdr;
    }
    if (n == 0) {
      out += name + ",nan,nan,nan,nan,0\n";
      continue;
    }
    const double mean = sf / n;
    const double var = n > 1 ? std::max(0.0, (sf2 - n * mean * mean) / (n - 1)) : 0.0;
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.6f,%.6f,%d\n", name.c_str(), mean,
                  std::sqrt(var), st / n, sd / n, n);
    out += buf;
  }
  return out;
}

void write_benchmark(const std::string& rows_path, const std::string& summary_path,
                     const std::vector<ResultRow>& rows, bool include_timing) {
  auto dump = [](const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) fail("io_error", "cannot open '" + path + "' for writing");
    f << text;
    if (!f) fail("io_error", "failed writing '" + path + "'");
  };
  dump(rows_path, format_rows_csv(rows, include_timing));
  dump(summary_path, format_summary_csv(rows));
}

}  // namespace sgm

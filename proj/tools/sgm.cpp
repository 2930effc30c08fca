#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgm/baselines.hpp"
#include "sgm/bench.hpp"
#include "sgm/config.hpp"
#include "sgm/core.hpp"
#include "sgm/csv.hpp"
#include "sgm/estimator.hpp"
#include "sgm/simgen.hpp"
#include "sgm/solver.hpp"
#include "sgm/stability.hpp"
#include "sgm/types.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

using nlohmann::json;

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) sgm::fail("io_error", "cannot create directory '" + dir + "': " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) sgm::fail("io_error", "cannot open '" + path + "' for writing");
  f << text;
  if (!f) sgm::fail("io_error", "failed writing '" + path + "'");
}

std::string hash_hex(const std::string& canonical) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(sgm::config_hash(canonical)));
  return buf;
}

// Sidecar identifying the run: tool, version, subcommand, seed, and a hash of the
// canonical config (plus the config itself), enough to reproduce bit-exactly.
json meta_base(const std::string& subcommand, std::uint64_t seed, const json& config) {
  json m;
  m["tool"] = "sgm";
  m["version"] = kVersion;
  m["subcommand"] = subcommand;
  m["seed"] = seed;
  m["config"] = config;
  m["config_hash"] = hash_hex(config.dump(2));
  return m;
}

double parse_positive(const std::string& s, const char* what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !(v > 0.0))
    sgm::fail("usage", std::string(what) + " must be 'auto' or a positive number, got '" + s + "'");
  return v;
}

sgm::CombinationRule parse_rule(const std::string& rule) {
  if (rule == "and") return sgm::CombinationRule::And;
  if (rule == "or") return sgm::CombinationRule::Or;
  sgm::fail("usage", "rule must be 'and' or 'or', got '" + rule + "'");
}

int cmd_simulate(const std::string& config_path, const std::string& out,
                 std::uint64_t seed) {
  sgm::ScenarioSpec spec;
  if (!config_path.empty()) spec = sgm::load_scenario(config_path);
  const sgm::GeneratedData gen = sgm::generate_scenario(spec, seed);
  ensure_dir(out);
  sgm::save_csv(join(out, "data.csv"), gen.data);
  sgm::save_edge_list(join(out, "truth.csv"), gen.truth);
  json meta = meta_base("simulate", seed, json::parse(sgm::scenario_to_json(spec)));
  meta["rows"] = gen.data.n();
  meta["columns"] = gen.data.p();
  meta["truth_edges"] = gen.truth.edge_count();
  write_text(join(out, "meta.json"), meta.dump(2) + "\n");
  return 0;
}

int cmd_fit(const std::string& data_path, int nu, const std::string& lambda_arg,
            const std::string& rule_arg, const std::string& out, int threads) {
  const sgm::ShapeParam shape(nu);
  const sgm::CombinationRule rule = parse_rule(rule_arg);
  const sgm::Dataset data = sgm::load_csv(data_path);
  const sgm::Dataset std_data = sgm::standardize(data);
  ensure_dir(out);

  json config{{"data", data_path}, {"nu", nu}, {"lambda", lambda_arg}, {"rule", rule_arg}};
  json meta = meta_base("fit", 0, config);

  if (lambda_arg == "auto") {
    const auto grid = sgm::default_lambda_grid(sgm::graph_lambda_max(std_data, shape));
    const auto path = sgm::edge_path(data, shape, grid, rule, {}, threads);
    std::string text = "lambda,edge_count\n";
    char buf[64];
    for (const auto& [lam, count] : path) {
      std::snprintf(buf, sizeof buf, "%.10g,%d\n", lam, count);
      text += buf;
    }
    write_text(join(out, "path.csv"), text);
    meta["grid_points"] = static_cast<int>(grid.size());
  } else {
    const double lambda = parse_positive(lambda_arg, "--lambda");
    const int p = std_data.p();
    std::vector<sgm::NeighborhoodFit> fits(p);
    for (int node = 0; node < p; ++node)
      fits[node] = sgm::fit_neighborhood(std_data, node, shape, lambda);
    const sgm::Graph g = sgm::assemble_graph(fits, rule);
    sgm::save_edge_list(join(out, "edges.csv"), g);
    Eigen::MatrixXd coef(p, p);
    for (int node = 0; node < p; ++node) coef.row(node) = fits[node].coef.transpose();
    sgm::save_csv(join(out, "coefficients.csv"), sgm::Dataset(coef));
    meta["lambda"] = lambda;
    meta["edges"] = g.edge_count();
  }
  write_text(join(out, "meta.json"), meta.dump(2) + "\n");
  return 0;
}

int cmd_stability(const std::string& data_path, std::vector<int> nu_grid,
                  std::vector<double> lambda_grid, int replicates, double threshold,
                  std::uint64_t seed, const std::string& rule_arg, const std::string& out,
                  int threads) {
  const sgm::CombinationRule rule = parse_rule(rule_arg);
  const sgm::Dataset data = sgm::load_csv(data_path);
  if (nu_grid.empty()) nu_grid = {2, 4, 8};
  if (lambda_grid.empty()) {
    const sgm::Dataset std_data = sgm::standardize(data);
    double lmax = 0.0;
    for (int nu : nu_grid)
      lmax = std::max(lmax, sgm::graph_lambda_max(std_data, sgm::ShapeParam(nu)));
    lambda_grid = sgm::default_lambda_grid(lmax, 15, 2.0);
  }

  sgm::StabilityConfig cfg;
  cfg.replicates = replicates;
  cfg.threshold = threshold;
  cfg.rule = rule;
  cfg.seed = seed;
  cfg.threads = threads;
  const sgm::StabilitySelection sel = sgm::stability_tune(data, nu_grid, lambda_grid, cfg);

  ensure_dir(out);
  sgm::save_frequency_matrix(join(out, "profile.csv"), sel.profile.freq);
  sgm::save_edge_list(join(out, "stable_edges.csv"), sel.graph);
  json config{{"data", data_path},     {"nu_grid", nu_grid},   {"lambda_grid", lambda_grid},
              {"replicates", replicates}, {"threshold", threshold}, {"rule", rule_arg}};
  json meta = meta_base("stability", seed, config);
  meta["selected"] = {{"nu", sel.nu}, {"lambda", sel.lambda}};
  meta["stable_edges"] = sel.graph.edge_count();
  meta["failures"] = sel.profile.failures;
  write_text(join(out, "meta.json"), meta.dump(2) + "\n");
  return 0;
}

int cmd_benchmark(const std::string& config_path, const std::string& out, int threads,
                  bool timing) {
  sgm::ExperimentConfig cfg = sgm::load_experiment(config_path);
  if (threads > 0) cfg.threads = threads;
  if (timing) cfg.include_timing = true;
  const auto rows = sgm::run_experiment(cfg);
  ensure_dir(out);
  sgm::write_benchmark(join(out, "results.csv"), join(out, "summary.csv"), rows,
                       cfg.include_timing);
  json meta = meta_base("benchmark", cfg.seed, json::parse(sgm::experiment_to_json(cfg)));
  meta["rows"] = static_cast<int>(rows.size());
  write_text(join(out, "meta.json"), meta.dump(2) + "\n");
  return 0;
}

int cmd_score(const std::string& estimate_path, const std::string& truth_path, int p) {
  const sgm::Graph est = sgm::load_edge_list(estimate_path, p);
  const sgm::Graph truth = sgm::load_edge_list(truth_path, p);
  const sgm::Scores s = sgm::f1_score(est, truth);
  std::printf("%.6f,%.6f,%.6f\n", s.f1, s.tpr, s.fdr);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tail-aware graphical model estimation toolkit"};
  app.require_subcommand(1);

  std::string config_path, out, data_path, lambda_arg = "auto", rule = "and";
  std::string estimate_path, truth_path;
  std::uint64_t seed = 1;
  int nu = 2, threads = 0, replicates = 50, p = 0;
  double threshold = 0.9;
  std::vector<int> nu_grid;
  std::vector<double> lambda_grid;
  bool timing = false;

  auto* sim = app.add_subcommand("simulate", "Generate a dataset plus its ground-truth edges");
  sim->add_option("--config", config_path, "Scenario JSON (defaults used when omitted)");
  sim->add_option("--out", out, "Output directory")->required();
  sim->add_option("--seed", seed, "RNG seed");

  auto* fit = app.add_subcommand("fit", "Estimate a graph from a dataset CSV");
  fit->add_option("--data", data_path, "Dataset CSV")->required();
  fit->add_option("--nu", nu, "Tail exponent (even integer >= 2)");
  fit->add_option("--lambda", lambda_arg, "Penalty level, or 'auto' for a path report");
  fit->add_option("--rule", rule, "Neighborhood symmetrization: and | or");
  fit->add_option("--out", out, "Output directory")->required();
  fit->add_option("--threads", threads, "Worker threads (0 = hardware)");

  auto* stab = app.add_subcommand("stability", "Bootstrap stability selection over a grid");
  stab->add_option("--data", data_path, "Dataset CSV")->required();
  stab->add_option("--nu", nu_grid, "Tail exponent grid (default 2 4 8)");
  stab->add_option("--lambda", lambda_grid, "Penalty grid (default: 15 points, 2 decades)");
  stab->add_option("--replicates", replicates, "Bootstrap replicates");
  stab->add_option("--threshold", threshold, "Edge keep frequency");
  stab->add_option("--seed", seed, "RNG seed");
  stab->add_option("--rule", rule, "Neighborhood symmetrization: and | or");
  stab->add_option("--out", out, "Output directory")->required();
  stab->add_option("--threads", threads, "Worker threads (0 = hardware)");

  auto* bench = app.add_subcommand("benchmark", "Run a replicated method-comparison experiment");
  bench->add_option("--config", config_path, "Experiment JSON")->required();
  bench->add_option("--out", out, "Output directory")->required();
  bench->add_option("--threads", threads, "Override config threads (0 = keep)");
  bench->add_flag("--timing", timing, "Record wall times (breaks byte-identical reruns)");

  auto* score = app.add_subcommand("score", "F1/TPR/FDR of an edge list against a truth edge list");
  score->add_option("--estimate", estimate_path, "Estimated edge list CSV")->required();
  score->add_option("--truth", truth_path, "Truth edge list CSV")->required();
  score->add_option("--p", p, "Node count")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error:usage: " << e.what() << "\n";
    return 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config_path, out, seed);
    if (fit->parsed()) return cmd_fit(data_path, nu, lambda_arg, rule, out, threads);
    if (stab->parsed())
      return cmd_stability(data_path, nu_grid, lambda_grid, replicates, threshold, seed, rule,
                           out, threads);
    if (bench->parsed()) return cmd_benchmark(config_path, out, threads, timing);
    if (score->parsed()) return cmd_score(estimate_path, truth_path, p);
  } catch (const sgm::Error& e) {
    std::cerr << e.what() << "\n";
    return e.category() == "config_error" || e.category() == "usage" ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error:internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

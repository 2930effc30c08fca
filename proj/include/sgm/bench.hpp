#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgm/estimator.hpp"
#include "sgm/simgen.hpp"
#include "sgm/types.hpp"

namespace sgm {

enum class MethodKind { Subbotin, GaussianNs, Quantile, CopulaBlockMax };

// One competing estimator: a family plus its fixed hyperparameters. The penalty
// is tuned per replicate (oracle: edge count of the generating graph).
struct MethodSpec {
  MethodKind kind = MethodKind::Subbotin;
  int nu = 8;               // Subbotin
  double tau = 0.5;         // Quantile
  double smoothing = 1e-3;  // Quantile kink half-width
  int block_size = 10;      // CopulaBlockMax

  static MethodSpec subbotin(int nu);
  static MethodSpec gaussian_ns();
  static MethodSpec quantile(double tau, double smoothing = 1e-3);
  static MethodSpec copula(int block_size);

  // "subbotin_nu8", "gaussian_ns", "quantile_0.5", "copula_10"
  std::string name() const;
};

struct ExperimentConfig {
  ScenarioSpec scenario;
  std::vector<MethodSpec> methods;
  int replicates = 10;
  std::uint64_t seed = 1;
  CombinationRule rule = CombinationRule::And;
  LassoConfig solver;
  bool include_timing = false;  // false writes 0.000 so reruns are byte-identical
  int threads = 0;
};

struct Scores {
  double f1 = 0.0;
  double tpr = 0.0;
  double fdr = 0.0;
};

// Edge-set F1 against the generating graph. Conventions: both empty -> (1,1,0);
// empty estimate vs non-empty truth -> (0,0,0); non-empty estimate vs empty
// truth -> f1 0, tpr 1 (vacuous), fdr 1.
Scores f1_score(const Graph& estimate, const Graph& truth);

struct ResultRow {
  std::string scenario;
  std::string method;
  int replicate = 0;
  bool failed = false;  // serialized as nan scores and -1 counts
  double f1 = 0.0, tpr = 0.0, fdr = 0.0;
  double selected_lambda = 0.0;
  int selected_nu = -1;  // -1 when the method has no tail exponent
  int edge_count = 0;
  double wall_time_ms = 0.0;
  std::uint64_t seed = 0;  // replicate seed (shared by all methods on that replicate)
};

// Generate `replicates` datasets (replicate r seeded independently of the method
// list), run every method on each, score against the truth. Method failures
// become flagged rows; the sweep continues. Row order is (replicate, method as
// configured) regardless of thread count.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

// "scenario,method,replicate,f1,tpr,fdr,selected_lambda,selected_nu,edge_count,wall_time_ms,seed"
std::string format_rows_csv(const std::vector<ResultRow>& rows, bool include_timing);

// "method,mean_f1,sd_f1,mean_tpr,mean_fdr,replicates" over non-failed rows,
// methods in first-appearance order.
std::string format_summary_csv(const std::vector<ResultRow>& rows);

void write_benchmark(const std::string& rows_path, const std::string& summary_path,
                     const std::vector<ResultRow>& rows, bool include_timing);

}  // namespace sgm

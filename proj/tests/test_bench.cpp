#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sgm/bench.hpp"

using namespace sgm;
using doctest::Approx;

namespace {

Graph graph_of(int p, std::initializer_list<std::pair<int, int>> edges) {
  Graph g(p);
  for (auto& e : edges) g.add_edge(e.first, e.second);
  return g;
}

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.scenario.kind = ScenarioKind::Subbotin;
  cfg.scenario.graph.kind = GraphKind::Chain;
  cfg.scenario.graph.p = 4;
  cfg.scenario.theta.magnitude = 0.35;
  cfg.scenario.theta.signs = SignScheme::AllPositive;
  cfg.scenario.nu_true = 2;
  cfg.scenario.n = 150;
  cfg.methods = {MethodSpec::subbotin(2), MethodSpec::gaussian_ns()};
  cfg.replicates = 2;
  cfg.seed = 1;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("f1_score: exact values and edge-case conventions") {
  SUBCASE("identical graphs score perfectly") {
    const Graph g = graph_of(5, {{0, 1}, {2, 3}});
    const Scores s = f1_score(g, g);
    CHECK(s.f1 == 1.0);
    CHECK(s.tpr == 1.0);
    CHECK(s.fdr == 0.0);
  }

  SUBCASE("disjoint non-empty graphs score zero with full false discovery") {
    const Scores s = f1_score(graph_of(5, {{0, 1}}), graph_of(5, {{2, 3}}));
    CHECK(s.f1 == 0.0);
    CHECK(s.tpr == 0.0);
    CHECK(s.fdr == 1.0);
  }

  SUBCASE("three selected, two correct, four true") {
    const Graph est = graph_of(6, {{0, 1}, {1, 2}, {4, 5}});
    const Graph truth = graph_of(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
    const Scores s = f1_score(est, truth);
    CHECK(s.f1 == Approx(4.0 / 7.0).epsilon(1e-15));
    CHECK(s.tpr == Approx(0.5).epsilon(1e-15));
    CHECK(s.fdr == Approx(1.0 / 3.0).epsilon(1e-15));
  }

  SUBCASE("empty-graph conventions") {
    const Graph empty(4);
    const Graph some = graph_of(4, {{0, 1}});
    const Scores both = f1_score(empty, empty);
    CHECK(both.f1 == 1.0);
    CHECK(both.tpr == 1.0);
    CHECK(both.fdr == 0.0);
    const Scores miss = f1_score(empty, some);
    CHECK(miss.f1 == 0.0);
    CHECK(miss.tpr == 0.0);
    CHECK(miss.fdr == 0.0);
    const Scores spurious = f1_score(some, empty);
    CHECK(spurious.f1 == 0.0);
    CHECK(spurious.tpr == 1.0);  // no true edges to miss
    CHECK(spurious.fdr == 1.0);
  }

  SUBCASE("f1 is symmetric in its arguments") {
    CounterRng rng(derive_str(4, "f1sym"));
    for (int rep = 0; rep < 30; ++rep) {
      Graph a(6), b(6);
      for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
          if (rng.uniform() < 0.3) a.add_edge(i, j);
          if (rng.uniform() < 0.3) b.add_edge(i, j);
        }
      CHECK(f1_score(a, b).f1 == f1_score(b, a).f1);
    }
  }

  SUBCASE("node-count mismatch is an error") {
    CHECK_THROWS_AS(f1_score(Graph(3), Graph(4)), Error);
  }
}

TEST_CASE("MethodSpec names are stable identifiers") {
  CHECK(MethodSpec::subbotin(8).name() == "subbotin_nu8");
  CHECK(MethodSpec::subbotin(2).name() == "subbotin_nu2");
  CHECK(MethodSpec::gaussian_ns().name() == "gaussian_ns");
  CHECK(MethodSpec::quantile(0.5).name() == "quantile_0.5");
  CHECK(MethodSpec::quantile(0.25).name() == "quantile_0.25");
  CHECK(MethodSpec::copula(10).name() == "copula_10");
  CHECK_THROWS_AS(MethodSpec::subbotin(3), Error);  // odd tail exponent
}

TEST_CASE("run_experiment: row order, seeding, determinism, and failure rows") {
  const ExperimentConfig cfg = tiny_config();

  SUBCASE("rows are replicate-major in configured method order with shared seeds") {
    const auto rows = run_experiment(cfg);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].method == "subbotin_nu2");
    CHECK(rows[1].method == "gaussian_ns");
    CHECK(rows[2].method == "subbotin_nu2");
    CHECK(rows[3].method == "gaussian_ns");
    for (std::size_t k = 0; k < rows.size(); ++k) {
      CHECK(rows[k].scenario == "subbotin");
      CHECK(rows[k].replicate == static_cast<int>(k / 2));
      CHECK_FALSE(rows[k].failed);
      CHECK(rows[k].f1 >= 0.0);
      CHECK(rows[k].f1 <= 1.0);
      CHECK(rows[k].selected_lambda > 0.0);
      CHECK(rows[k].selected_nu == 2);
      CHECK(rows[k].edge_count >= 0);
    }
    const std::uint64_t base = derive_str(cfg.seed, "subbotin");
    CHECK(rows[0].seed == derive(base, 0));
    CHECK(rows[1].seed == derive(base, 0));
    CHECK(rows[2].seed == derive(base, 1));
    CHECK(rows[3].seed == derive(base, 1));
  }

  SUBCASE("byte-identical rows across reruns and thread counts without timing") {
    const std::string a = format_rows_csv(run_experiment(cfg), false);
    const std::string b = format_rows_csv(run_experiment(cfg), false);
    CHECK(a == b);
    ExperimentConfig cfg4 = cfg;
    cfg4.threads = 4;
    const std::string c = format_rows_csv(run_experiment(cfg4), false);
    CHECK(a == c);
  }

  SUBCASE("an impossible method yields flagged rows and the sweep continues") {
    ExperimentConfig bad = cfg;
    bad.methods = {MethodSpec::subbotin(2), MethodSpec::copula(1000)};  // block > n
    const auto rows = run_experiment(bad);
    REQUIRE(rows.size() == 4);
    CHECK_FALSE(rows[0].failed);
    CHECK(rows[1].failed);
    CHECK(std::isnan(rows[1].f1));
    CHECK(rows[1].selected_nu == -1);
    CHECK(rows[1].edge_count == -1);
    CHECK_FALSE(rows[2].failed);
    CHECK(rows[3].failed);
    const std::string summary = format_summary_csv(rows);
    CHECK(summary.find("copula_1000,nan,nan,nan,nan,0\n") != std::string::npos);
  }

  SUBCASE("validation") {
    ExperimentConfig bad = cfg;
    bad.replicates = 0;
    CHECK_THROWS_AS(run_experiment(bad), Error);
    bad = cfg;
    bad.methods.clear();
    CHECK_THROWS_AS(run_experiment(bad), Error);
    bad = cfg;
    bad.methods = {MethodSpec::subbotin(2), MethodSpec::subbotin(2)};
    CHECK_THROWS_AS(run_experiment(bad), Error);
  }
}

TEST_CASE("format_rows_csv: frozen layout") {
  ResultRow ok;
  ok.scenario = "s";
  ok.method = "m";
  ok.replicate = 0;
  ok.f1 = 0.5;
  ok.tpr = 0.25;
  ok.fdr = 0.125;
  ok.selected_lambda = 0.0123456789;
  ok.selected_nu = 4;
  ok.edge_count = 7;
  ok.wall_time_ms = 1.5;
  ok.seed = 42;
  ResultRow bad;
  bad.scenario = "s";
  bad.method = "m2";
  bad.replicate = 1;
  bad.failed = true;
  bad.wall_time_ms = 9.9;
  bad.seed = 43;

  const std::string header =
      "scenario,method,replicate,f1,tpr,fdr,selected_lambda,selected_nu,edge_count,wall_time_ms,"
      "seed\n";
  CHECK(format_rows_csv({ok, bad}, false) ==
        header +
            "s,m,0,0.500000,0.250000,0.125000,0.0123456789,4,7,0.000,42\n"
            "s,m2,1,nan,nan,nan,nan,-1,-1,0.000,43\n");
  CHECK(format_rows_csv({ok}, true) ==
        header + "s,m,0,0.500000,0.250000,0.125000,0.0123456789,4,7,1.500,42\n");
  CHECK(format_rows_csv({}, false) == header);
}

TEST_CASE("format_summary_csv: frozen aggregation") {
  auto row = [](const std::string& m, double f1, double tpr, double fdr, bool failed = false) {
    ResultRow r;
    r.method = m;
    r.f1 = f1;
    r.tpr = tpr;
    r.fdr = fdr;
    r.failed = failed;
    return r;
  };

  SUBCASE("sample standard deviation over non-failed rows") {
    const std::vector<ResultRow> rows = {row("a", 0.4, 0.2, 0.1), row("b", 1.0, 1.0, 0.0),
                                         row("a", 0.6, 0.4, 0.3)};
    CHECK(format_summary_csv(rows) ==
          "method,mean_f1,sd_f1,mean_tpr,mean_fdr,replicates\n"
          "a,0.500000,0.141421,0.300000,0.200000,2\n"
          "b,1.000000,0.000000,1.000000,0.000000,1\n");
  }

  SUBCASE("failed rows are excluded; all-failed methods report nan") {
    const std::vector<ResultRow> rows = {row("a", 0.4, 0.2, 0.1), row("a", 0.0, 0.0, 0.0, true),
                                         row("c", 0.0, 0.0, 0.0, true)};
    CHECK(format_summary_csv(rows) ==
          "method,mean_f1,sd_f1,mean_tpr,mean_fdr,replicates\n"
          "a,0.400000,0.000000,0.200000,0.100000,1\n"
          "c,nan,nan,nan,nan,0\n");
  }
}

TEST_CASE("write_benchmark emits exactly the formatted text") {
  const ExperimentConfig cfg = tiny_config();
  const auto rows = run_experiment(cfg);
  const std::string dir = "/tmp/sgm_bench_test";
  std::system(("mkdir -p " + dir).c_str());
  write_benchmark(dir + "/rows.csv", dir + "/summary.csv", rows, false);
  CHECK(slurp(dir + "/rows.csv") == format_rows_csv(rows, false));
  CHECK(slurp(dir + "/summary.csv") == format_summary_csv(rows));
  CHECK_THROWS_AS(write_benchmark("/nonexistent_dir/x.csv", dir + "/s.csv", rows, false), Error);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "sgm/core.hpp"
#include "sgm/stability.hpp"

using namespace sgm;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Dataset paired_data(int n, std::uint64_t seed) {
  // (0,1) and (2,3) strongly tied, 4 independent
  CounterRng rng(derive_str(seed, "stabdata"));
  MatrixXd v(n, 5);
  for (int t = 0; t < n; ++t) {
    const double a = rng.normal(), b = rng.normal();
    v(t, 0) = a;
    v(t, 1) = 0.8 * a + 0.6 * rng.normal();
    v(t, 2) = b;
    v(t, 3) = 0.8 * b + 0.6 * rng.normal();
    v(t, 4) = rng.normal();
  }
  return Dataset(v);
}

Dataset pure_noise(int n, int p, std::uint64_t seed) {
  CounterRng rng(derive_str(seed, "stabnull"));
  MatrixXd v(n, p);
  for (int t = 0; t < n; ++t)
    for (int j = 0; j < p; ++j) v(t, j) = rng.normal();
  return Dataset(v);
}

// marker dataset: column 0 carries the row index so resampled rows are traceable
Dataset indexed_data(int n, std::uint64_t seed) {
  CounterRng rng(derive_str(seed, "marker"));
  MatrixXd v(n, 2);
  for (int t = 0; t < n; ++t) {
    v(t, 0) = static_cast<double>(t);
    v(t, 1) = rng.normal();
  }
  return Dataset(v);
}

double consecutive_fraction(const Dataset& boot, int n) {
  int hits = 0;
  for (int t = 0; t + 1 < boot.n(); ++t) {
    const int a = static_cast<int>(boot.values(t, 0));
    const int b = static_cast<int>(boot.values(t + 1, 0));
    if (b == (a + 1) % n) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(boot.n() - 1);
}

}  // namespace

TEST_CASE("stationary_block_bootstrap: row count, provenance, and block structure") {
  const int n = 100;
  const Dataset data = indexed_data(n, 3);

  SUBCASE("always n rows and every row copied from the original") {
    CounterRng rng(derive_str(9, "boot"));
    for (int rep = 0; rep < 20; ++rep) {
      const Dataset boot = stationary_block_bootstrap(data, 7, rng);
      REQUIRE(boot.n() == n);
      REQUIRE(boot.p() == 2);
      for (int t = 0; t < n; ++t) {
        const int idx = static_cast<int>(boot.values(t, 0));
        REQUIRE(idx >= 0);
        REQUIRE(idx < n);
        CHECK(boot.values(t, 1) == data.values(idx, 1));
      }
    }
  }

  SUBCASE("long mean blocks keep consecutive runs; unit blocks are iid rows") {
    CounterRng rng_a(derive_str(10, "boot"));
    double frac_long = 0.0, frac_iid = 0.0;
    const int reps = 40;
    for (int rep = 0; rep < reps; ++rep)
      frac_long += consecutive_fraction(stationary_block_bootstrap(data, 20, rng_a), n);
    CounterRng rng_b(derive_str(11, "boot"));
    for (int rep = 0; rep < reps; ++rep)
      frac_iid += consecutive_fraction(stationary_block_bootstrap(data, 1, rng_b), n);
    frac_long /= reps;
    frac_iid /= reps;
    CHECK(frac_long > 0.85);   // geometric mean-20 blocks: ~95% of adjacent pairs survive
    CHECK(frac_iid < 0.05);    // iid rows: ~1/n
  }

  SUBCASE("unit blocks draw every row with near-uniform frequency") {
    std::vector<int> hits(n, 0);
    CounterRng rng(derive_str(12, "boot"));
    const int reps = 100;
    for (int rep = 0; rep < reps; ++rep) {
      const Dataset boot = stationary_block_bootstrap(data, 1, rng);
      for (int t = 0; t < n; ++t) ++hits[static_cast<int>(boot.values(t, 0))];
    }
    const double total = static_cast<double>(n) * reps;
    for (int i = 0; i < n; ++i) {
      const double f = hits[i] / total;  // expect 1/n = 0.01
      CHECK(f > 0.004);
      CHECK(f < 0.02);
    }
  }

  SUBCASE("deterministic in the generator state") {
    CounterRng r1(derive_str(13, "boot")), r2(derive_str(13, "boot"));
    const Dataset a = stationary_block_bootstrap(data, 5, r1);
    const Dataset b = stationary_block_bootstrap(data, 5, r2);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
    const Dataset c = stationary_block_bootstrap(data, 5, r1);  // advanced state
    CHECK((a.values - c.values).cwiseAbs().maxCoeff() > 0.0);
  }

  SUBCASE("validation") {
    CounterRng rng(derive_str(14, "boot"));
    CHECK_THROWS_AS(stationary_block_bootstrap(Dataset(MatrixXd(0, 2)), 3, rng), Error);
    CHECK_THROWS_AS(stationary_block_bootstrap(data, 0, rng), Error);
  }
}

TEST_CASE("edge_stability: null at large penalties, planted edges, invariances") {
  const Dataset data = paired_data(400, 21);
  StabilityConfig cfg;
  cfg.replicates = 20;
  cfg.seed = 5;

  SUBCASE("above the universal threshold every frequency is zero") {
    StabilityProfile prof = edge_stability(data, ShapeParam(2), 1.5, cfg);
    CHECK(prof.freq.cwiseAbs().maxCoeff() == 0.0);
    CHECK(prof.failures == 0);
    CHECK(prof.replicates == 20);
  }

  SUBCASE("planted pairs are stable, null pairs are not") {
    StabilityProfile prof = edge_stability(data, ShapeParam(2), 0.15, cfg);
    CHECK(prof.freq(0, 1) >= 0.9);
    CHECK(prof.freq(2, 3) >= 0.9);
    CHECK(prof.freq(0, 2) <= 0.3);
    CHECK(prof.freq(0, 4) <= 0.3);
    CHECK(prof.freq(1, 3) <= 0.3);
  }

  SUBCASE("frequency matrix is symmetric with zero diagonal and [0,1] entries") {
    StabilityProfile prof = edge_stability(data, ShapeParam(4), 0.05, cfg);
    for (int i = 0; i < 5; ++i) {
      CHECK(prof.freq(i, i) == 0.0);
      for (int j = 0; j < 5; ++j) {
        CHECK(prof.freq(i, j) == prof.freq(j, i));
        CHECK(prof.freq(i, j) >= 0.0);
        CHECK(prof.freq(i, j) <= 1.0);
      }
    }
  }

  SUBCASE("identical frequencies across reruns and thread counts") {
    StabilityProfile a = edge_stability(data, ShapeParam(2), 0.15, cfg);
    StabilityProfile b = edge_stability(data, ShapeParam(2), 0.15, cfg);
    CHECK((a.freq - b.freq).cwiseAbs().maxCoeff() == 0.0);
    StabilityConfig cfg4 = cfg;
    cfg4.threads = 4;
    StabilityProfile c = edge_stability(data, ShapeParam(2), 0.15, cfg4);
    CHECK((a.freq - c.freq).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("row resampling is value-blind: permuting columns permutes frequencies") {
    const int p = 5;
    MatrixXd rev(data.n(), p);
    for (int j = 0; j < p; ++j) rev.col(p - 1 - j) = data.values.col(j);
    StabilityProfile orig = edge_stability(data, ShapeParam(2), 0.15, cfg);
    StabilityProfile perm = edge_stability(Dataset(rev), ShapeParam(2), 0.15, cfg);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        CHECK(perm.freq(p - 1 - i, p - 1 - j) == orig.freq(i, j));
  }

  SUBCASE("replicates that cannot be fit count as failures and as absent edges") {
    // column 2 is constant except in one row: resamples that miss that row
    // produce a zero-variance column and the refit fails
    Dataset fragile = pure_noise(30, 3, 8);
    fragile.values.col(2).setZero();
    fragile.values(17, 2) = 1.0;
    StabilityConfig fcfg;
    fcfg.replicates = 20;
    fcfg.seed = 2;
    StabilityProfile prof = edge_stability(fragile, ShapeParam(2), 0.4, fcfg);
    CHECK(prof.failures > 0);
    CHECK(prof.failures < 20);  // some resamples do include row 17
    CHECK(prof.replicates == 20);
    CHECK(prof.freq.maxCoeff() <= 1.0 - prof.failures / 20.0);
  }

  SUBCASE("validation") {
    StabilityConfig bad = cfg;
    bad.replicates = 0;
    CHECK_THROWS_AS(edge_stability(data, ShapeParam(2), 0.1, bad), Error);
    bad = cfg;
    bad.threshold = 0.0;
    CHECK_THROWS_AS(edge_stability(data, ShapeParam(2), 0.1, bad), Error);
    bad.threshold = 1.5;
    CHECK_THROWS_AS(edge_stability(data, ShapeParam(2), 0.1, bad), Error);
  }
}

TEST_CASE("select_stable_graph: thresholding and nesting") {
  StabilityProfile prof;
  prof.freq = MatrixXd::Zero(3, 3);
  prof.freq(0, 1) = prof.freq(1, 0) = 0.96;
  prof.freq(1, 2) = prof.freq(2, 1) = 0.80;

  SUBCASE("frozen frequencies at two thresholds") {
    const Graph g95 = select_stable_graph(prof, 0.95);
    CHECK(g95.edge_count() == 1);
    CHECK(g95.has_edge(0, 1));
    const Graph g80 = select_stable_graph(prof, 0.80);  // >= keeps the boundary edge
    CHECK(g80.edge_count() == 2);
    CHECK(g80.has_edge(1, 2));
    CHECK(select_stable_graph(prof, 1.0).edge_count() == 0);
  }

  SUBCASE("higher thresholds give nested subgraphs") {
    CounterRng rng(derive_str(33, "nest"));
    StabilityProfile rp;
    rp.freq = MatrixXd::Zero(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j) rp.freq(i, j) = rp.freq(j, i) = rng.uniform();
    Graph prev = select_stable_graph(rp, 0.2);
    for (double thr : {0.5, 0.7, 0.9}) {
      const Graph g = select_stable_graph(rp, thr);
      for (auto& e : g.edges()) CHECK(prev.has_edge(e.first, e.second));
      CHECK(g.edge_count() <= prev.edge_count());
      prev = g;
    }
  }

  SUBCASE("validation") {
    CHECK_THROWS_AS(select_stable_graph(prof, 0.0), Error);
    CHECK_THROWS_AS(select_stable_graph(prof, 1.0001), Error);
  }
}

TEST_CASE("stability_tune: selection rules and grid bookkeeping") {
  const Dataset data = paired_data(400, 21);
  StabilityConfig cfg;
  cfg.replicates = 15;
  cfg.threshold = 0.9;
  cfg.seed = 7;

  SUBCASE("a single grid point reproduces edge_stability at the derived seed") {
    const auto sel = stability_tune(data, {2}, {0.15}, cfg);
    CHECK(sel.nu == 2);
    CHECK(sel.lambda == 0.15);
    REQUIRE(sel.all_profiles.size() == 1);
    StabilityConfig point = cfg;
    point.seed = derive(derive(cfg.seed, 0), 0);
    StabilityProfile direct = edge_stability(data, ShapeParam(2), 0.15, point);
    CHECK((sel.profile.freq - direct.freq).cwiseAbs().maxCoeff() == 0.0);
    CHECK(sel.graph == select_stable_graph(direct, cfg.threshold));
    CHECK(sel.graph.has_edge(0, 1));
    CHECK(sel.graph.has_edge(2, 3));
  }

  SUBCASE("pure noise keeps at most one stable edge at a strict threshold") {
    const Dataset noise = pure_noise(300, 6, 99);
    StabilityConfig strict = cfg;
    strict.replicates = 25;
    strict.threshold = 0.95;
    const auto sel = stability_tune(noise, {2, 4}, {0.4, 0.2, 0.1}, strict);
    CHECK(sel.graph.edge_count() <= 1);
    CHECK(sel.all_profiles.size() == 6);
  }

  SUBCASE("all-zero ties resolve to the larger penalty, then the smaller shape") {
    const auto sel = stability_tune(data, {4, 2}, {3.0, 5.0}, cfg);
    CHECK(sel.graph.edge_count() == 0);
    CHECK(sel.lambda == 5.0);
    CHECK(sel.nu == 2);
  }

  SUBCASE("profiles are recorded for every grid point in shape-major order") {
    const auto sel = stability_tune(data, {2, 4}, {0.3, 0.15}, cfg);
    REQUIRE(sel.all_profiles.size() == 4);
    for (auto& pr : sel.all_profiles) {
      CHECK(pr.replicates == cfg.replicates);
      CHECK(pr.freq.rows() == 5);
    }
    // grid order: (2,0.3), (2,0.15), (4,0.3), (4,0.15); sparser at larger lambda
    CHECK(sel.all_profiles[0].freq.sum() <= sel.all_profiles[1].freq.sum());
  }

  SUBCASE("validation") {
    CHECK_THROWS_AS(stability_tune(data, {}, {0.1}, cfg), Error);
    CHECK_THROWS_AS(stability_tune(data, {2}, {}, cfg), Error);
    CHECK_THROWS_AS(stability_tune(data, {2}, {-0.1}, cfg), Error);
    CHECK_THROWS_AS(stability_tune(data, {3}, {0.1}, cfg), Error);  // odd shape
  }
}

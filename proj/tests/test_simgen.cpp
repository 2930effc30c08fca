#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "sgm/simgen.hpp"

using namespace sgm;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kEulerGamma = 0.57721566490153286;

GraphSpec chain_spec(int p) {
  GraphSpec s;
  s.kind = GraphKind::Chain;
  s.p = p;
  return s;
}

}  // namespace

TEST_CASE("make_graph: chain, random, and clique topologies") {
  SUBCASE("chain has exactly the consecutive edges") {
    const Graph g = make_graph(chain_spec(4), 1);
    CHECK(g.edge_count() == 3);
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(1, 2));
    CHECK(g.has_edge(2, 3));
    CHECK_FALSE(g.has_edge(0, 2));
  }

  SUBCASE("random graphs are seed-deterministic with the extreme probabilities exact") {
    GraphSpec s;
    s.kind = GraphKind::ErdosRenyi;
    s.p = 12;
    s.edge_prob = 0.3;
    const Graph a = make_graph(s, 5), b = make_graph(s, 5), c = make_graph(s, 6);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    s.edge_prob = 0.0;
    CHECK(make_graph(s, 7).edge_count() == 0);
    s.edge_prob = 1.0;
    CHECK(make_graph(s, 7).edge_count() == 66);
    s.edge_prob = 1.5;
    CHECK_THROWS_AS(make_graph(s, 7), Error);
  }

  SUBCASE("five cliques of six nodes give 75 edges, preserved under rewiring") {
    GraphSpec s;
    s.kind = GraphKind::SmallWorldCliques;
    s.p = 30;
    s.cliques = 5;
    for (double rw : {0.0, 0.1, 0.5}) {
      s.rewire_prob = rw;
      for (std::uint64_t seed : {1, 2, 3}) {
        const Graph g = make_graph(s, seed);
        CHECK(g.nodes() == 30);
        CHECK(g.edge_count() == 75);
      }
    }
    // with no rewiring the graph is exactly the disjoint cliques
    s.rewire_prob = 0.0;
    const Graph g = make_graph(s, 1);
    for (int a = 0; a < 6; ++a)
      for (int b = a + 1; b < 6; ++b) CHECK(g.has_edge(a, b));
    CHECK_FALSE(g.has_edge(5, 6));
  }

  SUBCASE("validation") {
    GraphSpec s;
    s.p = 1;
    CHECK_THROWS_AS(make_graph(s, 1), Error);
    s.p = 10;
    s.kind = GraphKind::SmallWorldCliques;
    s.cliques = 0;
    CHECK_THROWS_AS(make_graph(s, 1), Error);
    s.cliques = 11;
    CHECK_THROWS_AS(make_graph(s, 1), Error);
  }
}

TEST_CASE("make_theta: exact couplings, support fidelity, and definiteness repair") {
  SUBCASE("edgeless graph gives the identity") {
    const ParamMatrix theta = make_theta(Graph(3), ThetaSpec{});
    CHECK((theta.matrix() - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("well-conditioned chain is built verbatim, no repair") {
    ThetaSpec ts;
    ts.magnitude = 0.4;
    ts.signs = SignScheme::AllPositive;
    const Graph g = make_graph(chain_spec(3), 1);
    const ParamMatrix theta = make_theta(g, ts, 2);
    MatrixXd expect(3, 3);
    expect << 1.0, 0.4, 0.0, 0.4, 1.0, 0.4, 0.0, 0.4, 1.0;
    CHECK((theta.matrix() - expect).cwiseAbs().maxCoeff() == 0.0);
    // smallest eigenvalue 1 - 0.4*sqrt(2) stays clear of the default margin
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(theta.matrix(), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() ==
          doctest::Approx(1.0 - 0.4 * std::sqrt(2.0)).epsilon(1e-12));
  }

  SUBCASE("support equals the requested graph for random topologies and signs") {
    GraphSpec gs;
    gs.kind = GraphKind::ErdosRenyi;
    gs.p = 10;
    gs.edge_prob = 0.25;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const Graph g = make_graph(gs, seed);
      for (SignScheme sgn : {SignScheme::AllPositive, SignScheme::RandomSign}) {
        ThetaSpec ts;
        ts.signs = sgn;
        const ParamMatrix theta = make_theta(g, ts, seed);
        CHECK(theta.support() == g);
        CHECK(check_normalizable(theta));
        CHECK((theta.matrix().diagonal().array() == 1.0).all());
      }
    }
  }

  SUBCASE("an ill-conditioned complete graph is lifted back to definiteness") {
    Graph full(6);
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j) full.add_edge(i, j);
    ThetaSpec ts;
    ts.magnitude = 0.96;  // equicorrelation smallest eigenvalue 0.04 < margin 0.05
    ts.signs = SignScheme::AllPositive;
    const ParamMatrix theta = make_theta(full, ts, 3);
    CHECK(theta.support() == full);
    CHECK(check_normalizable(theta));
    CHECK((theta.matrix().diagonal().array() == 1.0).all());
    // lift 0.01 then rescale: couplings shrink to 0.96/1.01
    CHECK(theta.matrix()(0, 1) == doctest::Approx(0.96 / 1.01).epsilon(1e-12));
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(theta.matrix(), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() == doctest::Approx(0.05 / 1.01).epsilon(1e-9));
  }

  SUBCASE("validation") {
    ThetaSpec bad;
    bad.magnitude = 0.0;
    CHECK_THROWS_AS(make_theta(Graph(3), bad), Error);
    bad.magnitude = 0.3;
    bad.pd_margin = 0.0;
    CHECK_THROWS_AS(make_theta(Graph(3), bad), Error);
  }
}

TEST_CASE("gen_subbotin: dimensions, determinism, and pairwise sign") {
  MatrixXd m(2, 2);
  m << 1.0, 0.4, 0.4, 1.0;
  const ParamMatrix theta{m};

  const Dataset a = gen_subbotin(theta, ShapeParam(2), 500, 9);
  CHECK(a.n() == 500);
  CHECK(a.p() == 2);
  const Dataset b = gen_subbotin(theta, ShapeParam(2), 500, 9);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
  const Dataset c = gen_subbotin(theta, ShapeParam(2), 500, 10);
  CHECK((a.values - c.values).cwiseAbs().maxCoeff() > 0.0);

  // positive stored interaction means negative cross-correlation
  const Dataset big = gen_subbotin(theta, ShapeParam(2), 20000, 11);
  const VectorXd x = big.values.col(0), y = big.values.col(1);
  const double corr = ((x.array() - x.mean()) * (y.array() - y.mean())).mean() /
                      std::sqrt((x.array() - x.mean()).square().mean() *
                                (y.array() - y.mean()).square().mean());
  CHECK(corr < -0.25);
  CHECK(corr > -0.55);
}

TEST_CASE("gen_block_maxima: layout, marginal law, and validation") {
  MatrixXd m(2, 2);
  m << 1.0, 0.3, 0.3, 1.0;
  const ParamMatrix theta{m};
  BlockMaximaSpec spec;
  spec.n_blocks = 10000;
  spec.block_size = 5;
  const Dataset data = gen_block_maxima(theta, spec, 4);

  SUBCASE("dimensions and one strict extreme per block and column") {
    REQUIRE(data.n() == 50000);
    REQUIRE(data.p() == 2);
    for (int b = 0; b < 200; ++b) {  // spot-check the first blocks
      for (int j = 0; j < 2; ++j) {
        double mx = -1e300;
        for (int r = 0; r < 5; ++r) mx = std::max(mx, data.values(b * 5 + r, j));
        int at_max = 0;
        for (int r = 0; r < 5; ++r)
          if (data.values(b * 5 + r, j) == mx) ++at_max;
        CHECK(at_max == 1);
      }
    }
  }

  SUBCASE("block maxima follow the designed extreme-value law") {
    const double loc = 5.0 - kEulerGamma;
    for (int j = 0; j < 2; ++j) {
      std::vector<double> maxima(spec.n_blocks);
      for (int b = 0; b < spec.n_blocks; ++b) {
        double mx = -1e300;
        for (int r = 0; r < 5; ++r) mx = std::max(mx, data.values(b * 5 + r, j));
        maxima[b] = mx;
      }
      double mean = 0.0;
      for (double v : maxima) mean += v;
      mean /= maxima.size();
      CHECK(std::abs(mean - 5.0) < 0.1);
      const double ks = oracle::ks_distance(
          maxima, [&](double x) { return std::exp(-std::exp(-(x - loc))); });
      CHECK(ks < 0.02);
    }
  }

  SUBCASE("deterministic in the seed") {
    BlockMaximaSpec small;
    small.n_blocks = 20;
    small.block_size = 4;
    const Dataset a = gen_block_maxima(theta, small, 5);
    const Dataset b = gen_block_maxima(theta, small, 5);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
    const Dataset c = gen_block_maxima(theta, small, 6);
    CHECK((a.values - c.values).cwiseAbs().maxCoeff() > 0.0);
  }

  SUBCASE("validation") {
    BlockMaximaSpec bad;
    bad.n_blocks = 0;
    CHECK_THROWS_AS(gen_block_maxima(theta, bad, 1), Error);
    bad = BlockMaximaSpec{};
    bad.block_size = 0;
    CHECK_THROWS_AS(gen_block_maxima(theta, bad, 1), Error);
    MatrixXd ind(2, 2);
    ind << 1.0, 1.2, 1.2, 1.0;  // indefinite latent precision
    CHECK_THROWS_AS(gen_block_maxima(ParamMatrix{ind}, BlockMaximaSpec{}, 1), Error);
  }
}

TEST_CASE("gen_pot: threshold separation, event counts, and co-occurrence") {
  const Graph chain = make_graph(chain_spec(4), 1);

  SUBCASE("every cell is strictly above or strictly below the threshold") {
    PotSpec spec;
    spec.n = 2000;
    spec.extremes_per_row = 1.0 / 100;
    const Dataset data = gen_pot(chain, spec, 2);
    REQUIRE(data.n() == 2000);
    REQUIRE(data.p() == 4);
    int above = 0;
    for (int r = 0; r < data.n(); ++r)
      for (int j = 0; j < 4; ++j) {
        CHECK(data.values(r, j) != spec.threshold);
        if (data.values(r, j) > spec.threshold) ++above;
      }
    CHECK(above > 0);
  }

  SUBCASE("without excitation the event count is Poisson-consistent") {
    PotSpec spec;
    spec.n = 2000;
    spec.branching = 0.0;
    spec.extremes_per_row = 1.0 / 400;
    Graph empty(6);
    int events = 0;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const Dataset data = gen_pot(empty, spec, seed);
      for (int r = 0; r < data.n(); ++r)
        for (int j = 0; j < 6; ++j)
          if (data.values(r, j) > spec.threshold) ++events;
    }
    // 4 seeds x 6 nodes x 2000 rows / 400 = mean 120, sd ~11
    CHECK(events > 70);
    CHECK(events < 170);
  }

  SUBCASE("connected nodes co-exceed more often than unconnected ones") {
    PotSpec spec;
    spec.n = 2000;
    spec.branching = 0.8;
    spec.decay = 2.0;
    spec.extremes_per_row = 1.0 / 50;
    long conn = 0, unconn = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Dataset data = gen_pot(chain, spec, seed);
      for (int r = 0; r < data.n(); ++r) {
        const auto hot = [&](int j) { return data.values(r, j) > spec.threshold; };
        if (hot(0) && hot(1)) ++conn;
        if (hot(1) && hot(2)) ++conn;
        if (hot(2) && hot(3)) ++conn;
        if (hot(0) && hot(2)) ++unconn;
        if (hot(1) && hot(3)) ++unconn;
        if (hot(0) && hot(3)) ++unconn;
      }
    }
    CHECK(conn > 2 * unconn);
    CHECK(conn > 10);
  }

  SUBCASE("deterministic in the seed") {
    PotSpec spec;
    spec.n = 300;
    spec.extremes_per_row = 1.0 / 50;
    const Dataset a = gen_pot(chain, spec, 3), b = gen_pot(chain, spec, 3);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
    const Dataset c = gen_pot(chain, spec, 4);
    CHECK((a.values - c.values).cwiseAbs().maxCoeff() > 0.0);
  }

  SUBCASE("validation") {
    PotSpec bad;
    bad.n = 0;
    CHECK_THROWS_AS(gen_pot(chain, bad, 1), Error);
    bad = PotSpec{};
    bad.branching = 1.0;
    CHECK_THROWS_AS(gen_pot(chain, bad, 1), Error);
    bad = PotSpec{};
    bad.decay = 0.0;
    CHECK_THROWS_AS(gen_pot(chain, bad, 1), Error);
    bad = PotSpec{};
    bad.extremes_per_row = 0.0;
    CHECK_THROWS_AS(gen_pot(chain, bad, 1), Error);
  }
}

TEST_CASE("generate_scenario: routing, truth graphs, and reproducibility") {
  ScenarioSpec spec;
  spec.graph = chain_spec(5);
  spec.theta.magnitude = 0.3;
  spec.theta.signs = SignScheme::AllPositive;

  SUBCASE("names") {
    CHECK(scenario_name(ScenarioKind::Subbotin) == "subbotin");
    CHECK(scenario_name(ScenarioKind::BlockMaxima) == "block_maxima");
    CHECK(scenario_name(ScenarioKind::Pot) == "pot");
  }

  SUBCASE("model-sample scenario matches the hand-assembled pipeline") {
    spec.kind = ScenarioKind::Subbotin;
    spec.nu_true = 4;
    spec.n = 200;
    const GeneratedData out = generate_scenario(spec, 17);
    const Graph g = make_graph(spec.graph, derive_str(17, "graph"));
    CHECK(out.truth == g);
    CHECK(out.data.n() == 200);
    CHECK(out.data.p() == 5);
    const ParamMatrix theta = make_theta(g, spec.theta, derive_str(17, "theta"));
    const Dataset direct = gen_subbotin(theta, ShapeParam(4), 200, derive_str(17, "data"));
    CHECK((out.data.values - direct.values).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("block-maxima scenario dimensions and truth") {
    spec.kind = ScenarioKind::BlockMaxima;
    spec.block.n_blocks = 30;
    spec.block.block_size = 6;
    const GeneratedData out = generate_scenario(spec, 18);
    CHECK(out.data.n() == 180);
    CHECK(out.data.p() == 5);
    CHECK(out.truth == make_graph(spec.graph, derive_str(18, "graph")));
  }

  SUBCASE("event scenario keeps the raw topology as truth") {
    spec.kind = ScenarioKind::Pot;
    spec.pot.n = 400;
    spec.pot.extremes_per_row = 1.0 / 100;
    const GeneratedData out = generate_scenario(spec, 19);
    CHECK(out.data.n() == 400);
    CHECK(out.truth == make_graph(spec.graph, derive_str(19, "graph")));
    const GeneratedData rerun = generate_scenario(spec, 19);
    CHECK((out.data.values - rerun.data.values).cwiseAbs().maxCoeff() == 0.0);
  }
}

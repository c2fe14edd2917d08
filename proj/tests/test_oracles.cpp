#include "nar/graph.hpp"
#include "nar/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace nar;

namespace {

BFInstance random_er(std::mt19937_64& rng, int n, double p) {
  DatasetSpec spec;
  spec.kind = DatasetKind::Er;
  spec.n = n;
  spec.p = p;
  spec.seed = rng();
  return gen_dataset(spec)[0];
}

}  // namespace

TEST_CASE("bf_update basics") {
  Eigen::VectorXd w(2);
  w << 0.0, 1.0;
  const BFInstance p = make_path_graph(w, 50.0);
  const BFInstance once = bf_update(p);
  CHECK(once.label(0) == 0.0);
  CHECK(once.label(1) == 1.0);

  // Fixed point: true distances are unchanged.
  const BFInstance twice = bf_update(once);
  CHECK(twice.label(0) == once.label(0));
  CHECK(twice.label(1) == once.label(1));
}

TEST_CASE("bf iterated equals Dijkstra") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 10; ++i) {
    const BFInstance g = random_er(rng, 16, 0.25);
    const Eigen::VectorXd bf = bf_k_step(g, 15);
    const Eigen::VectorXd dj = sssp_cost(g.graph, 0);
    for (int v = 0; v < 16; ++v) {
      if (std::isinf(dj[v])) {
        CHECK(bf[v] == g.beta);
      } else {
        CHECK(bf[v] == doctest::Approx(std::min(dj[v], g.beta)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("bf labels are monotone from the BF initialization") {
  std::mt19937_64 rng(6);
  const BFInstance g = random_er(rng, 20, 0.2);
  BFInstance cur = g;
  for (int t = 0; t < 10; ++t) {
    const BFInstance next = bf_update(cur);
    for (int v = 0; v < g.n(); ++v) CHECK(next.label(v) <= cur.label(v));
    cur = next;
  }
}

TEST_CASE("bf_k_step K=0 returns input labels") {
  const auto s6 = counterexample_sssp6();
  CHECK((bf_k_step(s6.G, 0) - s6.G.labels()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sssp rejects negative weights, handles unreachable") {
  WeightedGraph g;
  g.n = 3;
  g.attrs.setZero(3, 1);
  g.edges = {{0, 1, 2.0}};
  const Eigen::VectorXd d = sssp_cost(g, 0);
  CHECK(d[0] == 0.0);
  CHECK(d[1] == 2.0);
  CHECK(std::isinf(d[2]));
  CHECK(format_double(d[2]) == "inf");

  g.edges[0].w = -1.0;
  CHECK_THROWS_AS(sssp_cost(g, 0), std::invalid_argument);
}

TEST_CASE("mst on trees is the edge sum") {
  WeightedGraph g;
  g.n = 5;
  g.attrs.setZero(5, 1);
  g.edges = {{0, 1, 1.5}, {1, 2, 2.5}, {1, 3, 0.5}, {3, 4, 4.0}};
  CHECK(mst_cost(g) == doctest::Approx(8.5).epsilon(1e-15));
  CHECK(msf_via_thresholds(g) == doctest::Approx(8.5).epsilon(1e-15));
}

TEST_CASE("threshold counts on a single-weight graph") {
  WeightedGraph g;
  g.n = 4;
  g.attrs.setZero(4, 1);
  g.edges = {{0, 1, 2.0}, {2, 3, 2.0}};
  const ThresholdCounts tc = threshold_component_counts(g);
  REQUIRE(tc.levels.size() == 1);
  CHECK(tc.levels[0].first == 2.0);
  CHECK(tc.levels[0].second == 4);  // kappa_1 = |V|
  CHECK(tc.kappa_final == 2);
  CHECK(msf_via_thresholds(g) == 4.0);
}

TEST_CASE("threshold formula reproduces the printed MST values") {
  const auto m6 = counterexample_mst6();
  CHECK(msf_via_thresholds(m6.G) == 9.0);
  CHECK(msf_via_thresholds(m6.H) == 7.0);
}

TEST_CASE("threshold formula equals Kruskal on 200 random graphs") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> nd(2, 24);
  std::uniform_real_distribution<double> pd(0.05, 0.9);
  for (int i = 0; i < 200; ++i) {
    DatasetSpec spec;
    spec.kind = DatasetKind::Er;
    spec.n = nd(rng);
    spec.p = pd(rng);
    spec.seed = rng();
    // Coarse weights force ties across edges.
    spec.weight_low = 1.0;
    spec.weight_high = 6.0;
    WeightedGraph g = gen_dataset(spec)[0].graph;
    for (Edge& e : g.edges) e.w = std::round(e.w);
    CHECK(std::abs(mst_cost(g) - msf_via_thresholds(g)) <= 1e-9);
  }
}

TEST_CASE("pagerank fixed point and contraction") {
  // Unit-weight 4-cycle is regular: r stays at 1.
  WeightedGraph g;
  g.n = 4;
  g.attrs.setZero(4, 1);
  g.edges = {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 0, 1.0}};
  const Eigen::VectorXd r = truncated_pagerank(g, 0.5, 9);
  for (int v = 0; v < 4; ++v) CHECK(r[v] == doctest::Approx(1.0).epsilon(1e-15));

  std::mt19937_64 rng(12);
  const BFInstance h = random_er(rng, 24, 0.25);
  for (double xi : {0.5, 0.85, 0.99}) {
    const Eigen::VectorXd ref = truncated_pagerank(h.graph, xi, 200);
    for (int K : {5, 10, 20}) {
      const Eigen::VectorXd rk = truncated_pagerank(h.graph, xi, K);
      CHECK((rk - ref).cwiseAbs().maxCoeff() <= std::pow(xi, K) + 1e-12);
      CHECK(rk.minCoeff() > 0.0);
    }
  }

  CHECK_THROWS_AS(truncated_pagerank(g, 1.5, 3), std::invalid_argument);
  WeightedGraph iso;
  iso.n = 2;
  iso.attrs.setZero(2, 1);
  CHECK_THROWS_AS(truncated_pagerank(iso, 0.5, 3), std::invalid_argument);
}

TEST_CASE("knapsack dp, dag, and brute force agree") {
  KnapsackInstance small;
  small.items = {{2.0, 1}, {3.0, 2}};
  small.capacity = 2;
  CHECK(knapsack_dp(small) == 3.0);

  KnapsackInstance empty;
  empty.capacity = 0;
  empty.items = {{2.0, 1}};
  CHECK(knapsack_dp(empty) == 0.0);
  const auto dag0 = knapsack_to_dag(empty);
  CHECK(dag0.dag.graph.n == 2 * 1 + 1);  // one column per stage plus sink

  std::mt19937_64 rng(14);
  std::uniform_int_distribution<int> nd(1, 8), sd(0, 20), wd(1, 7);
  std::uniform_real_distribution<double> vd(0.1, 9.0);
  for (int i = 0; i < 100; ++i) {
    KnapsackInstance inst;
    inst.capacity = sd(rng);
    const int n = nd(rng);
    for (int j = 0; j < n; ++j) inst.items.push_back({vd(rng), wd(rng)});

    double brute = 0.0;
    for (int mask = 0; mask < (1 << n); ++mask) {
      double value = 0.0;
      int weight = 0;
      for (int j = 0; j < n; ++j)
        if (mask & (1 << j)) {
          value += inst.items[static_cast<std::size_t>(j)].value;
          weight += inst.items[static_cast<std::size_t>(j)].weight;
        }
      if (weight <= inst.capacity) brute = std::max(brute, value);
    }

    CHECK(knapsack_dp(inst) == doctest::Approx(brute).epsilon(1e-12));
    const auto dag = knapsack_to_dag(inst);
    const double shortest = bf_k_step(dag.dag, n + 1)[dag.t];
    CHECK(-shortest == doctest::Approx(brute).epsilon(1e-12));
  }
}

#pragma once

#include "nar/graph.hpp"

#include <utility>
#include <vector>

namespace nar {

// One Bellman-Ford relaxation sweep: a'(v) = min over u in N(v) plus the
// implicit self-loop of a(u) + w(u,v). The graph is unchanged.
BFInstance bf_update(const BFInstance& g);

// Labels after K applications of the update.
Eigen::VectorXd bf_k_step(const BFInstance& g, int K);

// Exact shortest-path costs from s (Dijkstra); unreachable vertices get +inf.
// Rejects negative weights.
Eigen::VectorXd sssp_cost(const WeightedGraph& g, int s);

// Total weight of a minimum spanning forest (Kruskal with union-find, ties
// broken by (weight, u, v)).
double mst_cost(const WeightedGraph& g);

// Distinct weights ascending with component counts of the strict threshold
// subgraphs G_{<w_j}; kappa_final is the component count of G itself.
struct ThresholdCounts {
  std::vector<std::pair<double, int>> levels;  // (w_j, kappa_j)
  int kappa_final = 0;
};
ThresholdCounts threshold_component_counts(const WeightedGraph& g);

// MSF(G) = sum_j (kappa_j - kappa_{j+1}) w_j over the threshold levels.
double msf_via_thresholds(const WeightedGraph& g);

// K-truncated weighted PageRank: r^(0) = 1 and
// r^(t)(u) = (1-xi) + (xi / deg(u)) * sum_{v in N(u)} w_uv r^(t-1)(v),
// with deg(u) the weighted degree. Requires xi in (0,1) and positive
// weighted degrees.
Eigen::VectorXd truncated_pagerank(const WeightedGraph& g, double xi, int K);

struct KnapsackInstance {
  struct Item {
    double value = 0.0;
    int weight = 1;
  };
  std::vector<Item> items;
  int capacity = 0;

  void validate() const;
};

// Exact 0/1 knapsack optimum via dynamic programming over integer weights.
double knapsack_dp(const KnapsackInstance& inst);

// Staged DAG whose shortest s->t distance is -OPT: vertices (i,j) for
// i in [n]_0, j in [S]_0 plus a sink, weight-0 skip edges and weight -v_i
// take edges. The DAG carries negative weights; BF relaxation over it is
// exact because it is acyclic with n+1 stages.
struct KnapsackDag {
  BFInstance dag;
  int s = 0;
  int t = 0;
};
KnapsackDag knapsack_to_dag(const KnapsackInstance& inst);

}  // namespace nar

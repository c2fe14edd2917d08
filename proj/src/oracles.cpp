#include "nar/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace nar {

BFInstance bf_update(const BFInstance& g) {
  const auto adj = in_adjacency(g.graph);
  BFInstance out = g;
  for (int v = 0; v < g.n(); ++v) {
    double best = g.label(v);  // self-loop of weight 0
    for (const auto& [u, w] : adj[static_cast<std::size_t>(v)])
      best = std::min(best, g.label(u) + w);
    out.set_label(v, best);
  }
  return out;
}

Eigen::VectorXd bf_k_step(const BFInstance& g, int K) {
  if (K < 0) throw std::invalid_argument("bf_k_step: K must be nonnegative");
  BFInstance cur = g;
  for (int t = 0; t < K; ++t) cur = bf_update(cur);
  return cur.labels();
}

Eigen::VectorXd sssp_cost(const WeightedGraph& g, int s) {
  if (s < 0 || s >= g.n) throw std::invalid_argument("sssp_cost: bad source");
  for (const Edge& e : g.edges)
    if (e.w < 0.0) throw std::invalid_argument("sssp_cost: negative weight");
  std::vector<std::vector<std::pair<int, double>>> out_adj(static_cast<std::size_t>(g.n));
  for (const Edge& e : g.edges) {
    if (e.u == e.v) continue;
    out_adj[static_cast<std::size_t>(e.u)].emplace_back(e.v, e.w);
    if (!g.directed) out_adj[static_cast<std::size_t>(e.v)].emplace_back(e.u, e.w);
  }
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::VectorXd dist = Eigen::VectorXd::Constant(g.n, inf);
  dist[s] = 0.0;
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  pq.push({0.0, s});
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    for (const auto& [u, w] : out_adj[static_cast<std::size_t>(v)]) {
      if (d + w < dist[u]) {
        dist[u] = d + w;
        pq.push({dist[u], u});
      }
    }
  }
  return dist;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
    return true;
  }
};

}  // namespace

double mst_cost(const WeightedGraph& g) {
  std::vector<Edge> edges = g.edges;
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.w, a.u, a.v) < std::tie(b.w, b.u, b.v);
  });
  UnionFind uf(g.n);
  double total = 0.0;
  for (const Edge& e : edges)
    if (e.u != e.v && uf.unite(e.u, e.v)) total += e.w;
  return total;
}

ThresholdCounts threshold_component_counts(const WeightedGraph& g) {
  std::vector<double> weights;
  for (const Edge& e : g.edges)
    if (e.u != e.v) weights.push_back(e.w);
  std::sort(weights.begin(), weights.end());
  weights.erase(std::unique(weights.begin(), weights.end()), weights.end());

  auto components_below = [&](double w, bool strict) {
    UnionFind uf(g.n);
    int comps = g.n;
    for (const Edge& e : g.edges) {
      if (e.u == e.v) continue;
      const bool keep = strict ? e.w < w : true;
      if (keep && uf.unite(e.u, e.v)) --comps;
    }
    return comps;
  };

  ThresholdCounts out;
  for (double w : weights) out.levels.emplace_back(w, components_below(w, true));
  out.kappa_final = components_below(0.0, false);
  return out;
}

double msf_via_thresholds(const WeightedGraph& g) {
  const ThresholdCounts tc = threshold_component_counts(g);
  double total = 0.0;
  for (std::size_t j = 0; j < tc.levels.size(); ++j) {
    const int kappa_next =
        j + 1 < tc.levels.size() ? tc.levels[j + 1].second : tc.kappa_final;
    total += (tc.levels[j].second - kappa_next) * tc.levels[j].first;
  }
  return total;
}

Eigen::VectorXd truncated_pagerank(const WeightedGraph& g, double xi, int K) {
  if (!(xi > 0.0 && xi < 1.0)) throw std::invalid_argument("truncated_pagerank: xi outside (0,1)");
  if (K < 0) throw std::invalid_argument("truncated_pagerank: K must be nonnegative");
  const auto adj = in_adjacency(g);
  Eigen::VectorXd deg = Eigen::VectorXd::Zero(g.n);
  for (int v = 0; v < g.n; ++v)
    for (const auto& [u, w] : adj[static_cast<std::size_t>(v)]) deg[v] += w;
  for (int v = 0; v < g.n; ++v)
    if (!(deg[v] > 0.0)) throw std::invalid_argument("truncated_pagerank: zero weighted degree");
  Eigen::VectorXd r = Eigen::VectorXd::Ones(g.n);
  for (int t = 0; t < K; ++t) {
    Eigen::VectorXd next(g.n);
    for (int v = 0; v < g.n; ++v) {
      double acc = 0.0;
      for (const auto& [u, w] : adj[static_cast<std::size_t>(v)]) acc += w * r[u];
      next[v] = (1.0 - xi) + xi / deg[v] * acc;
    }
    r = next;
  }
  return r;
}

void KnapsackInstance::validate() const {
  if (capacity < 0) throw std::invalid_argument("knapsack: capacity must be nonnegative");
  for (const Item& it : items) {
    if (it.weight < 1) throw std::invalid_argument("knapsack: item weight must be >= 1");
    if (!(it.value > 0.0)) throw std::invalid_argument("knapsack: item value must be positive");
  }
}

double knapsack_dp(const KnapsackInstance& inst) {
  inst.validate();
  std::vector<double> best(static_cast<std::size_t>(inst.capacity) + 1, 0.0);
  for (const auto& it : inst.items)
    for (int j = inst.capacity; j >= it.weight; --j)
      best[static_cast<std::size_t>(j)] =
          std::max(best[static_cast<std::size_t>(j)],
                   best[static_cast<std::size_t>(j - it.weight)] + it.value);
  return best[static_cast<std::size_t>(inst.capacity)];
}

KnapsackDag knapsack_to_dag(const KnapsackInstance& inst) {
  inst.validate();
  const int n = static_cast<int>(inst.items.size());
  const int S = inst.capacity;
  const int cols = S + 1;
  auto id = [cols](int i, int j) { return i * cols + j; };
  const int sink = (n + 1) * cols;

  KnapsackDag out;
  WeightedGraph& g = out.dag.graph;
  g.n = sink + 1;
  g.directed = true;
  for (int i = 1; i <= n; ++i) {
    const auto& item = inst.items[static_cast<std::size_t>(i - 1)];
    for (int j = 0; j <= S; ++j) {
      g.edges.push_back({id(i - 1, j), id(i, j), 0.0});
      if (j + item.weight <= S)
        g.edges.push_back({id(i - 1, j), id(i, j + item.weight), -item.value});
    }
  }
  for (int j = 0; j <= S; ++j) g.edges.push_back({id(n, j), sink, 0.0});

  // Beta only has to dominate every achievable path value so that unreached
  // states never win a relaxation.
  double total_value = 0.0;
  for (const auto& it : inst.items) total_value += it.value;
  out.dag.beta = 2.0 * total_value + 1.0;
  g.attrs.setConstant(g.n, 1, out.dag.beta);
  g.attrs(id(0, 0), 0) = 0.0;
  out.s = id(0, 0);
  out.t = sink;
  return out;
}

}  // namespace nar

#include "nar/wl.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace nar {

namespace {

// Neighbor lists (self-loops dropped, edges treated symmetrically) in
// deterministic order.
std::vector<std::vector<std::pair<int, double>>> neighbors(const WeightedGraph& g) {
  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(g.n));
  for (const Edge& e : g.edges) {
    if (e.u == e.v) continue;
    adj[static_cast<std::size_t>(e.u)].emplace_back(e.v, e.w);
    adj[static_cast<std::size_t>(e.v)].emplace_back(e.u, e.w);
  }
  return adj;
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<int, int> fwd, bwd;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [it1, new1] = fwd.try_emplace(a[i], b[i]);
    if (!new1 && it1->second != b[i]) return false;
    auto [it2, new2] = bwd.try_emplace(b[i], a[i]);
    if (!new2 && it2->second != a[i]) return false;
  }
  return true;
}

std::map<int, int> histogram(const std::vector<int>& colors, std::size_t begin, std::size_t end) {
  std::map<int, int> h;
  for (std::size_t i = begin; i < end; ++i) ++h[colors[i]];
  return h;
}

Coloring refine(const WeightedGraph& g, const std::vector<int>& init, ColorInterner* interner,
                std::optional<int> iters) {
  if (static_cast<int>(init.size()) != g.n)
    throw std::invalid_argument("wl refinement: init size != n");
  ColorInterner local;
  ColorInterner& in = interner ? *interner : local;
  const auto adj = neighbors(g);

  Coloring out;
  out.history.push_back(init);
  std::vector<int> cur = init;
  const int max_rounds = iters.value_or(std::max(g.n, 1));
  for (int round = 0; round < max_rounds; ++round) {
    std::vector<int> next(static_cast<std::size_t>(g.n));
    for (int v = 0; v < g.n; ++v) {
      ColorInterner::Key key;
      key.first = cur[static_cast<std::size_t>(v)];
      for (const auto& [u, w] : adj[static_cast<std::size_t>(v)])
        key.second.emplace_back(cur[static_cast<std::size_t>(u)], w);
      std::sort(key.second.begin(), key.second.end());
      next[static_cast<std::size_t>(v)] = in.intern(key);
    }
    const bool stable = same_partition(cur, next);
    out.history.push_back(next);
    cur = std::move(next);
    if (!iters && stable) break;
  }
  out.iterations = static_cast<int>(out.history.size()) - 1;
  out.colors = cur;
  return out;
}

}  // namespace

int ColorInterner::intern(const Key& key) {
  auto [it, inserted] = table_.try_emplace(key, static_cast<int>(table_.size()));
  return it->second;
}

Coloring wl1_refine(const WeightedGraph& g, const std::vector<int>& init, ColorInterner* interner,
                    std::optional<int> iters) {
  return refine(g, init, interner, iters);
}

bool wl1_distinguish_graphs(const WeightedGraph& g, const WeightedGraph& h) {
  const WeightedGraph u = disjoint_union(g, h);
  const Coloring col = wl1_refine(u, std::vector<int>(static_cast<std::size_t>(u.n), 0));
  const auto ng = static_cast<std::size_t>(g.n);
  for (const auto& it : col.history) {
    if (histogram(it, 0, ng) != histogram(it, ng, it.size())) return true;
  }
  return false;
}

bool wl1_distinguish_vertices(const WeightedGraph& g, int u, int v) {
  if (u < 0 || u >= g.n || v < 0 || v >= g.n)
    throw std::invalid_argument("wl1_distinguish_vertices: bad vertex");
  const Coloring col = wl1_refine(g, std::vector<int>(static_cast<std::size_t>(g.n), 0));
  return col.colors[static_cast<std::size_t>(u)] != col.colors[static_cast<std::size_t>(v)];
}

Coloring iwl_refine(const WeightedGraph& g, int r, ColorInterner* interner,
                    std::optional<int> iters) {
  if (r < 0 || r >= g.n) throw std::invalid_argument("iwl_refine: root index out of range");
  std::vector<int> init(static_cast<std::size_t>(g.n), 0);
  init[static_cast<std::size_t>(r)] = 1;  // the reserved label [*]
  return refine(g, init, interner, iters);
}

bool iwl_distinguish_tuple(const WeightedGraph& g, int r, int v, const WeightedGraph& h, int s,
                           int w) {
  const int T = std::max(g.n, h.n);
  ColorInterner shared;
  const Coloring cg = iwl_refine(g, r, &shared, T);
  const Coloring ch = iwl_refine(h, s, &shared, T);
  return cg.colors[static_cast<std::size_t>(v)] != ch.colors[static_cast<std::size_t>(w)];
}

bool iwl_distinguish_rooted(const WeightedGraph& g, int r, const WeightedGraph& h, int s) {
  if (g.n != h.n) return true;
  const int T = std::max(g.n, h.n);
  ColorInterner shared;
  Coloring cg = iwl_refine(g, r, &shared, T);
  Coloring ch = iwl_refine(h, s, &shared, T);
  std::sort(cg.colors.begin(), cg.colors.end());
  std::sort(ch.colors.begin(), ch.colors.end());
  return cg.colors != ch.colors;
}

bool wl11_distinguish(const WeightedGraph& g, const WeightedGraph& h) {
  if (g.n != h.n) return true;
  const int T = std::max(g.n, h.n);
  ColorInterner shared;
  auto signatures = [&](const WeightedGraph& x) {
    std::vector<std::vector<int>> sigs;
    for (int r = 0; r < x.n; ++r) {
      Coloring c = iwl_refine(x, r, &shared, T);
      std::sort(c.colors.begin(), c.colors.end());
      sigs.push_back(std::move(c.colors));
    }
    std::sort(sigs.begin(), sigs.end());
    return sigs;
  };
  return signatures(g) != signatures(h);
}

std::string unrolling_tree(const WeightedGraph& g, int u, int L, std::optional<int> root) {
  if (u < 0 || u >= g.n) throw std::invalid_argument("unrolling_tree: bad vertex");
  if (L < 0) throw std::invalid_argument("unrolling_tree: negative depth");
  const auto adj = neighbors(g);
  // Recursion writes "(label children...)" with children sorted by
  // (weight token, code); equal codes then mean isomorphic trees.
  std::function<std::string(int, int)> code = [&](int v, int depth) -> std::string {
    std::string label = (root && *root == v) ? "*" : ".";
    if (depth == 0) return "(" + label + ")";
    std::vector<std::string> kids;
    for (const auto& [w_vtx, w] : adj[static_cast<std::size_t>(v)])
      kids.push_back("[" + format_double(w) + "]" + code(w_vtx, depth - 1));
    std::sort(kids.begin(), kids.end());
    std::string out = "(" + label;
    for (const std::string& k : kids) out += k;
    out += ")";
    return out;
  };
  return code(u, L);
}

}  // namespace nar

#pragma once

#include "nar/graph.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nar {

// Interns (old color, multiset of (neighbor color, weight)) pairs into dense
// ids. Sharing one interner across refinement runs makes iteration-t colors
// comparable between runs, which the rooted-signature tests rely on.
class ColorInterner {
 public:
  using Key = std::pair<int, std::vector<std::pair<int, double>>>;
  int intern(const Key& key);
  int size() const { return static_cast<int>(table_.size()); }

 private:
  std::map<Key, int> table_;
};

struct Coloring {
  std::vector<int> colors;                 // stable coloring
  std::vector<std::vector<int>> history;   // colors per iteration, [0] = init
  int iterations = 0;                      // iterations to stability
};

// Edge-weight-aware color refinement: each iteration relabels v by the pair
// (C(v), {{(C(u), w(u,v)) : u in N(v)}}) until the partition stabilizes.
// Self-loops are ignored. If iters is given, runs exactly that many rounds
// instead of stopping at stability.
Coloring wl1_refine(const WeightedGraph& g, const std::vector<int>& init,
                    ColorInterner* interner = nullptr, std::optional<int> iters = std::nullopt);

// Run on the disjoint union with uniform init; distinguished iff some
// iteration's color histograms differ.
bool wl1_distinguish_graphs(const WeightedGraph& g, const WeightedGraph& h);
// Stable colors of u and v under uniform init on g.
bool wl1_distinguish_vertices(const WeightedGraph& g, int u, int v);

// 1-WL with vertex r individualized by a reserved initial color.
Coloring iwl_refine(const WeightedGraph& g, int r, ColorInterner* interner = nullptr,
                    std::optional<int> iters = std::nullopt);

// Compares stable colors of v (root r in G) and w (root s in H).
bool iwl_distinguish_tuple(const WeightedGraph& g, int r, int v, const WeightedGraph& h, int s,
                           int w);
// Rooted graph level: stable color multisets of the two individualized runs.
bool iwl_distinguish_rooted(const WeightedGraph& g, int r, const WeightedGraph& h, int s);

// Runs 1-iWL for every individualization and compares the multisets of
// rooted signatures.
bool wl11_distinguish(const WeightedGraph& g, const WeightedGraph& h);

// Canonical code of the depth-L unrolling tree rooted at u; subtrees are
// sorted, so codes are equal iff the trees are isomorphic as rooted,
// labeled, edge-weighted trees. An optional marked vertex models the
// individualized variant.
std::string unrolling_tree(const WeightedGraph& g, int u, int L,
                           std::optional<int> root = std::nullopt);

}  // namespace nar

#include "nar/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nar {

void WeightedGraph::validate() const {
  if (attrs.rows() != n) throw std::invalid_argument("graph: attrs rows != n");
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      throw std::invalid_argument("graph: vertex index out of range");
    if (!std::isfinite(e.w)) throw std::invalid_argument("graph: non-finite edge weight");
    std::pair<int, int> key = directed ? std::pair{e.u, e.v}
                                       : std::pair{std::min(e.u, e.v), std::max(e.u, e.v)};
    if (!seen.insert(key).second) throw std::invalid_argument("graph: duplicate edge");
  }
}

std::vector<std::vector<std::pair<int, double>>> in_adjacency(const WeightedGraph& g) {
  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(g.n));
  for (const Edge& e : g.edges) {
    if (e.u == e.v) continue;
    adj[static_cast<std::size_t>(e.v)].emplace_back(e.u, e.w);
    if (!g.directed) adj[static_cast<std::size_t>(e.u)].emplace_back(e.v, e.w);
  }
  return adj;
}

BFInstance make_path_graph(const Eigen::VectorXd& w, double beta) {
  if (w.size() < 1) throw std::invalid_argument("make_path_graph: empty weight vector");
  if (beta <= 0.0) throw std::invalid_argument("make_path_graph: beta must be positive");
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w[i] < 0.0) throw std::invalid_argument("make_path_graph: negative entry in w");
  const int K = static_cast<int>(w.size()) - 1;
  BFInstance inst;
  inst.beta = beta;
  inst.graph.n = K + 1;
  inst.graph.directed = false;
  inst.graph.attrs.resize(K + 1, 1);
  inst.graph.attrs(0, 0) = w[0];
  for (int i = 1; i <= K; ++i) {
    inst.graph.attrs(i, 0) = beta;
    inst.graph.edges.push_back({i - 1, i, w[i]});
  }
  return inst;
}

std::vector<TrainSample> make_bf_training_set(double x, int K, double beta) {
  if (x < 0.0) throw std::invalid_argument("make_bf_training_set: x must be nonnegative");
  if (K < 1) throw std::invalid_argument("make_bf_training_set: K must be positive");
  const int N = K + 1;
  if (beta < 2.0 * (N + x + 1.0))
    throw std::invalid_argument("make_bf_training_set: beta below 2(N+x+1)");
  std::vector<TrainSample> out;
  for (int k = 0; k <= K; ++k) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(K + 1);
    w[k] = x;
    out.push_back({make_path_graph(w, beta), K, x});
  }
  return out;
}

int edge_case_vertex(int K, int i) {
  (void)K;
  return i + 1;  // v_{-1} is index 0
}

int edge_case_bypass_vertex(int K, int i, int j) {
  // p_{i,j} blocks come after the K+2 backbone vertices; block i holds i
  // vertices (j in [i-1]_0).
  int base = K + 2;
  for (int q = 1; q < i; ++q) base += q;
  return base + j;
}

BFInstance make_edge_case_graph(double x, int K, double beta) {
  if (x <= 0.0) throw std::invalid_argument("make_edge_case_graph: x must be positive");
  if (K < 1) throw std::invalid_argument("make_edge_case_graph: K must be at least 1");
  BFInstance inst;
  inst.beta = beta;
  const int n = (K + 2) + K * (K + 1) / 2;
  inst.graph.n = n;
  inst.graph.directed = false;
  inst.graph.attrs.setConstant(n, 1, beta);

  auto V = [K](int i) { return edge_case_vertex(K, i); };
  auto P = [K](int i, int j) { return edge_case_bypass_vertex(K, i, j); };

  inst.graph.edges.push_back({V(-1), V(0), x});
  for (int i = 1; i <= K; ++i) inst.graph.edges.push_back({V(i - 1), V(i), 0.0});
  for (int i = 1; i <= K; ++i) {
    inst.graph.edges.push_back({V(-1), P(i, 0), 0.0});
    for (int j = 1; j <= i - 1; ++j) inst.graph.edges.push_back({P(i, j - 1), P(i, j), 0.0});
    inst.graph.edges.push_back({P(i, i - 1), V(i), x});
  }

  // One-step BF distances with root v_{-1}.
  inst.set_label(V(-1), 0.0);
  inst.set_label(V(0), x);
  for (int i = 1; i <= K; ++i) inst.set_label(P(i, 0), 0.0);
  return inst;
}

void DatasetSpec::validate() const {
  if (n < 1) throw std::invalid_argument("dataset spec: n must be positive");
  if (count < 1) throw std::invalid_argument("dataset spec: count must be positive");
  if (weight_low < 0.0 || weight_low > weight_high)
    throw std::invalid_argument("dataset spec: need 0 <= weight-low <= weight-high");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("dataset spec: p outside [0,1]");
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (sbm(i, j) < 0.0 || sbm(i, j) > 1.0)
        throw std::invalid_argument("dataset spec: sbm probability outside [0,1]");
  if (K < 0) throw std::invalid_argument("dataset spec: K must be nonnegative");
}

DatasetKind dataset_kind_from_string(const std::string& s) {
  if (s == "er-constdeg") return DatasetKind::ErConstDeg;
  if (s == "er") return DatasetKind::Er;
  if (s == "sbm") return DatasetKind::Sbm;
  if (s == "star") return DatasetKind::Star;
  if (s == "complete") return DatasetKind::Complete;
  if (s == "path") return DatasetKind::Path;
  if (s == "general") return DatasetKind::General;
  throw std::invalid_argument("unknown dataset kind: " + s);
}

std::string to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::ErConstDeg: return "er-constdeg";
    case DatasetKind::Er: return "er";
    case DatasetKind::Sbm: return "sbm";
    case DatasetKind::Star: return "star";
    case DatasetKind::Complete: return "complete";
    case DatasetKind::Path: return "path";
    case DatasetKind::General: return "general";
  }
  return "?";
}

namespace {

using Rng = std::mt19937_64;

double draw_weight(const DatasetSpec& spec, Rng& rng) {
  std::uniform_real_distribution<double> d(spec.weight_low, spec.weight_high);
  return d(rng);
}

// Bernoulli edges given a per-pair probability; resamples the incident pairs
// of isolated vertices up to 100 times, then attaches one uniform-weight edge
// to a random other vertex.
template <typename ProbFn>
std::vector<Edge> bernoulli_edges(int n, ProbFn prob, const DatasetSpec& spec, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<char>> adj(static_cast<std::size_t>(n),
                                     std::vector<char>(static_cast<std::size_t>(n), 0));
  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (unit(rng) < prob(i, j)) {
        adj[i][j] = adj[j][i] = 1;
        ++degree[i];
        ++degree[j];
      }
  for (int v = 0; v < n; ++v) {
    if (n < 2) throw std::runtime_error("cannot avoid isolated vertices with n < 2");
    for (int attempt = 0; attempt < 100 && degree[v] == 0; ++attempt) {
      for (int j = 0; j < n; ++j) {
        if (j == v) continue;
        if (unit(rng) < prob(std::min(v, j), std::max(v, j))) {
          adj[v][j] = adj[j][v] = 1;
          ++degree[v];
          ++degree[j];
        }
      }
    }
    if (degree[v] == 0) {
      std::uniform_int_distribution<int> pick(0, n - 2);
      int j = pick(rng);
      if (j >= v) ++j;
      adj[v][j] = adj[j][v] = 1;
      ++degree[v];
      ++degree[j];
    }
  }
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (adj[i][j]) edges.push_back({i, j, draw_weight(spec, rng)});
  return edges;
}

BFInstance with_bf_init(WeightedGraph g, double beta, int source) {
  g.attrs.setConstant(g.n, 1, beta);
  g.attrs(source, 0) = 0.0;
  BFInstance inst;
  inst.graph = std::move(g);
  inst.beta = beta;
  return inst;
}

BFInstance gen_one(const DatasetSpec& spec, DatasetKind kind, Rng& rng, int slot) {
  const int n = spec.n;
  WeightedGraph g;
  g.n = n;
  g.directed = false;
  g.attrs.setZero(n, 1);
  switch (kind) {
    case DatasetKind::Er:
      g.edges = bernoulli_edges(n, [&](int, int) { return spec.p; }, spec, rng);
      break;
    case DatasetKind::ErConstDeg: {
      const double p = spec.avg_degree / static_cast<double>(n);
      g.edges = bernoulli_edges(n, [&](int, int) { return p; }, spec, rng);
      break;
    }
    case DatasetKind::Sbm: {
      // Three equal blocks; the remainder goes to the last block.
      const int b = n / 3;
      auto block = [&](int v) { return v < b ? 0 : (v < 2 * b ? 1 : 2); };
      g.edges = bernoulli_edges(
          n, [&](int i, int j) { return spec.sbm(block(i), block(j)); }, spec, rng);
      break;
    }
    case DatasetKind::Star:
      if (n < 2) throw std::invalid_argument("star graph needs n >= 2");
      for (int i = 1; i < n; ++i) g.edges.push_back({0, i, draw_weight(spec, rng)});
      break;
    case DatasetKind::Complete:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.edges.push_back({i, j, draw_weight(spec, rng)});
      break;
    case DatasetKind::Path:
      if (n < 2) throw std::invalid_argument("path graph needs n >= 2");
      for (int i = 1; i < n; ++i) g.edges.push_back({i - 1, i, draw_weight(spec, rng)});
      break;
    case DatasetKind::General: {
      // 50-graph mix split evenly across ER, SBM, complete, star, and
      // path/edge-case; the last family alternates an n-vertex path with the
      // edge case graph at K = spec.K.
      DatasetSpec sub = spec;
      sub.count = 1;
      const int per_family = std::max(1, spec.count / 5);
      const int family = std::min(slot / per_family, 4);
      switch (family) {
        case 0: return gen_one(sub, DatasetKind::Er, rng, 0);
        case 1: return gen_one(sub, DatasetKind::Sbm, rng, 0);
        case 2: return gen_one(sub, DatasetKind::Complete, rng, 0);
        case 3: return gen_one(sub, DatasetKind::Star, rng, 0);
        default: {
          if (slot % 2 == 0) return gen_one(sub, DatasetKind::Path, rng, 0);
          std::uniform_real_distribution<double> d(spec.weight_low, spec.weight_high);
          return make_edge_case_graph(d(rng), std::max(spec.K, 1), spec.beta);
        }
      }
    }
  }
  return with_bf_init(std::move(g), spec.beta, 0);
}

}  // namespace

std::vector<BFInstance> gen_dataset(const DatasetSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::vector<BFInstance> out;
  out.reserve(static_cast<std::size_t>(spec.count));
  for (int i = 0; i < spec.count; ++i) out.push_back(gen_one(spec, spec.kind, rng, i));
  return out;
}

Sssp6 counterexample_sssp6() {
  WeightedGraph g;
  g.n = 6;
  g.directed = false;
  g.attrs.setZero(6, 1);
  // Two triangles connected by a heavy edge; vertices 1..6 in the proof map
  // to indices 0..5 here.
  g.edges = {{0, 1, 3}, {0, 2, 1}, {1, 2, 1}, {2, 3, 5}, {3, 4, 1}, {3, 5, 1}, {4, 5, 3}};
  Sssp6 out;
  out.G = with_bf_init(std::move(g), 1000.0, 0);
  out.s = 0;
  out.t1 = 1;
  out.t2 = 4;
  return out;
}

MstPair counterexample_mst6() {
  MstPair out;
  out.G = counterexample_sssp6().G.graph;
  out.G.attrs.setZero(6, 1);
  WeightedGraph h;
  h.n = 6;
  h.directed = false;
  h.attrs.setZero(6, 1);
  // 6-cycle with a heavy chord.
  h.edges = {{0, 1, 3}, {1, 3, 1}, {3, 5, 1}, {5, 4, 3}, {4, 2, 1}, {2, 0, 1}, {2, 3, 5}};
  out.H = std::move(h);
  return out;
}

Mst14 counterexample_mst14() {
  auto weight = [](int u, int v) -> double {
    // Hub spokes are heavy, the two chords cost 5, everything else is unit.
    if (u == 6 || v == 6 || u == 7 || v == 7) {
      if ((u == 6 && v == 7) || (u == 7 && v == 6)) return 1.0;
      return 10.0;
    }
    if ((u == 2 && v == 3) || (u == 10 && v == 11)) return 5.0;
    return 1.0;
  };
  auto build = [&](std::vector<std::pair<int, int>> pairs) {
    WeightedGraph g;
    g.n = 14;
    g.directed = false;
    g.attrs.setZero(14, 1);
    for (auto [u, v] : pairs) g.edges.push_back({u, v, weight(u, v)});
    return g;
  };
  // Proof vertices 1..14 become indices 0..13.
  std::vector<std::pair<int, int>> eg = {
      {0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}, {2, 3},
      {8, 9}, {8, 10}, {9, 10}, {11, 12}, {11, 13}, {12, 13}, {10, 11},
      {6, 0}, {6, 1}, {6, 2}, {6, 3}, {6, 4}, {6, 5},
      {7, 8}, {7, 9}, {7, 10}, {7, 11}, {7, 12}, {7, 13}, {6, 7}};
  std::vector<std::pair<int, int>> eh = {
      {0, 1}, {1, 3}, {3, 5}, {5, 4}, {4, 2}, {2, 0}, {2, 3},
      {8, 9}, {9, 11}, {11, 13}, {13, 12}, {12, 10}, {10, 8}, {10, 11},
      {6, 0}, {6, 1}, {6, 2}, {6, 3}, {6, 4}, {6, 5},
      {7, 8}, {7, 9}, {7, 10}, {7, 11}, {7, 12}, {7, 13}, {6, 7}};
  Mst14 out;
  out.G = build(eg);
  out.H = build(eh);
  // Rooted refinement only fails to separate the pair when the root is a
  // bridge endpoint; a cycle/triangle vertex as root leaks which side of
  // the marked vertex closes a triangle.
  out.v = 6;
  out.w = 6;
  return out;
}

WeightedGraph disjoint_union(const WeightedGraph& g, const WeightedGraph& h) {
  if (g.directed != h.directed)
    throw std::invalid_argument("disjoint_union: mixed directedness");
  if (g.d0() != h.d0()) throw std::invalid_argument("disjoint_union: attribute dims differ");
  WeightedGraph out;
  out.n = g.n + h.n;
  out.directed = g.directed;
  out.attrs.resize(out.n, g.d0());
  out.attrs.topRows(g.n) = g.attrs;
  out.attrs.bottomRows(h.n) = h.attrs;
  out.edges = g.edges;
  for (const Edge& e : h.edges) out.edges.push_back({e.u + g.n, e.v + g.n, e.w});
  return out;
}

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double out = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("bad number: " + s);
  return out;
}

void write_graph(std::ostream& os, const WeightedGraph& g,
                 const std::vector<std::pair<int, double>>* targets) {
  os << "g " << g.n << ' ' << (g.directed ? 1 : 0) << ' ' << g.d0() << '\n';
  for (int v = 0; v < g.n; ++v) {
    os << "v " << v;
    for (int a = 0; a < g.d0(); ++a) os << ' ' << format_double(g.attrs(v, a));
    os << '\n';
  }
  for (const Edge& e : g.edges)
    os << "e " << e.u << ' ' << e.v << ' ' << format_double(e.w) << '\n';
  if (targets)
    for (const auto& [v, x] : *targets) os << "t " << v << ' ' << format_double(x) << '\n';
}

GraphRecord read_graph(std::istream& is) {
  std::string line;
  GraphRecord rec;
  bool have_header = false;
  while (true) {
    std::streampos pos = is.tellg();
    if (!std::getline(is, line)) break;
    if (line.empty()) {
      if (have_header) break;
      continue;
    }
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "g") {
      if (have_header) {  // start of the next record
        is.seekg(pos);
        break;
      }
      int dir = 0, d0 = 0;
      ls >> rec.graph.n >> dir >> d0;
      if (!ls || rec.graph.n < 0 || d0 < 0) throw std::runtime_error("bad graph header");
      rec.graph.directed = dir != 0;
      rec.graph.attrs.setZero(rec.graph.n, d0);
      have_header = true;
    } else if (tag == "v") {
      if (!have_header) throw std::runtime_error("v line before g line");
      int idx = 0;
      ls >> idx;
      for (int a = 0; a < rec.graph.d0(); ++a) {
        std::string tok;
        ls >> tok;
        rec.graph.attrs(idx, a) = parse_double(tok);
      }
    } else if (tag == "e") {
      if (!have_header) throw std::runtime_error("e line before g line");
      Edge e;
      std::string tok;
      ls >> e.u >> e.v >> tok;
      e.w = parse_double(tok);
      rec.graph.edges.push_back(e);
    } else if (tag == "t") {
      int v = 0;
      std::string tok;
      ls >> v >> tok;
      rec.targets.emplace_back(v, parse_double(tok));
    } else {
      throw std::runtime_error("unknown record line: " + line);
    }
  }
  if (!have_header) throw std::runtime_error("no graph record found");
  rec.graph.validate();
  return rec;
}

void write_dataset(std::ostream& os, const std::vector<GraphRecord>& records) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i) os << '\n';
    write_graph(os, records[i].graph, &records[i].targets);
  }
}

std::vector<GraphRecord> read_dataset(std::istream& is) {
  std::vector<GraphRecord> out;
  while (true) {
    // Skip blank lines between records; stop at EOF.
    std::streampos pos = is.tellg();
    std::string line;
    bool found = false;
    while (std::getline(is, line)) {
      if (!line.empty()) {
        is.seekg(pos);
        found = true;
        break;
      }
      pos = is.tellg();
    }
    if (!found) break;
    out.push_back(read_graph(is));
  }
  return out;
}

}  // namespace nar

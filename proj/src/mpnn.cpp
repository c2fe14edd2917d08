#include "nar/mpnn.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace nar {

void BFParamSet::validate() const {
  if (m < 1 || K < 1) throw std::invalid_argument("params: m and K must be positive");
  const int j_total = J();
  if (static_cast<int>(dims.size()) != j_total + 1)
    throw std::invalid_argument("params: dims must have J+1 entries");
  if (dims.front() != 1 || dims.back() != 1)
    throw std::invalid_argument("params: d_0 and d_J must be 1");
  if (static_cast<int>(W.size()) != j_total || static_cast<int>(b.size()) != j_total ||
      static_cast<int>(C.size()) != K)
    throw std::invalid_argument("params: wrong tensor counts");
  for (int j = 1; j <= j_total; ++j) {
    if (W[j - 1].rows() != dims[j] || W[j - 1].cols() != dims[j - 1])
      throw std::invalid_argument("params: W^" + std::to_string(j) + " has wrong shape");
    if (b[j - 1].rows() != dims[j] || b[j - 1].cols() != 1)
      throw std::invalid_argument("params: b^" + std::to_string(j) + " has wrong shape");
  }
  for (int k = 1; k <= K; ++k)
    if (C[k - 1].rows() != dims[edge_layer(k)] || C[k - 1].cols() != 1)
      throw std::invalid_argument("params: C^" + std::to_string(k) + " has wrong shape");
}

std::size_t BFParamSet::coefficient_count() const {
  std::size_t n = 0;
  for (const auto& w : W) n += static_cast<std::size_t>(w.size());
  for (const auto& c : C) n += static_cast<std::size_t>(c.size());
  for (const auto& v : b) n += static_cast<std::size_t>(v.size());
  return n;
}

std::vector<int> make_bf_dims(int m, int K, int hidden, const std::vector<int>& agg_dims) {
  if (static_cast<int>(agg_dims.size()) != K)
    throw std::invalid_argument("make_bf_dims: need one aggregation dim per round");
  const int J = 2 * m * K;
  std::vector<int> dims(static_cast<std::size_t>(J) + 1, hidden);
  dims[0] = 1;
  for (int k = 1; k <= K; ++k) dims[static_cast<std::size_t>((k - 1) * 2 * m + m)] = agg_dims[static_cast<std::size_t>(k - 1)];
  dims[static_cast<std::size_t>(J)] = 1;
  return dims;
}

std::vector<int> make_theorem_dims(int m, int K, int hidden) {
  return make_bf_dims(m, K, hidden, std::vector<int>(static_cast<std::size_t>(K), 1));
}

std::vector<int> make_experiment_dims(int m, int K, int hidden, int agg1) {
  std::vector<int> agg(static_cast<std::size_t>(K), 1);
  agg[0] = agg1;
  return make_bf_dims(m, K, hidden, agg);
}

BFParamSet bf_parameter_config(int m, int K, const std::vector<int>& dims) {
  BFParamSet p;
  p.m = m;
  p.K = K;
  p.dims = dims;
  const int J = p.J();
  for (int j = 1; j <= J; ++j) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(dims[static_cast<std::size_t>(j)],
                                              dims[static_cast<std::size_t>(j - 1)]);
    w(0, 0) = 1.0;
    p.W.push_back(std::move(w));
    p.b.push_back(Eigen::MatrixXd::Zero(dims[static_cast<std::size_t>(j)], 1));
  }
  for (int k = 1; k <= K; ++k) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(dims[static_cast<std::size_t>(p.edge_layer(k))], 1);
    c(0, 0) = 1.0;
    p.C.push_back(std::move(c));
  }
  p.validate();
  return p;
}

BFParamSet init_bf_params(int m, int K, const std::vector<int>& dims, std::uint64_t seed,
                          bool relu_skip_upd_last) {
  BFParamSet p;
  p.m = m;
  p.K = K;
  p.dims = dims;
  p.relu_skip_upd_last = relu_skip_upd_last;
  std::mt19937_64 rng(seed);
  const int J = p.J();
  auto fill = [&rng](Eigen::MatrixXd& mat, double bound) {
    std::uniform_real_distribution<double> d(-bound, bound);
    for (Eigen::Index i = 0; i < mat.size(); ++i) mat(i) = d(rng);
  };
  std::vector<Eigen::MatrixXd> cs;
  for (int j = 1; j <= J; ++j) {
    const int dj = dims[static_cast<std::size_t>(j)];
    const int dprev = dims[static_cast<std::size_t>(j - 1)];
    const bool edge = (j - 1) % (2 * m) == 0;
    // The edge-inserting layer acts on (h, w), so its fan-in counts the
    // extra weight coordinate.
    const double bound = 1.0 / std::sqrt(static_cast<double>(dprev + (edge ? 1 : 0)));
    Eigen::MatrixXd w(dj, dprev);
    fill(w, bound);
    p.W.push_back(std::move(w));
    if (edge) {
      Eigen::MatrixXd c(dj, 1);
      fill(c, bound);
      cs.push_back(std::move(c));
    }
    Eigen::MatrixXd bias(dj, 1);
    fill(bias, bound);
    p.b.push_back(std::move(bias));
  }
  p.C = std::move(cs);
  p.validate();
  return p;
}

std::vector<int> register_params(ad::Tape& tape, const BFParamSet& theta) {
  std::vector<int> ids;
  for (const auto& w : theta.W) ids.push_back(tape.param(&w));
  for (const auto& c : theta.C) ids.push_back(tape.param(&c));
  for (const auto& v : theta.b) ids.push_back(tape.param(&v));
  return ids;
}

std::vector<Eigen::MatrixXd*> param_ptrs(BFParamSet& theta) {
  std::vector<Eigen::MatrixXd*> out;
  for (auto& w : theta.W) out.push_back(&w);
  for (auto& c : theta.C) out.push_back(&c);
  for (auto& v : theta.b) out.push_back(&v);
  return out;
}

namespace {

struct BfTapeParams {
  std::vector<int> W, C, b;
};

BfTapeParams tape_params(ad::Tape& tape, const BFParamSet& theta, std::vector<int>* out_ids) {
  BfTapeParams tp;
  const std::vector<int> ids = register_params(tape, theta);
  const std::size_t J = theta.W.size();
  const std::size_t K = theta.C.size();
  tp.W.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(J));
  tp.C.assign(ids.begin() + static_cast<std::ptrdiff_t>(J),
              ids.begin() + static_cast<std::ptrdiff_t>(J + K));
  tp.b.assign(ids.begin() + static_cast<std::ptrdiff_t>(J + K), ids.end());
  if (out_ids) *out_ids = ids;
  return tp;
}

}  // namespace

std::vector<int> bf_mpnn_forward(ad::Tape& tape, const BFParamSet& theta, const BFInstance& g,
                                 std::vector<int>* param_nodes) {
  theta.validate();
  const BfTapeParams tp = tape_params(tape, theta, param_nodes);
  const auto adj = in_adjacency(g.graph);
  const int n = g.n();

  std::vector<int> h(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    Eigen::MatrixXd init(1, 1);
    init(0, 0) = g.label(v);
    h[static_cast<std::size_t>(v)] = tape.constant(std::move(init));
  }

  auto fnn_tail = [&](int x, int first_layer, int last_layer, bool is_update) {
    for (int j = first_layer; j <= last_layer; ++j) {
      x = tape.add(tape.matvec(tp.W[static_cast<std::size_t>(j - 1)], x),
                   tp.b[static_cast<std::size_t>(j - 1)]);
      const bool skip_relu =
          is_update && theta.relu_skip_upd_last && theta.layer_is_upd_last(j);
      if (!skip_relu) x = tape.relu(x);
    }
    return x;
  };

  for (int k = 1; k <= theta.K; ++k) {
    const int jk = theta.edge_layer(k);
    const int ak = theta.agg_layer(k);
    std::vector<int> next(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
      std::vector<int> cands;
      auto agg_candidate = [&](int u, double w) {
        Eigen::MatrixXd wc(1, 1);
        wc(0, 0) = w;
        int x = tape.add(
            tape.add(tape.matvec(tp.W[static_cast<std::size_t>(jk - 1)],
                                 h[static_cast<std::size_t>(u)]),
                     tape.matvec(tp.C[static_cast<std::size_t>(k - 1)],
                                 tape.constant(std::move(wc)))),
            tp.b[static_cast<std::size_t>(jk - 1)]);
        x = tape.relu(x);
        return fnn_tail(x, jk + 1, ak, false);
      };
      cands.push_back(agg_candidate(v, 0.0));  // implicit self-loop
      for (const auto& [u, w] : adj[static_cast<std::size_t>(v)])
        cands.push_back(agg_candidate(u, w));
      const int agg = tape.reduce_min(cands);
      next[static_cast<std::size_t>(v)] = fnn_tail(agg, ak + 1, ak + theta.m, true);
    }
    h = std::move(next);
  }
  return h;
}

Eigen::VectorXd bf_mpnn_eval(const BFParamSet& theta, const BFInstance& g) {
  theta.validate();
  const auto adj = in_adjacency(g.graph);
  const int n = g.n();

  std::vector<Eigen::VectorXd> h(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) h[static_cast<std::size_t>(v)] = Eigen::VectorXd::Constant(1, g.label(v));

  auto fnn_tail = [&](Eigen::VectorXd x, int first_layer, int last_layer, bool is_update) {
    for (int j = first_layer; j <= last_layer; ++j) {
      x = (theta.W[static_cast<std::size_t>(j - 1)] * x + theta.b[static_cast<std::size_t>(j - 1)]).eval();
      const bool skip_relu =
          is_update && theta.relu_skip_upd_last && theta.layer_is_upd_last(j);
      if (!skip_relu) x = x.cwiseMax(0.0);
    }
    return x;
  };

  for (int k = 1; k <= theta.K; ++k) {
    const int jk = theta.edge_layer(k);
    const int ak = theta.agg_layer(k);
    const Eigen::MatrixXd& Wjk = theta.W[static_cast<std::size_t>(jk - 1)];
    const Eigen::MatrixXd& Ck = theta.C[static_cast<std::size_t>(k - 1)];
    const Eigen::MatrixXd& bjk = theta.b[static_cast<std::size_t>(jk - 1)];

    // First aggregation layer applied to each vertex feature once; per edge
    // only the C-column term changes.
    std::vector<Eigen::VectorXd> pre(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) pre[static_cast<std::size_t>(v)] = Wjk * h[static_cast<std::size_t>(v)];

    std::vector<Eigen::VectorXd> next(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
      auto agg_candidate = [&](int u, double w) {
        Eigen::VectorXd x =
            ((pre[static_cast<std::size_t>(u)] + Ck * Eigen::VectorXd::Constant(1, w)) + bjk)
                .cwiseMax(0.0);
        return fnn_tail(std::move(x), jk + 1, ak, false);
      };
      Eigen::VectorXd best = agg_candidate(v, 0.0);
      for (const auto& [u, w] : adj[static_cast<std::size_t>(v)])
        best = best.cwiseMin(agg_candidate(u, w));
      next[static_cast<std::size_t>(v)] = fnn_tail(std::move(best), ak + 1, ak + theta.m, true);
    }
    h = std::move(next);
  }

  Eigen::VectorXd out(n);
  for (int v = 0; v < n; ++v) out[v] = h[static_cast<std::size_t>(v)][0];
  return out;
}

Eigen::VectorXd Fnn::eval(const Eigen::VectorXd& x) const {
  Eigen::VectorXd h = x;
  for (std::size_t l = 0; l < W.size(); ++l) {
    h = (W[l] * h + b[l]).eval();
    if (l + 1 < W.size() || relu_last) h = h.cwiseMax(0.0);
  }
  return h;
}

namespace {

Eigen::VectorXd concat(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out(a.size() + b.size());
  out << a, b;
  return out;
}

void check_arch(const ArchParams& arch) {
  if (arch.phi.empty()) throw std::invalid_argument("mpnn_forward: no rounds configured");
  if ((arch.kind == Aggregation::Max || arch.kind == Aggregation::Min) &&
      arch.msg.size() != arch.phi.size())
    throw std::invalid_argument("mpnn_forward: max/min aggregation needs message maps");
}

// The generic architectures aggregate over whatever edge list the graph
// carries, including explicit self-loops.
std::vector<std::vector<std::pair<int, double>>> arch_adjacency(const WeightedGraph& g) {
  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(g.n));
  for (const Edge& e : g.edges) {
    adj[static_cast<std::size_t>(e.v)].emplace_back(e.u, e.w);
    if (!g.directed && e.u != e.v) adj[static_cast<std::size_t>(e.u)].emplace_back(e.v, e.w);
  }
  return adj;
}

}  // namespace

std::vector<Eigen::VectorXd> mpnn_forward(const ArchParams& arch, const WeightedGraph& g) {
  check_arch(arch);
  const auto adj = arch_adjacency(g);
  const int n = g.n;
  std::vector<Eigen::VectorXd> h(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) h[static_cast<std::size_t>(v)] = g.attrs.row(v).transpose();

  Eigen::VectorXd wdeg = Eigen::VectorXd::Zero(n);
  for (int v = 0; v < n; ++v)
    for (const auto& [u, w] : adj[static_cast<std::size_t>(v)]) wdeg[v] += w;
  if (arch.kind == Aggregation::Mean)
    for (int v = 0; v < n; ++v)
      if (!(wdeg[v] > 0.0)) throw std::invalid_argument("mean aggregation: zero weighted degree");

  for (std::size_t t = 0; t < arch.phi.size(); ++t) {
    std::vector<Eigen::VectorXd> next(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
      const auto& nb = adj[static_cast<std::size_t>(v)];
      Eigen::VectorXd agg;
      switch (arch.kind) {
        case Aggregation::NormalizedSum:
        case Aggregation::Mean: {
          agg = Eigen::VectorXd::Zero(h[static_cast<std::size_t>(v)].size());
          for (const auto& [u, w] : nb) agg += w * h[static_cast<std::size_t>(u)];
          agg /= arch.kind == Aggregation::Mean ? wdeg[v] : static_cast<double>(n);
          break;
        }
        case Aggregation::Max:
        case Aggregation::Min: {
          if (nb.empty()) throw std::invalid_argument("max/min aggregation: isolated vertex");
          const Fnn& mt = arch.msg[t];
          bool first = true;
          for (const auto& [u, w] : nb) {
            Eigen::VectorXd cand =
                mt.eval(concat(h[static_cast<std::size_t>(u)], Eigen::VectorXd::Constant(1, w)));
            if (first) {
              agg = cand;
              first = false;
            } else {
              agg = arch.kind == Aggregation::Max ? agg.cwiseMax(cand).eval()
                                                  : agg.cwiseMin(cand).eval();
            }
          }
          break;
        }
      }
      next[static_cast<std::size_t>(v)] =
          arch.phi[t].eval(concat(h[static_cast<std::size_t>(v)], agg));
    }
    h = std::move(next);
  }
  return h;
}

namespace {

// First layer of a two-argument FNN split into the columns that act on the
// feature part and those that act on the second argument.
struct SplitFnnNodes {
  int w_left = -1;
  int w_right = -1;
  std::vector<int> w_rest;
  std::vector<int> b;
  bool relu_last = true;
};

SplitFnnNodes register_split_fnn(ad::Tape& tape, const Fnn& f, Eigen::Index left_cols) {
  SplitFnnNodes s;
  s.relu_last = f.relu_last;
  s.w_left = tape.constant(f.W[0].leftCols(left_cols));
  s.w_right = tape.constant(f.W[0].rightCols(f.W[0].cols() - left_cols));
  s.b.push_back(tape.param(&f.b[0]));
  for (std::size_t l = 1; l < f.W.size(); ++l) {
    s.w_rest.push_back(tape.param(&f.W[l]));
    s.b.push_back(tape.param(&f.b[l]));
  }
  return s;
}

int apply_split_fnn(ad::Tape& tape, const SplitFnnNodes& s, int left, int right) {
  const std::size_t layers = s.b.size();
  int x = tape.add(tape.add(tape.matvec(s.w_left, left), tape.matvec(s.w_right, right)), s.b[0]);
  if (layers > 1 || s.relu_last) x = tape.relu(x);
  for (std::size_t l = 1; l < layers; ++l) {
    x = tape.add(tape.matvec(s.w_rest[l - 1], x), s.b[l]);
    if (l + 1 < layers || s.relu_last) x = tape.relu(x);
  }
  return x;
}

}  // namespace

std::vector<int> mpnn_forward_tape(ad::Tape& tape, const ArchParams& arch,
                                   const WeightedGraph& g) {
  check_arch(arch);
  const auto adj = arch_adjacency(g);
  const int n = g.n;
  const Eigen::Index d0 = g.attrs.cols();
  std::vector<int> h(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) h[static_cast<std::size_t>(v)] = tape.constant(g.attrs.row(v).transpose());

  Eigen::VectorXd wdeg = Eigen::VectorXd::Zero(n);
  for (int v = 0; v < n; ++v)
    for (const auto& [u, w] : adj[static_cast<std::size_t>(v)]) wdeg[v] += w;
  if (arch.kind == Aggregation::Mean)
    for (int v = 0; v < n; ++v)
      if (!(wdeg[v] > 0.0)) throw std::invalid_argument("mean aggregation: zero weighted degree");

  Eigen::Index feat = d0;
  for (std::size_t t = 0; t < arch.phi.size(); ++t) {
    const SplitFnnNodes phi = register_split_fnn(tape, arch.phi[t], feat);
    SplitFnnNodes msg;
    if (arch.kind == Aggregation::Max || arch.kind == Aggregation::Min)
      msg = register_split_fnn(tape, arch.msg[t], feat);

    std::vector<int> next(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
      const auto& nb = adj[static_cast<std::size_t>(v)];
      int agg = -1;
      switch (arch.kind) {
        case Aggregation::NormalizedSum:
        case Aggregation::Mean: {
          std::vector<int> terms;
          for (const auto& [u, w] : nb)
            terms.push_back(tape.scale(h[static_cast<std::size_t>(u)], w));
          if (terms.empty()) {
            agg = tape.constant(Eigen::MatrixXd::Zero(feat, 1));
          } else {
            agg = tape.add_n(terms);
          }
          const double denom =
              arch.kind == Aggregation::Mean ? wdeg[v] : static_cast<double>(n);
          agg = tape.scale(agg, 1.0 / denom);
          break;
        }
        case Aggregation::Max:
        case Aggregation::Min: {
          if (nb.empty()) throw std::invalid_argument("max/min aggregation: isolated vertex");
          std::vector<int> cands;
          for (const auto& [u, w] : nb)
            cands.push_back(
                apply_split_fnn(tape, msg, h[static_cast<std::size_t>(u)], tape.constant(w)));
          agg = arch.kind == Aggregation::Max ? tape.reduce_max(cands) : tape.reduce_min(cands);
          break;
        }
      }
      next[static_cast<std::size_t>(v)] =
          apply_split_fnn(tape, phi, h[static_cast<std::size_t>(v)], agg);
    }
    h = std::move(next);
    feat = tape.value(h[0]).rows();
  }
  return h;
}

ArchParams make_pagerank_arch(double xi, int K) {
  if (!(xi > 0.0 && xi < 1.0)) throw std::invalid_argument("make_pagerank_arch: xi outside (0,1)");
  ArchParams arch;
  arch.kind = Aggregation::Mean;
  for (int t = 0; t < K; ++t) {
    Fnn f;
    Eigen::MatrixXd w(1, 2);
    w << 0.0, xi;
    f.W.push_back(w);
    f.b.push_back(Eigen::MatrixXd::Constant(1, 1, 1.0 - xi));
    f.relu_last = false;
    arch.phi.push_back(std::move(f));
  }
  return arch;
}

ArchParams random_arch(Aggregation kind, int K, int feat_dim, int hidden, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto make_fnn = [&rng](int in, int hid, int out) {
    Fnn f;
    auto fill = [&rng](Eigen::MatrixXd& m, double bound) {
      std::uniform_real_distribution<double> d(-bound, bound);
      for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = d(rng);
    };
    Eigen::MatrixXd w1(hid, in), w2(out, hid), b1(hid, 1), b2(out, 1);
    fill(w1, 1.0 / std::sqrt(static_cast<double>(in)));
    fill(b1, 1.0 / std::sqrt(static_cast<double>(in)));
    fill(w2, 1.0 / std::sqrt(static_cast<double>(hid)));
    fill(b2, 1.0 / std::sqrt(static_cast<double>(hid)));
    f.W = {w1, w2};
    f.b = {b1, b2};
    return f;
  };
  ArchParams arch;
  arch.kind = kind;
  for (int t = 0; t < K; ++t) {
    arch.phi.push_back(make_fnn(2 * feat_dim, hidden, feat_dim));
    if (kind == Aggregation::Max || kind == Aggregation::Min)
      arch.msg.push_back(make_fnn(feat_dim + 1, hidden, feat_dim));
  }
  return arch;
}

BFInstance mark_source(const BFInstance& g, int s, SourceMarking mode) {
  if (s < 0 || s >= g.n()) throw std::invalid_argument("mark_source: bad source vertex");
  BFInstance out = g;
  out.graph.attrs.col(0).setConstant(g.beta);
  if (mode == SourceMarking::BfInit) out.set_label(s, 0.0);
  return out;
}

void write_checkpoint(std::ostream& os, const BFParamSet& theta) {
  auto line = [&os](const std::string& name, const Eigen::MatrixXd& t) {
    os << "p " << name << ' ' << t.rows() << ' ' << t.cols() << " :";
    for (Eigen::Index r = 0; r < t.rows(); ++r)
      for (Eigen::Index c = 0; c < t.cols(); ++c) os << ' ' << format_double(t(r, c));
    os << '\n';
  };
  Eigen::MatrixXd meta(1, 3);
  meta << static_cast<double>(theta.m), static_cast<double>(theta.K),
      theta.relu_skip_upd_last ? 1.0 : 0.0;
  line("meta", meta);
  for (std::size_t j = 0; j < theta.W.size(); ++j) line("W" + std::to_string(j + 1), theta.W[j]);
  for (std::size_t k = 0; k < theta.C.size(); ++k) line("C" + std::to_string(k + 1), theta.C[k]);
  for (std::size_t j = 0; j < theta.b.size(); ++j) line("b" + std::to_string(j + 1), theta.b[j]);
}

BFParamSet read_checkpoint(std::istream& is) {
  BFParamSet p;
  std::map<std::string, Eigen::MatrixXd> tensors;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag, name, colon;
    long rows = 0, cols = 0;
    ls >> tag >> name >> rows >> cols >> colon;
    if (tag != "p" || colon != ":") throw std::runtime_error("bad checkpoint line: " + line);
    Eigen::MatrixXd t(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) {
        std::string tok;
        ls >> tok;
        t(r, c) = parse_double(tok);
      }
    tensors[name] = std::move(t);
  }
  const auto meta = tensors.find("meta");
  if (meta == tensors.end()) throw std::runtime_error("checkpoint missing meta tensor");
  p.m = static_cast<int>(meta->second(0, 0));
  p.K = static_cast<int>(meta->second(0, 1));
  p.relu_skip_upd_last = meta->second(0, 2) != 0.0;
  const int J = p.J();
  p.dims.resize(static_cast<std::size_t>(J) + 1);
  for (int j = 1; j <= J; ++j) {
    auto it = tensors.find("W" + std::to_string(j));
    if (it == tensors.end()) throw std::runtime_error("checkpoint missing W" + std::to_string(j));
    p.W.push_back(it->second);
    p.dims[static_cast<std::size_t>(j)] = static_cast<int>(it->second.rows());
    p.dims[static_cast<std::size_t>(j - 1)] = static_cast<int>(it->second.cols());
    auto bt = tensors.find("b" + std::to_string(j));
    if (bt == tensors.end()) throw std::runtime_error("checkpoint missing b" + std::to_string(j));
    p.b.push_back(bt->second);
  }
  for (int k = 1; k <= p.K; ++k) {
    auto it = tensors.find("C" + std::to_string(k));
    if (it == tensors.end()) throw std::runtime_error("checkpoint missing C" + std::to_string(k));
    p.C.push_back(it->second);
  }
  p.validate();
  return p;
}

}  // namespace nar

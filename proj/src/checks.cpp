#include "nar/checks.hpp"

#include "nar/analysis.hpp"
#include "nar/oracles.hpp"
#include "nar/training.hpp"
#include "nar/wl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace nar {

namespace {

using Runner = std::vector<CheckResult> (*)();

BFInstance random_instance(std::mt19937_64& rng, int n, double p, double beta = 1000.0) {
  DatasetSpec spec;
  spec.kind = DatasetKind::Er;
  spec.n = n;
  spec.p = p;
  spec.count = 1;
  spec.seed = rng();
  spec.beta = beta;
  return gen_dataset(spec)[0];
}

CheckResult check(const std::string& name, bool ok, const std::string& detail = "") {
  return {name, ok, detail};
}

std::vector<CheckResult> graph_checks() {
  std::vector<CheckResult> out;
  {
    bool ok = true;
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20 && ok; ++i) {
      const BFInstance g = random_instance(rng, 24, 0.15);
      std::vector<int> deg(24, 0);
      for (const Edge& e : g.graph.edges) {
        ++deg[static_cast<std::size_t>(e.u)];
        ++deg[static_cast<std::size_t>(e.v)];
        ok = ok && e.w >= 1.0 && e.w <= 100.0;
      }
      for (int d : deg) ok = ok && d > 0;
    }
    out.push_back(check("generated instances have no isolated vertex, weights in range", ok));
  }
  {
    const auto set = make_bf_training_set(50.0, 2, 1000.0);
    bool ok = set.size() == 3;
    for (const TrainSample& s : set)
      ok = ok && bf_k_step(s.instance, 2)[s.target_vertex] == s.target;
    out.push_back(check("path training set targets equal the K-step oracle", ok));
  }
  {
    const auto a = counterexample_mst14();
    const auto b = counterexample_mst14();
    bool ok = a.G.edges.size() == b.G.edges.size();
    for (std::size_t i = 0; ok && i < a.G.edges.size(); ++i)
      ok = a.G.edges[i].u == b.G.edges[i].u && a.G.edges[i].v == b.G.edges[i].v &&
           a.G.edges[i].w == b.G.edges[i].w;
    out.push_back(check("counterexample constructors are pure", ok));
  }
  {
    DatasetSpec spec;
    spec.kind = DatasetKind::Sbm;
    spec.n = 30;
    spec.count = 3;
    spec.seed = 11;
    std::ostringstream s1, s2;
    std::vector<GraphRecord> recs;
    for (const BFInstance& g : gen_dataset(spec)) recs.push_back({g.graph, {}});
    write_dataset(s1, recs);
    std::vector<GraphRecord> recs2;
    for (const BFInstance& g : gen_dataset(spec)) recs2.push_back({g.graph, {}});
    write_dataset(s2, recs2);
    out.push_back(check("generation is byte-stable for identical spec+seed", s1.str() == s2.str()));
  }
  return out;
}

std::vector<CheckResult> oracle_checks() {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(13);
  {
    bool ok = true;
    for (int i = 0; i < 30 && ok; ++i) {
      const WeightedGraph g = random_instance(rng, 20, 0.2).graph;
      ok = std::abs(mst_cost(g) - msf_via_thresholds(g)) <= 1e-9;
    }
    out.push_back(check("threshold formula equals Kruskal on random graphs", ok));
  }
  {
    bool ok = true;
    for (int i = 0; i < 10 && ok; ++i) {
      const BFInstance g = random_instance(rng, 16, 0.25);
      const Eigen::VectorXd bf = bf_k_step(g, 15);
      const Eigen::VectorXd dj = sssp_cost(g.graph, 0);
      for (int v = 0; v < 16; ++v) {
        const double want = std::isinf(dj[v]) ? g.beta : std::min(dj[v], g.beta);
        ok = ok && std::abs(bf[v] - want) <= 1e-9;
      }
    }
    out.push_back(check("n-1 BF sweeps match Dijkstra below beta", ok));
  }
  {
    bool ok = true;
    std::uniform_int_distribution<int> nd(1, 8), sd(0, 20), wd(1, 6);
    std::uniform_real_distribution<double> vd(0.5, 9.0);
    for (int i = 0; i < 40 && ok; ++i) {
      KnapsackInstance inst;
      inst.capacity = sd(rng);
      const int n = nd(rng);
      for (int j = 0; j < n; ++j) inst.items.push_back({vd(rng), wd(rng)});
      const auto dag = knapsack_to_dag(inst);
      const double via_dag = -bf_k_step(dag.dag, n + 1)[dag.t];
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
      ok = std::abs(knapsack_dp(inst) - brute) <= 1e-9 && std::abs(via_dag - brute) <= 1e-9;
    }
    out.push_back(check("knapsack DP = -(DAG shortest path) = subset brute force", ok));
  }
  {
    bool ok = true;
    const BFInstance g = random_instance(rng, 24, 0.2);
    for (double xi : {0.5, 0.85}) {
      const Eigen::VectorXd ref = truncated_pagerank(g.graph, xi, 200);
      for (int K : {5, 10}) {
        const Eigen::VectorXd r = truncated_pagerank(g.graph, xi, K);
        ok = ok && (r - ref).cwiseAbs().maxCoeff() <= std::pow(xi, K) + 1e-12;
      }
    }
    out.push_back(check("pagerank truncation error within xi^K", ok));
  }
  return out;
}

std::vector<CheckResult> wl_checks() {
  std::vector<CheckResult> out;
  const auto s6 = counterexample_sssp6();
  const auto m6 = counterexample_mst6();
  const auto m14 = counterexample_mst14();
  out.push_back(check("1-WL cannot split t1/t2 in the SSSP counterexample",
                      !wl1_distinguish_vertices(s6.G.graph, s6.t1, s6.t2)));
  out.push_back(check("1-WL cannot split the 6-vertex MST pair",
                      !wl1_distinguish_graphs(m6.G, m6.H)));
  out.push_back(check("1-iWL with root s splits t1/t2",
                      iwl_distinguish_tuple(s6.G.graph, s6.s, s6.t1, s6.G.graph, s6.s, s6.t2)));
  out.push_back(check("rooted 1-iWL cannot split the 14-vertex pair",
                      !iwl_distinguish_rooted(m14.G, m14.v, m14.H, m14.w)));
  out.push_back(check("(1,1)-WL splits both MST pairs",
                      wl11_distinguish(m6.G, m6.H) && wl11_distinguish(m14.G, m14.H)));
  {
    bool ok = true;
    std::mt19937_64 rng(3);
    for (int i = 0; i < 10 && ok; ++i) {
      const WeightedGraph g = random_instance(rng, 9, 0.3).graph;
      const Coloring c = wl1_refine(g, std::vector<int>(9, 0));
      ok = c.iterations <= g.n;
      for (std::size_t t = 1; t + 1 < c.history.size() && ok; ++t) {
        // Refinement property: same color later implies same color earlier.
        for (int u = 0; u < g.n && ok; ++u)
          for (int v = u + 1; v < g.n; ++v)
            if (c.history[t + 1][static_cast<std::size_t>(u)] ==
                    c.history[t + 1][static_cast<std::size_t>(v)] &&
                c.history[t][static_cast<std::size_t>(u)] !=
                    c.history[t][static_cast<std::size_t>(v)]) {
              ok = false;
              break;
            }
      }
    }
    out.push_back(check("refinement is monotone and stabilizes within n rounds", ok));
  }
  return out;
}

std::vector<CheckResult> autodiff_checks() {
  std::vector<CheckResult> out;
  {
    ad::Tape tape;
    Eigen::MatrixXd xv(2, 1);
    xv << -1.0, 2.0;
    const int x = tape.constant(xv);
    const int r = tape.relu(x);
    bool ok = tape.value(r)(0, 0) == 0.0 && tape.value(r)(1, 0) == 2.0;
    out.push_back(check("relu forward", ok));
  }
  {
    // Gradient linearity on a random expression.
    Eigen::MatrixXd w(3, 3), x(3, 1);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = d(rng);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = d(rng);
    auto grad_of = [&](double a, double b) {
      ad::Tape tape;
      const int wp = tape.param(&w);
      const int xc = tape.constant(x);
      const int f = tape.sum(tape.relu(tape.matvec(wp, xc)));
      const int g = tape.l1_norm(wp);
      const int root = tape.add(tape.scale(f, a), tape.scale(g, b));
      tape.backward(root);
      return Eigen::MatrixXd(tape.grad(wp));
    };
    const Eigen::MatrixXd g1 = grad_of(1.0, 0.0);
    const Eigen::MatrixXd g2 = grad_of(0.0, 1.0);
    const Eigen::MatrixXd g3 = grad_of(2.0, -0.5);
    bool ok = (g3 - (2.0 * g1 - 0.5 * g2)).cwiseAbs().maxCoeff() <= 1e-12;
    out.push_back(check("gradients are linear in the loss combination", ok));
  }
  {
    // Min routes its gradient to the winning argument only.
    ad::Tape tape;
    Eigen::MatrixXd a(1, 1), b(1, 1);
    a << 3.0;
    b << 1.0;
    const int pa = tape.param(&a);
    const int pb = tape.param(&b);
    std::vector<int> cands = {pa, pb};
    const int m = tape.reduce_min(cands);
    tape.backward(tape.sum(m));
    bool ok = tape.grad(pa)(0, 0) == 0.0 && tape.grad(pb)(0, 0) == 1.0;
    out.push_back(check("reduce_min routes gradient to the argmin", ok));
  }
  {
    // Adam drives a quadratic to zero.
    Eigen::MatrixXd x(1, 1);
    x << 1.0;
    ad::AdamState st;
    ad::AdamConfig cfg;
    cfg.lr = 0.01;
    std::vector<Eigen::MatrixXd*> ps = {&x};
    for (int i = 0; i < 1000; ++i) {
      Eigen::MatrixXd g = 2.0 * x;
      std::vector<const Eigen::MatrixXd*> gs = {&g};
      ad::adam_step(ps, gs, st, cfg);
    }
    out.push_back(check("adam minimizes x^2", std::abs(x(0, 0)) < 1e-3));
  }
  return out;
}

std::vector<CheckResult> mpnn_checks() {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(17);
  {
    bool ok = true;
    const auto dims = make_experiment_dims(2, 2);
    const BFParamSet psi = bf_parameter_config(2, 2, dims);
    for (int i = 0; i < 20 && ok; ++i) {
      const BFInstance g = random_instance(rng, 24, 0.2);
      ok = (bf_mpnn_eval(psi, g) - bf_k_step(g, 2)).cwiseAbs().maxCoeff() == 0.0;
    }
    out.push_back(check("psi computes Bellman-Ford exactly", ok));
  }
  {
    // Permutation equivariance of the BF MPNN.
    const BFInstance g = random_instance(rng, 10, 0.3);
    BFParamSet theta = init_bf_params(2, 2, make_experiment_dims(2, 2), 23, true);
    const Eigen::VectorXd h = bf_mpnn_eval(theta, g);
    std::vector<int> perm(10);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    BFInstance pg = g;
    pg.graph.edges.clear();
    for (const Edge& e : g.graph.edges)
      pg.graph.edges.push_back({perm[static_cast<std::size_t>(e.u)],
                                perm[static_cast<std::size_t>(e.v)], e.w});
    for (int v = 0; v < 10; ++v) pg.set_label(perm[static_cast<std::size_t>(v)], g.label(v));
    const Eigen::VectorXd hp = bf_mpnn_eval(theta, pg);
    bool ok = true;
    for (int v = 0; v < 10; ++v) ok = ok && std::abs(hp[perm[static_cast<std::size_t>(v)]] - h[v]) <= 1e-12;
    out.push_back(check("BF MPNN is permutation equivariant", ok));
  }
  {
    // Mean MPNN configured for PageRank reproduces the oracle.
    const BFInstance g = random_instance(rng, 16, 0.3);
    WeightedGraph pr = g.graph;
    pr.attrs.setOnes(pr.n, 1);
    const auto arch = make_pagerank_arch(0.85, 7);
    const auto h = mpnn_forward(arch, pr);
    const Eigen::VectorXd r = truncated_pagerank(pr, 0.85, 7);
    bool ok = true;
    for (int v = 0; v < pr.n; ++v) ok = ok && std::abs(h[static_cast<std::size_t>(v)][0] - r[v]) <= 1e-12;
    out.push_back(check("mean MPNN reproduces truncated PageRank", ok));
  }
  return out;
}

std::vector<CheckResult> walk_checks() {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(29);
  {
    bool ok = true;
    for (int i = 0; i < 10 && ok; ++i) {
      const BFInstance g = random_instance(rng, 7, 0.35);
      const int K = 2;
      for (int v = 0; v < g.n() && ok; ++v) {
        double best = std::numeric_limits<double>::infinity();
        for (const Eigen::VectorXd& z : enumerate_walks(g, v, K))
          best = std::min(best, z.sum());
        ok = std::abs(best - bf_k_step(g, K)[v]) <= 1e-9;
      }
    }
    out.push_back(check("min over walk weights equals the K-step BF distance", ok));
  }
  {
    // Feature upper bound via the positive-part walk-lifted FNN.
    bool ok = true;
    for (int i = 0; i < 10 && ok; ++i) {
      const BFInstance g = random_instance(rng, 6, 0.4, 8.0);
      BFParamSet theta = init_bf_params(1, 2, make_theorem_dims(1, 2, 3),
                                        static_cast<std::uint64_t>(100 + i), false);
      const BFParamSet plus = positive_part(theta);
      const Eigen::VectorXd h = bf_mpnn_eval(theta, g);
      for (int v = 0; v < g.n() && ok; ++v)
        for (const Eigen::VectorXd& z : enumerate_walks(g, v, 2))
          ok = ok && h[v] <= walk_lifted_fnn(plus, z) + 1e-9;
    }
    out.push_back(check("walk-lifted FNN upper-bounds MPNN features", ok));
  }
  {
    const BFParamSet psi = bf_parameter_config(2, 2, make_theorem_dims(2, 2, 4));
    const TransformedParams tp = transform_params(psi);
    const ModifiedLoss ml = modified_loss(tp, 50.0, 3, 0.1);
    bool ok = tp.L == 20.0 && std::abs(ml.reg - tp.L) <= 1e-12 && ml.emp == 0.0;
    ok = ok && std::abs(loss_reg_weighted(psi) - 20.0) <= 1e-12;
    out.push_back(check("transformed psi hits the global minimum value", ok));
  }
  return out;
}

std::vector<CheckResult> training_checks() {
  std::vector<CheckResult> out;
  {
    const auto dims = make_theorem_dims(1, 1, 1);
    const BFParamSet psi = bf_parameter_config(1, 1, dims);
    const auto set = theorem_training_set(10.0, 1, 2.0 * (2 + 10 + 1));
    const double emp = loss_emp(psi, set, LossVertices::TargetOnly);
    const double reg = loss_reg_weighted(psi);
    bool ok = emp == 0.0 && reg == 4.0;
    out.push_back(check("loss at psi equals eta * mK(K+3)", ok));
  }
  {
    const TheoremParams tp = theorem_params(1, 1, 2);
    bool ok = tp.L == 4.0 && std::abs(tp.eta_min - 2.0 * std::exp(4.0)) <= 1e-9 &&
              std::abs(tp.x_min - 8.0 * tp.eta_min) <= 1e-9;
    out.push_back(check("theorem parameter formulas", ok));
  }
  {
    // A short smoke run must decrease the loss and stay finite.
    TrainConfig cfg;
    cfg.steps = 400;
    cfg.lr = 0.005;
    cfg.seed = 3;
    cfg.m = 1;
    cfg.K = 1;
    cfg.dims = make_theorem_dims(1, 1, 2);
    cfg.relu_skip_upd_last = false;
    cfg.loss.reg = RegKind::WeightedL1;
    cfg.loss.eta = 0.1;
    cfg.train_set = experiment_training_set(5.0, 1, 100.0);
    cfg.log_every = 100;
    const TrainResult res = train(cfg);
    bool ok = res.history.back().loss_total < res.history.front().loss_total;
    out.push_back(check("training reduces the loss on a smoke run", ok));
  }
  return out;
}

}  // namespace

std::vector<CheckResult> run_checks(const std::string& suite) {
  std::vector<std::pair<std::string, Runner>> suites = {
      {"graph", &graph_checks},   {"oracles", &oracle_checks},
      {"wl", &wl_checks},         {"autodiff", &autodiff_checks},
      {"mpnn", &mpnn_checks},     {"walks", &walk_checks},
      {"training", &training_checks}};
  std::vector<CheckResult> out;
  bool matched = false;
  for (const auto& [name, runner] : suites) {
    if (suite != "all" && suite != name) continue;
    matched = true;
    for (CheckResult& r : runner()) {
      r.name = name + ": " + r.name;
      out.push_back(std::move(r));
    }
  }
  if (!matched) throw std::invalid_argument("unknown check suite: " + suite);
  return out;
}

}  // namespace nar

#include "nar/training.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

using namespace nar;

TEST_CASE("empirical loss basics") {
  ad::Tape tape;
  const int a = tape.constant(3.0);
  const int node = loss_emp_node(tape, {a}, {5.0});
  CHECK(tape.scalar_value(node) == 2.0);
  const int b = tape.constant(5.0);
  CHECK(tape.scalar_value(loss_emp_node(tape, {b}, {5.0})) == 0.0);
  std::vector<int> none;
  CHECK_THROWS_AS(loss_emp_node(tape, none, {}), std::invalid_argument);
}

TEST_CASE("weighted regularizer value at psi is mK(K+3)") {
  for (auto [m, K] : {std::pair{1, 1}, std::pair{2, 2}, std::pair{1, 3}}) {
    const BFParamSet psi = bf_parameter_config(m, K, make_theorem_dims(m, K, 4));
    CHECK(loss_reg_weighted(psi) == doctest::Approx(m * K * (K + 3)).epsilon(1e-15));

    ad::Tape tape;
    const std::vector<int> nodes = register_params(tape, psi);
    CHECK(tape.scalar_value(loss_reg_weighted_node(tape, psi, nodes)) ==
          doctest::Approx(m * K * (K + 3)).epsilon(1e-15));
  }

  // Homogeneity: doubling all parameters doubles the value; zero gives zero.
  BFParamSet psi = bf_parameter_config(2, 2, make_theorem_dims(2, 2, 4));
  BFParamSet twice = psi;
  for (auto& w : twice.W) w *= 2.0;
  for (auto& c : twice.C) c *= 2.0;
  CHECK(loss_reg_weighted(twice) == doctest::Approx(2.0 * loss_reg_weighted(psi)).epsilon(1e-15));
  BFParamSet zero = psi;
  for (auto& w : zero.W) w.setZero();
  for (auto& c : zero.C) c.setZero();
  CHECK(loss_reg_weighted(zero) == 0.0);
}

TEST_CASE("plain l1 and l2 regularizers") {
  const BFParamSet psi = bf_parameter_config(2, 2, make_theorem_dims(2, 2, 4));
  CHECK(loss_l1(psi) == 10.0);  // J + K unit entries
  CHECK(loss_l2(psi) == 10.0);

  BFParamSet single = bf_parameter_config(1, 1, make_theorem_dims(1, 1, 1));
  for (auto& w : single.W) w.setZero();
  for (auto& c : single.C) c.setZero();
  single.W[0](0, 0) = 3.0;
  CHECK(loss_l2(single) == 9.0);
  CHECK(loss_l1(single) == 3.0);
}

TEST_CASE("cert regularizer") {
  const BFParamSet psi = bf_parameter_config(2, 2, make_theorem_dims(2, 2, 4));
  CHECK(cert_regularizer(psi, 1.0, CertNorm::Spectral) == doctest::Approx(0.0).epsilon(1e-12));
  BFParamSet twice = psi;
  twice.W[0] *= 2.0;
  CHECK(cert_regularizer(twice, 1.0, CertNorm::Spectral) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("cover budget formulas") {
  const auto [r, eps_prime] = cover_budget(0.6, 0.0, 10, 2.0);
  CHECK(r == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(eps_prime == doctest::Approx(std::min(0.6 / 30.0, 0.1 * 2.0)).epsilon(1e-15));
}

TEST_CASE("theorem parameter formulas") {
  const TheoremParams a = theorem_params(1, 1, 2);
  CHECK(a.L == 4.0);
  CHECK(a.eta_min == doctest::Approx(2.0 * std::exp(4.0)).epsilon(1e-15));
  CHECK(a.x_min == doctest::Approx(8.0 * a.eta_min).epsilon(1e-15));
  const TheoremParams b = theorem_params(2, 2, 3);
  CHECK(b.L == 20.0);
  CHECK_THROWS_AS(theorem_params(10, 10, 1), std::invalid_argument);
}

TEST_CASE("loss at psi equals eta L on the path training set") {
  for (double eta : {0.1, 1.0}) {
    for (auto [m, K] : {std::pair{1, 1}, std::pair{2, 2}}) {
      const TheoremParams tp = theorem_params(m, K, K + 1);
      const double x = 50.0;
      const auto set = theorem_training_set(x, K, 2.0 * ((K + 1) + x + 1.0));
      const BFParamSet psi = bf_parameter_config(m, K, make_theorem_dims(m, K, 3));
      const double emp = loss_emp(psi, set, LossVertices::TargetOnly);
      const double total = emp + eta * loss_reg_weighted(psi);
      CHECK(emp == 0.0);
      CHECK(std::abs(total - eta * tp.L) <= 1e-12);
    }
  }
}

TEST_CASE("test_score properties") {
  const BFParamSet psi = bf_parameter_config(2, 2, make_experiment_dims(2, 2, 8, 4));
  DatasetSpec spec;
  spec.kind = DatasetKind::Er;
  spec.n = 24;
  spec.p = 0.2;
  spec.count = 4;
  spec.seed = 99;
  const EvalSet set = EvalSet::from_instances("er", gen_dataset(spec), 2);
  CHECK(test_score(psi, set) == 0.0);

  // Scaling the last layer by 2 and adding bias 1 turns the exact model
  // into h = 2x + 1, which scores exactly 1.
  BFParamSet off = psi;
  off.W.back() *= 2.0;
  off.b.back().setConstant(1.0);
  CHECK(test_score(off, set) == doctest::Approx(1.0).epsilon(1e-12));

  // Vertex permutation of a test graph leaves the score unchanged.
  std::mt19937_64 rng(101);
  const BFInstance g = set.graphs[0];
  std::vector<int> perm(g.n());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  BFInstance pg = g;
  pg.graph.edges.clear();
  for (const Edge& e : g.graph.edges)
    pg.graph.edges.push_back({perm[static_cast<std::size_t>(e.u)],
                              perm[static_cast<std::size_t>(e.v)], e.w});
  for (int v = 0; v < g.n(); ++v) pg.set_label(perm[static_cast<std::size_t>(v)], g.label(v));
  const Eigen::VectorXd t = bf_k_step(g, 2);
  Eigen::VectorXd pt(t.size());
  for (int v = 0; v < g.n(); ++v) pt[perm[static_cast<std::size_t>(v)]] = t[v];
  CHECK(test_score(off, {g}, {t}) == doctest::Approx(test_score(off, {pg}, {pt})).epsilon(1e-12));
}

TEST_CASE("bf_bound_check") {
  const BFParamSet psi = bf_parameter_config(1, 2, make_theorem_dims(1, 2, 2));
  DatasetSpec spec;
  spec.kind = DatasetKind::Er;
  spec.n = 16;
  spec.p = 0.25;
  spec.seed = 7;
  const BFInstance g = gen_dataset(spec)[0];
  CHECK(bf_bound_check(psi, g, 0.25));

  // Zeroing the first edge column breaks the bound on instances whose
  // distances depend on the first-hop weight.
  BFParamSet broken = psi;
  broken.C[0].setZero();
  Eigen::VectorXd w(3);
  w << 0.0, 40.0, 0.0;
  const BFInstance path = make_path_graph(w, 1000.0);
  CHECK_FALSE(bf_bound_check(broken, path, 0.25));

  CHECK_THROWS_AS(bf_bound_check(psi, g, 0.9), std::invalid_argument);
}

TEST_CASE("training set builders") {
  const auto exp_set = experiment_training_set(50.0, 2, 1000.0);
  CHECK(exp_set.size() == 10);  // 3 scales x 3 paths + edge case
  for (const TrainGraph& tg : exp_set) {
    CHECK(tg.targets.size() == tg.instance.n());
    CHECK_FALSE(tg.target_vertex.has_value());
  }
  const auto thm_set = theorem_training_set(10.0, 2, 2.0 * (3 + 10 + 1));
  CHECK(thm_set.size() == 3);
  for (const TrainGraph& tg : thm_set) CHECK(tg.target_vertex == 2);

  const auto stripped = strip_source_marks(exp_set);
  for (std::size_t i = 0; i < stripped.size(); ++i) {
    for (int v = 0; v < stripped[i].instance.n(); ++v)
      CHECK(stripped[i].instance.label(v) == stripped[i].instance.beta);
    CHECK((stripped[i].targets - exp_set[i].targets).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  TrainConfig cfg;
  cfg.steps = 50;
  cfg.lr = 0.0;
  cfg.seed = 5;
  cfg.m = 1;
  cfg.K = 1;
  cfg.dims = make_theorem_dims(1, 1, 2);
  cfg.relu_skip_upd_last = false;
  cfg.train_set = experiment_training_set(5.0, 1, 100.0);
  const BFParamSet before = init_bf_params(cfg.m, cfg.K, cfg.dims, cfg.seed, false);
  const TrainResult res = train(cfg);
  for (std::size_t j = 0; j < before.W.size(); ++j)
    CHECK((res.theta.W[j] - before.W[j]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("training from psi never drops below eta L") {
  // Theorem-scale eta and x make eta L the global minimum; training that
  // starts anywhere must stay at or above it.
  const TheoremParams tp = theorem_params(1, 1, 2);
  TrainConfig cfg;
  cfg.steps = 3000;
  cfg.lr = 0.001;
  cfg.seed = 2;
  cfg.m = 1;
  cfg.K = 1;
  cfg.dims = make_theorem_dims(1, 1, 1);
  cfg.relu_skip_upd_last = false;
  cfg.loss.vertices = LossVertices::TargetOnly;
  cfg.loss.eta = tp.eta_min;
  cfg.train_set = theorem_training_set(tp.x_min, 1, 2.0 * (2 + tp.x_min + 1.0));
  const TrainResult res = train(cfg);
  for (const MetricsRow& row : res.history)
    CHECK(row.loss_total >= tp.eta_min * tp.L - 1e-9);
}

TEST_CASE("determinism of training given a seed") {
  TrainConfig cfg;
  cfg.steps = 200;
  cfg.lr = 0.01;
  cfg.seed = 11;
  cfg.m = 1;
  cfg.K = 1;
  cfg.dims = make_theorem_dims(1, 1, 3);
  cfg.relu_skip_upd_last = false;
  cfg.train_set = experiment_training_set(5.0, 1, 100.0);
  const TrainResult a = train(cfg);
  const TrainResult b = train(cfg);
  CHECK(a.history.back().loss_total == b.history.back().loss_total);
  for (std::size_t j = 0; j < a.theta.W.size(); ++j)
    CHECK((a.theta.W[j] - b.theta.W[j]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("metrics csv layout and smoothing flag") {
  std::vector<MetricsRow> rows;
  for (int i = 0; i < 5; ++i) {
    MetricsRow r;
    r.step = i * 100;
    r.loss_emp = 5.0 - i;
    r.loss_reg = 2.0;
    r.loss_total = 7.0 - i;
    r.scores = {0.5 / (i + 1)};
    rows.push_back(r);
  }
  std::ostringstream raw;
  write_metrics_csv(raw, rows, {"general-64"});
  CHECK(raw.str().rfind("step,loss_emp,loss_reg,loss_total,score_general-64\n", 0) == 0);
  CHECK(raw.str().find("\n0,5,2,7,0.5\n") != std::string::npos);

  std::ostringstream smoothed;
  write_metrics_csv(smoothed, rows, {"general-64"}, 1.0);
  CHECK(smoothed.str() != raw.str());  // smoothing applies on export only
}

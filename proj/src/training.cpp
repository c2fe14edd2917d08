#include "nar/training.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <ostream>
#include <stdexcept>

namespace nar {

RegKind reg_kind_from_string(const std::string& s) {
  if (s == "weighted-l1") return RegKind::WeightedL1;
  if (s == "l1") return RegKind::L1;
  if (s == "l2") return RegKind::L2;
  if (s == "cert") return RegKind::Cert;
  if (s == "none") return RegKind::None;
  throw std::invalid_argument("unknown regularizer: " + s);
}

std::string to_string(RegKind k) {
  switch (k) {
    case RegKind::WeightedL1: return "weighted-l1";
    case RegKind::L1: return "l1";
    case RegKind::L2: return "l2";
    case RegKind::Cert: return "cert";
    case RegKind::None: return "none";
  }
  return "?";
}

void LossConfig::validate() const {
  if (eta < 0.0) throw std::invalid_argument("loss config: eta must be nonnegative");
  if (reg == RegKind::Cert && cert_target < 0.0)
    throw std::invalid_argument("loss config: cert target must be nonnegative");
}

void TrainConfig::validate() const {
  if (steps < 1) throw std::invalid_argument("train config: steps must be >= 1");
  if (train_set.empty()) throw std::invalid_argument("train config: empty training set");
  loss.validate();
}

EvalSet EvalSet::from_instances(std::string name, std::vector<BFInstance> graphs, int K,
                                SourceMarking marking) {
  EvalSet set;
  set.name = std::move(name);
  set.graphs = std::move(graphs);
  for (const BFInstance& g : set.graphs) {
    set.targets.push_back(bf_k_step(g, K));
    set.inputs.push_back(marking == SourceMarking::BfInit ? g : mark_source(g, 0, marking));
  }
  return set;
}

int loss_emp_node(ad::Tape& tape, const std::vector<int>& outputs,
                  const std::vector<double>& targets) {
  if (outputs.empty()) throw std::invalid_argument("loss_emp: empty sample set");
  if (outputs.size() != targets.size())
    throw std::invalid_argument("loss_emp: outputs/targets size mismatch");
  std::vector<int> terms;
  for (std::size_t i = 0; i < outputs.size(); ++i)
    terms.push_back(tape.abs(tape.sub(outputs[i], tape.constant(targets[i]))));
  return tape.scale(tape.add_n(terms), 1.0 / static_cast<double>(terms.size()));
}

namespace {

// param_nodes order matches register_params: all W, all C, all b.
struct ParamNodeView {
  std::vector<int> W, C, b;
};

ParamNodeView split_nodes(const BFParamSet& theta, const std::vector<int>& nodes) {
  const std::size_t J = theta.W.size();
  const std::size_t K = theta.C.size();
  if (nodes.size() != J + K + theta.b.size())
    throw std::invalid_argument("param node list does not match parameter set");
  ParamNodeView v;
  v.W.assign(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(J));
  v.C.assign(nodes.begin() + static_cast<std::ptrdiff_t>(J),
             nodes.begin() + static_cast<std::ptrdiff_t>(J + K));
  v.b.assign(nodes.begin() + static_cast<std::ptrdiff_t>(J + K), nodes.end());
  return v;
}

// Number of k in [0, K] with j_k < j; the weight every |W^j|_1 term carries
// in the layer-weighted regularizer.
int weight_coefficient(const BFParamSet& theta, int j) {
  int c = 1;  // j_0 = 0 < j always
  for (int k = 1; k <= theta.K; ++k)
    if (theta.edge_layer(k) < j) ++c;
  return c;
}

}  // namespace

int loss_reg_weighted_node(ad::Tape& tape, const BFParamSet& theta,
                           const std::vector<int>& param_nodes) {
  const ParamNodeView v = split_nodes(theta, param_nodes);
  std::vector<int> terms;
  for (int j = 1; j <= theta.J(); ++j)
    terms.push_back(tape.scale(tape.l1_norm(v.W[static_cast<std::size_t>(j - 1)]),
                               static_cast<double>(weight_coefficient(theta, j))));
  for (int id : v.C) terms.push_back(tape.l1_norm(id));
  for (int id : v.b) terms.push_back(tape.l1_norm(id));
  return tape.add_n(terms);
}

int loss_l1_node(ad::Tape& tape, const std::vector<int>& param_nodes) {
  std::vector<int> terms;
  for (int id : param_nodes) terms.push_back(tape.l1_norm(id));
  return tape.add_n(terms);
}

int loss_l2_node(ad::Tape& tape, const std::vector<int>& param_nodes) {
  std::vector<int> terms;
  for (int id : param_nodes) terms.push_back(tape.l2_norm_sq(id));
  return tape.add_n(terms);
}

double loss_emp(const BFParamSet& theta, const std::vector<TrainGraph>& graphs,
                LossVertices vertices) {
  if (graphs.empty()) throw std::invalid_argument("loss_emp: empty sample set");
  double total = 0.0;
  long count = 0;
  for (const TrainGraph& tg : graphs) {
    const Eigen::VectorXd h = bf_mpnn_eval(theta, tg.instance);
    if (vertices == LossVertices::TargetOnly && tg.target_vertex) {
      total += std::abs(h[*tg.target_vertex] - tg.targets[*tg.target_vertex]);
      ++count;
    } else {
      total += (h - tg.targets).cwiseAbs().sum();
      count += h.size();
    }
  }
  return total / static_cast<double>(count);
}

double loss_reg_weighted(const BFParamSet& theta) {
  double total = 0.0;
  for (int j = 1; j <= theta.J(); ++j)
    total += weight_coefficient(theta, j) * theta.W[static_cast<std::size_t>(j - 1)].cwiseAbs().sum();
  for (const auto& c : theta.C) total += c.cwiseAbs().sum();
  for (const auto& v : theta.b) total += v.cwiseAbs().sum();
  return total;
}

double loss_l1(const BFParamSet& theta) {
  double total = 0.0;
  for (const auto& w : theta.W) total += w.cwiseAbs().sum();
  for (const auto& c : theta.C) total += c.cwiseAbs().sum();
  for (const auto& v : theta.b) total += v.cwiseAbs().sum();
  return total;
}

double loss_l2(const BFParamSet& theta) {
  double total = 0.0;
  for (const auto& w : theta.W) total += w.squaredNorm();
  for (const auto& c : theta.C) total += c.squaredNorm();
  for (const auto& v : theta.b) total += v.squaredNorm();
  return total;
}

int cert_regularizer_node(ad::Tape& tape, const BFParamSet& theta,
                          const std::vector<int>& param_nodes, double cert_target,
                          CertNorm norm) {
  const ParamNodeView v = split_nodes(theta, param_nodes);
  int prod = tape.constant(1.0);
  for (int id : v.W) {
    int n;
    if (norm == CertNorm::Spectral) {
      n = tape.spectral_norm(id);
    } else {
      // Induced l1 operator norm: max column abs sum. Built from the
      // available pieces via per-column selection would bloat the tape, so
      // the matrix l1 route penalizes the entrywise l1 norm, a differentiable
      // upper bound of the operator norm.
      n = tape.l1_norm(id);
    }
    prod = tape.mul(prod, n);
  }
  return tape.relu(tape.sub(prod, tape.constant(cert_target)));
}

double cert_regularizer(const BFParamSet& theta, double cert_target, CertNorm norm) {
  ad::Tape tape;
  const std::vector<int> nodes = register_params(tape, theta);
  const int out = cert_regularizer_node(tape, theta, nodes, cert_target, norm);
  return tape.scalar_value(out);
}

TheoremParams theorem_params(int m, int K, int N) {
  if (m < 1 || K < 1 || N < 1) throw std::invalid_argument("theorem_params: positive integers required");
  TheoremParams tp;
  tp.L = static_cast<double>(m) * K * (K + 3);
  if (tp.L > 700.0)
    throw std::invalid_argument(
        "theorem_params: exp(mK(K+3)) overflows double precision; use smaller m, K");
  tp.eta_min = 2.0 * K * std::exp(tp.L);
  tp.x_min = 4.0 * m * K * N * tp.eta_min;
  return tp;
}

std::pair<double, double> cover_budget(double eps, double B_target, int N_r, double eta) {
  if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("cover_budget: eps must be in (0,1)");
  const double r = eps / (6.0 * (1.0 + B_target));
  const double eps_prime =
      std::min(eps / (3.0 * static_cast<double>(N_r)), eps * eta / (6.0 * (1.0 + B_target)));
  return {r, eps_prime};
}

namespace {

struct GraphTape {
  ad::Tape tape;
  std::vector<int> param_nodes;
  int loss = -1;
  int loss_emp = -1;
  int loss_reg = -1;
};

}  // namespace

TrainResult train(const TrainConfig& config) {
  config.validate();
  TrainResult result;
  result.theta = init_bf_params(config.m, config.K, config.dims, config.seed,
                                config.relu_skip_upd_last);
  BFParamSet& theta = result.theta;

  // One static tape per training graph, replayed every step.
  std::vector<std::unique_ptr<GraphTape>> tapes;
  for (const TrainGraph& tg : config.train_set) {
    auto gt = std::make_unique<GraphTape>();
    std::vector<int> outputs = bf_mpnn_forward(gt->tape, theta, tg.instance, &gt->param_nodes);
    std::vector<int> sample_nodes;
    std::vector<double> sample_targets;
    if (config.loss.vertices == LossVertices::TargetOnly && tg.target_vertex) {
      sample_nodes.push_back(outputs[static_cast<std::size_t>(*tg.target_vertex)]);
      sample_targets.push_back(tg.targets[*tg.target_vertex]);
    } else {
      for (int v = 0; v < tg.instance.n(); ++v) {
        sample_nodes.push_back(outputs[static_cast<std::size_t>(v)]);
        sample_targets.push_back(tg.targets[v]);
      }
    }
    gt->loss_emp = loss_emp_node(gt->tape, sample_nodes, sample_targets);
    switch (config.loss.reg) {
      case RegKind::WeightedL1:
        gt->loss_reg = loss_reg_weighted_node(gt->tape, theta, gt->param_nodes);
        break;
      case RegKind::L1:
        gt->loss_reg = loss_l1_node(gt->tape, gt->param_nodes);
        break;
      case RegKind::L2:
        gt->loss_reg = loss_l2_node(gt->tape, gt->param_nodes);
        break;
      case RegKind::Cert:
        gt->loss_reg = cert_regularizer_node(gt->tape, theta, gt->param_nodes,
                                             config.loss.cert_target, CertNorm::L1Matrix);
        break;
      case RegKind::None:
        gt->loss_reg = gt->tape.constant(0.0);
        break;
    }
    gt->loss = gt->tape.add(gt->loss_emp, gt->tape.scale(gt->loss_reg, config.loss.eta));
    tapes.push_back(std::move(gt));
  }

  std::vector<Eigen::MatrixXd*> params = param_ptrs(theta);
  ad::AdamState adam;
  ad::AdamConfig adam_cfg;
  adam_cfg.lr = config.lr;

  auto full_losses = [&]() {
    const double emp = loss_emp(theta, config.train_set, config.loss.vertices);
    double reg = 0.0;
    switch (config.loss.reg) {
      case RegKind::WeightedL1: reg = loss_reg_weighted(theta); break;
      case RegKind::L1: reg = loss_l1(theta); break;
      case RegKind::L2: reg = loss_l2(theta); break;
      case RegKind::Cert:
        reg = cert_regularizer(theta, config.loss.cert_target, CertNorm::L1Matrix);
        break;
      case RegKind::None: reg = 0.0; break;
    }
    return std::array<double, 3>{emp, reg, emp + config.loss.eta * reg};
  };

  auto log_row = [&](long step) {
    const auto [emp, reg, total] = full_losses();
    MetricsRow row;
    row.step = step;
    row.loss_emp = emp;
    row.loss_reg = reg;
    row.loss_total = total;
    for (const EvalSet& set : config.eval_sets) row.scores.push_back(test_score(theta, set));
    result.history.push_back(row);
    return total;
  };

  log_row(0);
  for (long step = 1; step <= config.steps; ++step) {
    GraphTape& gt = *tapes[static_cast<std::size_t>((step - 1) %
                                                    static_cast<long>(tapes.size()))];
    gt.tape.run_forward();
    const double step_loss = gt.tape.scalar_value(gt.loss);
    if (!std::isfinite(step_loss))
      throw std::runtime_error("training diverged: non-finite loss at step " +
                               std::to_string(step));
    gt.tape.backward(gt.loss);
    std::vector<const Eigen::MatrixXd*> grads;
    grads.reserve(gt.param_nodes.size());
    for (int id : gt.param_nodes) grads.push_back(&gt.tape.grad(id));
    ad::adam_step(params, grads, adam, adam_cfg);

    if (step % config.log_every == 0 || step == config.steps) {
      const double total = log_row(step);
      if (config.stop_at_loss && total <= *config.stop_at_loss) {
        result.reached_stop = true;
        break;
      }
    }
  }
  if (config.stop_at_loss && !result.reached_stop)
    result.reached_stop = full_losses()[2] <= *config.stop_at_loss;
  return result;
}

double test_score(const BFParamSet& theta, const std::vector<BFInstance>& inputs,
                  const std::vector<Eigen::VectorXd>& targets) {
  if (inputs.size() != targets.size())
    throw std::invalid_argument("test_score: inputs/targets size mismatch");
  double total = 0.0;
  long count = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const Eigen::VectorXd h = bf_mpnn_eval(theta, inputs[i]);
    total += ((h - targets[i]).cwiseAbs().array() / (targets[i].array() + 1.0)).sum();
    count += h.size();
  }
  return total / static_cast<double>(count);
}

double test_score(const BFParamSet& theta, const EvalSet& set) {
  return test_score(theta, set.inputs, set.targets);
}

bool bf_bound_check(const BFParamSet& theta, const BFInstance& g, double eps) {
  if (!(eps > 0.0 && eps <= 0.5)) throw std::invalid_argument("bf_bound_check: eps outside (0, 1/2]");
  const Eigen::VectorXd x = bf_k_step(g, theta.K);
  const Eigen::VectorXd h = bf_mpnn_eval(theta, g);
  for (int v = 0; v < g.n(); ++v)
    if (std::abs(h[v] - x[v]) > eps * (x[v] + 1.0)) return false;
  return true;
}

void write_metrics_csv(std::ostream& os, const std::vector<MetricsRow>& rows,
                       const std::vector<std::string>& score_names, double smooth_sigma) {
  os << "step,loss_emp,loss_reg,loss_total";
  for (const std::string& name : score_names) os << ",score_" << name;
  os << '\n';

  auto smooth = [&](auto getter) {
    std::vector<double> vals(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) vals[i] = getter(rows[i]);
    if (smooth_sigma <= 0.0) return vals;
    // Gaussian smoothing on export only; stored rows stay raw.
    std::vector<double> out(vals.size());
    const int radius = static_cast<int>(std::ceil(3.0 * smooth_sigma));
    for (std::size_t i = 0; i < vals.size(); ++i) {
      double acc = 0.0, norm = 0.0;
      for (int d = -radius; d <= radius; ++d) {
        const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + d;
        if (j < 0 || j >= static_cast<std::ptrdiff_t>(vals.size())) continue;
        const double w = std::exp(-0.5 * (d / smooth_sigma) * (d / smooth_sigma));
        acc += w * vals[static_cast<std::size_t>(j)];
        norm += w;
      }
      out[i] = acc / norm;
    }
    return out;
  };

  const auto emp = smooth([](const MetricsRow& r) { return r.loss_emp; });
  const auto reg = smooth([](const MetricsRow& r) { return r.loss_reg; });
  const auto total = smooth([](const MetricsRow& r) { return r.loss_total; });
  std::vector<std::vector<double>> scores;
  for (std::size_t s = 0; s < score_names.size(); ++s)
    scores.push_back(smooth([s](const MetricsRow& r) { return r.scores[s]; }));

  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << rows[i].step << ',' << format_double(emp[i]) << ',' << format_double(reg[i]) << ','
       << format_double(total[i]);
    for (const auto& col : scores) os << ',' << format_double(col[i]);
    os << '\n';
  }
}

namespace {

TrainGraph with_targets(BFInstance inst, int K, std::optional<int> target_vertex) {
  TrainGraph tg;
  tg.targets = bf_k_step(inst, K);
  tg.instance = std::move(inst);
  tg.target_vertex = target_vertex;
  return tg;
}

}  // namespace

std::vector<TrainGraph> experiment_training_set(double x, int K, double beta) {
  std::vector<TrainGraph> out;
  for (double scale : {1.0, 0.5, 2.0})
    for (TrainSample& s : make_bf_training_set(scale * x, K, beta))
      out.push_back(with_targets(std::move(s.instance), K, std::nullopt));
  out.push_back(with_targets(make_edge_case_graph(x, K, beta), K, std::nullopt));
  return out;
}

std::vector<TrainGraph> theorem_training_set(double x, int K, double beta) {
  std::vector<TrainGraph> out;
  for (TrainSample& s : make_bf_training_set(x, K, beta))
    out.push_back(with_targets(std::move(s.instance), K, s.target_vertex));
  return out;
}

std::vector<TrainGraph> strip_source_marks(const std::vector<TrainGraph>& graphs) {
  std::vector<TrainGraph> out = graphs;
  for (TrainGraph& tg : out) tg.instance = mark_source(tg.instance, 0, SourceMarking::None);
  return out;
}

}  // namespace nar

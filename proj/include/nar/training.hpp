#pragma once

#include "nar/mpnn.hpp"
#include "nar/oracles.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nar {

enum class RegKind { WeightedL1, L1, L2, Cert, None };
enum class LossVertices { TargetOnly, AllVertices };

RegKind reg_kind_from_string(const std::string& s);
std::string to_string(RegKind k);

struct LossConfig {
  RegKind reg = RegKind::WeightedL1;
  double eta = 0.1;
  double cert_target = 0.0;      // cert only
  LossVertices vertices = LossVertices::AllVertices;

  void validate() const;
};

// A training graph with per-vertex targets (K-step BF distances from the
// instance's own labels unless supplied).
struct TrainGraph {
  BFInstance instance;
  Eigen::VectorXd targets;
  std::optional<int> target_vertex;  // theorem mode restricts the loss here
};

struct MetricsRow {
  long step = 0;
  double loss_emp = 0.0;
  double loss_reg = 0.0;
  double loss_total = 0.0;
  std::vector<double> scores;  // one per eval set
};

struct EvalSet {
  std::string name;
  std::vector<BFInstance> graphs;
  std::vector<Eigen::VectorXd> targets;
  // Inputs seen by the model; defaults to the instances themselves. Q2's
  // 1-WL baseline evaluates on label-stripped copies against unchanged
  // targets.
  std::vector<BFInstance> inputs;

  static EvalSet from_instances(std::string name, std::vector<BFInstance> graphs, int K,
                                SourceMarking marking = SourceMarking::BfInit);
};

struct TrainConfig {
  long steps = 160000;
  double lr = 0.001;
  std::uint64_t seed = 0;
  int m = 2;
  int K = 2;
  std::vector<int> dims;
  bool relu_skip_upd_last = true;  // experiment mode default
  LossConfig loss;
  std::vector<TrainGraph> train_set;
  std::vector<EvalSet> eval_sets;
  long log_every = 100;
  std::optional<double> stop_at_loss;  // early stop once full loss reaches this

  void validate() const;
};

// Empirical loss node: mean absolute error over the samples.
int loss_emp_node(ad::Tape& tape, const std::vector<int>& outputs,
                  const std::vector<double>& targets);

// The layer-weighted l1 regularizer: sum_{k=0..K} sum_{j>j_k} |W^j|_1 +
// sum_k |C^k|_1 + sum_j |b^j|_1. Value at psi is mK(K+3).
int loss_reg_weighted_node(ad::Tape& tape, const BFParamSet& theta,
                           const std::vector<int>& param_nodes);
int loss_l1_node(ad::Tape& tape, const std::vector<int>& param_nodes);
int loss_l2_node(ad::Tape& tape, const std::vector<int>& param_nodes);

// Plain-value versions for reporting.
double loss_emp(const BFParamSet& theta, const std::vector<TrainGraph>& graphs,
                LossVertices vertices);
double loss_reg_weighted(const BFParamSet& theta);
double loss_l1(const BFParamSet& theta);
double loss_l2(const BFParamSet& theta);

enum class CertNorm { Spectral, L1Matrix };

// ReLU(prod of per-layer norms - cert target), eta-scaled by the caller.
// Spectral norms come from power iteration and are treated as constants
// within a step; the l1 matrix norm variant is differentiable.
int cert_regularizer_node(ad::Tape& tape, const BFParamSet& theta,
                          const std::vector<int>& param_nodes, double cert_target, CertNorm norm);
double cert_regularizer(const BFParamSet& theta, double cert_target, CertNorm norm);

struct TheoremParams {
  double L = 0.0;
  double eta_min = 0.0;
  double x_min = 0.0;
};

// L = mK(K+3), eta_min = 2K exp(L), x_min = 4mKN eta_min. Errors out when
// exp(L) would overflow.
TheoremParams theorem_params(int m, int K, int N);

// Sample-cover budget from the generic regularization theorem:
// r = eps / (6 (1 + B_target)) and the loss threshold
// eps' < min{eps / (3 N_r), eps * eta / (6 (1 + B_target))}.
std::pair<double, double> cover_budget(double eps, double B_target, int N_r, double eta);

struct TrainResult {
  BFParamSet theta;
  std::vector<MetricsRow> history;
  bool reached_stop = false;
};

// Adam on L = L_emp + eta * L_reg, batch of one training graph per step
// cycled in construction order. History rows every log_every steps carry the
// full-training-set losses and eval scores. Aborts with an error if the loss
// becomes non-finite.
TrainResult train(const TrainConfig& config);

// Mean over all vertices of all graphs of |h_v - x_v| / (x_v + 1).
double test_score(const BFParamSet& theta, const std::vector<BFInstance>& inputs,
                  const std::vector<Eigen::VectorXd>& targets);
double test_score(const BFParamSet& theta, const EvalSet& set);

// True iff |h_v - x_v| <= eps (x_v + 1) at every vertex, with targets from
// the K-step oracle.
bool bf_bound_check(const BFParamSet& theta, const BFInstance& g, double eps);

// Metrics CSV: step,loss_emp,loss_reg,loss_total,score_<name>... A positive
// smooth_sigma applies Gaussian smoothing on export only.
void write_metrics_csv(std::ostream& os, const std::vector<MetricsRow>& rows,
                       const std::vector<std::string>& score_names, double smooth_sigma = 0.0);

// The experiment-mode training set: the minimal path set for (x, K), the
// same paths scaled by 0.5 and 2, and the edge case graph. Targets are K
// further BF steps from each instance's own labels.
std::vector<TrainGraph> experiment_training_set(double x, int K, double beta);
// The theorem training set T_{S_{x,K}} with loss restricted to v_K.
std::vector<TrainGraph> theorem_training_set(double x, int K, double beta);

// Q2 baseline view: strips labels to beta while keeping targets.
std::vector<TrainGraph> strip_source_marks(const std::vector<TrainGraph>& graphs);

}  // namespace nar

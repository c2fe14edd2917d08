#pragma once

#include "nar/autodiff.hpp"
#include "nar/graph.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace nar {

// Min-aggregation MPNN parameters under global layer indexing: J = 2mK
// layers ordered (AGG,1,1)..(AGG,1,m),(UPD,1,1)..(UPD,K,m). The edge weight
// enters round k at layer j_k through column C^k. dims holds d_0..d_J with
// d_0 = d_J = 1.
struct BFParamSet {
  int m = 1;
  int K = 1;
  std::vector<int> dims;
  std::vector<Eigen::MatrixXd> W;  // W[j-1]: d_j x d_{j-1}, j in [J]
  std::vector<Eigen::MatrixXd> C;  // C[k-1]: d_{j_k} x 1, k in [K]
  std::vector<Eigen::MatrixXd> b;  // b[j-1]: d_j x 1
  // Experiment mode drops the ReLU on the last layer of each update block;
  // theorem mode keeps ReLU everywhere.
  bool relu_skip_upd_last = false;

  int J() const { return 2 * m * K; }
  int edge_layer(int k) const { return (k - 1) * 2 * m + 1; }  // j_k
  int agg_layer(int k) const { return (k - 1) * 2 * m + m; }   // a_k
  bool layer_is_agg(int j) const { return (j - 1) % (2 * m) < m; }
  bool layer_is_upd_last(int j) const { return (j - 1) % (2 * m) == 2 * m - 1; }
  int round_of_layer(int j) const { return (j - 1) / (2 * m) + 1; }

  void validate() const;
  std::size_t coefficient_count() const;
};

// d_0 = 1, aggregation outputs agg_dims[k-1], final layer 1, everything else
// hidden. agg_dims must have K entries.
std::vector<int> make_bf_dims(int m, int K, int hidden, const std::vector<int>& agg_dims);

// All-ones aggregation dims (theorem setting).
std::vector<int> make_theorem_dims(int m, int K, int hidden);
// Paper experiment setting: first round aggregates to agg1 (default 16),
// later rounds to 1.
std::vector<int> make_experiment_dims(int m, int K, int hidden = 64, int agg1 = 16);

// The BF configuration psi: every W^j has a single 1 in the top-left corner,
// every C^k is e_1, all biases are zero.
BFParamSet bf_parameter_config(int m, int K, const std::vector<int>& dims);

// Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per matrix; the edge
// column C^k shares the fan-in of its layer (feature dim + 1).
BFParamSet init_bf_params(int m, int K, const std::vector<int>& dims, std::uint64_t seed,
                          bool relu_skip_upd_last);

// Differentiable forward pass: h^(0) = labels, K rounds of
// UPD(min over N(v) plus self-loop of AGG(h_u, w(v,u))), final dim 1.
// Returns one scalar node per vertex. Param node ids (in W, C, b order) are
// reported through param_nodes when given, so a caller can read gradients.
std::vector<int> bf_mpnn_forward(ad::Tape& tape, const BFParamSet& theta, const BFInstance& g,
                                 std::vector<int>* param_nodes = nullptr);

// Plain-Eigen evaluation of the same function (no tape); exactly the same
// arithmetic as bf_mpnn_forward, usable on large graphs.
Eigen::VectorXd bf_mpnn_eval(const BFParamSet& theta, const BFInstance& g);

// Registers the parameters on a tape in canonical order (all W, all C, all
// b) and returns the node ids.
std::vector<int> register_params(ad::Tape& tape, const BFParamSet& theta);
// Pointers to the parameter matrices in the same canonical order.
std::vector<Eigen::MatrixXd*> param_ptrs(BFParamSet& theta);

// Generic architectures from the MPNN class definitions: per-round FNNs for
// the update phi_t(x, y) and, for max/min, the message map M_t(h, w).
struct Fnn {
  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::MatrixXd> b;
  bool relu_last = true;

  Eigen::VectorXd eval(const Eigen::VectorXd& x) const;
  int in_dim() const { return W.empty() ? 0 : static_cast<int>(W.front().cols()); }
  int out_dim() const { return W.empty() ? 0 : static_cast<int>(W.back().rows()); }
};

enum class Aggregation { NormalizedSum, Mean, Max, Min };

struct ArchParams {
  Aggregation kind = Aggregation::Mean;
  std::vector<Fnn> phi;  // phi[t-1] acts on concat(h, y)
  std::vector<Fnn> msg;  // max/min only: msg[t-1] acts on concat(h, w)
};

// Per-vertex features after all rounds. Works on the plain graph; vertex
// attributes are the initial features.
std::vector<Eigen::VectorXd> mpnn_forward(const ArchParams& arch, const WeightedGraph& g);

// Same computation recorded on a tape (per-vertex node ids of the final
// features).
std::vector<int> mpnn_forward_tape(ad::Tape& tape, const ArchParams& arch,
                                   const WeightedGraph& g);

// Mean-aggregation configuration that reproduces K-truncated weighted
// PageRank exactly: phi_t(x, y) = (1 - xi) + xi * y on scalar features.
ArchParams make_pagerank_arch(double xi, int K);

// Random generic architecture for property tests.
ArchParams random_arch(Aggregation kind, int K, int feat_dim, int hidden, std::uint64_t seed);

enum class SourceMarking { BfInit, None };

// bf-init: label(s) = 0 and beta elsewhere (the individualized input);
// none: all labels beta (the 1-WL-limited baseline input).
BFInstance mark_source(const BFInstance& g, int s, SourceMarking mode);

// Checkpoint format: plain text, one line per tensor:
//   p <name> <shape...> : <values...>
void write_checkpoint(std::ostream& os, const BFParamSet& theta);
BFParamSet read_checkpoint(std::istream& is);

}  // namespace nar

#pragma once

#include "nar/mpnn.hpp"

#include <vector>

namespace nar {

// Scalar summaries of a parameter set: gamma_k is the positive-part product
// multiplying the k-th edge weight along a walk, B the total bias l1 mass,
// w_minus the total negative-part mass, l_k the per-k exponents with
// L = sum l_k = mK(K+3).
struct TransformedParams {
  std::vector<double> gamma;  // gamma_0..gamma_K
  double B = 0.0;
  double w_minus = 0.0;
  std::vector<double> l;  // l_0..l_K
  double L = 0.0;
};

// gamma_k = prod_{j > j_k} (W^j)^+ (C^k)^+ with C^0 = 1, B = |biases|_1,
// w_minus = sum |(W)^-|_1 + sum |(C)^-|_1.
TransformedParams transform_params(const BFParamSet& theta);

struct ModifiedLoss {
  double emp = 0.0;
  double reg = 0.0;
  double total = 0.0;
};

// emp = (1/N) sum_k relu((1 - gamma_k) x - exp(L) B);
// reg = B + sum_k l_k gamma_k^{1/l_k} + w_minus; total = emp + eta * reg.
ModifiedLoss modified_loss(const TransformedParams& tp, double x, int N, double eta);

// All walks of length K ending at v, as weight vectors
// z^p = (a(v_0), w(v_0,v_1), ..., w(v_{K-1},v_K)). Walk steps may stay on
// the implicit weight-0 self-loop. Errors out once the walk count would
// exceed cap.
std::vector<Eigen::VectorXd> enumerate_walks(const BFInstance& g, int v, int K,
                                             std::size_t cap = 1000000);

// FNN of depth J evaluated on z_0 with the bias C^k z_k injected at each
// edge-inserting layer j_k; ReLU after every layer.
double walk_lifted_fnn(const BFParamSet& theta, const Eigen::VectorXd& z);

// Elementwise positive part of all parameters (weights, edge columns,
// biases); the walk-lifted FNN of this set upper-bounds the MPNN feature
// along any walk.
BFParamSet positive_part(const BFParamSet& theta);

enum class OperatorNorm { Spectral, L1, LInf };

// Product over layers of the operator norms of the W matrices; equals 1 at
// the BF configuration psi.
double lipschitz_certificate(const BFParamSet& theta, OperatorNorm norm);

}  // namespace nar

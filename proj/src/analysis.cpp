#include "nar/analysis.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace nar {

namespace {

Eigen::MatrixXd positive(const Eigen::MatrixXd& m) { return m.cwiseMax(0.0); }

}  // namespace

TransformedParams transform_params(const BFParamSet& theta) {
  theta.validate();
  TransformedParams tp;
  const int J = theta.J();
  for (int k = 0; k <= theta.K; ++k) {
    const int jk = k == 0 ? 0 : theta.edge_layer(k);
    // Collapse prod_{j > j_k} (W^j)^+ applied to (C^k)^+ (C^0 := 1).
    Eigen::MatrixXd acc = k == 0 ? Eigen::MatrixXd::Ones(1, 1)
                                 : positive(theta.C[static_cast<std::size_t>(k - 1)]);
    for (int j = jk + 1; j <= J; ++j)
      acc = (positive(theta.W[static_cast<std::size_t>(j - 1)]) * acc).eval();
    if (acc.rows() != 1 || acc.cols() != 1)
      throw std::invalid_argument("transform_params: product did not collapse to a scalar");
    tp.gamma.push_back(acc(0, 0));
    tp.l.push_back(static_cast<double>(J - jk + (k != 0 ? 1 : 0)));
    tp.L += tp.l.back();
  }
  for (const auto& b : theta.b) tp.B += b.cwiseAbs().sum();
  for (const auto& w : theta.W) tp.w_minus += (-w).cwiseMax(0.0).sum();
  for (const auto& c : theta.C) tp.w_minus += (-c).cwiseMax(0.0).sum();
  return tp;
}

ModifiedLoss modified_loss(const TransformedParams& tp, double x, int N, double eta) {
  if (N < 1) throw std::invalid_argument("modified_loss: N must be positive");
  ModifiedLoss out;
  const double expL = std::exp(tp.L);
  for (std::size_t k = 0; k < tp.gamma.size(); ++k) {
    out.emp += std::max(0.0, (1.0 - tp.gamma[k]) * x - expL * tp.B);
    out.reg += tp.l[k] * std::pow(tp.gamma[k], 1.0 / tp.l[k]);
  }
  out.emp /= static_cast<double>(N);
  out.reg += tp.B + tp.w_minus;
  out.total = out.emp + eta * out.reg;
  return out;
}

std::vector<Eigen::VectorXd> enumerate_walks(const BFInstance& g, int v, int K,
                                             std::size_t cap) {
  if (v < 0 || v >= g.n()) throw std::invalid_argument("enumerate_walks: bad vertex");
  if (K < 0) throw std::invalid_argument("enumerate_walks: K must be nonnegative");
  const auto adj = in_adjacency(g.graph);

  std::vector<Eigen::VectorXd> out;
  // Walks are built backwards from v; steps[i] is the edge weight entering
  // position K-i, ending with the start vertex's label.
  std::vector<double> rev;
  std::function<void(int, int)> recurse = [&](int cur, int depth) {
    if (depth == K) {
      Eigen::VectorXd z(K + 1);
      z[0] = g.label(cur);
      for (int i = 0; i < K; ++i) z[i + 1] = rev[static_cast<std::size_t>(K - 1 - i)];
      out.push_back(std::move(z));
      if (out.size() > cap)
        throw std::runtime_error("enumerate_walks: walk count exceeds cap");
      return;
    }
    // Self-loop step of weight 0 first, then stored neighbors.
    rev.push_back(0.0);
    recurse(cur, depth + 1);
    rev.pop_back();
    for (const auto& [u, w] : adj[static_cast<std::size_t>(cur)]) {
      rev.push_back(w);
      recurse(u, depth + 1);
      rev.pop_back();
    }
  };
  recurse(v, 0);
  return out;
}

double walk_lifted_fnn(const BFParamSet& theta, const Eigen::VectorXd& z) {
  theta.validate();
  if (z.size() != theta.K + 1)
    throw std::invalid_argument("walk_lifted_fnn: z must have K+1 entries");
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (z[i] < 0.0) throw std::invalid_argument("walk_lifted_fnn: negative z entry");

  Eigen::VectorXd h = Eigen::VectorXd::Constant(1, z[0]);
  for (int j = 1; j <= theta.J(); ++j) {
    Eigen::VectorXd pre =
        theta.W[static_cast<std::size_t>(j - 1)] * h + theta.b[static_cast<std::size_t>(j - 1)];
    for (int k = 1; k <= theta.K; ++k)
      if (theta.edge_layer(k) == j) pre += theta.C[static_cast<std::size_t>(k - 1)] * z[k];
    h = pre.cwiseMax(0.0);
  }
  return h[0];
}

BFParamSet positive_part(const BFParamSet& theta) {
  BFParamSet out = theta;
  for (auto& w : out.W) w = positive(w);
  for (auto& c : out.C) c = positive(c);
  for (auto& b : out.b) b = positive(b);
  return out;
}

double lipschitz_certificate(const BFParamSet& theta, OperatorNorm norm) {
  double prod = 1.0;
  for (const auto& w : theta.W) {
    double n = 0.0;
    switch (norm) {
      case OperatorNorm::Spectral: {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
        n = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
        break;
      }
      case OperatorNorm::L1:
        n = w.cwiseAbs().colwise().sum().maxCoeff();
        break;
      case OperatorNorm::LInf:
        n = w.cwiseAbs().rowwise().sum().maxCoeff();
        break;
    }
    prod *= n;
  }
  return prod;
}

}  // namespace nar

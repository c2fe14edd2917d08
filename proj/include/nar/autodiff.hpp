#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace nar::ad {

// Reverse-mode engine over dense double tensors. A Tape records nodes in
// insertion order; forward values are computed eagerly. The recorded graph
// can be re-executed with run_forward() after parameter values change, so a
// training loop builds the expression once per sample and replays it each
// step. backward() visits nodes in reverse insertion order exactly once.
//
// Subgradient conventions: relu'(0) = 0, d|x|/dx at 0 = 0, and min/max ties
// route the full gradient to the lowest-index argument.

enum class Op : std::uint8_t {
  Constant,
  Param,      // leaf referencing external storage, trainable
  MatVec,     // a: matrix node, b: column node
  Add,
  Sub,
  AddN,       // sum of srcs, same shape
  Scale,      // scalar * a
  Mul,        // elementwise a .* b
  Relu,
  Abs,
  Sum,        // sum of all entries -> 1x1
  ReduceMin,  // componentwise over srcs, argmin tracked
  ReduceMax,
  L1Norm,     // sum |entries| -> 1x1
  L2NormSq,   // sum entries^2 -> 1x1
  SpectralNorm,  // constant w.r.t. gradients (power iteration estimate)
};

struct Node {
  Op op = Op::Constant;
  int a = -1;
  int b = -1;
  double scalar = 0.0;
  std::vector<int> srcs;
  std::vector<int> argsel;  // per-component winner for ReduceMin/ReduceMax
  const Eigen::MatrixXd* ext = nullptr;  // set for Param nodes
  Eigen::MatrixXd val;
  Eigen::MatrixXd grad;
};

class Tape {
 public:
  int constant(Eigen::MatrixXd v);
  int constant(double v);
  // Leaf tied to external storage; caller keeps *p alive and may update it
  // between run_forward() calls.
  int param(const Eigen::MatrixXd* p);

  int matvec(int w, int x);
  int add(int a, int b);
  int sub(int a, int b);
  int add_n(std::span<const int> xs);
  int scale(int a, double s);
  int mul(int a, int b);
  int relu(int a);
  int abs(int a);
  int sum(int a);
  int reduce_min(std::span<const int> xs);
  int reduce_max(std::span<const int> xs);
  int l1_norm(int a);
  int l2_norm_sq(int a);
  int spectral_norm(int a, int power_iters = 100);

  const Eigen::MatrixXd& value(int i) const { return nodes_[i].ext ? *nodes_[i].ext : nodes_[i].val; }
  const Eigen::MatrixXd& grad(int i) const { return nodes_[i].grad; }
  double scalar_value(int i) const;

  // Recomputes every non-leaf value in insertion order. Param nodes pick up
  // whatever their external storage currently holds.
  void run_forward();
  // Root must be 1x1. Accumulates into grad of every node.
  void backward(int root);

  std::size_t size() const { return nodes_.size(); }

 private:
  int push(Node n);
  void eval(int i);
  std::vector<Node> nodes_;
};

// Standard Adam with bias correction; state starts at zeros.
struct AdamState {
  std::vector<Eigen::MatrixXd> m;
  std::vector<Eigen::MatrixXd> v;
  long t = 0;
};

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

void adam_step(std::vector<Eigen::MatrixXd*>& params,
               const std::vector<const Eigen::MatrixXd*>& grads, AdamState& state,
               const AdamConfig& cfg);

// Central differences per coordinate against the supplied analytic gradient.
// Relative error uses an absolute floor of 1e-8 in the denominator. If
// coord_budget > 0, only that many randomly chosen coordinates (seeded) are
// probed. Coordinates where the two one-sided differences disagree by more
// than 10% are treated as sitting on a kink and skipped.
double finite_diff_check(const std::function<double(const std::vector<Eigen::MatrixXd>&)>& f,
                         std::vector<Eigen::MatrixXd> params,
                         const std::vector<Eigen::MatrixXd>& analytic_grads, double h,
                         int coord_budget = 0, unsigned seed = 0);

}  // namespace nar::ad

#include "nar/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace nar::ad {

namespace {

void check_same_shape(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(what) + ": shape mismatch " +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()));
}

double power_iteration_norm(const Eigen::MatrixXd& w, int iters) {
  if (w.size() == 0) return 0.0;
  // Fixed start vector keeps the estimate deterministic.
  Eigen::VectorXd v = Eigen::VectorXd::Ones(w.cols());
  v.normalize();
  const Eigen::MatrixXd wtw = w.transpose() * w;
  for (int i = 0; i < iters; ++i) {
    Eigen::VectorXd next = wtw * v;
    const double n = next.norm();
    if (n == 0.0) return 0.0;
    v = next / n;
  }
  return std::sqrt(v.dot(wtw * v));
}

}  // namespace

int Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  const int id = static_cast<int>(nodes_.size()) - 1;
  eval(id);
  return id;
}

int Tape::constant(Eigen::MatrixXd v) {
  Node n;
  n.op = Op::Constant;
  n.val = std::move(v);
  return push(std::move(n));
}

int Tape::constant(double v) {
  Eigen::MatrixXd m(1, 1);
  m(0, 0) = v;
  return constant(std::move(m));
}

int Tape::param(const Eigen::MatrixXd* p) {
  Node n;
  n.op = Op::Param;
  n.ext = p;
  return push(std::move(n));
}

int Tape::matvec(int w, int x) {
  if (value(w).cols() != value(x).rows() || value(x).cols() != 1)
    throw std::invalid_argument("matvec: incompatible shapes");
  Node n;
  n.op = Op::MatVec;
  n.a = w;
  n.b = x;
  return push(std::move(n));
}

int Tape::add(int a, int b) {
  check_same_shape(value(a), value(b), "add");
  Node n;
  n.op = Op::Add;
  n.a = a;
  n.b = b;
  return push(std::move(n));
}

int Tape::sub(int a, int b) {
  check_same_shape(value(a), value(b), "sub");
  Node n;
  n.op = Op::Sub;
  n.a = a;
  n.b = b;
  return push(std::move(n));
}

int Tape::add_n(std::span<const int> xs) {
  if (xs.empty()) throw std::invalid_argument("add_n: empty argument list");
  for (int x : xs) check_same_shape(value(xs[0]), value(x), "add_n");
  Node n;
  n.op = Op::AddN;
  n.srcs.assign(xs.begin(), xs.end());
  return push(std::move(n));
}

int Tape::scale(int a, double s) {
  Node n;
  n.op = Op::Scale;
  n.a = a;
  n.scalar = s;
  return push(std::move(n));
}

int Tape::mul(int a, int b) {
  check_same_shape(value(a), value(b), "mul");
  Node n;
  n.op = Op::Mul;
  n.a = a;
  n.b = b;
  return push(std::move(n));
}

int Tape::relu(int a) {
  Node n;
  n.op = Op::Relu;
  n.a = a;
  return push(std::move(n));
}

int Tape::abs(int a) {
  Node n;
  n.op = Op::Abs;
  n.a = a;
  return push(std::move(n));
}

int Tape::sum(int a) {
  Node n;
  n.op = Op::Sum;
  n.a = a;
  return push(std::move(n));
}

int Tape::reduce_min(std::span<const int> xs) {
  if (xs.empty()) throw std::invalid_argument("reduce_min: empty argument list");
  for (int x : xs) check_same_shape(value(xs[0]), value(x), "reduce_min");
  Node n;
  n.op = Op::ReduceMin;
  n.srcs.assign(xs.begin(), xs.end());
  return push(std::move(n));
}

int Tape::reduce_max(std::span<const int> xs) {
  if (xs.empty()) throw std::invalid_argument("reduce_max: empty argument list");
  for (int x : xs) check_same_shape(value(xs[0]), value(x), "reduce_max");
  Node n;
  n.op = Op::ReduceMax;
  n.srcs.assign(xs.begin(), xs.end());
  return push(std::move(n));
}

int Tape::l1_norm(int a) {
  Node n;
  n.op = Op::L1Norm;
  n.a = a;
  return push(std::move(n));
}

int Tape::l2_norm_sq(int a) {
  Node n;
  n.op = Op::L2NormSq;
  n.a = a;
  return push(std::move(n));
}

int Tape::spectral_norm(int a, int power_iters) {
  Node n;
  n.op = Op::SpectralNorm;
  n.a = a;
  n.scalar = static_cast<double>(power_iters);
  return push(std::move(n));
}

double Tape::scalar_value(int i) const {
  const Eigen::MatrixXd& v = value(i);
  if (v.rows() != 1 || v.cols() != 1) throw std::invalid_argument("scalar_value: node is not 1x1");
  return v(0, 0);
}

void Tape::eval(int i) {
  Node& n = nodes_[i];
  switch (n.op) {
    case Op::Constant:
    case Op::Param:
      break;
    case Op::MatVec:
      n.val.noalias() = value(n.a) * value(n.b);
      break;
    case Op::Add:
      n.val = value(n.a) + value(n.b);
      break;
    case Op::Sub:
      n.val = value(n.a) - value(n.b);
      break;
    case Op::AddN: {
      n.val = value(n.srcs[0]);
      for (std::size_t s = 1; s < n.srcs.size(); ++s) n.val += value(n.srcs[s]);
      break;
    }
    case Op::Scale:
      n.val = n.scalar * value(n.a);
      break;
    case Op::Mul:
      n.val = value(n.a).cwiseProduct(value(n.b));
      break;
    case Op::Relu:
      n.val = value(n.a).cwiseMax(0.0);
      break;
    case Op::Abs:
      n.val = value(n.a).cwiseAbs();
      break;
    case Op::Sum: {
      n.val.resize(1, 1);
      n.val(0, 0) = value(n.a).sum();
      break;
    }
    case Op::ReduceMin:
    case Op::ReduceMax: {
      const bool is_min = n.op == Op::ReduceMin;
      const Eigen::MatrixXd& first = value(n.srcs[0]);
      n.val = first;
      n.argsel.assign(static_cast<std::size_t>(first.size()), 0);
      for (std::size_t s = 1; s < n.srcs.size(); ++s) {
        const Eigen::MatrixXd& cand = value(n.srcs[s]);
        for (Eigen::Index e = 0; e < n.val.size(); ++e) {
          const double c = cand(e);
          if (is_min ? (c < n.val(e)) : (c > n.val(e))) {
            n.val(e) = c;
            n.argsel[static_cast<std::size_t>(e)] = static_cast<int>(s);
          }
        }
      }
      break;
    }
    case Op::L1Norm: {
      n.val.resize(1, 1);
      n.val(0, 0) = value(n.a).cwiseAbs().sum();
      break;
    }
    case Op::L2NormSq: {
      n.val.resize(1, 1);
      n.val(0, 0) = value(n.a).squaredNorm();
      break;
    }
    case Op::SpectralNorm: {
      n.val.resize(1, 1);
      n.val(0, 0) = power_iteration_norm(value(n.a), static_cast<int>(n.scalar));
      break;
    }
  }
}

void Tape::run_forward() {
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) eval(i);
}

void Tape::backward(int root) {
  const Eigen::MatrixXd& rv = value(root);
  if (rv.rows() != 1 || rv.cols() != 1) throw std::invalid_argument("backward: root is not scalar");
  for (Node& n : nodes_) {
    const Eigen::MatrixXd& v = n.ext ? *n.ext : n.val;
    n.grad.setZero(v.rows(), v.cols());
  }
  nodes_[root].grad(0, 0) = 1.0;
  for (int i = root; i >= 0; --i) {
    Node& n = nodes_[i];
    switch (n.op) {
      case Op::Constant:
      case Op::Param:
      case Op::SpectralNorm:
        break;
      case Op::MatVec:
        nodes_[n.a].grad.noalias() += n.grad * value(n.b).transpose();
        nodes_[n.b].grad.noalias() += value(n.a).transpose() * n.grad;
        break;
      case Op::Add:
        nodes_[n.a].grad += n.grad;
        nodes_[n.b].grad += n.grad;
        break;
      case Op::Sub:
        nodes_[n.a].grad += n.grad;
        nodes_[n.b].grad -= n.grad;
        break;
      case Op::AddN:
        for (int s : n.srcs) nodes_[s].grad += n.grad;
        break;
      case Op::Scale:
        nodes_[n.a].grad += n.scalar * n.grad;
        break;
      case Op::Mul:
        nodes_[n.a].grad += n.grad.cwiseProduct(value(n.b));
        nodes_[n.b].grad += n.grad.cwiseProduct(value(n.a));
        break;
      case Op::Relu: {
        const Eigen::MatrixXd& x = value(n.a);
        nodes_[n.a].grad += n.grad.cwiseProduct((x.array() > 0.0).cast<double>().matrix());
        break;
      }
      case Op::Abs: {
        const Eigen::MatrixXd& x = value(n.a);
        nodes_[n.a].grad += n.grad.cwiseProduct(
            (x.array() > 0.0).cast<double>().matrix() - (x.array() < 0.0).cast<double>().matrix());
        break;
      }
      case Op::Sum:
        nodes_[n.a].grad.array() += n.grad(0, 0);
        break;
      case Op::ReduceMin:
      case Op::ReduceMax: {
        for (Eigen::Index e = 0; e < n.val.size(); ++e) {
          const int winner = n.srcs[static_cast<std::size_t>(n.argsel[static_cast<std::size_t>(e)])];
          nodes_[winner].grad(e) += n.grad(e);
        }
        break;
      }
      case Op::L1Norm: {
        const Eigen::MatrixXd& x = value(n.a);
        nodes_[n.a].grad += n.grad(0, 0) * ((x.array() > 0.0).cast<double>().matrix() -
                                            (x.array() < 0.0).cast<double>().matrix());
        break;
      }
      case Op::L2NormSq:
        nodes_[n.a].grad += 2.0 * n.grad(0, 0) * value(n.a);
        break;
    }
  }
}

void adam_step(std::vector<Eigen::MatrixXd*>& params,
               const std::vector<const Eigen::MatrixXd*>& grads, AdamState& state,
               const AdamConfig& cfg) {
  if (params.size() != grads.size()) throw std::invalid_argument("adam_step: params/grads size mismatch");
  if (state.m.empty()) {
    state.m.resize(params.size());
    state.v.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      state.m[i].setZero(params[i]->rows(), params[i]->cols());
      state.v[i].setZero(params[i]->rows(), params[i]->cols());
    }
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Eigen::MatrixXd& g = *grads[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    const Eigen::ArrayXXd mhat = state.m[i].array() / bc1;
    const Eigen::ArrayXXd vhat = state.v[i].array() / bc2;
    params[i]->array() -= cfg.lr * mhat / (vhat.sqrt() + cfg.eps);
  }
}

double finite_diff_check(const std::function<double(const std::vector<Eigen::MatrixXd>&)>& f,
                         std::vector<Eigen::MatrixXd> params,
                         const std::vector<Eigen::MatrixXd>& analytic_grads, double h,
                         int coord_budget, unsigned seed) {
  if (h <= 0.0) throw std::invalid_argument("finite_diff_check: h must be positive");
  if (params.size() != analytic_grads.size())
    throw std::invalid_argument("finite_diff_check: grads size mismatch");

  std::vector<std::pair<std::size_t, Eigen::Index>> coords;
  for (std::size_t p = 0; p < params.size(); ++p)
    for (Eigen::Index e = 0; e < params[p].size(); ++e) coords.emplace_back(p, e);

  if (coord_budget > 0 && coord_budget < static_cast<int>(coords.size())) {
    std::mt19937_64 rng(seed);
    std::shuffle(coords.begin(), coords.end(), rng);
    coords.resize(static_cast<std::size_t>(coord_budget));
  }

  const double f0 = f(params);
  double max_rel = 0.0;
  for (auto [p, e] : coords) {
    const double orig = params[p](e);
    params[p](e) = orig + h;
    const double fp = f(params);
    params[p](e) = orig - h;
    const double fm = f(params);
    params[p](e) = orig;
    const double right = (fp - f0) / h;
    const double left = (f0 - fm) / h;
    // A kink between the two probes makes the one-sided slopes disagree;
    // those coordinates carry no meaningful central-difference estimate.
    const double slope_scale = std::max({std::abs(right), std::abs(left), 1e-8});
    if (std::abs(right - left) > 0.1 * slope_scale) continue;
    const double fd = (fp - fm) / (2.0 * h);
    const double rel = std::abs(fd - analytic_grads[p](e)) /
                       std::max(std::abs(analytic_grads[p](e)), 1e-8);
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

}  // namespace nar::ad

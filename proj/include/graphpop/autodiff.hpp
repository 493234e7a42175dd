#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "graphpop/errors.hpp"
#include "graphpop/graph.hpp"

namespace graphpop::ad {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Sparse = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

/// Handle to a node on a Tape.
struct Var {
  int id = -1;
};

/// Minimal reverse-mode tape over dense matrices.
///
/// Every op appends a node holding its value and a closure that pushes the
/// node's gradient to its inputs. Nodes are created in topological order, so
/// backward() simply walks them in reverse. Sparse operators passed to ops
/// are captured by reference and must outlive the tape.
template <typename Scalar>
class Tape {
 public:
  using MatrixT = Matrix<Scalar>;
  using Backward = std::function<void(Tape&, const MatrixT&)>;

  Var variable(MatrixT value) { return push(std::move(value), true, {}); }
  Var constant(MatrixT value) { return push(std::move(value), false, {}); }

  const MatrixT& value(Var v) const { return nodes_[v.id].value; }
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }

  /// Gradient of the last backward() target with respect to v (zeros if v
  /// did not influence it).
  MatrixT grad(Var v) const {
    const auto& node = nodes_[v.id];
    if (node.grad.size() == 0) return MatrixT::Zero(node.value.rows(), node.value.cols());
    return node.grad;
  }

  Var push(MatrixT value, bool requires_grad, Backward backward) {
    nodes_.push_back({std::move(value), MatrixT(), requires_grad, std::move(backward)});
    return Var{static_cast<int>(nodes_.size()) - 1};
  }

  template <typename Expr>
  void accumulate(Var v, const Expr& g) {
    auto& node = nodes_[v.id];
    if (!node.requires_grad) return;
    if (node.grad.size() == 0)
      node.grad = g;
    else
      node.grad += g;
  }

  /// Seeds d(loss)/d(loss) = 1 for a 1x1 loss and propagates.
  void backward(Var loss) {
    if (nodes_[loss.id].value.size() != 1) throw InvalidArgument("backward needs a scalar loss");
    for (auto& node : nodes_) node.grad.resize(0, 0);
    nodes_[loss.id].grad = MatrixT::Ones(1, 1);
    for (int i = loss.id; i >= 0; --i) {
      auto& node = nodes_[i];
      if (!node.requires_grad || !node.backward || node.grad.size() == 0) continue;
      node.backward(*this, node.grad);
    }
  }

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    MatrixT value;
    MatrixT grad;
    bool requires_grad = false;
    Backward backward;
  };
  std::vector<Node> nodes_;
};

template <typename Scalar>
Var matmul(Tape<Scalar>& t, Var a, Var b) {
  const bool rg = t.requires_grad(a) || t.requires_grad(b);
  return t.push(t.value(a) * t.value(b), rg, [a, b](Tape<Scalar>& tp, const Matrix<Scalar>& g) {
    if (tp.requires_grad(a)) tp.accumulate(a, g * tp.value(b).transpose());
    if (tp.requires_grad(b)) tp.accumulate(b, tp.value(a).transpose() * g);
  });
}

/// S * b for a fixed sparse operator S.
template <typename Scalar>
Var spmm(Tape<Scalar>& t, const Sparse<Scalar>& s, Var b) {
  return t.push(s * t.value(b), t.requires_grad(b),
                [&s, b](Tape<Scalar>& tp, const Matrix<Scalar>& g) {
                  tp.accumulate(b, s.transpose() * g);
                });
}

/// c_s * S * a + c_b * b in one node (one APPNP step).
template <typename Scalar>
Var spmm_mix(Tape<Scalar>& t, const Sparse<Scalar>& s, Var a, Scalar c_s, Var b, Scalar c_b) {
  Matrix<Scalar> out = s * t.value(a);
  out *= c_s;
  out.noalias() += c_b * t.value(b);
  const bool rg = t.requires_grad(a) || t.requires_grad(b);
  return t.push(std::move(out), rg,
                [&s, a, c_s, b, c_b](Tape<Scalar>& tp, const Matrix<Scalar>& g) {
                  if (tp.requires_grad(a)) tp.accumulate(a, c_s * (s.transpose() * g));
                  if (tp.requires_grad(b)) tp.accumulate(b, c_b * g);
                });
}

/// h + 1 * bias, bias a 1 x c row.
template <typename Scalar>
Var add_bias(Tape<Scalar>& t, Var h, Var bias) {
  Matrix<Scalar> out = t.value(h);
  out.rowwise() += t.value(bias).row(0);
  const bool rg = t.requires_grad(h) || t.requires_grad(bias);
  return t.push(std::move(out), rg, [h, bias](Tape<Scalar>& tp, const Matrix<Scalar>& g) {
    tp.accumulate(h, g);
    tp.accumulate(bias, g.colwise().sum());
  });
}

template <typename Scalar>
Var add(Tape<Scalar>& t, Var a, Var b) {
  const bool rg = t.requires_grad(a) || t.requires_grad(b);
  return t.push(t.value(a) + t.value(b), rg, [a, b](Tape<Scalar>& tp, const Matrix<Scalar>& g) {
    tp.accumulate(a, g);
    tp.accumulate(b, g);
  });
}

template <typename Scalar>
Var scale(Tape<Scalar>& t, Var a, Scalar s) {
  return t.push(s * t.value(a), t.requires_grad(a),
                [a, s](Tape<Scalar>& tp, const Matrix<Scalar>& g) { tp.accumulate(a, s * g); });
}

template <typename Scalar>
Var relu(Tape<Scalar>& t, Var a) {
  return t.push(t.value(a).cwiseMax(Scalar(0)), t.requires_grad(a),
                [a](Tape<Scalar>& tp, const Matrix<Scalar>& g) {
                  tp.accumulate(a, ((tp.value(a).array() > Scalar(0)).template cast<Scalar>() *
                                    g.array()).matrix());
                });
}

/// Elementwise product with a constant mask (dropout).
template <typename Scalar>
Var mask(Tape<Scalar>& t, Var a, Matrix<Scalar> m) {
  Matrix<Scalar> out = t.value(a).cwiseProduct(m);
  return t.push(std::move(out), t.requires_grad(a),
                [a, m = std::move(m)](Tape<Scalar>& tp, const Matrix<Scalar>& g) {
                  tp.accumulate(a, g.cwiseProduct(m));
                });
}

/// Column of <h_u, h_v> for each pair.
template <typename Scalar>
Var pair_dot(Tape<Scalar>& t, Var h, std::vector<Edge> pairs) {
  const auto& hv = t.value(h);
  Matrix<Scalar> out(static_cast<Eigen::Index>(pairs.size()), 1);
  for (std::size_t i = 0; i < pairs.size(); ++i)
    out(static_cast<Eigen::Index>(i), 0) = hv.row(pairs[i].u).dot(hv.row(pairs[i].v));
  return t.push(std::move(out), t.requires_grad(h),
                [h, pairs = std::move(pairs)](Tape<Scalar>& tp, const Matrix<Scalar>& g) {
                  const auto& hv = tp.value(h);
                  Matrix<Scalar> gh = Matrix<Scalar>::Zero(hv.rows(), hv.cols());
                  for (std::size_t i = 0; i < pairs.size(); ++i) {
                    const Scalar gi = g(static_cast<Eigen::Index>(i), 0);
                    gh.row(pairs[i].u) += gi * hv.row(pairs[i].v);
                    gh.row(pairs[i].v) += gi * hv.row(pairs[i].u);
                  }
                  tp.accumulate(h, gh);
                });
}

/// Row-wise softmax of a constant matrix (no tape).
template <typename Derived>
Matrix<typename Derived::Scalar> softmax_rows(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> out = logits;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const Scalar mx = out.row(i).maxCoeff();
    out.row(i) = (out.row(i).array() - mx).exp();
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

/// Mean softmax cross-entropy over the listed rows.
template <typename Scalar>
Var softmax_cross_entropy(Tape<Scalar>& t, Var logits, std::vector<int> rows,
                          std::vector<int> labels) {
  const auto& z = t.value(logits);
  const Scalar m = static_cast<Scalar>(rows.size());
  Scalar loss = 0;
  Matrix<Scalar> probs(static_cast<Eigen::Index>(rows.size()), z.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = z.row(rows[i]);
    const Scalar mx = r.maxCoeff();
    const Scalar lse = mx + std::log((r.array() - mx).exp().sum());
    loss += lse - r(labels[i]);
    probs.row(static_cast<Eigen::Index>(i)) = (r.array() - lse).exp();
  }
  Matrix<Scalar> out(1, 1);
  out(0, 0) = loss / m;
  return t.push(std::move(out), t.requires_grad(logits),
                [logits, rows = std::move(rows), labels = std::move(labels),
                 probs = std::move(probs), m](Tape<Scalar>& tp, const Matrix<Scalar>& g) {
                  const auto& z = tp.value(logits);
                  Matrix<Scalar> gz = Matrix<Scalar>::Zero(z.rows(), z.cols());
                  for (std::size_t i = 0; i < rows.size(); ++i) {
                    gz.row(rows[i]) += probs.row(static_cast<Eigen::Index>(i));
                    gz(rows[i], labels[i]) -= Scalar(1);
                  }
                  tp.accumulate(logits, (g(0, 0) / m) * gz);
                });
}

/// Mean logistic loss of a score column against 0/1 targets.
template <typename Scalar>
Var bce_with_logits(Tape<Scalar>& t, Var scores, Matrix<Scalar> targets) {
  const auto& s = t.value(scores);
  const Scalar m = static_cast<Scalar>(s.rows());
  Scalar loss = 0;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const Scalar x = s(i, 0);
    loss += std::max(x, Scalar(0)) - x * targets(i, 0) + std::log1p(std::exp(-std::abs(x)));
  }
  Matrix<Scalar> out(1, 1);
  out(0, 0) = loss / m;
  return t.push(std::move(out), t.requires_grad(scores),
                [scores, targets = std::move(targets), m](Tape<Scalar>& tp,
                                                          const Matrix<Scalar>& g) {
                  const auto& s = tp.value(scores);
                  Matrix<Scalar> sig = (Scalar(1) + (-s.array()).exp()).inverse().matrix();
                  tp.accumulate(scores, (g(0, 0) / m) * (sig - targets));
                });
}

/// Mean squared error of a prediction column.
template <typename Scalar>
Var mse(Tape<Scalar>& t, Var pred, Matrix<Scalar> targets) {
  const auto& p = t.value(pred);
  const Scalar m = static_cast<Scalar>(p.rows());
  Matrix<Scalar> out(1, 1);
  out(0, 0) = (p - targets).squaredNorm() / m;
  return t.push(std::move(out), t.requires_grad(pred),
                [pred, targets = std::move(targets), m](Tape<Scalar>& tp,
                                                        const Matrix<Scalar>& g) {
                  tp.accumulate(pred, (Scalar(2) * g(0, 0) / m) * (tp.value(pred) - targets));
                });
}

}  // namespace graphpop::ad

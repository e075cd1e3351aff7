#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "netreason/nn/param.hpp"

namespace netreason::nn {

struct Var {
  int id = -1;
};

/// Reverse-mode differentiation over dense matrices. Build a computation
/// by calling the op methods, then backward() on a 1x1 result; gradients
/// of trainable parameters accumulate into Param::grad. A tape is single
/// use and single threaded.
class Tape {
 public:
  Var constant(Matrix value);
  /// Gradients flow into p.grad only when p.trainable is set.
  Var param(Param& p);

  const Matrix& value(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].value; }
  double scalar(Var v) const { return value(v)(0, 0); }

  Var matmul(Var a, Var b);
  /// a * b^T
  Var matmul_nt(Var a, Var b);
  Var add(Var a, Var b);
  /// Adds a 1 x cols row to every row of x.
  Var add_row(Var x, Var row);
  Var scale(Var x, double factor);
  Var tanh(Var x);
  /// tanh approximation of GELU.
  Var gelu(Var x);
  /// Per-row normalization followed by gain/bias rows.
  Var layer_norm(Var x, Var gain, Var bias, double eps = 1e-5);
  /// Row-wise softmax over columns j <= i; entries above the diagonal are 0.
  Var causal_softmax(Var scores);
  Var slice_cols(Var x, Eigen::Index start, Eigen::Index count);
  Var concat_cols(const std::vector<Var>& parts);
  Var concat_rows(const std::vector<Var>& parts);
  Var gather_rows(Var table, std::vector<int> rows);
  Var mean_rows(Var x);
  /// out.row(dst) += x.row(src) for each (src, dst); reversed swaps roles.
  Var scatter_edges(Var x, const std::vector<std::pair<int, int>>& edges, bool reversed);
  /// Mean over rows with weight > 0 of -log softmax(logits.row(t))[targets[t]],
  /// weighted by weight[t]. Throws nn.AllMasked when no weight is positive.
  Var cross_entropy(Var logits, const std::vector<int>& targets, const std::vector<double>& weight);

  void backward(Var loss);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    Param* param = nullptr;
    std::function<void(Node& self)> backward;
  };

  Var push(Matrix value, bool requires_grad, std::function<void(Node&)> backward = {});
  Node& node(Var v) { return nodes_[static_cast<std::size_t>(v.id)]; }
  bool needs(Var v) const { return nodes_[static_cast<std::size_t>(v.id)].requires_grad; }
  void accumulate(Var v, const Matrix& g);

  std::vector<Node> nodes_;
};

}  // namespace netreason::nn

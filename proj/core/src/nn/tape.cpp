#include "netreason/nn/tape.hpp"

#include <cmath>

#include "netreason/error.hpp"

namespace netreason::nn {

namespace {

void check(bool ok, const char* what) {
  if (!ok) fail("nn.ShapeMismatch", what);
}

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;

}  // namespace

Var Tape::push(Matrix value, bool requires_grad, std::function<void(Node&)> backward) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  if (requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size() - 1)};
}

void Tape::accumulate(Var v, const Matrix& g) {
  auto& n = node(v);
  if (!n.requires_grad) return;
  if (n.grad.size() == 0) n.grad = g;
  else n.grad += g;
}

Var Tape::constant(Matrix value) { return push(std::move(value), false); }

Var Tape::param(Param& p) {
  Var v = push(p.value, p.trainable);
  node(v).param = &p;
  return v;
}

Var Tape::matmul(Var a, Var b) {
  check(value(a).cols() == value(b).rows(), "matmul inner dimensions");
  return push(value(a) * value(b), needs(a) || needs(b), [this, a, b](Node& self) {
    if (needs(a)) accumulate(a, self.grad * value(b).transpose());
    if (needs(b)) accumulate(b, value(a).transpose() * self.grad);
  });
}

Var Tape::matmul_nt(Var a, Var b) {
  check(value(a).cols() == value(b).cols(), "matmul_nt inner dimensions");
  return push(value(a) * value(b).transpose(), needs(a) || needs(b), [this, a, b](Node& self) {
    if (needs(a)) accumulate(a, self.grad * value(b));
    if (needs(b)) accumulate(b, self.grad.transpose() * value(a));
  });
}

Var Tape::add(Var a, Var b) {
  check(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols(), "add shapes");
  return push(value(a) + value(b), needs(a) || needs(b), [this, a, b](Node& self) {
    accumulate(a, self.grad);
    accumulate(b, self.grad);
  });
}

Var Tape::add_row(Var x, Var row) {
  check(value(row).rows() == 1 && value(row).cols() == value(x).cols(), "add_row shapes");
  Matrix out = value(x).rowwise() + value(row).row(0);
  return push(std::move(out), needs(x) || needs(row), [this, x, row](Node& self) {
    accumulate(x, self.grad);
    if (needs(row)) accumulate(row, self.grad.colwise().sum());
  });
}

Var Tape::scale(Var x, double factor) {
  return push(value(x) * factor, needs(x),
              [this, x, factor](Node& self) { accumulate(x, self.grad * factor); });
}

Var Tape::tanh(Var x) {
  Matrix out = value(x).array().tanh().matrix();
  return push(std::move(out), needs(x), [this, x](Node& self) {
    accumulate(x, (self.grad.array() * (1.0 - self.value.array().square())).matrix());
  });
}

Var Tape::gelu(Var x) {
  const Matrix& in = value(x);
  Matrix out(in.rows(), in.cols());
  for (Eigen::Index i = 0; i < in.size(); ++i) {
    double v = in.data()[i];
    out.data()[i] = 0.5 * v * (1.0 + std::tanh(kGeluC * (v + kGeluA * v * v * v)));
  }
  return push(std::move(out), needs(x), [this, x](Node& self) {
    const Matrix& in = value(x);
    Matrix g(in.rows(), in.cols());
    for (Eigen::Index i = 0; i < in.size(); ++i) {
      double v = in.data()[i];
      double t = std::tanh(kGeluC * (v + kGeluA * v * v * v));
      double dt = (1.0 - t * t) * kGeluC * (1.0 + 3.0 * kGeluA * v * v);
      g.data()[i] = self.grad.data()[i] * (0.5 * (1.0 + t) + 0.5 * v * dt);
    }
    accumulate(x, g);
  });
}

Var Tape::layer_norm(Var x, Var gain, Var bias, double eps) {
  const Matrix& in = value(x);
  const auto d = in.cols();
  check(value(gain).cols() == d && value(bias).cols() == d, "layer_norm shapes");
  Matrix xhat(in.rows(), d);
  Eigen::VectorXd inv_std(in.rows());
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    double mu = in.row(r).mean();
    double var = (in.row(r).array() - mu).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (in.row(r).array() - mu) * inv_std(r);
  }
  Matrix out = (xhat.array().rowwise() * value(gain).row(0).array()).matrix();
  out.rowwise() += value(bias).row(0);
  return push(std::move(out), needs(x) || needs(gain) || needs(bias),
              [this, x, gain, bias, xhat, inv_std](Node& self) {
                const auto& dy = self.grad;
                if (needs(gain)) accumulate(gain, (dy.array() * xhat.array()).colwise().sum().matrix());
                if (needs(bias)) accumulate(bias, dy.colwise().sum());
                if (!needs(x)) return;
                Matrix dxhat = (dy.array().rowwise() * value(gain).row(0).array()).matrix();
                Matrix dx(dy.rows(), dy.cols());
                for (Eigen::Index r = 0; r < dy.rows(); ++r) {
                  double m1 = dxhat.row(r).mean();
                  double m2 = (dxhat.row(r).array() * xhat.row(r).array()).mean();
                  dx.row(r) = (dxhat.row(r).array() - m1 - xhat.row(r).array() * m2) * inv_std(r);
                }
                accumulate(x, dx);
              });
}

Var Tape::causal_softmax(Var scores) {
  const Matrix& s = value(scores);
  check(s.rows() == s.cols(), "causal_softmax expects a square matrix");
  Matrix p = Matrix::Zero(s.rows(), s.cols());
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    double mx = s.row(i).head(i + 1).maxCoeff();
    double sum = 0;
    for (Eigen::Index j = 0; j <= i; ++j) {
      p(i, j) = std::exp(s(i, j) - mx);
      sum += p(i, j);
    }
    p.row(i).head(i + 1) /= sum;
  }
  return push(std::move(p), needs(scores), [this, scores](Node& self) {
    const Matrix& p = self.value;
    Matrix ds(p.rows(), p.cols());
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      double dot = p.row(i).dot(self.grad.row(i));
      ds.row(i) = p.row(i).array() * (self.grad.row(i).array() - dot);
    }
    accumulate(scores, ds);
  });
}

Var Tape::slice_cols(Var x, Eigen::Index start, Eigen::Index count) {
  check(start >= 0 && start + count <= value(x).cols(), "slice_cols range");
  Matrix out = value(x).middleCols(start, count);
  return push(std::move(out), needs(x), [this, x, start, count](Node& self) {
    Matrix g = Matrix::Zero(value(x).rows(), value(x).cols());
    g.middleCols(start, count) = self.grad;
    accumulate(x, g);
  });
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
  check(!parts.empty(), "concat_cols of nothing");
  Eigen::Index rows = value(parts[0]).rows(), cols = 0;
  bool req = false;
  for (auto p : parts) {
    check(value(p).rows() == rows, "concat_cols rows");
    cols += value(p).cols();
    req = req || needs(p);
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (auto p : parts) {
    out.middleCols(at, value(p).cols()) = value(p);
    at += value(p).cols();
  }
  return push(std::move(out), req, [this, parts](Node& self) {
    Eigen::Index at = 0;
    for (auto p : parts) {
      auto c = value(p).cols();
      if (needs(p)) accumulate(p, self.grad.middleCols(at, c));
      at += c;
    }
  });
}

Var Tape::concat_rows(const std::vector<Var>& parts) {
  check(!parts.empty(), "concat_rows of nothing");
  Eigen::Index cols = value(parts[0]).cols(), rows = 0;
  bool req = false;
  for (auto p : parts) {
    check(value(p).cols() == cols, "concat_rows cols");
    rows += value(p).rows();
    req = req || needs(p);
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (auto p : parts) {
    out.middleRows(at, value(p).rows()) = value(p);
    at += value(p).rows();
  }
  return push(std::move(out), req, [this, parts](Node& self) {
    Eigen::Index at = 0;
    for (auto p : parts) {
      auto r = value(p).rows();
      if (needs(p)) accumulate(p, self.grad.middleRows(at, r));
      at += r;
    }
  });
}

Var Tape::gather_rows(Var table, std::vector<int> rows) {
  const Matrix& t = value(table);
  Matrix out(static_cast<Eigen::Index>(rows.size()), t.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    check(rows[i] >= 0 && rows[i] < t.rows(), "gather_rows index");
    out.row(static_cast<Eigen::Index>(i)) = t.row(rows[i]);
  }
  return push(std::move(out), needs(table), [this, table, rows = std::move(rows)](Node& self) {
    Matrix g = Matrix::Zero(value(table).rows(), value(table).cols());
    for (std::size_t i = 0; i < rows.size(); ++i) g.row(rows[i]) += self.grad.row(static_cast<Eigen::Index>(i));
    accumulate(table, g);
  });
}

Var Tape::mean_rows(Var x) {
  const auto n = value(x).rows();
  check(n > 0, "mean_rows of empty matrix");
  Matrix out = value(x).colwise().mean();
  return push(std::move(out), needs(x), [this, x, n](Node& self) {
    Matrix g = self.grad.replicate(n, 1) / static_cast<double>(n);
    accumulate(x, g);
  });
}

Var Tape::scatter_edges(Var x, const std::vector<std::pair<int, int>>& edges, bool reversed) {
  const Matrix& in = value(x);
  Matrix out = Matrix::Zero(in.rows(), in.cols());
  for (auto [s, d] : edges) {
    if (reversed) std::swap(s, d);
    out.row(d) += in.row(s);
  }
  return push(std::move(out), needs(x), [this, x, edges, reversed](Node& self) {
    Matrix g = Matrix::Zero(self.grad.rows(), self.grad.cols());
    for (auto [s, d] : edges) {
      if (reversed) std::swap(s, d);
      g.row(s) += self.grad.row(d);
    }
    accumulate(x, g);
  });
}

Var Tape::cross_entropy(Var logits, const std::vector<int>& targets, const std::vector<double>& weight) {
  const Matrix& z = value(logits);
  check(static_cast<Eigen::Index>(targets.size()) == z.rows() &&
            static_cast<Eigen::Index>(weight.size()) == z.rows(),
        "cross_entropy targets/weights length");
  double total_weight = 0;
  for (double w : weight) total_weight += w > 0 ? w : 0;
  if (total_weight <= 0) fail("nn.AllMasked", "no position contributes to the loss");
  Matrix probs(z.rows(), z.cols());
  double loss = 0;
  for (Eigen::Index t = 0; t < z.rows(); ++t) {
    double mx = z.row(t).maxCoeff();
    Eigen::RowVectorXd e = (z.row(t).array() - mx).exp();
    double sum = e.sum();
    probs.row(t) = e / sum;
    auto w = weight[static_cast<std::size_t>(t)];
    if (w <= 0) continue;
    auto target = targets[static_cast<std::size_t>(t)];
    check(target >= 0 && target < z.cols(), "cross_entropy target out of range");
    loss += w * (std::log(sum) + mx - z(t, target));
  }
  Matrix out(1, 1);
  out(0, 0) = loss / total_weight;
  return push(std::move(out), needs(logits),
              [this, logits, targets, weight, total_weight, probs](Node& self) {
                Matrix g = Matrix::Zero(probs.rows(), probs.cols());
                const double upstream = self.grad(0, 0);
                for (Eigen::Index t = 0; t < probs.rows(); ++t) {
                  double w = weight[static_cast<std::size_t>(t)];
                  if (w <= 0) continue;
                  g.row(t) = probs.row(t) * (w / total_weight * upstream);
                  g(t, targets[static_cast<std::size_t>(t)]) -= w / total_weight * upstream;
                }
                accumulate(logits, g);
              });
}

void Tape::backward(Var loss) {
  check(value(loss).size() == 1, "backward expects a scalar");
  auto& root = node(loss);
  if (!root.requires_grad) return;
  root.grad = Matrix::Ones(1, 1);
  for (int id = loss.id; id >= 0; --id) {
    auto& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (n.param != nullptr) {
      if (n.param->grad.size() == 0) n.param->grad = Matrix::Zero(n.value.rows(), n.value.cols());
      n.param->grad += n.grad;
    } else if (n.backward) {
      n.backward(n);
    }
  }
}

}  // namespace netreason::nn

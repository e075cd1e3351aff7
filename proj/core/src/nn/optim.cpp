#include "netreason/nn/optim.hpp"

#include <algorithm>
#include <cmath>

namespace netreason::nn {

void Adam::step(const std::vector<Param*>& params) {
  ++t_;
  double scale = 1.0;
  if (cfg_.clip_norm > 0) {
    double sq = 0;
    for (const auto* p : params)
      if (p->trainable && p->grad.size() == p->value.size()) sq += p->grad.squaredNorm();
    double norm = std::sqrt(sq);
    if (norm > cfg_.clip_norm) scale = cfg_.clip_norm / norm;
  }
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (auto* p : params) {
    if (!p->trainable || p->grad.size() != p->value.size()) continue;
    if (p->m.size() != p->value.size()) {
      p->m = Matrix::Zero(p->value.rows(), p->value.cols());
      p->v = Matrix::Zero(p->value.rows(), p->value.cols());
    }
    Matrix g = p->grad * scale;
    p->m = cfg_.beta1 * p->m + (1.0 - cfg_.beta1) * g;
    p->v = cfg_.beta2 * p->v + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
    if (cfg_.lr == 0.0) continue;
    p->value.array() -= cfg_.lr * (p->m.array() / bc1) / ((p->v.array() / bc2).sqrt() + cfg_.eps);
  }
}

double gradient_check(const std::vector<Param*>& params, const std::function<double()>& loss,
                      const std::function<void()>& gradients, double step, int max_entries,
                      std::mt19937_64& rng) {
  for (auto* p : params) p->grad.setZero(p->value.rows(), p->value.cols());
  gradients();
  std::vector<Matrix> analytic;
  for (auto* p : params) analytic.push_back(p->grad);
  double worst = 0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto* p = params[k];
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(p->value.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<Eigen::Index>(i);
    if (static_cast<int>(idx.size()) > max_entries) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(static_cast<std::size_t>(max_entries));
    }
    for (auto i : idx) {
      double& x = p->value.data()[i];
      const double saved = x;
      x = saved + step;
      double up = loss();
      x = saved - step;
      double down = loss();
      x = saved;
      double numeric = (up - down) / (2 * step);
      double a = analytic[k].data()[i];
      double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace netreason::nn

#pragma once

#include <functional>
#include <random>
#include <vector>

#include "netreason/nn/param.hpp"

namespace netreason::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 1.0;  // global gradient norm; <= 0 disables
};

class Adam {
 public:
  explicit Adam(AdamConfig cfg) : cfg_(cfg) {}

  /// Updates trainable params from their grads; frozen params are skipped.
  void step(const std::vector<Param*>& params);
  long steps() const { return t_; }

 private:
  AdamConfig cfg_;
  long t_ = 0;
};

/// Compares analytic gradients with central finite differences. `loss`
/// evaluates the scalar objective; `gradients` must leave d(loss)/d(param)
/// in each Param::grad. Checks up to `max_entries` randomly chosen entries
/// per parameter (all entries when the parameter is smaller). Returns the
/// largest |analytic - numeric| / max(|analytic|, |numeric|, 1e-6).
double gradient_check(const std::vector<Param*>& params, const std::function<double()>& loss,
                      const std::function<void()>& gradients, double step, int max_entries,
                      std::mt19937_64& rng);

}  // namespace netreason::nn

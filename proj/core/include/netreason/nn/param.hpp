#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace netreason::nn {

using Matrix = Eigen::MatrixXd;

struct Param {
  std::string name;
  Matrix value;
  Matrix grad;
  bool trainable = true;
  // Adam moment estimates
  Matrix m;
  Matrix v;
};

/// Ordered, named parameter collection with stable addresses.
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(const ParamStore& other);
  ParamStore& operator=(const ParamStore& other);
  ParamStore(ParamStore&&) noexcept = default;
  ParamStore& operator=(ParamStore&&) noexcept = default;

  Param& add(std::string name, Eigen::Index rows, Eigen::Index cols);
  Param* find(std::string_view name);
  const Param* find(std::string_view name) const;
  Param& at(std::string_view name);
  const Param& at(std::string_view name) const;

  std::vector<Param*> all();
  std::vector<const Param*> all() const;
  std::size_t size() const { return params_.size(); }
  std::size_t num_values() const;

  void zero_grad();
  void set_trainable(bool trainable);
  /// Uniform in [-bound, bound], in insertion order.
  void init_uniform(std::mt19937_64& rng, double bound);

  /// FNV-1a over names, shapes and values; equal hashes mean bitwise-equal
  /// parameters for all practical purposes.
  std::uint64_t hash() const;
  bool all_finite() const;

 private:
  std::vector<std::unique_ptr<Param>> params_;
};

}  // namespace netreason::nn

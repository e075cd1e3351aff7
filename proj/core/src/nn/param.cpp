#include "netreason/nn/param.hpp"

#include "netreason/error.hpp"
#include "netreason/util/io.hpp"

namespace netreason::nn {

ParamStore::ParamStore(const ParamStore& other) {
  for (const auto& p : other.params_) params_.push_back(std::make_unique<Param>(*p));
}

ParamStore& ParamStore::operator=(const ParamStore& other) {
  if (this != &other) {
    params_.clear();
    for (const auto& p : other.params_) params_.push_back(std::make_unique<Param>(*p));
  }
  return *this;
}

Param& ParamStore::add(std::string name, Eigen::Index rows, Eigen::Index cols) {
  if (find(name) != nullptr) fail("nn.DuplicateParam", name);
  auto p = std::make_unique<Param>();
  p->name = std::move(name);
  p->value = Matrix::Zero(rows, cols);
  p->grad = Matrix::Zero(rows, cols);
  params_.push_back(std::move(p));
  return *params_.back();
}

Param* ParamStore::find(std::string_view name) {
  for (auto& p : params_)
    if (p->name == name) return p.get();
  return nullptr;
}

const Param* ParamStore::find(std::string_view name) const {
  for (const auto& p : params_)
    if (p->name == name) return p.get();
  return nullptr;
}

Param& ParamStore::at(std::string_view name) {
  auto* p = find(name);
  if (p == nullptr) fail("nn.MissingParam", std::string(name));
  return *p;
}

const Param& ParamStore::at(std::string_view name) const {
  const auto* p = find(name);
  if (p == nullptr) fail("nn.MissingParam", std::string(name));
  return *p;
}

std::vector<Param*> ParamStore::all() {
  std::vector<Param*> out;
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

std::vector<const Param*> ParamStore::all() const {
  std::vector<const Param*> out;
  for (const auto& p : params_) out.push_back(p.get());
  return out;
}

std::size_t ParamStore::num_values() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p->value.size());
  return n;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p->grad.setZero(p->value.rows(), p->value.cols());
}

void ParamStore::set_trainable(bool trainable) {
  for (auto& p : params_) p->trainable = trainable;
}

void ParamStore::init_uniform(std::mt19937_64& rng, double bound) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& p : params_)
    for (Eigen::Index i = 0; i < p->value.size(); ++i) p->value.data()[i] = dist(rng);
}

std::uint64_t ParamStore::hash() const {
  std::uint64_t h = util::fnv1a(std::string_view{});
  for (const auto& p : params_) {
    h = util::fnv1a(p->name, h);
    auto shape = std::to_string(p->value.rows()) + "x" + std::to_string(p->value.cols());
    h = util::fnv1a(shape, h);
    h = util::fnv1a(std::span<const double>(p->value.data(), static_cast<std::size_t>(p->value.size())), h);
  }
  return h;
}

bool ParamStore::all_finite() const {
  for (const auto& p : params_)
    if (!p->value.allFinite()) return false;
  return true;
}

}  // namespace netreason::nn

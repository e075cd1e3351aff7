#include <cmath>
#include <random>

#include "doctest.h"
#include "netreason/error.hpp"
#include "netreason/nn/optim.hpp"
#include "netreason/nn/tape.hpp"
#include "netreason/nn/tensor_io.hpp"

using namespace netreason::nn;

namespace {

struct Fixture {
  ParamStore store;
  std::mt19937_64 rng{5};

  Fixture() {
    store.add("x", 4, 6);
    store.add("w", 6, 6);
    store.add("row", 1, 6);
    store.add("gain", 1, 6);
    store.add("bias", 1, 6);
    store.init_uniform(rng, 1.0);
  }

  Var build(Tape& t) {
    auto x = t.param(store.at("x"));
    auto w = t.param(store.at("w"));
    auto h = t.add_row(t.matmul(x, w), t.param(store.at("row")));
    h = t.layer_norm(t.gelu(h), t.param(store.at("gain")), t.param(store.at("bias")));
    auto att = t.causal_softmax(t.scale(t.matmul_nt(h, h), 0.5));
    auto mixed = t.matmul(att, t.tanh(h));
    auto heads = t.concat_cols({t.slice_cols(mixed, 0, 3), t.slice_cols(mixed, 3, 3)});
    auto stacked = t.concat_rows({heads, t.gather_rows(heads, {3, 0})});
    auto agg = t.add(stacked, t.scatter_edges(stacked, {{0, 1}, {1, 2}, {4, 5}}, false));
    agg = t.add(agg, t.scatter_edges(agg, {{0, 1}, {2, 3}}, true));
    auto pooled = t.mean_rows(agg);
    auto logits = t.concat_rows({agg, pooled});
    return t.cross_entropy(logits, {0, 1, 2, 3, 4, 5, 0}, {1, 0.5, 0, 1, 2, 1, 1});
  }
};

}  // namespace

TEST_CASE("tape gradients match central differences through every op") {
  Fixture f;
  auto loss = [&] {
    Tape t;
    return t.scalar(f.build(t));
  };
  auto grads = [&] {
    Tape t;
    auto l = f.build(t);
    t.backward(l);
  };
  double err = gradient_check(f.store.all(), loss, grads, 1e-5, 100, f.rng);
  CHECK(err < 1e-6);
}

TEST_CASE("frozen parameters receive no gradient") {
  Fixture f;
  f.store.at("w").trainable = false;
  f.store.zero_grad();
  Tape t;
  t.backward(f.build(t));
  CHECK(f.store.at("w").grad.norm() == 0.0);
  CHECK(f.store.at("x").grad.norm() > 0.0);
}

TEST_CASE("cross entropy of uniform logits is log of the class count") {
  Tape t;
  auto z = t.constant(Matrix::Zero(3, 260));
  CHECK(t.scalar(t.cross_entropy(z, {1, 2, 3}, {1, 1, 1})) == doctest::Approx(std::log(260.0)).epsilon(1e-12));
  CHECK_THROWS_WITH_AS(t.cross_entropy(z, {1, 2, 3}, {0, 0, 0}), doctest::Contains("AllMasked"),
                       netreason::Error);
}

TEST_CASE("causal softmax rows are normalized over the visible prefix") {
  Tape t;
  Matrix s = Matrix::Random(5, 5);
  auto p = t.value(t.causal_softmax(t.constant(s)));
  for (int i = 0; i < 5; ++i) {
    CHECK(p.row(i).sum() == doctest::Approx(1.0));
    for (int j = i + 1; j < 5; ++j) CHECK(p(i, j) == 0.0);
  }
}

TEST_CASE("shape mismatches are reported") {
  Tape t;
  auto a = t.constant(Matrix::Zero(2, 3));
  auto b = t.constant(Matrix::Zero(2, 3));
  CHECK_THROWS_WITH_AS(t.matmul(a, b), doctest::Contains("ShapeMismatch"), netreason::Error);
}

TEST_CASE("tensor dump round-trips exactly and checks shapes") {
  Fixture f;
  auto text = save_tensors(f.store);
  ParamStore other = f.store;
  other.init_uniform(f.rng, 3.0);
  CHECK(other.hash() != f.store.hash());
  load_tensors(other, text);
  CHECK(other.hash() == f.store.hash());

  ParamStore wrong;
  wrong.add("x", 4, 5);
  CHECK_THROWS_AS(load_tensors(wrong, text), netreason::Error);
  CHECK_THROWS_AS(load_tensors(other, "garbage"), netreason::Error);
}

TEST_CASE("adam with zero learning rate leaves parameters unchanged") {
  Fixture f;
  auto before = f.store.hash();
  Adam opt({0.0});
  for (int i = 0; i < 3; ++i) {
    f.store.zero_grad();
    Tape t;
    t.backward(f.build(t));
    opt.step(f.store.all());
  }
  CHECK(f.store.hash() == before);
}

TEST_CASE("adam reduces a simple quadratic") {
  ParamStore s;
  auto& p = s.add("p", 1, 3);
  p.value << 1, -2, 3;
  Adam opt({0.1});
  for (int i = 0; i < 300; ++i) {
    s.zero_grad();
    p.grad = 2 * p.value;
    opt.step(s.all());
  }
  CHECK(p.value.norm() < 0.05);
}

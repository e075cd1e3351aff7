#include "netreason/encoder/encoder.hpp"

#include <random>

#include "netreason/encoder/features.hpp"
#include "netreason/error.hpp"
#include "netreason/nn/optim.hpp"

namespace netreason::encoder {

namespace {

std::string layer_name(const char* what, int layer) { return std::string(what) + std::to_string(layer); }

}  // namespace

GraphInput GraphInput::from(const netlist::TagGraph& graph) {
  GraphInput g;
  g.features = featurize_graph(graph);
  for (const auto& e : graph.edges) g.edges.emplace_back(e.src, e.dst);
  g.gate_nodes = graph.gate_nodes();
  return g;
}

Encoder::Encoder(EncoderConfig cfg) : cfg_(cfg) {
  if (cfg_.layers < 1 || cfg_.dim < 1) fail("encoder.BadConfig", "layers and dim must be positive");
  for (int l = 0; l < cfg_.layers; ++l) {
    const int in = l == 0 ? input_dim() : cfg_.dim;
    params_.add(layer_name("enc.w_self.", l), in, cfg_.dim);
    params_.add(layer_name("enc.w_in.", l), in, cfg_.dim);
    params_.add(layer_name("enc.w_out.", l), in, cfg_.dim);
    params_.add(layer_name("enc.bias.", l), 1, cfg_.dim);
  }
  std::mt19937_64 rng(cfg_.seed);
  params_.init_uniform(rng, cfg_.init_bound);
  set_trainable(true);
}

int Encoder::input_dim() const { return FeatureLayout::size(); }

void Encoder::set_trainable(bool trainable) {
  params_.set_trainable(trainable);
  if (cfg_.message_passing) return;
  for (int l = 0; l < cfg_.layers; ++l) {
    for (const char* w : {"enc.w_in.", "enc.w_out."}) {
      auto& p = params_.at(layer_name(w, l));
      p.value.setZero();
      p.trainable = false;
    }
  }
}

nn::Var Encoder::forward(nn::Tape& tape, const GraphInput& g) { return forward_impl(tape, g, true); }

nn::Var Encoder::forward_impl(nn::Tape& tape, const GraphInput& g, bool track) const {
  if (g.features.cols() != input_dim())
    fail("encoder.ShapeMismatch", "feature width " + std::to_string(g.features.cols()) +
                                      " != " + std::to_string(input_dim()));
  auto param = [&](const std::string& name) {
    const auto& p = params_.at(name);
    return track ? tape.param(const_cast<nn::Param&>(p)) : tape.constant(p.value);
  };
  auto h = tape.constant(g.features);
  for (int l = 0; l < cfg_.layers; ++l) {
    auto pre = tape.matmul(h, param(layer_name("enc.w_self.", l)));
    if (cfg_.message_passing && !g.edges.empty()) {
      auto in_msg = tape.scatter_edges(h, g.edges, false);
      auto out_msg = tape.scatter_edges(h, g.edges, true);
      pre = tape.add(pre, tape.matmul(in_msg, param(layer_name("enc.w_in.", l))));
      pre = tape.add(pre, tape.matmul(out_msg, param(layer_name("enc.w_out.", l))));
    }
    h = tape.tanh(tape.add_row(pre, param(layer_name("enc.bias.", l))));
  }
  return h;
}

EmbeddingSet Encoder::encode(const GraphInput& g) const {
  nn::Tape tape;
  auto h = forward_impl(tape, g, false);
  EmbeddingSet out;
  out.node_embeddings = tape.value(h);
  out.graph_embedding = out.node_embeddings.colwise().mean();
  out.gate_nodes = g.gate_nodes;
  return out;
}

double encoder_grad_check(const GraphInput& g, Encoder& enc, const Eigen::RowVectorXd& probe) {
  auto build = [&](nn::Tape& t) {
    auto pooled = t.mean_rows(enc.forward(t, g));
    return t.matmul_nt(pooled, t.constant(probe));
  };
  auto loss = [&] {
    nn::Tape t;
    return t.scalar(build(t));
  };
  auto grads = [&] {
    nn::Tape t;
    t.backward(build(t));
  };
  std::vector<nn::Param*> params;
  for (auto* p : enc.params().all())
    if (p->trainable) params.push_back(p);
  std::mt19937_64 rng(0);
  return nn::gradient_check(params, loss, grads, 1e-4, 1 << 30, rng);
}

}  // namespace netreason::encoder

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "netreason/netlist/tag_graph.hpp"
#include "netreason/nn/param.hpp"
#include "netreason/nn/tape.hpp"

namespace netreason::encoder {

struct EncoderConfig {
  int layers = 3;
  int dim = 64;  // 768 mirrors the full-size setting
  /// false gives the features-only ablation: neighbour weights are zero and
  /// frozen, so each node sees only its own features.
  bool message_passing = true;
  std::uint64_t seed = 1;
  double init_bound = 0.1;
};

/// Graph prepared for the encoder: node features plus driver->sink edges.
struct GraphInput {
  Eigen::MatrixXd features;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> gate_nodes;

  static GraphInput from(const netlist::TagGraph& graph);
};

struct EmbeddingSet {
  Eigen::MatrixXd node_embeddings;  // row = node id
  Eigen::RowVectorXd graph_embedding;
  std::vector<int> gate_nodes;
};

/// Message passing: L rounds of
///   H' = tanh(H Ws + (sum of in-neighbour rows) Wi + (sum of out-neighbour rows) Wo + b)
/// followed by mean pooling into the graph embedding.
class Encoder {
 public:
  explicit Encoder(EncoderConfig cfg);

  const EncoderConfig& config() const { return cfg_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }
  int input_dim() const;

  /// Node embeddings (N x dim) on the given tape.
  nn::Var forward(nn::Tape& tape, const GraphInput& g);

  EmbeddingSet encode(const GraphInput& g) const;
  EmbeddingSet encode(const netlist::TagGraph& g) const { return encode(GraphInput::from(g)); }

  /// Marks parameters trainable, honouring the frozen neighbour weights of
  /// the features-only mode.
  void set_trainable(bool trainable);

 private:
  nn::Var forward_impl(nn::Tape& tape, const GraphInput& g, bool track) const;

  EncoderConfig cfg_;
  nn::ParamStore params_;
};

/// Central differences (step 1e-4) against tape gradients of
/// probe . graph_embedding over every encoder parameter entry.
double encoder_grad_check(const GraphInput& g, Encoder& enc, const Eigen::RowVectorXd& probe);

}  // namespace netreason::encoder

#pragma once

#include <cstdint>
#include <vector>

#include "netreason/nn/param.hpp"
#include "netreason/nn/tape.hpp"

namespace netreason::align {

struct DecoderConfig {
  int d_model = 128;
  int layers = 2;
  int heads = 4;
  int context = 512;
  /// Reuse the token table as the output projection.
  bool tied_output = false;
  std::uint64_t seed = 2;
};

/// Small causal transformer over the byte vocabulary: learned token and
/// position tables, pre-norm blocks of multi-head self-attention and a
/// GELU feed-forward layer (4x width), final norm, output projection.
class ToyDecoder {
 public:
  explicit ToyDecoder(DecoderConfig cfg);

  const DecoderConfig& config() const { return cfg_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }

  /// Token and position embeddings (T x d_model). When graph_slot >= 0 the
  /// token row at that position is replaced by `slot_value` (1 x d_model).
  /// Throws align.ContextOverflow when the sequence exceeds the context.
  nn::Var embed(nn::Tape& tape, const std::vector<int>& tokens, int graph_slot, nn::Var slot_value,
                bool track) const;

  /// Logits (T x vocab) for an embedded sequence.
  nn::Var forward(nn::Tape& tape, nn::Var x, bool track) const;

  /// Inference helper over embed + forward.
  nn::Matrix logits(const std::vector<int>& tokens, int graph_slot, const Eigen::RowVectorXd& slot_value) const;

 private:
  nn::Var use(nn::Tape& tape, const std::string& name, bool track) const;

  DecoderConfig cfg_;
  nn::ParamStore params_;
};

}  // namespace netreason::align

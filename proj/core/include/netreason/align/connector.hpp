#pragma once

#include <cstdint>

#include "netreason/nn/param.hpp"
#include "netreason/nn/tape.hpp"

namespace netreason::align {

struct ConnectorConfig {
  int in_dim = 64;
  int hidden = 128;
  int out_dim = 128;
  /// Number of linear maps; tanh sits between consecutive maps, never on
  /// the output. 2 gives in -> hidden -> out.
  int layers = 2;
  std::uint64_t seed = 3;
};

/// Projects a graph embedding into the decoder's token-embedding space.
/// Also owns the learned null token that fills the graph slot when
/// alignment is disabled.
class Connector {
 public:
  explicit Connector(ConnectorConfig cfg);

  const ConnectorConfig& config() const { return cfg_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }

  /// `graph_embedding` is 1 x in_dim; returns 1 x out_dim.
  nn::Var forward(nn::Tape& tape, nn::Var graph_embedding, bool track) const;
  nn::Var null_token(nn::Tape& tape, bool track) const;

  /// Throws align.ShapeMismatch when the width differs from in_dim.
  Eigen::RowVectorXd project(const Eigen::RowVectorXd& graph_embedding) const;

  static std::string weight_name(int layer);
  static std::string bias_name(int layer);

 private:
  ConnectorConfig cfg_;
  nn::ParamStore params_;
};

}  // namespace netreason::align

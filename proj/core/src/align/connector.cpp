#include "netreason/align/connector.hpp"

#include <cmath>
#include <random>

#include "netreason/error.hpp"

namespace netreason::align {

namespace {

nn::Var use(nn::Tape& tape, const nn::Param& p, bool track) {
  return track ? tape.param(const_cast<nn::Param&>(p)) : tape.constant(p.value);
}

}  // namespace

std::string Connector::weight_name(int layer) { return "conn.w." + std::to_string(layer); }
std::string Connector::bias_name(int layer) { return "conn.b." + std::to_string(layer); }

Connector::Connector(ConnectorConfig cfg) : cfg_(cfg) {
  if (cfg_.layers < 1 || cfg_.in_dim < 1 || cfg_.out_dim < 1 || (cfg_.layers > 1 && cfg_.hidden < 1))
    fail("align.BadConfig", "connector dimensions must be positive");
  std::mt19937_64 rng(cfg_.seed);
  for (int l = 0; l < cfg_.layers; ++l) {
    const int in = l == 0 ? cfg_.in_dim : cfg_.hidden;
    const int out = l + 1 == cfg_.layers ? cfg_.out_dim : cfg_.hidden;
    auto& w = params_.add(weight_name(l), in, out);
    std::uniform_real_distribution<double> u(-1.0 / std::sqrt(in), 1.0 / std::sqrt(in));
    for (Eigen::Index i = 0; i < w.value.size(); ++i) w.value.data()[i] = u(rng);
    params_.add(bias_name(l), 1, out);
  }
  auto& null = params_.add("conn.null", 1, cfg_.out_dim);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (Eigen::Index i = 0; i < null.value.size(); ++i) null.value.data()[i] = u(rng);
}

nn::Var Connector::forward(nn::Tape& tape, nn::Var graph_embedding, bool track) const {
  if (tape.value(graph_embedding).cols() != cfg_.in_dim)
    fail("align.ShapeMismatch", "graph embedding width " +
                                    std::to_string(tape.value(graph_embedding).cols()) + " != " +
                                    std::to_string(cfg_.in_dim));
  auto h = graph_embedding;
  for (int l = 0; l < cfg_.layers; ++l) {
    h = tape.add_row(tape.matmul(h, use(tape, params_.at(weight_name(l)), track)),
                     use(tape, params_.at(bias_name(l)), track));
    if (l + 1 < cfg_.layers) h = tape.tanh(h);
  }
  return h;
}

nn::Var Connector::null_token(nn::Tape& tape, bool track) const {
  return use(tape, params_.at("conn.null"), track);
}

Eigen::RowVectorXd Connector::project(const Eigen::RowVectorXd& graph_embedding) const {
  nn::Tape tape;
  return tape.value(forward(tape, tape.constant(graph_embedding), false));
}

}  // namespace netreason::align

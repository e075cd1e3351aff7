#include "netreason/pred/head.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "netreason/error.hpp"
#include "netreason/nn/optim.hpp"

namespace netreason::pred {

namespace {

std::string wname(int l) { return "head.w." + std::to_string(l); }
std::string bname(int l) { return "head.b." + std::to_string(l); }

nn::Var use(nn::Tape& tape, const nn::Param& p, bool track) {
  return track ? tape.param(const_cast<nn::Param&>(p)) : tape.constant(p.value);
}

}  // namespace

ClassifierHead::ClassifierHead(HeadConfig cfg) : cfg_(cfg) {
  if (cfg_.layers < 1 || cfg_.in_dim < 1 || (cfg_.layers > 1 && cfg_.hidden < 1))
    fail("pred.BadConfig", "head dimensions must be positive");
  std::mt19937_64 rng(cfg_.seed);
  for (int l = 0; l < cfg_.layers; ++l) {
    const int in = l == 0 ? cfg_.in_dim : cfg_.hidden;
    const int out = l + 1 == cfg_.layers ? kNumLabels : cfg_.hidden;
    auto& w = params_.add(wname(l), in, out);
    std::uniform_real_distribution<double> u(-1.0 / std::sqrt(in), 1.0 / std::sqrt(in));
    for (Eigen::Index i = 0; i < w.value.size(); ++i) w.value.data()[i] = u(rng);
    params_.add(bname(l), 1, out);
  }
}

nn::Var ClassifierHead::forward(nn::Tape& tape, nn::Var x, bool track) const {
  if (tape.value(x).cols() != cfg_.in_dim)
    fail("pred.ShapeMismatch", "head input width " + std::to_string(tape.value(x).cols()) + " != " +
                                   std::to_string(cfg_.in_dim));
  auto h = x;
  for (int l = 0; l < cfg_.layers; ++l) {
    h = tape.add_row(tape.matmul(h, use(tape, params_.at(wname(l)), track)), use(tape, params_.at(bname(l)), track));
    if (l + 1 < cfg_.layers) h = tape.tanh(h);
  }
  return h;
}

nn::Matrix ClassifierHead::logits(const nn::Matrix& x) const {
  nn::Tape tape;
  return tape.value(forward(tape, tape.constant(x), false));
}

nn::Var ce_loss(nn::Tape& tape, nn::Var logits, const std::vector<int>& labels) {
  std::vector<int> targets(labels.size());
  std::vector<double> weights(labels.size());
  bool any = false;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= kNumLabels) fail("pred.BadLabel", "label code " + std::to_string(labels[i]));
    targets[i] = std::max(labels[i], 0);
    weights[i] = labels[i] >= 0 ? 1.0 : 0.0;
    any = any || labels[i] >= 0;
  }
  if (!any) fail("pred.NoLabels", "no labelled gates");
  return tape.cross_entropy(logits, targets, weights);
}

double ce_loss(const nn::Matrix& logits, const std::vector<int>& labels) {
  nn::Tape tape;
  return tape.scalar(ce_loss(tape, tape.constant(logits), labels));
}

LabeledGraph make_labeled_graph(const netlist::Netlist& n, const netlist::CellLibrary& lib,
                                const std::map<std::string, FunctionLabel>& labels) {
  auto g = netlist::build_tag_graph(n, lib);
  LabeledGraph out;
  out.design = n.name;
  out.graph = encoder::GraphInput::from(g);
  for (int node : out.graph.gate_nodes) {
    auto it = labels.find(g.nodes[static_cast<std::size_t>(node)].instance);
    out.labels.push_back(it == labels.end() ? -1 : code(it->second));
  }
  return out;
}

namespace {

std::vector<int> labelled_rows(const LabeledGraph& lg, std::vector<int>* codes) {
  std::vector<int> rows;
  for (std::size_t i = 0; i < lg.labels.size(); ++i) {
    if (lg.labels[i] < 0) continue;
    rows.push_back(lg.graph.gate_nodes[i]);
    if (codes) codes->push_back(lg.labels[i]);
  }
  return rows;
}

}  // namespace

HeadTrainReport train_head(encoder::Encoder& enc, ClassifierHead& head, const std::vector<LabeledGraph>& train,
                           const std::vector<LabeledGraph>& heldout, const HeadTrainConfig& cfg) {
  if (head.config().in_dim != enc.config().dim)
    fail("pred.ShapeMismatch", "head input width differs from encoder dim");
  for (const auto& lg : train)
    for (int l : lg.labels)
      if (l >= kNumLabels) fail("pred.BadLabel", "label code " + std::to_string(l) + " in " + lg.design);
  enc.set_trainable(cfg.co_train_encoder);
  head.params().set_trainable(true);
  const auto enc_hash = enc.params().hash();

  std::vector<nn::Param*> params = head.params().all();
  if (cfg.co_train_encoder)
    for (auto* p : enc.params().all()) params.push_back(p);
  nn::AdamConfig acfg;
  acfg.lr = cfg.lr;
  acfg.clip_norm = cfg.clip_norm;
  nn::Adam adam(acfg);
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(train.size());

  HeadTrainReport report;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    double sum = 0;
    int count = 0;
    for (auto idx : order) {
      const auto& lg = train[idx];
      std::vector<int> codes;
      auto rows = labelled_rows(lg, &codes);
      if (rows.empty()) continue;
      head.params().zero_grad();
      enc.params().zero_grad();
      nn::Tape tape;
      nn::Var h = cfg.co_train_encoder ? enc.forward(tape, lg.graph)
                                       : tape.constant(enc.encode(lg.graph).node_embeddings);
      auto loss = ce_loss(tape, head.forward(tape, tape.gather_rows(h, rows), true), codes);
      sum += tape.scalar(loss);
      ++count;
      tape.backward(loss);
      adam.step(params);
      ++report.steps;
      if (!cfg.co_train_encoder && cfg.check_freeze_each_step && enc.params().hash() != enc_hash)
        fail("pred.FrozenViolation", "encoder parameters changed in frozen mode");
    }
    report.epoch_loss.push_back(count ? sum / count : 0.0);
  }
  if (!cfg.co_train_encoder && enc.params().hash() != enc_hash)
    fail("pred.FrozenViolation", "encoder parameters changed in frozen mode");
  if (!head.params().all_finite() || !enc.params().all_finite())
    fail("pred.NonFinite", "training produced non-finite parameters");
  report.train_accuracy = gate_accuracy(enc, head, train);
  report.heldout_accuracy = heldout.empty() ? 0.0 : gate_accuracy(enc, head, heldout);
  return report;
}

double gate_accuracy(const encoder::Encoder& enc, const ClassifierHead& head, const std::vector<LabeledGraph>& data) {
  long correct = 0, total = 0;
  for (const auto& lg : data) {
    std::vector<int> codes;
    auto rows = labelled_rows(lg, &codes);
    if (rows.empty()) continue;
    auto emb = enc.encode(lg.graph).node_embeddings;
    nn::Matrix x(static_cast<Eigen::Index>(rows.size()), emb.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = emb.row(rows[i]);
    auto z = head.logits(x);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto p = predict_from_logits(z.row(static_cast<Eigen::Index>(i)));
      correct += code(p.label) == codes[i];
      ++total;
    }
  }
  return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

GatePrediction predict_from_logits(const Eigen::RowVectorXd& logits) {
  if (logits.size() != kNumLabels) fail("pred.ShapeMismatch", "expected 5 logits");
  GatePrediction p;
  const double mx = logits.maxCoeff();
  double sum = 0;
  for (int c = 0; c < kNumLabels; ++c) sum += p.probs[static_cast<std::size_t>(c)] = std::exp(logits(c) - mx);
  int best = 0;
  for (int c = 0; c < kNumLabels; ++c) {
    p.probs[static_cast<std::size_t>(c)] /= sum;
    if (logits(c) > logits(best)) best = c;
  }
  p.label = static_cast<FunctionLabel>(best);
  p.confidence = p.probs[static_cast<std::size_t>(best)];
  return p;
}

std::map<std::string, Eigen::RowVectorXd> gate_logits(const netlist::TagGraph& g, const encoder::Encoder& enc,
                                                      const ClassifierHead& head) {
  if (head.config().in_dim != enc.config().dim)
    fail("pred.ShapeMismatch", "head input width " + std::to_string(head.config().in_dim) +
                                   " != encoder dim " + std::to_string(enc.config().dim));
  auto input = encoder::GraphInput::from(g);
  std::map<std::string, Eigen::RowVectorXd> out;
  if (input.gate_nodes.empty()) return out;
  auto emb = enc.encode(input).node_embeddings;
  nn::Matrix x(static_cast<Eigen::Index>(input.gate_nodes.size()), emb.cols());
  for (std::size_t i = 0; i < input.gate_nodes.size(); ++i)
    x.row(static_cast<Eigen::Index>(i)) = emb.row(input.gate_nodes[i]);
  auto z = head.logits(x);
  for (std::size_t i = 0; i < input.gate_nodes.size(); ++i)
    out[g.nodes[static_cast<std::size_t>(input.gate_nodes[i])].instance] = z.row(static_cast<Eigen::Index>(i));
  return out;
}

std::map<std::string, GatePrediction> classify_gates(const netlist::TagGraph& g, const encoder::Encoder& enc,
                                                     const ClassifierHead& head) {
  std::map<std::string, GatePrediction> out;
  for (const auto& [inst, z] : gate_logits(g, enc, head)) out[inst] = predict_from_logits(z);
  return out;
}

}  // namespace netreason::pred

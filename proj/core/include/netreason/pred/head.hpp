#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "netreason/encoder/encoder.hpp"
#include "netreason/netlist/netlist.hpp"
#include "netreason/netlist/tag_graph.hpp"
#include "netreason/pred/labels.hpp"

namespace netreason::pred {

struct HeadConfig {
  int in_dim = 64;
  int hidden = 256;
  int layers = 3;  // linear maps, tanh between them
  std::uint64_t seed = 4;
};

/// Per-gate classifier over node embeddings.
class ClassifierHead {
 public:
  explicit ClassifierHead(HeadConfig cfg);

  const HeadConfig& config() const { return cfg_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }

  /// rows x in_dim -> rows x 5 logits.
  nn::Var forward(nn::Tape& tape, nn::Var x, bool track) const;
  nn::Matrix logits(const nn::Matrix& x) const;

 private:
  HeadConfig cfg_;
  nn::ParamStore params_;
};

/// Mean cross-entropy over rows whose label is >= 0. Throws pred.NoLabels
/// when no row is labelled.
nn::Var ce_loss(nn::Tape& tape, nn::Var logits, const std::vector<int>& labels);
double ce_loss(const nn::Matrix& logits, const std::vector<int>& labels);

/// Encoder input plus one label code per gate node (-1 = unlabelled).
struct LabeledGraph {
  std::string design;
  encoder::GraphInput graph;
  std::vector<int> labels;  // parallel to graph.gate_nodes
};

/// Labels keyed by gate instance name. Gates missing from the map stay
/// unlabelled.
LabeledGraph make_labeled_graph(const netlist::Netlist& n, const netlist::CellLibrary& lib,
                                const std::map<std::string, FunctionLabel>& labels);

struct HeadTrainConfig {
  double lr = 1e-3;
  int epochs = 20;
  /// Also update encoder parameters; false keeps the encoder frozen.
  bool co_train_encoder = true;
  std::uint64_t seed = 1;
  double clip_norm = 1.0;
  bool check_freeze_each_step = false;
};

struct HeadTrainReport {
  std::vector<double> epoch_loss;
  double train_accuracy = 0;
  double heldout_accuracy = 0;  // 0 when no held-out data
  long steps = 0;
};

/// One step per graph over a seeded shuffled order. In frozen mode the
/// encoder hash is verified and a change raises pred.FrozenViolation.
HeadTrainReport train_head(encoder::Encoder& enc, ClassifierHead& head, const std::vector<LabeledGraph>& train,
                           const std::vector<LabeledGraph>& heldout, const HeadTrainConfig& cfg);

/// Fraction of labelled gates whose argmax prediction is correct.
double gate_accuracy(const encoder::Encoder& enc, const ClassifierHead& head, const std::vector<LabeledGraph>& data);

struct GatePrediction {
  FunctionLabel label = FunctionLabel::Adder;
  double confidence = 0;
  std::array<double, kNumLabels> probs{};
};

/// Softmax of one logit row; argmax ties go to the lowest class code.
GatePrediction predict_from_logits(const Eigen::RowVectorXd& logits);

/// Raw head logits per gate instance.
std::map<std::string, Eigen::RowVectorXd> gate_logits(const netlist::TagGraph& g, const encoder::Encoder& enc,
                                                      const ClassifierHead& head);

/// Predictions keyed by gate instance name. Throws pred.ShapeMismatch when
/// the head input differs from the encoder width.
std::map<std::string, GatePrediction> classify_gates(const netlist::TagGraph& g, const encoder::Encoder& enc,
                                                     const ClassifierHead& head);

}  // namespace netreason::pred

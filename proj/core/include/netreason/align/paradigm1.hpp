#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "netreason/align/connector.hpp"
#include "netreason/align/decoder.hpp"
#include "netreason/align/instruction.hpp"
#include "netreason/encoder/encoder.hpp"
#include "netreason/netlist/cell_library.hpp"

namespace netreason::align {

struct ModelConfig {
  encoder::EncoderConfig encoder;
  ConnectorConfig connector;
  DecoderConfig decoder;
  /// false replaces the projected graph token with the learned null token.
  bool align = true;
};

/// Encoder (always frozen here), connector and decoder.
struct Paradigm1Model {
  explicit Paradigm1Model(ModelConfig cfg);

  ModelConfig config;
  encoder::Encoder encoder;
  Connector connector;
  ToyDecoder decoder;
};

/// Canonical JSON text of a model configuration, and its FNV-1a hash.
std::string config_json(const ModelConfig& cfg);
ModelConfig config_from_json(const std::string& text);
std::string config_hash(const ModelConfig& cfg);

struct AlignExample {
  std::string design;
  InstructionPair pair;
  Eigen::RowVectorXd graph_embedding;
};

AlignExample make_example(const Paradigm1Model& model, const netlist::Netlist& n, const netlist::CellLibrary& lib,
                          Task task, std::string target);

/// Mean of -log softmax(logits.row(t))[targets[t]] over positions with
/// positive weight. Throws align.AllMasked when every weight is zero.
nn::Var ar_loss(nn::Tape& tape, nn::Var logits, const std::vector<int>& targets, const std::vector<double>& weights);
double ar_loss(const nn::Matrix& logits, const std::vector<int>& targets, const std::vector<double>& weights);

/// Builds the full sequence loss on a tape. With `track` set, gradients
/// reach every trainable connector and decoder parameter.
nn::Var example_loss(nn::Tape& tape, const Paradigm1Model& model, const AlignExample& ex, bool track);
double dataset_loss(const Paradigm1Model& model, const std::vector<AlignExample>& data);

struct TrainConfig {
  std::optional<double> lr;  // unset: 1e-3 for stage 1, 3e-4 for stage 2
  int epochs = 1;
  long steps = 0;  // > 0 overrides epochs with a fixed step budget
  std::uint64_t seed = 1;
  double clip_norm = 1.0;
  /// Re-hash frozen parameters after every step instead of only at the end.
  bool check_freeze_each_step = false;
};

struct TrainLog {
  std::vector<std::pair<long, double>> step_loss;
  std::vector<double> epoch_mean;
  double final_loss = 0;  // dataset_loss after training
  long steps = 0;
};

/// Stage 1: only the connector learns (the null token when alignment is
/// off). Stage 2: connector and decoder learn. The encoder never changes;
/// frozen parameter hashes are verified and a change raises
/// align.FrozenViolation.
TrainLog train_stage1(Paradigm1Model& model, const std::vector<AlignExample>& data, const TrainConfig& cfg);
TrainLog train_stage2(Paradigm1Model& model, const std::vector<AlignExample>& data, const TrainConfig& cfg);

struct DecodeConfig {
  bool greedy = true;
  double temperature = 1.0;
  int max_len = 256;
  std::uint64_t seed = 0;
};

/// Decodes after the prompt of `pair` (its target is ignored) until EOS,
/// max_len new tokens, or the context limit.
std::string generate(const Paradigm1Model& model, const InstructionPair& pair,
                     const Eigen::RowVectorXd& graph_embedding, const DecodeConfig& cfg);
std::string generate(const Paradigm1Model& model, const netlist::Netlist& n, const netlist::CellLibrary& lib,
                     Task task, const DecodeConfig& cfg);

struct CheckpointInfo {
  int stage = 0;
  long step = 0;
  double loss = 0;
  std::uint64_t seed = 0;
};

/// Writes model.json, encoder/connector/decoder tensor dumps and
/// manifest.json into `dir`.
void save_checkpoint(const std::filesystem::path& dir, const Paradigm1Model& model, const CheckpointInfo& info);
Paradigm1Model load_checkpoint(const std::filesystem::path& dir);

}  // namespace netreason::align

#pragma once

#include <cstdint>
#include <filesystem>

#include "netreason/encoder/encoder.hpp"
#include "netreason/pred/head.hpp"

namespace netreason::pred {

/// Encoder and classifier head saved together by train-head.
struct HeadModel {
  encoder::Encoder encoder;
  ClassifierHead head;
};

struct HeadCheckpointInfo {
  long steps = 0;
  double train_accuracy = 0;
  double heldout_accuracy = 0;
  std::uint64_t seed = 0;
};

std::string head_config_json(const encoder::EncoderConfig& enc, const HeadConfig& head);

/// Writes model.json, encoder.tensors, head.tensors and manifest.json.
void save_head_checkpoint(const std::filesystem::path& dir, const encoder::Encoder& enc, const ClassifierHead& head,
                          const HeadCheckpointInfo& info);

/// Throws pred.BadCheckpoint for a missing or inconsistent directory.
HeadModel load_head_checkpoint(const std::filesystem::path& dir);

}  // namespace netreason::pred

#include "netreason/pred/checkpoint.hpp"

#include <json.hpp>

#include "netreason/error.hpp"
#include "netreason/nn/tensor_io.hpp"
#include "netreason/util/io.hpp"

namespace netreason::pred {

using nlohmann::json;
namespace fs = std::filesystem;

std::string head_config_json(const encoder::EncoderConfig& e, const HeadConfig& h) {
  json j;
  j["encoder"] = {{"layers", e.layers},
                  {"dim", e.dim},
                  {"message_passing", e.message_passing},
                  {"seed", e.seed},
                  {"init_bound", e.init_bound}};
  j["head"] = {{"in_dim", h.in_dim}, {"hidden", h.hidden}, {"layers", h.layers}, {"seed", h.seed}};
  return j.dump(2) + "\n";
}

void save_head_checkpoint(const fs::path& dir, const encoder::Encoder& enc, const ClassifierHead& head,
                          const HeadCheckpointInfo& info) {
  fs::create_directories(dir);
  const auto cfg = head_config_json(enc.config(), head.config());
  util::write_file_atomic(dir / "model.json", cfg);
  util::write_file_atomic(dir / "encoder.tensors", nn::save_tensors(enc.params()));
  util::write_file_atomic(dir / "head.tensors", nn::save_tensors(head.params()));
  json m = {{"steps", info.steps},
            {"train_accuracy", info.train_accuracy},
            {"heldout_accuracy", info.heldout_accuracy},
            {"seed", info.seed},
            {"config_hash", util::hex64(util::fnv1a(cfg))}};
  util::write_file_atomic(dir / "manifest.json", m.dump(2) + "\n");
}

HeadModel load_head_checkpoint(const fs::path& dir) {
  for (const char* f : {"model.json", "encoder.tensors", "head.tensors"})
    if (!fs::exists(dir / f)) fail("pred.BadCheckpoint", "no " + std::string(f) + " in " + dir.string());
  encoder::EncoderConfig e;
  HeadConfig h;
  try {
    auto j = json::parse(util::read_file(dir / "model.json"));
    const auto& je = j.at("encoder");
    e = {je.at("layers"), je.at("dim"), je.at("message_passing"), je.at("seed"), je.at("init_bound")};
    const auto& jh = j.at("head");
    h = {jh.at("in_dim"), jh.at("hidden"), jh.at("layers"), jh.at("seed")};
  } catch (const json::exception& ex) {
    fail("pred.BadCheckpoint", std::string("model config: ") + ex.what());
  }
  if (h.in_dim != e.dim) fail("pred.BadCheckpoint", "head input width differs from encoder width");
  HeadModel m{encoder::Encoder(e), ClassifierHead(h)};
  try {
    nn::load_tensors(m.encoder.params(), util::read_file(dir / "encoder.tensors"));
    nn::load_tensors(m.head.params(), util::read_file(dir / "head.tensors"));
  } catch (const Error& ex) {
    fail("pred.BadCheckpoint", ex.what());
  }
  return m;
}

}  // namespace netreason::pred

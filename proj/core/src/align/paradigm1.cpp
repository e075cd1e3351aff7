#include "netreason/align/paradigm1.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <json.hpp>

#include "netreason/align/tokenizer.hpp"
#include "netreason/error.hpp"
#include "netreason/netlist/tag_graph.hpp"
#include "netreason/nn/optim.hpp"
#include "netreason/nn/tensor_io.hpp"
#include "netreason/util/io.hpp"

namespace netreason::align {

using nlohmann::json;

Paradigm1Model::Paradigm1Model(ModelConfig cfg)
    : config(cfg), encoder(cfg.encoder), connector(cfg.connector), decoder(cfg.decoder) {
  if (cfg.connector.in_dim != cfg.encoder.dim)
    fail("align.ShapeMismatch", "connector input " + std::to_string(cfg.connector.in_dim) +
                                    " != encoder dim " + std::to_string(cfg.encoder.dim));
  if (cfg.connector.out_dim != cfg.decoder.d_model)
    fail("align.ShapeMismatch", "connector output " + std::to_string(cfg.connector.out_dim) +
                                    " != d_model " + std::to_string(cfg.decoder.d_model));
  encoder.params().set_trainable(false);
}

std::string config_json(const ModelConfig& c) {
  json j;
  j["encoder"] = {{"layers", c.encoder.layers},
                  {"dim", c.encoder.dim},
                  {"message_passing", c.encoder.message_passing},
                  {"seed", c.encoder.seed},
                  {"init_bound", c.encoder.init_bound}};
  j["connector"] = {{"in_dim", c.connector.in_dim},
                    {"hidden", c.connector.hidden},
                    {"out_dim", c.connector.out_dim},
                    {"layers", c.connector.layers},
                    {"seed", c.connector.seed}};
  j["decoder"] = {{"d_model", c.decoder.d_model},     {"layers", c.decoder.layers},
                  {"heads", c.decoder.heads},         {"context", c.decoder.context},
                  {"tied_output", c.decoder.tied_output}, {"seed", c.decoder.seed}};
  j["align"] = c.align;
  return j.dump(2) + "\n";
}

ModelConfig config_from_json(const std::string& text) {
  ModelConfig c;
  try {
    auto j = json::parse(text);
    const auto& e = j.at("encoder");
    c.encoder = {e.at("layers"), e.at("dim"), e.at("message_passing"), e.at("seed"), e.at("init_bound")};
    const auto& k = j.at("connector");
    c.connector = {k.at("in_dim"), k.at("hidden"), k.at("out_dim"), k.at("layers"), k.at("seed")};
    const auto& d = j.at("decoder");
    c.decoder = {d.at("d_model"), d.at("layers"), d.at("heads"), d.at("context"), d.at("tied_output"), d.at("seed")};
    c.align = j.at("align");
  } catch (const json::exception& ex) {
    fail("align.BadCheckpoint", std::string("model config: ") + ex.what());
  }
  return c;
}

std::string config_hash(const ModelConfig& cfg) { return util::hex64(util::fnv1a(config_json(cfg))); }

AlignExample make_example(const Paradigm1Model& model, const netlist::Netlist& n, const netlist::CellLibrary& lib,
                          Task task, std::string target) {
  AlignExample ex;
  ex.design = n.name;
  ex.pair = assemble_instruction(n, task, std::move(target));
  ex.graph_embedding = model.encoder.encode(netlist::build_tag_graph(n, lib)).graph_embedding;
  return ex;
}

nn::Var ar_loss(nn::Tape& tape, nn::Var logits, const std::vector<int>& targets,
                const std::vector<double>& weights) {
  if (std::none_of(weights.begin(), weights.end(), [](double w) { return w > 0; }))
    fail("align.AllMasked", "no target positions carry weight");
  return tape.cross_entropy(logits, targets, weights);
}

double ar_loss(const nn::Matrix& logits, const std::vector<int>& targets, const std::vector<double>& weights) {
  nn::Tape tape;
  return tape.scalar(ar_loss(tape, tape.constant(logits), targets, weights));
}

namespace {

nn::Var slot_token(nn::Tape& tape, const Paradigm1Model& model, const Eigen::RowVectorXd& graph_embedding,
                   bool track) {
  if (!model.config.align) return model.connector.null_token(tape, track);
  return model.connector.forward(tape, tape.constant(graph_embedding), track);
}

}  // namespace

nn::Var example_loss(nn::Tape& tape, const Paradigm1Model& model, const AlignExample& ex, bool track) {
  auto tp = tokenize_pair(ex.pair);
  auto slot = slot_token(tape, model, ex.graph_embedding, track);
  auto x = model.decoder.embed(tape, tp.inputs, tp.graph_slot, slot, track);
  return ar_loss(tape, model.decoder.forward(tape, x, track), tp.targets, tp.weights);
}

double dataset_loss(const Paradigm1Model& model, const std::vector<AlignExample>& data) {
  if (data.empty()) return 0;
  double total = 0;
  for (const auto& ex : data) {
    nn::Tape tape;
    total += tape.scalar(example_loss(tape, model, ex, false));
  }
  return total / static_cast<double>(data.size());
}

namespace {

struct FrozenGuard {
  std::vector<std::pair<const nn::ParamStore*, std::uint64_t>> stores;

  void add(const nn::ParamStore& s) { stores.emplace_back(&s, s.hash()); }
  void verify(const char* what) const {
    for (const auto& [s, h] : stores)
      if (s->hash() != h) fail("align.FrozenViolation", std::string("frozen parameters changed during ") + what);
  }
};

TrainLog train(Paradigm1Model& model, const std::vector<AlignExample>& data, const TrainConfig& cfg, int stage) {
  if (data.empty()) fail("align.EmptyDataset", "no training examples");
  auto& conn = model.connector.params();
  conn.set_trainable(false);
  if (model.config.align) {
    conn.set_trainable(true);
    conn.at("conn.null").trainable = false;
  } else {
    conn.at("conn.null").trainable = true;
  }
  model.decoder.params().set_trainable(stage == 2);
  model.encoder.params().set_trainable(false);

  FrozenGuard guard;
  guard.add(model.encoder.params());
  if (stage == 1) guard.add(model.decoder.params());

  std::vector<nn::Param*> params;
  for (auto* p : conn.all()) params.push_back(p);
  if (stage == 2)
    for (auto* p : model.decoder.params().all()) params.push_back(p);

  nn::AdamConfig acfg;
  acfg.lr = cfg.lr.value_or(stage == 1 ? 1e-3 : 3e-4);
  acfg.clip_norm = cfg.clip_norm;
  nn::Adam adam(acfg);
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  const long budget = cfg.steps > 0 ? cfg.steps : static_cast<long>(cfg.epochs) * static_cast<long>(data.size());

  TrainLog log;
  double epoch_sum = 0;
  std::size_t epoch_count = 0;
  for (long step = 0; step < budget; ++step) {
    const auto pos = static_cast<std::size_t>(step) % data.size();
    if (pos == 0) {
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
    }
    model.connector.params().zero_grad();
    model.decoder.params().zero_grad();
    nn::Tape tape;
    auto loss = example_loss(tape, model, data[order[pos]], true);
    const double value = tape.scalar(loss);
    tape.backward(loss);
    adam.step(params);
    if (cfg.check_freeze_each_step) guard.verify("training");
    log.step_loss.emplace_back(step + 1, value);
    epoch_sum += value;
    if (++epoch_count == data.size() || step + 1 == budget) {
      log.epoch_mean.push_back(epoch_sum / static_cast<double>(epoch_count));
      epoch_sum = 0;
      epoch_count = 0;
    }
  }
  guard.verify("training");
  if (!conn.all_finite() || !model.decoder.params().all_finite())
    fail("align.NonFinite", "training produced non-finite parameters");
  log.steps = budget;
  log.final_loss = dataset_loss(model, data);
  return log;
}

}  // namespace

TrainLog train_stage1(Paradigm1Model& model, const std::vector<AlignExample>& data, const TrainConfig& cfg) {
  return train(model, data, cfg, 1);
}

TrainLog train_stage2(Paradigm1Model& model, const std::vector<AlignExample>& data, const TrainConfig& cfg) {
  return train(model, data, cfg, 2);
}

std::string generate(const Paradigm1Model& model, const InstructionPair& pair,
                     const Eigen::RowVectorXd& graph_embedding, const DecodeConfig& cfg) {
  int slot = -1;
  auto tokens = prompt_tokens(pair, &slot);
  Eigen::RowVectorXd slot_value;
  {
    nn::Tape tape;
    slot_value = tape.value(slot_token(tape, model, graph_embedding, false));
  }
  std::mt19937_64 rng(cfg.seed);
  std::vector<int> out;
  for (int i = 0; i < cfg.max_len; ++i) {
    if (static_cast<int>(tokens.size()) >= model.decoder.config().context) break;
    Eigen::RowVectorXd last = model.decoder.logits(tokens, slot, slot_value).bottomRows(1);
    int next = 0;
    if (cfg.greedy || cfg.temperature <= 0) {
      last.maxCoeff(&next);  // first maximum on ties
    } else {
      Eigen::RowVectorXd z = (last.array() - last.maxCoeff()) / cfg.temperature;
      std::vector<double> w(static_cast<std::size_t>(z.size()));
      for (Eigen::Index k = 0; k < z.size(); ++k) w[static_cast<std::size_t>(k)] = std::exp(z(k));
      next = std::discrete_distribution<int>(w.begin(), w.end())(rng);
    }
    if (next == Vocab::kEos) break;
    tokens.push_back(next);
    out.push_back(next);
  }
  return detokenize(out);
}

std::string generate(const Paradigm1Model& model, const netlist::Netlist& n, const netlist::CellLibrary& lib,
                     Task task, const DecodeConfig& cfg) {
  InstructionPair pair{instruction_template(task), netlist::extract_io_signals(n), {}};
  auto emb = model.encoder.encode(netlist::build_tag_graph(n, lib)).graph_embedding;
  return generate(model, pair, emb, cfg);
}

void save_checkpoint(const std::filesystem::path& dir, const Paradigm1Model& model, const CheckpointInfo& info) {
  std::filesystem::create_directories(dir);
  util::write_file_atomic(dir / "model.json", config_json(model.config));
  util::write_file_atomic(dir / "encoder.tensors", nn::save_tensors(model.encoder.params()));
  util::write_file_atomic(dir / "connector.tensors", nn::save_tensors(model.connector.params()));
  util::write_file_atomic(dir / "decoder.tensors", nn::save_tensors(model.decoder.params()));
  json m = {{"stage", info.stage},
            {"step", info.step},
            {"loss", info.loss},
            {"seed", info.seed},
            {"config_hash", config_hash(model.config)}};
  util::write_file_atomic(dir / "manifest.json", m.dump(2) + "\n");
}

Paradigm1Model load_checkpoint(const std::filesystem::path& dir) {
  if (!std::filesystem::exists(dir / "model.json"))
    fail("align.BadCheckpoint", "no model.json in " + dir.string());
  Paradigm1Model model(config_from_json(util::read_file(dir / "model.json")));
  nn::load_tensors(model.encoder.params(), util::read_file(dir / "encoder.tensors"));
  nn::load_tensors(model.connector.params(), util::read_file(dir / "connector.tensors"));
  nn::load_tensors(model.decoder.params(), util::read_file(dir / "decoder.tensors"));
  model.encoder.params().set_trainable(false);
  return model;
}

}  // namespace netreason::align

#include <algorithm>
#include <memory>
#include <optional>
#include <sstream>

#include "commands.hpp"
#include "common.hpp"
#include "netreason/align/paradigm1.hpp"
#include "netreason/align/tokenizer.hpp"
#include "netreason/error.hpp"
#include "netreason/eval/corpus.hpp"
#include "netreason/nn/tensor_io.hpp"
#include "netreason/pred/checkpoint.hpp"
#include "netreason/util/io.hpp"

namespace netreason::cli {

namespace {

/// Netlist and gate labels of every design under a corpus root.
struct LabeledDesign {
  std::string name;
  netlist::Netlist netlist;
  std::map<std::string, pred::FunctionLabel> labels;
};

std::vector<LabeledDesign> load_labeled(const fs::path& root, const netlist::CellLibrary& lib) {
  const auto label_dir = root / "labels";
  if (!fs::is_directory(label_dir)) fail("cli.MissingInput", "no labels/ directory in " + root.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(label_dir))
    if (e.path().extension() == ".txt") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<LabeledDesign> out;
  for (const auto& f : files) {
    LabeledDesign d;
    d.name = f.stem().string();
    fs::path netlist_file;
    for (const char* task : {"task3", "task1", "task2"})
      if (fs::exists(root / task / d.name / "netlist.v")) {
        netlist_file = root / task / d.name / "netlist.v";
        break;
      }
    if (netlist_file.empty()) fail("cli.MissingInput", "no netlist for labelled design " + d.name);
    d.netlist = netlist::parse_netlist(util::read_file(netlist_file), lib);
    d.labels = eval::parse_labels(util::read_file(f));
    out.push_back(std::move(d));
  }
  if (out.empty()) fail("cli.MissingInput", "no labelled designs in " + root.string());
  return out;
}

encoder::EncoderConfig encoder_config(const std::string& kind, int dim, int layers, std::uint64_t seed) {
  encoder::EncoderConfig e;
  e.dim = dim;
  e.layers = layers;
  e.message_passing = kind == "trained";
  e.seed = seed;
  return e;
}

struct TrainHeadOpts {
  fs::path corpus;
  fs::path cell_lib;
  std::string encoder = "trained";
  bool freeze_encoder = false;
  int epochs = 20;
  double lr = 1e-3;
  int dim = 64;
  int enc_layers = 3;
  int hidden = 256;
  double heldout = 0.2;
  std::uint64_t seed = 1;
  fs::path out;
};

void train_head(const TrainHeadOpts& o) {
  const auto& lib = cell_library(o.cell_lib);
  auto designs = load_labeled(o.corpus, lib);
  // Held-out designs: the lowest seeded hashes of the design names.
  std::vector<std::pair<std::uint64_t, std::size_t>> order;
  for (std::size_t i = 0; i < designs.size(); ++i) order.emplace_back(util::fnv1a(designs[i].name, o.seed), i);
  std::sort(order.begin(), order.end());
  const auto n_held = static_cast<std::size_t>(o.heldout * static_cast<double>(designs.size()));
  std::vector<bool> held(designs.size(), false);
  for (std::size_t k = 0; k < n_held; ++k) held[order[k].second] = true;

  std::vector<pred::LabeledGraph> train, heldout;
  json train_names = json::array(), held_names = json::array();
  for (std::size_t i = 0; i < designs.size(); ++i) {
    auto g = pred::make_labeled_graph(designs[i].netlist, lib, designs[i].labels);
    (held[i] ? heldout : train).push_back(std::move(g));
    (held[i] ? held_names : train_names).push_back(designs[i].name);
  }
  if (train.empty()) reject("--heldout leaves no training designs");

  encoder::Encoder enc(encoder_config(o.encoder, o.dim, o.enc_layers, o.seed));
  pred::HeadConfig hc;
  hc.in_dim = o.dim;
  hc.hidden = o.hidden;
  hc.seed = o.seed + 1;
  pred::ClassifierHead head(hc);
  pred::HeadTrainConfig tc;
  tc.lr = o.lr;
  tc.epochs = o.epochs;
  tc.co_train_encoder = !o.freeze_encoder;
  tc.seed = o.seed;
  const auto rep = pred::train_head(enc, head, train, heldout, tc);

  pred::save_head_checkpoint(o.out, enc, head, {rep.steps, rep.train_accuracy, rep.heldout_accuracy, o.seed});
  json metrics = {{"epoch_loss", rep.epoch_loss},
                  {"train_accuracy", rep.train_accuracy},
                  {"heldout_accuracy", heldout.empty() ? json(nullptr) : json(rep.heldout_accuracy)},
                  {"steps", rep.steps},
                  {"train_designs", train_names},
                  {"heldout_designs", held_names}};
  util::write_file_atomic(o.out / "metrics.json", metrics.dump(2) + "\n");
  Manifest m{"train-head", o.seed};
  m.config = {{"corpus", o.corpus.string()}, {"cell_lib", o.cell_lib.string()}, {"encoder", o.encoder},
              {"freeze_encoder", o.freeze_encoder}, {"epochs", o.epochs}, {"lr", o.lr}, {"dim", o.dim},
              {"encoder_layers", o.enc_layers}, {"hidden", o.hidden}, {"heldout", o.heldout}};
  m.results = {{"train_accuracy", rep.train_accuracy},
               {"heldout_accuracy", heldout.empty() ? json(nullptr) : json(rep.heldout_accuracy)}};
  write_manifest(o.out, m);
}

/// Instruction pairs from a task-1 or task-2 bundle directory.
std::vector<align::AlignExample> load_examples(const align::Paradigm1Model& model, const fs::path& dir,
                                               const netlist::CellLibrary& lib, int limit) {
  auto bundles = eval::load_bundles(dir);
  if (bundles.empty()) fail("cli.MissingInput", "no bundles in " + dir.string());
  if (limit > 0 && bundles.size() > static_cast<std::size_t>(limit)) bundles.resize(static_cast<std::size_t>(limit));
  std::vector<align::AlignExample> out;
  for (const auto& b : bundles) {
    if (b.task == 3) fail("cli.BadCorpus", b.design + " is an RTL bundle; Paradigm 1 trains on task 1 or 2");
    const auto task = b.task == 1 ? align::Task::FuncDesc : align::Task::ImplDetail;
    out.push_back(align::make_example(model, netlist::parse_netlist(b.netlist, lib), lib, task, b.golden));
  }
  return out;
}

/// Longest tokenized pair of the bundles, rounded up to a multiple of 64.
int required_context(const fs::path& dir, const netlist::CellLibrary& lib, int limit) {
  auto bundles = eval::load_bundles(dir);
  if (limit > 0 && bundles.size() > static_cast<std::size_t>(limit)) bundles.resize(static_cast<std::size_t>(limit));
  std::size_t longest = 1;
  for (const auto& b : bundles) {
    const auto task = b.task == 1 ? align::Task::FuncDesc : align::Task::ImplDetail;
    const auto pair = align::assemble_instruction(netlist::parse_netlist(b.netlist, lib), task, b.golden);
    longest = std::max(longest, align::tokenize_pair(pair).inputs.size() + 1);
  }
  return static_cast<int>((longest + 63) / 64 * 64);
}

void write_train_log(const fs::path& dir, const align::TrainLog& log) {
  std::ostringstream csv;
  csv.precision(10);
  csv << "step,loss\n";
  for (const auto& [step, loss] : log.step_loss) csv << step << ',' << loss << '\n';
  util::write_file_atomic(dir / "train_log.csv", csv.str());
}

struct TrainAlignOpts {
  fs::path corpus;
  fs::path cell_lib;
  fs::path encoder_ckpt;
  fs::path init;
  std::string encoder;
  bool no_align = false;
  int epochs = 1;
  long steps = 0;
  std::optional<double> lr;
  std::uint64_t seed = 1;
  int d_model = 128;
  int dec_layers = 2;
  int heads = 4;
  int context = 0;
  int connector_hidden = 128;
  int limit = 0;
  fs::path out;
};

json train_config_json(const TrainAlignOpts& o) {
  return {{"corpus", o.corpus.string()}, {"cell_lib", o.cell_lib.string()},
          {"epochs", o.epochs},          {"steps", o.steps},
          {"lr", o.lr ? json(*o.lr) : json(nullptr)}, {"limit", o.limit}};
}

void train_align1(TrainAlignOpts o) {
  const auto& lib = cell_library(o.cell_lib);
  align::ModelConfig mc;
  std::optional<pred::HeadModel> trained;
  if (!o.encoder_ckpt.empty()) {
    trained.emplace(pred::load_head_checkpoint(o.encoder_ckpt));
    mc.encoder = trained->encoder.config();
    const std::string kind = mc.encoder.message_passing ? "trained" : "weak";
    if (!o.encoder.empty() && o.encoder != kind)
      reject("--encoder " + o.encoder + " contradicts the " + kind + " encoder in " + o.encoder_ckpt.string());
  } else {
    mc.encoder = encoder_config(o.encoder.empty() ? "trained" : o.encoder, 64, 3, o.seed);
  }
  mc.connector.in_dim = mc.encoder.dim;
  mc.connector.hidden = o.connector_hidden;
  mc.connector.out_dim = o.d_model;
  mc.connector.seed = o.seed + 1;
  mc.decoder.d_model = o.d_model;
  mc.decoder.layers = o.dec_layers;
  mc.decoder.heads = o.heads;
  mc.decoder.context = o.context > 0 ? o.context : required_context(o.corpus, lib, o.limit);
  mc.decoder.seed = o.seed;
  mc.align = !o.no_align;

  align::Paradigm1Model model(mc);
  if (trained) {
    nn::load_tensors(model.encoder.params(), nn::save_tensors(trained->encoder.params()));
    model.encoder.params().set_trainable(false);
  }
  const auto data = load_examples(model, o.corpus, lib, o.limit);
  align::TrainConfig tc;
  tc.lr = o.lr;
  tc.epochs = o.epochs;
  tc.steps = o.steps;
  tc.seed = o.seed;
  const auto log = align::train_stage1(model, data, tc);

  align::save_checkpoint(o.out, model, {1, log.steps, log.final_loss, o.seed});
  write_train_log(o.out, log);
  Manifest m{"train-align1", o.seed};
  m.config = train_config_json(o);
  m.config["model"] = json::parse(align::config_json(mc));
  m.config["encoder_ckpt"] = o.encoder_ckpt.string();
  m.results = {{"final_loss", log.final_loss}, {"steps", log.steps}, {"examples", data.size()}};
  write_manifest(o.out, m);
}

void train_align2(const TrainAlignOpts& o) {
  const auto& lib = cell_library(o.cell_lib);
  auto model = align::load_checkpoint(o.init);
  if (o.no_align && model.config.align)
    reject("--no-align given but " + o.init.string() + " was trained with alignment");
  const auto data = load_examples(model, o.corpus, lib, o.limit);
  align::TrainConfig tc;
  tc.lr = o.lr;
  tc.epochs = o.epochs;
  tc.steps = o.steps;
  tc.seed = o.seed;
  const auto log = align::train_stage2(model, data, tc);

  align::save_checkpoint(o.out, model, {2, log.steps, log.final_loss, o.seed});
  write_train_log(o.out, log);
  Manifest m{"train-align2", o.seed};
  m.config = train_config_json(o);
  m.config["model"] = json::parse(align::config_json(model.config));
  m.config["init"] = o.init.string();
  m.results = {{"final_loss", log.final_loss}, {"steps", log.steps}, {"examples", data.size()}};
  write_manifest(o.out, m);
}

void add_schedule(CLI::App* c, TrainAlignOpts& o) {
  c->add_option("--corpus", o.corpus, "Task-1 or task-2 bundle directory")->required()->check(CLI::ExistingDirectory);
  c->add_option("--cell-lib", o.cell_lib, "Cell library file (default: built-in)")->check(CLI::ExistingFile);
  c->add_option("--epochs", o.epochs, "Passes over the data")->capture_default_str()->check(CLI::PositiveNumber);
  c->add_option("--steps", o.steps, "Fixed step budget; overrides --epochs")->check(CLI::PositiveNumber);
  c->add_option("--lr", o.lr, "Learning rate (default 1e-3 stage 1, 3e-4 stage 2)")->check(CLI::PositiveNumber);
  c->add_option("--seed", o.seed, "Shuffle and initialisation seed")->capture_default_str();
  c->add_option("--limit", o.limit, "Use only the first N bundles")->check(CLI::NonNegativeNumber);
  c->add_flag("--no-align", o.no_align, "Replace the graph token with a learned null token (text-only ablation)");
  c->add_option("--out", o.out, "Checkpoint directory")->required();
}

}  // namespace

void add_train_commands(CLI::App& app, std::vector<Command>& out) {
  {
    auto o = std::make_shared<TrainHeadOpts>();
    auto* c = app.add_subcommand("train-head", "Train the gate-function classifier (and encoder) on corpus labels");
    c->add_option("--corpus", o->corpus, "Corpus root written by gen-corpus")->required()->check(CLI::ExistingDirectory);
    c->add_option("--cell-lib", o->cell_lib, "Cell library file (default: built-in)")->check(CLI::ExistingFile);
    c->add_option("--encoder", o->encoder, "trained: message passing; weak: node features only")
        ->capture_default_str()
        ->check(CLI::IsMember({"trained", "weak"}));
    c->add_flag("--freeze-encoder", o->freeze_encoder, "Keep encoder parameters at their initial values");
    c->add_option("--epochs", o->epochs, "Passes over the training designs")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--lr", o->lr, "Adam learning rate")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--dim", o->dim, "Encoder width")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--encoder-layers", o->enc_layers, "Message-passing rounds")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--hidden", o->hidden, "Head hidden width")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--heldout", o->heldout, "Fraction of designs held out")->capture_default_str()->check(CLI::Range(0.0, 0.9));
    c->add_option("--seed", o->seed, "Initialisation, split and shuffle seed")->capture_default_str();
    c->add_option("--out", o->out, "Checkpoint directory")->required();
    out.push_back({c, [o] {
                     o->corpus = resolve(o->corpus);
                     o->out = resolve(o->out);
                     check_output_separate(o->out, {o->corpus});
                     train_head(*o);
                   }});
  }
  {
    auto o = std::make_shared<TrainAlignOpts>();
    auto* c = app.add_subcommand("train-align1", "Stage 1: train the connector with encoder and decoder frozen");
    add_schedule(c, *o);
    c->add_option("--encoder-ckpt", o->encoder_ckpt, "train-head checkpoint supplying the encoder")
        ->check(CLI::ExistingDirectory);
    c->add_option("--encoder", o->encoder, "Encoder kind when no checkpoint is given")
        ->check(CLI::IsMember({"trained", "weak"}));
    c->add_option("--d-model", o->d_model, "Decoder width")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--decoder-layers", o->dec_layers, "Decoder blocks")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--heads", o->heads, "Attention heads")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--context", o->context, "Decoder context (0: fit the data)")->capture_default_str()->check(CLI::NonNegativeNumber);
    c->add_option("--connector-hidden", o->connector_hidden, "Connector hidden width")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    out.push_back({c, [o] {
                     if (o->d_model % o->heads != 0) reject("--d-model must be a multiple of --heads");
                     o->corpus = resolve(o->corpus);
                     o->out = resolve(o->out);
                     if (!o->encoder_ckpt.empty()) o->encoder_ckpt = resolve(o->encoder_ckpt);
                     check_output_separate(o->out, {o->corpus, o->encoder_ckpt});
                     train_align1(*o);
                   }});
  }
  {
    auto o = std::make_shared<TrainAlignOpts>();
    auto* c = app.add_subcommand("train-align2", "Stage 2: train connector and decoder from a stage-1 checkpoint");
    add_schedule(c, *o);
    c->add_option("--init", o->init, "Stage-1 checkpoint")->required()->check(CLI::ExistingDirectory);
    out.push_back({c, [o] {
                     o->corpus = resolve(o->corpus);
                     o->init = resolve(o->init);
                     o->out = resolve(o->out);
                     check_output_separate(o->out, {o->corpus, o->init});
                     train_align2(*o);
                   }});
  }
}

}  // namespace netreason::cli

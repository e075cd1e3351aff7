#include <memory>
#include <sstream>

#include "commands.hpp"
#include "common.hpp"
#include "netreason/align/paradigm1.hpp"
#include "netreason/error.hpp"
#include "netreason/eval/corpus.hpp"
#include "netreason/eval/report.hpp"
#include "netreason/netlist/tag_graph.hpp"
#include "netreason/pred/annotate.hpp"
#include "netreason/pred/checkpoint.hpp"
#include "netreason/pred/llm_client.hpp"
#include "netreason/util/io.hpp"

namespace netreason::cli {

namespace {

/// Design directories holding `file`, by name.
std::vector<std::pair<std::string, fs::path>> designs_with(const fs::path& dir, const std::string& file) {
  std::vector<std::pair<std::string, fs::path>> out;
  for (const auto& d : child_dirs(dir))
    if (fs::exists(d / file)) out.emplace_back(d.filename().string(), d / file);
  if (out.empty()) fail("cli.MissingInput", "no */" + file + " under " + dir.string());
  return out;
}

std::string prompt_json(const pred::PromptMessages& p) {
  json j = json::array();
  for (const auto& m : p.messages) j.push_back({{"role", m.role}, {"content", m.content}});
  return j.dump(2) + "\n";
}

pred::PromptMessages read_prompt_json(const fs::path& file) {
  pred::PromptMessages p;
  try {
    for (const auto& m : json::parse(util::read_file(file)))
      p.messages.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
  } catch (const json::exception& e) {
    fail("cli.BadInput", file.string() + ": " + e.what());
  }
  return p;
}

struct AnnotateOpts {
  fs::path head;
  fs::path bundles;
  fs::path cell_lib;
  bool no_confidence = false;
  int jobs = 1;
  fs::path out;
};

void annotate(const AnnotateOpts& o) {
  const auto& lib = cell_library(o.cell_lib);
  const auto model = pred::load_head_checkpoint(o.head);
  const auto designs = designs_with(o.bundles, "netlist.v");
  std::vector<std::size_t> counts(designs.size());
  parallel_for(designs.size(), o.jobs, [&](std::size_t i) {
    const auto& [name, file] = designs[i];
    const auto n = netlist::parse_netlist(util::read_file(file), lib);
    const auto preds = pred::classify_gates(netlist::build_tag_graph(n, lib), model.encoder, model.head);
    pred::AnnotateOptions ao;
    ao.include_confidence = !o.no_confidence;
    std::ostringstream csv;
    csv << "instance,label,confidence\n";
    for (const auto& [inst, p] : preds) csv << inst << ',' << pred::to_string(p.label) << ',' << p.confidence << '\n';
    fs::create_directories(o.out / name);
    util::write_file_atomic(o.out / name / "annotated.v", pred::annotate_netlist(n, preds, ao));
    util::write_file_atomic(o.out / name / "predictions.csv", csv.str());
    counts[i] = preds.size();
  });
  Manifest m{"annotate", 0};
  m.config = {{"head", o.head.string()}, {"bundles", o.bundles.string()}, {"cell_lib", o.cell_lib.string()},
              {"confidence", !o.no_confidence}};
  std::size_t gates = 0;
  for (auto c : counts) gates += c;
  m.results = {{"designs", designs.size()}, {"gates", gates}};
  write_manifest(o.out, m);
}

struct PromptOpts {
  fs::path annotated;
  fs::path bundles;
  bool no_annotation = false;
  fs::path user_template;
  fs::path system_text;
  fs::path out;
};

void prompt(const PromptOpts& o) {
  const bool from_annotated = !o.annotated.empty();
  const auto designs = designs_with(from_annotated ? o.annotated : o.bundles, from_annotated ? "annotated.v" : "netlist.v");
  pred::PromptOptions po;
  po.include_annotations = !o.no_annotation;
  if (!o.user_template.empty()) po.user_template = util::read_file(o.user_template);
  if (!o.system_text.empty()) po.system_text = util::trim(util::read_file(o.system_text));
  for (const auto& [name, file] : designs) {
    const auto p = pred::build_cot_prompt(util::read_file(file), po);
    fs::create_directories(o.out / name);
    util::write_file_atomic(o.out / name / "prompt.json", prompt_json(p));
    util::write_file_atomic(o.out / name / "prompt.txt", pred::render_prompt(p));
  }
  Manifest m{"prompt", 0};
  m.config = {{"source", (from_annotated ? o.annotated : o.bundles).string()},
              {"annotations", from_annotated && !o.no_annotation},
              {"template", o.user_template.string()},
              {"system", o.system_text.string()}};
  m.results = {{"designs", designs.size()}};
  write_manifest(o.out, m);
}

struct GenerateOpts {
  int paradigm = 2;
  fs::path model;
  fs::path bundles;
  fs::path prompts;
  fs::path endpoint;
  fs::path cell_lib;
  int samples = 1;
  double temperature = 0;
  int max_len = 256;
  std::uint64_t seed = 1;
  int jobs = 1;
  fs::path out;
};

void generate_p1(const GenerateOpts& o) {
  const auto& lib = cell_library(o.cell_lib);
  const auto model = align::load_checkpoint(o.model);
  const auto bundles = eval::load_bundles(o.bundles);
  if (bundles.empty()) fail("cli.MissingInput", "no bundles in " + o.bundles.string());
  for (const auto& b : bundles)
    if (b.task == 3) fail("cli.BadCorpus", b.design + " is an RTL bundle; Paradigm 1 answers task 1 or 2");
  std::vector<std::vector<std::string>> samples(bundles.size());
  parallel_for(bundles.size(), o.jobs, [&](std::size_t i) {
    const auto& b = bundles[i];
    const auto n = netlist::parse_netlist(b.netlist, lib);
    const auto task = b.task == 1 ? align::Task::FuncDesc : align::Task::ImplDetail;
    for (int k = 0; k < o.samples; ++k) {
      align::DecodeConfig dc;
      dc.greedy = o.temperature == 0;
      dc.temperature = o.temperature > 0 ? o.temperature : 1.0;
      dc.max_len = o.max_len;
      dc.seed = util::fnv1a(b.design, o.seed + static_cast<std::uint64_t>(k));
      samples[i].push_back(align::generate(model, n, lib, task, dc));
    }
  });
  for (std::size_t i = 0; i < bundles.size(); ++i) eval::write_outputs(o.out, bundles[i].design, samples[i], ".txt");
}

void generate_p2(const GenerateOpts& o) {
  const auto designs = designs_with(o.prompts, "prompt.json");
  pred::LlmClient client(endpoint(o.endpoint));
  const auto per = static_cast<std::size_t>(o.samples);
  std::vector<std::string> replies(designs.size() * per);
  std::vector<pred::PromptMessages> prompts;
  for (const auto& [name, file] : designs) prompts.push_back(read_prompt_json(file));
  parallel_for(replies.size(), o.jobs, [&](std::size_t i) { replies[i] = client.complete(prompts[i / per]); });
  for (std::size_t d = 0; d < designs.size(); ++d)
    eval::write_outputs(o.out, designs[d].first,
                        std::vector<std::string>(replies.begin() + static_cast<std::ptrdiff_t>(d * per),
                                                 replies.begin() + static_cast<std::ptrdiff_t>((d + 1) * per)),
                        ".txt");
}

void generate(const GenerateOpts& o) {
  if (o.paradigm == 1)
    generate_p1(o);
  else
    generate_p2(o);
  Manifest m{"generate", o.seed};
  m.config = {{"paradigm", o.paradigm}, {"samples", o.samples}};
  if (o.paradigm == 1) {
    m.config["model"] = o.model.string();
    m.config["bundles"] = o.bundles.string();
    m.config["temperature"] = o.temperature;
    m.config["max_len"] = o.max_len;
    m.config["cell_lib"] = o.cell_lib.string();
  } else {
    const auto ep = endpoint(o.endpoint);
    m.config["prompts"] = o.prompts.string();
    m.config["endpoint"] = {{"base_url", ep.base_url}, {"model", ep.model}, {"temperature", ep.temperature},
                            {"max_tokens", ep.max_tokens}};
  }
  write_manifest(o.out, m);
}

}  // namespace

void add_pred_commands(CLI::App& app, std::vector<Command>& out) {
  {
    auto o = std::make_shared<AnnotateOpts>();
    auto* c = app.add_subcommand("annotate", "Classify gates and write netlists with func: comments");
    c->add_option("--head", o->head, "train-head checkpoint")->required()->check(CLI::ExistingDirectory);
    c->add_option("--bundles", o->bundles, "Directory of <design>/netlist.v")->required()->check(CLI::ExistingDirectory);
    c->add_option("--cell-lib", o->cell_lib, "Cell library file (default: built-in)")->check(CLI::ExistingFile);
    c->add_flag("--no-confidence", o->no_confidence, "Omit the (p=...) confidence from annotations");
    c->add_option("--jobs", o->jobs, "Parallel designs")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--out", o->out, "Output directory")->required();
    out.push_back({c, [o] {
                     o->head = resolve(o->head);
                     o->bundles = resolve(o->bundles);
                     o->out = resolve(o->out);
                     check_output_separate(o->out, {o->head, o->bundles});
                     annotate(*o);
                   }});
  }
  {
    auto o = std::make_shared<PromptOpts>();
    auto* c = app.add_subcommand("prompt", "Build chain-of-thought prompts from annotated (or plain) netlists");
    auto* a = c->add_option("--annotated", o->annotated, "annotate output directory")->check(CLI::ExistingDirectory);
    auto* b = c->add_option("--bundles", o->bundles, "Directory of <design>/netlist.v (no annotations)")
                  ->check(CLI::ExistingDirectory);
    a->excludes(b);
    c->add_flag("--no-annotation", o->no_annotation, "Drop gate annotations from the prompt (ablation)");
    c->add_option("--template", o->user_template, "User-message template file with a {netlist} placeholder")
        ->check(CLI::ExistingFile);
    c->add_option("--system", o->system_text, "System message file")->check(CLI::ExistingFile);
    c->add_option("--out", o->out, "Output directory")->required();
    out.push_back({c, [o] {
                     if (o->annotated.empty() && o->bundles.empty()) reject("one of --annotated or --bundles is required");
                     const auto src = resolve(o->annotated.empty() ? o->bundles : o->annotated);
                     (o->annotated.empty() ? o->bundles : o->annotated) = src;
                     o->out = resolve(o->out);
                     check_output_separate(o->out, {src});
                     prompt(*o);
                   }});
  }
  {
    auto o = std::make_shared<GenerateOpts>();
    auto* c = app.add_subcommand("generate", "Produce samples: Paradigm 1 decodes locally, Paradigm 2 queries the LLM");
    c->add_option("--paradigm", o->paradigm, "1: aligned decoder; 2: prompted LLM")
        ->required()
        ->check(CLI::IsMember({1, 2}));
    auto* model = c->add_option("--model", o->model, "Paradigm 1: train-align checkpoint")->check(CLI::ExistingDirectory);
    auto* bundles = c->add_option("--bundles", o->bundles, "Paradigm 1: task-1 or task-2 bundle directory")
                        ->check(CLI::ExistingDirectory);
    auto* cell = c->add_option("--cell-lib", o->cell_lib, "Paradigm 1: cell library file")->check(CLI::ExistingFile);
    auto* temp = c->add_option("--temperature", o->temperature, "Paradigm 1: sampling temperature (0: greedy)")
                     ->check(CLI::NonNegativeNumber);
    auto* max_len = c->add_option("--max-len", o->max_len, "Paradigm 1: new-token limit")->check(CLI::PositiveNumber);
    auto* prompts = c->add_option("--prompts", o->prompts, "Paradigm 2: prompt output directory")
                        ->check(CLI::ExistingDirectory);
    auto* ep = c->add_option("--endpoint", o->endpoint, "Paradigm 2: endpoint JSON file")->check(CLI::ExistingFile);
    c->add_option("--samples", o->samples, "Samples per design")->capture_default_str()->check(CLI::Range(1, 1000));
    c->add_option("--seed", o->seed, "Sampling seed")->capture_default_str();
    c->add_option("--jobs", o->jobs, "Parallel designs (requests are also capped by the endpoint)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    c->add_option("--out", o->out, "Output directory")->required();
    out.push_back({c, [=] {
                     auto given = [](CLI::Option* opt) { return opt->count() > 0; };
                     if (o->paradigm == 1) {
                       if (!given(model) || !given(bundles)) reject("--paradigm 1 needs --model and --bundles");
                       if (given(prompts) || given(ep)) reject("--prompts/--endpoint apply to --paradigm 2 only");
                       o->model = resolve(o->model);
                       o->bundles = resolve(o->bundles);
                     } else {
                       if (!given(prompts)) reject("--paradigm 2 needs --prompts");
                       for (auto* opt : {model, bundles, cell, temp, max_len})
                         if (given(opt)) reject(opt->get_name() + " applies to --paradigm 1 only");
                       o->prompts = resolve(o->prompts);
                       if (!o->endpoint.empty()) o->endpoint = resolve(o->endpoint);
                     }
                     o->out = resolve(o->out);
                     check_output_separate(o->out, {o->model, o->bundles, o->prompts});
                     generate(*o);
                   }});
  }
}

}  // namespace netreason::cli

#include <csignal>
#include <cstdio>
#include <iostream>
#include <memory>
#include <sstream>

#include <pthread.h>

#include "commands.hpp"
#include "common.hpp"
#include "netreason/error.hpp"
#include "netreason/eval/corpus.hpp"
#include "netreason/eval/report.hpp"
#include "netreason/pred/mock_llm.hpp"
#include "netreason/util/io.hpp"

namespace netreason::cli {

namespace {

struct EvalOpts {
  fs::path bundles;
  fs::path outputs;
  int bleu_order = 4;
  std::string embedding = "local";
  bool judge = false;
  fs::path judge_template;
  fs::path endpoint;
  std::string sim_compile;
  std::string sim_run;
  double sim_timeout = 60;
  std::string corpus_label = "synthetic corpus (structural template lowering)";
  int jobs = 1;
  fs::path out;
};

void evaluate(const EvalOpts& o) {
  const auto bundles = eval::load_bundles(o.bundles);
  if (bundles.empty()) fail("cli.MissingInput", "no bundles in " + o.bundles.string());
  const auto outputs = eval::load_outputs(o.outputs);
  std::unique_ptr<pred::LlmClient> client;
  if (o.judge || o.embedding == "remote") client = std::make_unique<pred::LlmClient>(endpoint(o.endpoint));

  eval::EvalConfig cfg;
  cfg.bleu_order = o.bleu_order;
  cfg.embedding = o.embedding == "remote" ? eval::EmbeddingProvider::Remote : eval::EmbeddingProvider::LocalTfidf;
  cfg.client = client.get();
  cfg.judge = o.judge;
  if (!o.judge_template.empty()) cfg.judge_template = util::read_file(o.judge_template);
  cfg.sim.compile_cmd = o.sim_compile;
  cfg.sim.run_cmd = o.sim_run;
  cfg.sim.timeout_s = o.sim_timeout;
  cfg.sim.work_dir = o.out / "sim";
  cfg.jobs = o.jobs;
  cfg.corpus_label = o.corpus_label;
  const auto report = eval::evaluate_run(bundles, outputs, cfg);

  fs::create_directories(o.out);
  util::write_file_atomic(o.out / "report.csv", report.csv());
  util::write_file_atomic(o.out / "report.json", report.json());
  util::write_file_atomic(o.out / "summary.txt", report.summary());
  std::cout << report.summary();

  Manifest m{"eval", 0};
  m.config = {{"bundles", o.bundles.string()}, {"outputs", o.outputs.string()},
              {"bleu_order", o.bleu_order},    {"embedding", o.embedding},
              {"judge", o.judge},              {"judge_template", o.judge_template.string()},
              {"sim_compile", o.sim_compile},  {"sim_run", o.sim_run},
              {"sim_timeout", o.sim_timeout},  {"corpus_label", o.corpus_label},
              {"bleu_smoothing", "add-epsilon 1e-9 on zero clipped counts"}};
  m.results = {{"designs", report.designs.size()}, {"task", report.task}};
  write_manifest(o.out, m);
}

struct ReportOpts {
  std::vector<std::string> runs;
  std::vector<std::string> checkpoints;
  fs::path out;
};

std::map<std::string, fs::path> named_paths(const std::vector<std::string>& items, const char* flag) {
  std::map<std::string, fs::path> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
      reject(std::string(flag) + " expects NAME=DIR, got '" + item + "'");
    if (!out.emplace(item.substr(0, eq), resolve(item.substr(eq + 1))).second)
      reject(std::string(flag) + " repeats the name " + item.substr(0, eq));
  }
  return out;
}

void report(const ReportOpts& o) {
  const auto runs = named_paths(o.runs, "--run");
  const auto ckpts = named_paths(o.checkpoints, "--checkpoint");
  for (const auto& [name, dir] : ckpts)
    if (!runs.contains(name)) reject("--checkpoint " + name + " has no matching --run");

  auto read_json = [](const fs::path& file) {
    if (!fs::exists(file)) fail("cli.MissingInput", file.string() + " does not exist");
    try {
      return json::parse(util::read_file(file));
    } catch (const json::exception& e) {
      fail("cli.BadInput", file.string() + ": " + e.what());
    }
  };
  auto num = [](const json& v) { return v.is_null() ? std::string("-") : std::to_string(v.get<double>()); };

  json rows = json::array();
  json reference_designs;
  int reference_task = -1;
  std::ostringstream csv, txt;
  csv << "run,corpus,task,designs,bleu,rouge1_f1,rouge2_f1,rougeL_f1,emb_sim,gpt_score,syntax_rate,success_macro,"
         "success_micro,pass_at_1,pass_at_5,final_train_loss\n";
  for (const auto& [name, dir] : runs) {
    const auto r = read_json(dir / "report.json");
    json designs = json::array();
    for (const auto& d : r.at("designs")) designs.push_back(d.at("design"));
    if (reference_task < 0) {
      reference_task = r.at("task").get<int>();
      reference_designs = designs;
    } else if (r.at("task").get<int>() != reference_task || designs != reference_designs) {
      fail("cli.IncomparableRuns", "run " + name + " covers a different task or design set");
    }
    json loss = nullptr;
    if (auto it = ckpts.find(name); it != ckpts.end()) {
      const auto m = read_json(it->second / "manifest.json");
      loss = m.contains("loss") ? m.at("loss") : m.at("results").at("final_loss");
    }
    const auto& mean = r.at("mean");
    json row = {{"run", name},
                {"corpus", r.at("corpus")},
                {"task", r.at("task")},
                {"designs", designs.size()},
                {"bleu", mean.at("bleu")},
                {"rouge1_f1", mean.at("rouge1").at("f1")},
                {"rouge2_f1", mean.at("rouge2").at("f1")},
                {"rougeL_f1", mean.at("rougeL").at("f1")},
                {"emb_sim", mean.at("emb_sim")},
                {"gpt_score", mean.at("gpt_score")},
                {"syntax_rate", r.at("syntax_rate")},
                {"success_macro", r.at("success_macro")},
                {"success_micro", r.at("success_micro")},
                {"pass_at_1", r.at("pass_at_1")},
                {"pass_at_5", r.at("pass_at_5")},
                {"final_train_loss", loss}};
    if (r.at("task").get<int>() != 3)
      for (const char* k : {"syntax_rate", "success_macro", "success_micro"}) row[k] = nullptr;
    csv << name << ",\"" << row["corpus"].get<std::string>() << "\"," << row["task"] << ',' << designs.size();
    for (const char* k : {"bleu", "rouge1_f1", "rouge2_f1", "rougeL_f1", "emb_sim", "gpt_score", "syntax_rate",
                          "success_macro", "success_micro", "pass_at_1", "pass_at_5", "final_train_loss"})
      csv << ',' << (row[k].is_null() ? "" : num(row[k]));
    csv << '\n';
    txt << name << " (" << row["corpus"].get<std::string>() << ", task " << row["task"] << ", " << designs.size()
        << " designs)\n"
        << "  BLEU " << num(row["bleu"]) << "  ROUGE-1 " << num(row["rouge1_f1"]) << "  ROUGE-2 "
        << num(row["rouge2_f1"]) << "  ROUGE-L " << num(row["rougeL_f1"]) << "  Emb " << num(row["emb_sim"])
        << "  GPT " << num(row["gpt_score"]) << "\n"
        << "  syntax " << num(row["syntax_rate"]) << "  success(macro) " << num(row["success_macro"])
        << "  success(micro) " << num(row["success_micro"]) << "  pass@1 " << num(row["pass_at_1"]) << "  pass@5 "
        << num(row["pass_at_5"]) << "  final train loss " << num(row["final_train_loss"]) << "\n";
    rows.push_back(row);
  }
  fs::create_directories(o.out);
  util::write_file_atomic(o.out / "comparison.csv", csv.str());
  util::write_file_atomic(o.out / "comparison.txt", txt.str());
  util::write_file_atomic(o.out / "comparison.json", rows.dump(2) + "\n");
  std::cout << txt.str();
  Manifest m{"report", 0};
  json cfg_runs = json::object(), cfg_ckpts = json::object();
  for (const auto& [k, v] : runs) cfg_runs[k] = v.string();
  for (const auto& [k, v] : ckpts) cfg_ckpts[k] = v.string();
  m.config = {{"runs", cfg_runs}, {"checkpoints", cfg_ckpts}};
  write_manifest(o.out, m);
}

struct MockOpts {
  std::string host = "127.0.0.1";
  int port = 8089;
  fs::path answers;
  std::string judge_reply = "0.5";
  std::string api_key;
  fs::path ready_file;
};

void mock_llm(const MockOpts& o) {
  pred::MockLlmConfig cfg;
  cfg.judge_reply = o.judge_reply;
  cfg.expected_key = o.api_key;
  if (!o.answers.empty()) {
    for (const auto& b : eval::load_bundles(o.answers)) {
      if (b.task != 3) continue;
      cfg.answers_by_module[b.design] = "Step 1: the netlist computes the word-level function of module " +
                                        b.design + ".\nStep 2:\n```verilog\n" + b.golden + "```\n";
    }
  }
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  pred::MockLlmServer server(cfg);
  const int port = server.start(o.host, o.port);
  std::cout << server.base_url() << std::endl;
  if (!o.ready_file.empty()) util::write_file_atomic(o.ready_file, server.base_url() + "\n");
  int sig = 0;
  sigwait(&set, &sig);
  server.stop();
  std::cerr << "mock-llm on port " << port << " served " << server.requests() << " requests\n";
}

}  // namespace

void add_eval_commands(CLI::App& app, std::vector<Command>& out) {
  {
    auto o = std::make_shared<EvalOpts>();
    auto* c = app.add_subcommand("eval", "Score generated samples against bundle goldens and testbenches");
    c->add_option("--bundles", o->bundles, "Task bundle directory")->required()->check(CLI::ExistingDirectory);
    c->add_option("--outputs", o->outputs, "Directory of <design>/sample_<k>.{txt,v}")
        ->required()
        ->check(CLI::ExistingDirectory);
    c->add_option("--bleu-order", o->bleu_order, "Highest BLEU n-gram order")->capture_default_str()->check(CLI::Range(1, 8));
    c->add_option("--embedding", o->embedding, "Embedding similarity provider")
        ->capture_default_str()
        ->check(CLI::IsMember({"local", "remote"}));
    c->add_flag("--judge", o->judge, "Ask the LLM judge for a GPT-score");
    c->add_option("--judge-template", o->judge_template, "Judge prompt file with {reference} and {generated}")
        ->check(CLI::ExistingFile);
    c->add_option("--endpoint", o->endpoint, "Endpoint JSON file (judge and remote embeddings)")
        ->check(CLI::ExistingFile);
    c->add_option("--sim-compile", o->sim_compile, "External compile command with {rtl} {tb} {out} (default: built-in evaluator)");
    c->add_option("--sim-run", o->sim_run, "External run command");
    c->add_option("--sim-timeout", o->sim_timeout, "Seconds per simulation")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--corpus-label", o->corpus_label, "Corpus description written into reports")->capture_default_str();
    c->add_option("--jobs", o->jobs, "Parallel designs")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--out", o->out, "Report directory")->required();
    out.push_back({c, [o] {
                     if ((o->judge || o->embedding == "remote") && o->endpoint.empty())
                       reject("--judge and --embedding remote need --endpoint");
                     if (!o->judge_template.empty() && !o->judge) reject("--judge-template needs --judge");
                     if (!o->sim_run.empty() && o->sim_compile.empty()) reject("--sim-run needs --sim-compile");
                     o->bundles = resolve(o->bundles);
                     o->outputs = resolve(o->outputs);
                     o->out = resolve(o->out);
                     check_output_separate(o->out, {o->bundles, o->outputs});
                     evaluate(*o);
                   }});
  }
  {
    auto o = std::make_shared<ReportOpts>();
    auto* c = app.add_subcommand("report", "Side-by-side comparison of eval runs (e.g. aligned vs --no-align)");
    c->add_option("--run", o->runs, "NAME=EVAL_DIR (repeatable)")->required();
    c->add_option("--checkpoint", o->checkpoints, "NAME=CKPT_DIR supplying the final training loss of a run");
    c->add_option("--out", o->out, "Output directory")->required();
    out.push_back({c, [o] {
                     o->out = resolve(o->out);
                     report(*o);
                   }});
  }
  {
    auto o = std::make_shared<MockOpts>();
    auto* c = app.add_subcommand("mock-llm", "Serve the deterministic mock chat-completion endpoint until interrupted");
    c->add_option("--host", o->host, "Bind address")->capture_default_str();
    c->add_option("--port", o->port, "Port (0: any free port)")->capture_default_str()->check(CLI::Range(0, 65535));
    c->add_option("--answers", o->answers, "Task-3 bundle directory; each golden RTL answers its module")
        ->check(CLI::ExistingDirectory);
    c->add_option("--judge-reply", o->judge_reply, "Reply to judge prompts")->capture_default_str();
    c->add_option("--api-key", o->api_key, "Bearer token to require");
    c->add_option("--ready-file", o->ready_file, "Write the base URL here once listening");
    out.push_back({c, [o] { mock_llm(*o); }});
  }
}

}  // namespace netreason::cli

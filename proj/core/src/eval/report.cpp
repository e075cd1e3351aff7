#include "netreason/eval/report.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <regex>
#include <thread>

#include <json.hpp>

#include "netreason/error.hpp"
#include "netreason/pred/annotate.hpp"
#include "netreason/util/io.hpp"

namespace netreason::eval {

namespace fs = std::filesystem;

namespace {

void accumulate(TextScore& acc, const TextScore& s) {
  acc.bleu += s.bleu;
  for (auto [a, b] : {std::pair{&acc.rouge1, &s.rouge1}, {&acc.rouge2, &s.rouge2}, {&acc.rougeL, &s.rougeL}}) {
    a->precision += b->precision;
    a->recall += b->recall;
    a->f1 += b->f1;
  }
  acc.emb_sim += s.emb_sim;
}

void scale(TextScore& t, double k) {
  t.bleu *= k;
  for (auto* p : {&t.rouge1, &t.rouge2, &t.rougeL}) {
    p->precision *= k;
    p->recall *= k;
    p->f1 *= k;
  }
  t.emb_sim *= k;
}

TextScore mean_of(const std::vector<const TextScore*>& xs) {
  TextScore m;
  if (xs.empty()) return m;
  double g = 0;
  bool all_g = true;
  for (const auto* x : xs) {
    accumulate(m, *x);
    if (x->gpt_score) g += *x->gpt_score;
    else all_g = false;
  }
  scale(m, 1.0 / static_cast<double>(xs.size()));
  if (all_g) m.gpt_score = g / static_cast<double>(xs.size());
  return m;
}

TextScore text_scores(const std::string& cand, const std::string& ref, const EvalConfig& cfg, const TfidfModel& tfidf) {
  TextScore t;
  t.bleu = bleu(cand, ref, cfg.bleu_order);
  t.rouge1 = rouge_n(cand, ref, 1);
  t.rouge2 = rouge_n(cand, ref, 2);
  t.rougeL = rouge_l(cand, ref);
  t.emb_sim = embed_similarity(cand, ref, cfg.embedding, cfg.client, &tfidf);
  return t;
}

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.6f", v);
  return b;
}

std::string opt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

DesignResult score_design(const BenchmarkBundle& b, const std::vector<std::string>& samples, const EvalConfig& cfg,
                          const TfidfModel& tfidf) {
  DesignResult r;
  r.design = b.design;
  r.task = b.task;
  r.n = static_cast<int>(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    SampleResult s;
    const auto& out = samples[k];
    if (b.task == 3) {
      const auto rtl = pred::extract_rtl(out);
      auto sim = cfg.sim;
      if (!sim.work_dir.empty()) sim.work_dir = sim.work_dir / b.design;
      try {
        s.rtl = run_testbench(rtl, *b.testbench, sim, "sample_" + std::to_string(k));
      } catch (const Error& e) {
        if (e.code() != "eval.Timeout") throw;
        RtlResult t;
        t.syntax_pass = true;
        t.log = e.what();
        s.rtl = t;
      }
      s.text = text_scores(rtl, b.golden, cfg, tfidf);
      r.syntax_ok += s.rtl->syntax_pass;
      r.correct += s.rtl->function_pass;
    } else {
      s.text = text_scores(out, b.golden, cfg, tfidf);
    }
    if (cfg.judge) {
      if (!cfg.client) fail("eval.ProviderUnavailable", "judge scoring requested without an endpoint");
      s.text.gpt_score = gpt_score(out, b.golden, *cfg.client, cfg.judge_template);
      if (s.rtl) s.rtl->gpt_score = s.text.gpt_score;
    }
    r.samples.push_back(std::move(s));
  }
  std::vector<const TextScore*> xs;
  for (const auto& s : r.samples) xs.push_back(&s.text);
  r.mean = mean_of(xs);
  if (b.task == 3) {
    r.success_rate = static_cast<double>(r.correct) / r.n;
    r.pass1 = pass_at_k(r.n, r.correct, 1);
    if (r.n >= 5) r.pass5 = pass_at_k(r.n, r.correct, 5);
  }
  return r;
}

}  // namespace

RunReport evaluate_run(const std::vector<BenchmarkBundle>& bundles, const RunOutputs& outputs, const EvalConfig& cfg) {
  for (const auto& b : bundles) {
    auto it = outputs.find(b.design);
    if (it == outputs.end() || it->second.empty()) fail("eval.MissingOutput", "no samples for design " + b.design);
    if (b.task == 3 && !b.testbench) fail("eval.BadBundle", b.design + " has no testbench");
  }
  std::vector<std::string> refs;
  for (const auto& b : bundles) refs.push_back(b.golden);
  const TfidfModel tfidf(refs);

  RunReport rep;
  rep.corpus_label = cfg.corpus_label;
  rep.designs.resize(bundles.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < bundles.size(); i = next++) {
      try {
        rep.designs[i] = score_design(bundles[i], outputs.at(bundles[i].design), cfg, tfidf);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = bundles.size();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(bundles.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  std::vector<const TextScore*> xs;
  int samples = 0, correct = 0, syntax = 0, rtl_designs = 0, p5_designs = 0;
  double success_sum = 0, p1 = 0, p5 = 0;
  rep.task = bundles.empty() ? 0 : bundles.front().task;
  for (const auto& d : rep.designs) {
    xs.push_back(&d.mean);
    if (d.task != rep.task) rep.task = 0;
    if (d.task != 3) continue;
    ++rtl_designs;
    samples += d.n;
    correct += d.correct;
    syntax += d.syntax_ok;
    success_sum += d.success_rate;
    p1 += *d.pass1;
    if (d.pass5) {
      ++p5_designs;
      p5 += *d.pass5;
    }
  }
  rep.mean = mean_of(xs);
  if (rtl_designs > 0) {
    rep.syntax_rate = static_cast<double>(syntax) / samples;
    rep.success_macro = success_sum / rtl_designs;
    rep.success_micro = static_cast<double>(correct) / samples;
    rep.pass1 = p1 / rtl_designs;
    if (p5_designs > 0) rep.pass5 = p5 / p5_designs;
  }
  return rep;
}

std::string RunReport::csv() const {
  std::string s =
      "design,task,n,bleu,rouge1_p,rouge1_r,rouge1_f1,rouge2_p,rouge2_r,rouge2_f1,rougeL_p,rougeL_r,rougeL_f1,"
      "emb_sim,gpt_score,syntax_pass,function_pass,success_rate,pass_at_1,pass_at_5\n";
  auto row = [&](const std::string& name, const std::string& task, const std::string& n, const TextScore& t,
                 const std::string& rtl_cols) {
    s += name + "," + task + "," + n + "," + fmt(t.bleu);
    for (const auto* p : {&t.rouge1, &t.rouge2, &t.rougeL})
      s += "," + fmt(p->precision) + "," + fmt(p->recall) + "," + fmt(p->f1);
    s += "," + fmt(t.emb_sim) + "," + opt(t.gpt_score) + "," + rtl_cols + "\n";
  };
  int total_n = 0;
  for (const auto& d : designs) {
    total_n += d.n;
    const auto rtl = d.task == 3 ? std::to_string(d.syntax_ok) + "," + std::to_string(d.correct) + "," +
                                       fmt(d.success_rate) + "," + opt(d.pass1) + "," + opt(d.pass5)
                                 : std::string(",,,,");
    row(d.design, std::to_string(d.task), std::to_string(d.n), d.mean, rtl);
  }
  const bool has_rtl = pass1.has_value();
  row("ALL", task ? std::to_string(task) : "mixed", std::to_string(total_n), mean,
      has_rtl ? fmt(syntax_rate) + "," + fmt(success_micro) + "," + fmt(success_macro) + "," + opt(pass1) + "," +
                    opt(pass5)
              : std::string(",,,,"));
  return s;
}

std::string RunReport::summary() const {
  std::string s = "Corpus: " + corpus_label + "\n";
  s += "Designs: " + std::to_string(designs.size()) + (task ? ", task " + std::to_string(task) : ", mixed tasks") + "\n";
  s += "Tokenization: lowercase, punctuation split, whitespace split; BLEU uses add-epsilon (1e-9) smoothing\n\n";
  s += "BLEU        " + fmt(mean.bleu) + "\n";
  s += "ROUGE-1 F1  " + fmt(mean.rouge1.f1) + "\n";
  s += "ROUGE-2 F1  " + fmt(mean.rouge2.f1) + "\n";
  s += "ROUGE-L F1  " + fmt(mean.rougeL.f1) + "\n";
  s += "Emb. cosine " + fmt(mean.emb_sim) + "\n";
  if (mean.gpt_score) s += "GPT score   " + fmt(*mean.gpt_score) + "\n";
  if (pass1) {
    s += "Syntax pass             " + fmt(syntax_rate) + "\n";
    s += "Success rate (macro)    " + fmt(success_macro) + "\n";
    s += "Success rate (micro)    " + fmt(success_micro) + "\n";
    s += "pass@1                  " + fmt(*pass1) + "\n";
    if (pass5) s += "pass@5                  " + fmt(*pass5) + "\n";
  }
  return s;
}

std::string RunReport::json() const {
  auto text = [](const TextScore& t) {
    nlohmann::json j = {{"bleu", t.bleu}, {"emb_sim", t.emb_sim}};
    for (auto [name, p] : {std::pair{"rouge1", &t.rouge1}, {"rouge2", &t.rouge2}, {"rougeL", &t.rougeL}})
      j[name] = {{"precision", p->precision}, {"recall", p->recall}, {"f1", p->f1}};
    j["gpt_score"] = t.gpt_score ? nlohmann::json(*t.gpt_score) : nlohmann::json(nullptr);
    return j;
  };
  auto optj = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json j;
  j["corpus"] = corpus_label;
  j["task"] = task;
  j["mean"] = text(mean);
  j["syntax_rate"] = syntax_rate;
  j["success_macro"] = success_macro;
  j["success_micro"] = success_micro;
  j["pass_at_1"] = optj(pass1);
  j["pass_at_5"] = optj(pass5);
  j["designs"] = nlohmann::json::array();
  for (const auto& d : designs) {
    nlohmann::json dj = {{"design", d.design}, {"task", d.task}, {"n", d.n}, {"mean", text(d.mean)}};
    if (d.task == 3) {
      dj["syntax_ok"] = d.syntax_ok;
      dj["correct"] = d.correct;
      dj["success_rate"] = d.success_rate;
      dj["pass_at_1"] = optj(d.pass1);
      dj["pass_at_5"] = optj(d.pass5);
    }
    j["designs"].push_back(dj);
  }
  return j.dump(2) + "\n";
}

RunOutputs load_outputs(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail("eval.MissingOutput", dir.string() + " is not a directory");
  static const std::regex sample(R"(sample_(\d+)\.(txt|v))");
  RunOutputs out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_directory()) continue;
    std::vector<std::pair<int, fs::path>> files;
    for (const auto& f : fs::directory_iterator(e.path())) {
      std::smatch m;
      const auto name = f.path().filename().string();
      if (std::regex_match(name, m, sample)) files.emplace_back(std::stoi(m[1]), f.path());
    }
    std::sort(files.begin(), files.end());
    auto& v = out[e.path().filename().string()];
    for (const auto& [k, p] : files) v.push_back(util::read_file(p));
  }
  return out;
}

void write_outputs(const fs::path& dir, const std::string& design, const std::vector<std::string>& samples,
                   const std::string& extension) {
  for (std::size_t k = 0; k < samples.size(); ++k)
    util::write_file_atomic(dir / design / ("sample_" + std::to_string(k) + extension), samples[k]);
}

}  // namespace netreason::eval

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netreason/eval/corpus.hpp"
#include "netreason/eval/metrics.hpp"
#include "netreason/eval/testbench.hpp"

namespace netreason::pred {
class LlmClient;
}

namespace netreason::eval {

struct EvalConfig {
  int bleu_order = 4;
  EmbeddingProvider embedding = EmbeddingProvider::LocalTfidf;
  /// Needed for remote embeddings and the judge; must outlive the call.
  pred::LlmClient* client = nullptr;
  bool judge = false;
  std::string judge_template = default_judge_template();
  SimConfig sim;
  int jobs = 1;
  /// Written into the summary so reports always say what they scored.
  std::string corpus_label = "synthetic corpus (structural template lowering)";
};

struct SampleResult {
  TextScore text;
  std::optional<RtlResult> rtl;  // task 3 only
};

struct DesignResult {
  std::string design;
  int task = 1;
  std::vector<SampleResult> samples;
  TextScore mean;  // gpt_score present when every sample has one
  int n = 0;
  int syntax_ok = 0;
  int correct = 0;
  double success_rate = 0;  // correct / n
  std::optional<double> pass1, pass5;
};

struct RunReport {
  std::string corpus_label;
  std::vector<DesignResult> designs;
  TextScore mean;  // macro average over designs
  int task = 0;    // 0 when tasks are mixed
  double syntax_rate = 0;       // micro
  double success_macro = 0;     // mean of per-design success rates
  double success_micro = 0;     // all correct samples / all samples
  std::optional<double> pass1;  // mean over designs
  std::optional<double> pass5;  // mean over designs with n >= 5

  std::string csv() const;
  std::string summary() const;
  std::string json() const;
};

/// design -> generated samples (raw completions or RTL).
using RunOutputs = std::map<std::string, std::vector<std::string>>;

/// Scores every bundle against its samples. Task 1/2 samples get text
/// metrics; task 3 samples are simulated against the bundle testbench
/// (a simulation timeout counts as a failed run). Throws
/// eval.MissingOutput when a bundle has no samples.
RunReport evaluate_run(const std::vector<BenchmarkBundle>& bundles, const RunOutputs& outputs,
                       const EvalConfig& cfg = {});

/// `<dir>/<design>/sample_<k>.{txt,v}` in sample order; `extension`
/// includes the dot.
RunOutputs load_outputs(const std::filesystem::path& dir);
void write_outputs(const std::filesystem::path& dir, const std::string& design, const std::vector<std::string>& samples,
                   const std::string& extension);

}  // namespace netreason::eval

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace netreason::pred {
class LlmClient;
}

namespace netreason::eval {

/// Lowercases, splits on whitespace, and makes every character other than
/// [a-z0-9_] a token of its own ("a+b." -> "a", "+", "b", ".").
std::vector<std::string> metric_tokens(std::string_view text);

struct Prf {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

struct TextScore {
  double bleu = 0;
  Prf rouge1, rouge2, rougeL;
  double emb_sim = 0;
  std::optional<double> gpt_score;
};

inline constexpr double kBleuEpsilon = 1e-9;

/// Sentence BLEU: geometric mean of clipped n-gram precisions for
/// n = 1..min(max_n, candidate length) times the brevity penalty. A zero
/// match count is replaced by kBleuEpsilon. Empty candidate scores 0.
/// Throws eval.EmptyReference.
double bleu(std::string_view candidate, std::string_view reference, int max_n = 4);

/// Clipped n-gram overlap. Throws eval.EmptyReference.
Prf rouge_n(std::string_view candidate, std::string_view reference, int n);

/// Longest-common-subsequence overlap. Throws eval.EmptyReference.
Prf rouge_l(std::string_view candidate, std::string_view reference);

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// TF-IDF vectors with smoothed idf = ln((1 + N) / (1 + df)) + 1 over the
/// documents it was fitted on; terms never seen get df = 0.
class TfidfModel {
 public:
  explicit TfidfModel(const std::vector<std::string>& documents);
  std::unordered_map<std::string, double> vectorize(std::string_view text) const;
  double idf(const std::string& term) const;
  /// Cosine of the two vectors; texts with identical token lists give 1,
  /// otherwise an empty vector gives 0.
  double cosine(std::string_view a, std::string_view b) const;

 private:
  std::unordered_map<std::string, std::size_t> df_;
  std::size_t docs_ = 0;
};

double cosine(const std::vector<double>& a, const std::vector<double>& b);

enum class EmbeddingProvider { LocalTfidf, Remote };

/// Local provider fits TF-IDF on {a, b} when no model is given. Remote
/// requests both embeddings from the client; any endpoint failure or
/// unusable vector raises eval.ProviderUnavailable.
double embed_similarity(std::string_view a, std::string_view b, EmbeddingProvider provider,
                        pred::LlmClient* client = nullptr, const TfidfModel* model = nullptr);

/// Judge prompt with {generated} and {reference} placeholders.
const std::string& default_judge_template();

/// First decimal number in `reply`, clamped to [0, 1]. Throws
/// eval.UnparseableJudgment.
double parse_judgment(std::string_view reply);

double gpt_score(std::string_view generated, std::string_view reference, pred::LlmClient& client,
                 const std::string& judge_template = default_judge_template());

/// 1 - C(n-c, k) / C(n, k). Exact integer binomials up to n = 60, the
/// running product form above. Throws eval.InvalidCounts.
double pass_at_k(int n, int c, int k);

}  // namespace netreason::eval

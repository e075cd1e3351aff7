#include "netreason/eval/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <regex>
#include <unordered_set>

#include "netreason/error.hpp"
#include "netreason/pred/llm_client.hpp"

namespace netreason::eval {

namespace {

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

using Counts = std::map<std::vector<std::string>, std::size_t>;

Counts ngrams(const std::vector<std::string>& toks, int n) {
  Counts out;
  const auto un = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i + un <= toks.size(); ++i)
    ++out[std::vector<std::string>(toks.begin() + static_cast<std::ptrdiff_t>(i),
                                   toks.begin() + static_cast<std::ptrdiff_t>(i + un))];
  return out;
}

std::size_t clipped_overlap(const Counts& cand, const Counts& ref) {
  std::size_t m = 0;
  for (const auto& [g, c] : cand) {
    auto it = ref.find(g);
    if (it != ref.end()) m += std::min(c, it->second);
  }
  return m;
}

std::size_t total(const Counts& c) {
  std::size_t t = 0;
  for (const auto& [g, k] : c) t += k;
  return t;
}

Prf make_prf(double overlap, double cand_total, double ref_total) {
  Prf r;
  r.precision = cand_total > 0 ? overlap / cand_total : 0;
  r.recall = ref_total > 0 ? overlap / ref_total : 0;
  r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0;
  return r;
}

std::vector<std::string> reference_tokens(std::string_view reference) {
  auto toks = metric_tokens(reference);
  if (toks.empty()) fail("eval.EmptyReference", "reference text has no tokens");
  return toks;
}

}  // namespace

std::vector<std::string> metric_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else if (word_char(c)) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      flush();
      out.emplace_back(1, c);
    }
  }
  flush();
  return out;
}

double bleu(std::string_view candidate, std::string_view reference, int max_n) {
  if (max_n < 1) fail("eval.BadOrder", "max_n must be >= 1");
  const auto ref = reference_tokens(reference);
  const auto cand = metric_tokens(candidate);
  if (cand.empty()) return 0;
  const int order = std::min<int>(max_n, static_cast<int>(cand.size()));
  double log_sum = 0;
  for (int n = 1; n <= order; ++n) {
    const auto cn = ngrams(cand, n);
    double m = static_cast<double>(clipped_overlap(cn, ngrams(ref, n)));
    if (m == 0) m = kBleuEpsilon;
    log_sum += std::log(m / static_cast<double>(total(cn)));
  }
  const double c = static_cast<double>(cand.size());
  const double r = static_cast<double>(ref.size());
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return std::clamp(bp * std::exp(log_sum / order), 0.0, 1.0);
}

Prf rouge_n(std::string_view candidate, std::string_view reference, int n) {
  if (n < 1) fail("eval.BadOrder", "rouge order must be >= 1");
  const auto ref = ngrams(reference_tokens(reference), n);
  const auto cand = ngrams(metric_tokens(candidate), n);
  return make_prf(static_cast<double>(clipped_overlap(cand, ref)), static_cast<double>(total(cand)),
                  static_cast<double>(total(ref)));
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

Prf rouge_l(std::string_view candidate, std::string_view reference) {
  const auto ref = reference_tokens(reference);
  const auto cand = metric_tokens(candidate);
  return make_prf(static_cast<double>(lcs_length(cand, ref)), static_cast<double>(cand.size()),
                  static_cast<double>(ref.size()));
}

TfidfModel::TfidfModel(const std::vector<std::string>& documents) : docs_(documents.size()) {
  for (const auto& d : documents) {
    auto toks = metric_tokens(d);
    std::unordered_set<std::string> seen(toks.begin(), toks.end());
    for (const auto& t : seen) ++df_[t];
  }
}

double TfidfModel::idf(const std::string& term) const {
  auto it = df_.find(term);
  const double df = it == df_.end() ? 0.0 : static_cast<double>(it->second);
  return std::log((1.0 + static_cast<double>(docs_)) / (1.0 + df)) + 1.0;
}

std::unordered_map<std::string, double> TfidfModel::vectorize(std::string_view text) const {
  std::unordered_map<std::string, double> v;
  for (const auto& t : metric_tokens(text)) v[t] += 1.0;
  for (auto& [t, x] : v) x *= idf(t);
  return v;
}

double TfidfModel::cosine(std::string_view a, std::string_view b) const {
  if (metric_tokens(a) == metric_tokens(b)) return 1.0;
  const auto va = vectorize(a), vb = vectorize(b);
  double dot = 0, na = 0, nb = 0;
  for (const auto& [t, x] : va) {
    na += x * x;
    auto it = vb.find(t);
    if (it != vb.end()) dot += x * it->second;
  }
  for (const auto& [t, x] : vb) nb += x * x;
  if (na == 0 || nb == 0) return 0;
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) fail("eval.ShapeMismatch", "embedding sizes differ");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0;
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

double embed_similarity(std::string_view a, std::string_view b, EmbeddingProvider provider,
                        pred::LlmClient* client, const TfidfModel* model) {
  if (provider == EmbeddingProvider::LocalTfidf) {
    if (model) return model->cosine(a, b);
    return TfidfModel({std::string(a), std::string(b)}).cosine(a, b);
  }
  if (!client) fail("eval.ProviderUnavailable", "remote embeddings requested without an endpoint");
  std::vector<double> ea, eb;
  try {
    ea = client->embed(a);
    eb = client->embed(b);
  } catch (const Error& e) {
    fail("eval.ProviderUnavailable", e.what());
  }
  if (ea.empty() || ea.size() != eb.size())
    fail("eval.ProviderUnavailable", "embedding endpoint returned unusable vectors");
  return cosine(ea, eb);
}

const std::string& default_judge_template() {
  static const std::string t =
      "You compare two descriptions of the same hardware design.\n"
      "Assign a similarity score between 0 and 1, where 1 means the generated text states the same "
      "interface, purpose and behaviour as the reference and 0 means it shares nothing with it.\n"
      "Reply with the number only.\n\n"
      "Reference:\n{reference}\n\nGenerated:\n{generated}\n";
  return t;
}

double parse_judgment(std::string_view reply) {
  static const std::regex num(R"([-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(reply.begin(), reply.end(), m, num))
    fail("eval.UnparseableJudgment", "no number in judge reply: " + std::string(reply.substr(0, 200)));
  return std::clamp(std::stod(m.str()), 0.0, 1.0);
}

double gpt_score(std::string_view generated, std::string_view reference, pred::LlmClient& client,
                 const std::string& judge_template) {
  auto fill = [](std::string t, std::string_view key, std::string_view value) {
    for (auto p = t.find(key); p != std::string::npos; p = t.find(key, p + value.size()))
      t.replace(p, key.size(), value);
    return t;
  };
  if (judge_template.find("{generated}") == std::string::npos ||
      judge_template.find("{reference}") == std::string::npos)
    fail("eval.BadTemplate", "judge template needs {generated} and {reference}");
  pred::PromptMessages prompt;
  prompt.messages.push_back(
      {"user", fill(fill(judge_template, "{reference}", reference), "{generated}", generated)});
  return parse_judgment(client.complete(prompt));
}

double pass_at_k(int n, int c, int k) {
  if (n < 1 || c < 0 || c > n || k < 1 || k > n)
    fail("eval.InvalidCounts", "need 0 <= c <= n and 1 <= k <= n (n=" + std::to_string(n) +
                                   ", c=" + std::to_string(c) + ", k=" + std::to_string(k) + ")");
  if (n - c < k) return 1.0;
  if (n <= 60) {
    auto binom = [](int a, int b) {
      std::uint64_t r = 1;
      for (int i = 1; i <= b; ++i) r = r * static_cast<std::uint64_t>(a - b + i) / static_cast<std::uint64_t>(i);
      return r;
    };
    const auto num = binom(n - c, k), den = binom(n, k);
    return static_cast<double>(den - num) / static_cast<double>(den);
  }
  double prod = 1.0;
  for (int i = n - c + 1; i <= n; ++i) prod *= 1.0 - static_cast<double>(k) / i;
  return 1.0 - prod;
}

}  // namespace netreason::eval

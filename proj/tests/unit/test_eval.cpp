#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <regex>
#include <set>

#include "doctest.h"
#include "netreason/error.hpp"
#include "netreason/eval/corpus.hpp"
#include "netreason/eval/metrics.hpp"
#include "netreason/eval/report.hpp"
#include "netreason/eval/rtl_sim.hpp"
#include "netreason/eval/testbench.hpp"
#include "netreason/pred/llm_client.hpp"
#include "netreason/pred/mock_llm.hpp"
#include "netreason/util/io.hpp"
#include "support/metric_oracles.hpp"

using namespace netreason;
using namespace netreason::eval;
namespace fs = std::filesystem;
using namespace testsupport;

namespace {

void check_prf_close(const Prf& a, const Prf& b) {
  CHECK(std::abs(a.precision - b.precision) < 1e-9);
  CHECK(std::abs(a.recall - b.recall) < 1e-9);
  CHECK(std::abs(a.f1 - b.f1) < 1e-9);
}

pred::EndpointConfig mock_endpoint(const pred::MockLlmServer& s) {
  pred::EndpointConfig c;
  c.base_url = s.base_url();
  c.api_key = "k";
  c.backoff_s = 0.01;
  c.timeout_s = 5;
  return c;
}

std::string run_rtl(const std::string& src) { return RtlDesign::compile({{"t.v", src}}).run(); }

}  // namespace

// ---------------------------------------------------------------- metrics

TEST_CASE("metric tokenization") {
  CHECK(metric_tokens("The sum=a+b.") == std::vector<std::string>{"the", "sum", "=", "a", "+", "b", "."});
  CHECK(metric_tokens("  carry_out[3] ") == std::vector<std::string>{"carry_out", "[", "3", "]"});
  CHECK(metric_tokens("").empty());
}

TEST_CASE("bleu fixtures") {
  CHECK(bleu("the cat sat on the mat", "the cat sat on the mat") == doctest::Approx(1.0));
  CHECK(bleu("alpha beta gamma delta", "one two three four") < 1e-8);
  // clipped precisions 3/3, 2/2, 1/1 (a 3-token candidate has no 4-grams);
  // brevity penalty exp(1 - 6/3)
  CHECK(bleu("the cat sat", "the cat sat on the mat") == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  // "down" unmatched: precisions 3/4, 2/3, 1/2, ε/1; brevity penalty exp(1 - 6/4)
  CHECK(bleu("the cat sat down", "the cat sat on the mat") ==
        doctest::Approx(std::exp(-0.5) * std::pow(0.75 * 2 / 3 * 0.5 * 1e-9, 0.25)).epsilon(1e-12));
  // clipping: "the" occurs twice in the reference, four times in the candidate
  CHECK(bleu("the the the the", "the cat the mat", 1) == doctest::Approx(0.5));
  CHECK(bleu("", "reference") == 0.0);
  CHECK_THROWS_WITH_AS(bleu("x", "  "), doctest::Contains("eval.EmptyReference"), Error);
}

TEST_CASE("rouge fixtures") {
  auto r = rouge_n("the cat", "the cat sat", 1);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == doctest::Approx(2.0 / 3));
  CHECK(r.f1 == doctest::Approx(0.8));
  auto same = rouge_l("a b c", "a b c");
  CHECK(same.f1 == 1.0);
  CHECK(rouge_n("x y z", "x y z", 2).f1 == 1.0);
  CHECK(lcs_length({"a", "b", "c", "d"}, {"b", "d", "a"}) == 2);
  CHECK_THROWS_WITH_AS(rouge_l("a", ""), doctest::Contains("eval.EmptyReference"), Error);
  CHECK_THROWS_WITH_AS(rouge_n("a", "", 1), doctest::Contains("eval.EmptyReference"), Error);
}

TEST_CASE("bleu and rouge match brute-force recomputation on random pairs") {
  std::mt19937 rng(11);
  for (int i = 0; i < 50; ++i) {
    auto c = random_text(rng, 25), r = random_text(rng, 25);
    CAPTURE(c);
    CAPTURE(r);
    CHECK(std::abs(bleu(c, r) - oracle_bleu(c, r)) < 1e-9);
    check_prf_close(rouge_n(c, r, 1), oracle_rouge_n(c, r, 1));
    check_prf_close(rouge_n(c, r, 2), oracle_rouge_n(c, r, 2));
    auto ct = oracle_tokens(c), rt = oracle_tokens(r);
    CHECK(lcs_length(ct, rt) == static_cast<std::size_t>(oracle_lcs(ct, rt)));
    check_prf_close(rouge_l(c, r), oracle_prf(oracle_lcs(ct, rt), double(ct.size()), double(rt.size())));
  }
}

TEST_CASE("metric bounds and identity on random text") {
  std::mt19937 rng(5);
  for (int i = 0; i < 200; ++i) {
    auto c = random_text(rng, 30), r = random_text(rng, 30);
    const double b = bleu(c, r);
    CHECK((b >= 0 && b <= 1));
    for (const auto& p : {rouge_n(c, r, 1), rouge_n(c, r, 2), rouge_l(c, r)}) {
      CHECK((p.precision >= 0 && p.precision <= 1 && p.recall >= 0 && p.recall <= 1));
      if (p.precision + p.recall > 0)
        CHECK(p.f1 == doctest::Approx(2 * p.precision * p.recall / (p.precision + p.recall)));
    }
    const double e = embed_similarity(c, r, EmbeddingProvider::LocalTfidf);
    CHECK((e >= -1 && e <= 1));
    CHECK(bleu(r, r) == doctest::Approx(1.0));
    CHECK(rouge_l(r, r).f1 == doctest::Approx(1.0));
    CHECK(embed_similarity(r, r, EmbeddingProvider::LocalTfidf) == doctest::Approx(1.0));
  }
}

TEST_CASE("local tf-idf similarity") {
  CHECK(embed_similarity("adder", "multiplier", EmbeddingProvider::LocalTfidf) == 0.0);
  CHECK(embed_similarity("a ripple adder", "a ripple adder", EmbeddingProvider::LocalTfidf) == 1.0);
  TfidfModel m({"a b", "a c", "d"});
  CHECK(m.idf("a") == doctest::Approx(std::log(4.0 / 3) + 1));
  CHECK(m.idf("zzz") == doctest::Approx(std::log(4.0) + 1));
  // "a b" vs "a c": shared term a only
  const double ia = m.idf("a"), ib = m.idf("b"), ic = m.idf("c");
  CHECK(m.cosine("a b", "a c") == doctest::Approx(ia * ia / std::sqrt((ia * ia + ib * ib) * (ia * ia + ic * ic))));
}

TEST_CASE("remote embeddings through the mock endpoint") {
  pred::MockLlmConfig mc;
  mc.embeddings["x"] = {1, 0, 1};
  mc.embeddings["y"] = {1, 1, 0};
  pred::MockLlmServer server(mc);
  server.start();
  pred::LlmClient client(mock_endpoint(server));
  // (1*1 + 0*1 + 1*0) / (sqrt 2 * sqrt 2)
  CHECK(embed_similarity("x", "y", EmbeddingProvider::Remote, &client) == doctest::Approx(0.5));
  CHECK_THROWS_WITH_AS(embed_similarity("x", "y", EmbeddingProvider::Remote, nullptr),
                       doctest::Contains("eval.ProviderUnavailable"), Error);
  auto cfg = mock_endpoint(server);
  cfg.base_url = "http://127.0.0.1:1";
  cfg.attempts = 1;
  pred::LlmClient dead(cfg);
  CHECK_THROWS_WITH_AS(embed_similarity("x", "y", EmbeddingProvider::Remote, &dead),
                       doctest::Contains("eval.ProviderUnavailable"), Error);
}

TEST_CASE("gpt_score parses and clamps the judge reply") {
  CHECK(parse_judgment("0.62") == doctest::Approx(0.62));
  CHECK(parse_judgment("Score: 1.3") == 1.0);
  CHECK(parse_judgment("-2") == 0.0);
  CHECK(parse_judgment("about .5 overall") == doctest::Approx(0.5));
  CHECK_THROWS_WITH_AS(parse_judgment("no idea"), doctest::Contains("eval.UnparseableJudgment"), Error);

  pred::MockLlmConfig mc;
  mc.judge_reply = "0.62";
  pred::MockLlmServer server(mc);
  server.start();
  pred::LlmClient client(mock_endpoint(server));
  CHECK(gpt_score("gen", "ref", client) == doctest::Approx(0.62));
  server.push_reply({200, "Score: 1.3", ""});
  CHECK(gpt_score("gen", "ref", client) == 1.0);
  server.push_reply({200, "cannot say", ""});
  CHECK_THROWS_WITH_AS(gpt_score("gen", "ref", client), doctest::Contains("eval.UnparseableJudgment"), Error);
  CHECK_THROWS_WITH_AS(gpt_score("g", "r", client, "no placeholders"), doctest::Contains("eval.BadTemplate"), Error);
}

TEST_CASE("pass_at_k") {
  CHECK(pass_at_k(5, 5, 1) == 1.0);
  CHECK(pass_at_k(5, 0, 5) == 0.0);
  CHECK(pass_at_k(5, 2, 1) == 0.4);
  for (int n = 1; n <= 8; ++n)
    for (int c = 0; c <= n; ++c)
      for (int k = 1; k <= n; ++k) {
        CAPTURE(n);
        CAPTURE(c);
        CAPTURE(k);
        const double p = pass_at_k(n, c, k);
        CHECK(std::abs(p - brute_pass_at_k(n, c, k)) < 1e-12);
        if (c < n) CHECK(pass_at_k(n, c + 1, k) >= p);
        if (k < n) CHECK(pass_at_k(n, c, k + 1) >= p);
      }
  CHECK(pass_at_k(100, 10, 5) == doctest::Approx(1 - (90.0 * 89 * 88 * 87 * 86) / (100.0 * 99 * 98 * 97 * 96)));
  CHECK_THROWS_WITH_AS(pass_at_k(5, 6, 1), doctest::Contains("eval.InvalidCounts"), Error);
  CHECK_THROWS_WITH_AS(pass_at_k(5, 1, 0), doctest::Contains("eval.InvalidCounts"), Error);
  CHECK_THROWS_WITH_AS(pass_at_k(5, 1, 6), doctest::Contains("eval.InvalidCounts"), Error);
}

// ----------------------------------------------------------- evaluator

TEST_CASE("rtl evaluator: width rules and operators") {
  auto out = run_rtl(R"(
module t;
  reg [3:0] a, b;
  reg [4:0] s;
  reg [7:0] w;
  reg [0:3] asc;
  reg c;
  integer i;
  initial begin
    a = 4'hF; b = 4'd1;
    s = a + b;              $display("%0d", s);
    w = a + b;              $display("%0d", w);
    c = (a + b) == 0;       $display("%0d", c);
    w = {a, b};             $display("%h", w);
    w = {2{a[1:0]}};        $display("%b", w);
    {c, s[3:0]} = 5'b10110; $display("%0d %0d", c, s[3:0]);
    w = 8'b1 << 3;          $display("%0d", w);
    w = ~a;                 $display("%0d", w);
    c = &a;                 $display("%0d", c);
    c = ^4'b0111;           $display("%0d", c);
    w = a - 5'd16;          $display("%0d", w);
    w = 7 / 0;              $display("%0d", w);
    asc = 4'b0001;          $display("%0d %0d", asc[3], asc[0]);
    w = 0;
    for (i = 0; i < 4; i = i + 1) w[i] = i[0];
    $display("%b", w);
    case (a[1:0])
      2'd0: w = 1;
      2'd3: w = 2;
      default: w = 3;
    endcase
    $display("%0d", w);
    w = a > b ? 8'd9 : 8'd8; $display("%0d", w);
    $display("%d|%5d|%x|%%", 8'd7, 3, 12'hab);
  end
endmodule
)");
  CHECK(out ==
        "16\n16\n0\nf1\n00001111\n1 6\n8\n240\n1\n1\n255\n255\n1 0\n00001010\n2\n9\n  7|    3|0ab|%\n");
}

TEST_CASE("rtl evaluator: hierarchy, parameters, combinational settling") {
  auto out = run_rtl(R"(
module inc #(parameter W = 2) (x, y);
  input [W-1:0] x;
  output [W-1:0] y;
  reg [W-1:0] y;
  always @(*) y = x + 1;
endmodule
module top;
  reg [5:0] a;
  wire [5:0] b, c;
  inc #(6) u0 (a, b);
  inc #(.W(6)) u1 (.x(b), .y(c));
  initial begin
    a = 6'd10; #1 $display("%0d %0d", b, c);
    a = 6'd63; #1 $display("%0d %0d", b, c);
    $finish;
    $display("unreachable");
  end
endmodule
)");
  CHECK(out == "11 12\n0 1\n");
}

TEST_CASE("rtl evaluator: errors") {
  CHECK_THROWS_WITH_AS(RtlDesign::compile({{"bad.v", "module m(input a, output y); assign y = a &; endmodule"}}),
                       doctest::Contains("eval.RtlSyntax: bad.v:1"), Error);
  CHECK_THROWS_WITH_AS(
      RtlDesign::compile({{"f.v", "module m(input clk, output reg q); always @(posedge clk) q <= ~q; endmodule"}}),
      doctest::Contains("clocked always"), Error);
  CHECK_THROWS_WITH_AS(RtlDesign::compile({{"u.v", "module m(output y); assign y = z; endmodule"}}),
                       doctest::Contains("undeclared identifier 'z'"), Error);
  CHECK_THROWS_WITH_AS(RtlDesign::compile({{"i.v", "module m; foo u(); endmodule"}}),
                       doctest::Contains("unknown module 'foo'"), Error);
  CHECK_THROWS_WITH_AS(RtlDesign::compile({{"w.v", "module m; reg [64:0] x; endmodule"}}),
                       doctest::Contains("wider than 64"), Error);
  CHECK_THROWS_WITH_AS(RtlDesign::compile({{"s.v", "module m; initial $display(\"x); endmodule"}}),
                       doctest::Contains("eval.RtlSyntax"), Error);
  auto loop = RtlDesign::compile({{"l.v", "module m; reg a; initial while (1) a = ~a; endmodule"}});
  CHECK_THROWS_WITH_AS(loop.run(60, 10000), doctest::Contains("eval.RtlRuntime"), Error);
  CHECK_THROWS_WITH_AS(loop.run(0.05, 1L << 40), doctest::Contains("eval.Timeout"), Error);
  auto osc = RtlDesign::compile({{"o.v", "module m; wire a; assign a = ~a; initial #1 $display(\"x\"); endmodule"}});
  CHECK_THROWS_WITH_AS(osc.run(), doctest::Contains("does not settle"), Error);
}

// ------------------------------------------------------------- testbench

TEST_CASE("run_testbench with the built-in evaluator") {
  auto d = make_design("adder", 4, "add4");
  SUBCASE("golden RTL passes its own testbench") {
    auto r = run_testbench(d.golden_rtl, d.testbench);
    CHECK(r.syntax_pass);
    CHECK(r.function_pass);
    CHECK(r.log.find("ALL_TESTS_PASSED") != std::string::npos);
  }
  SUBCASE("broken syntax") {
    auto r = run_testbench("module add4(input [3:0] a b); endmodule", d.testbench);
    CHECK_FALSE(r.syntax_pass);
    CHECK_FALSE(r.function_pass);
  }
  SUBCASE("off-by-one mutant") {
    auto mutant = d.golden_rtl;
    mutant.replace(mutant.find("a + b"), 5, "a + b + 1");
    auto r = run_testbench(mutant, d.testbench);
    CHECK(r.syntax_pass);
    CHECK_FALSE(r.function_pass);
    CHECK(r.log.find("TEST_FAILED") != std::string::npos);
  }
  SUBCASE("log is kept in the work directory") {
    auto dir = fs::temp_directory_path() / "netreason_tb_log";
    fs::remove_all(dir);
    SimConfig cfg;
    cfg.work_dir = dir;
    auto r = run_testbench(d.golden_rtl, d.testbench, cfg, "add4");
    CHECK(r.log_path == dir / "add4.log");
    CHECK(util::read_file(r.log_path) == r.log);
    fs::remove_all(dir);
  }
}

TEST_CASE("run_testbench with external commands") {
  const std::string rtl = "module m; endmodule\n";
  SimConfig cfg;
  cfg.timeout_s = 5;
  SUBCASE("placeholders and sentinels") {
    cfg.compile_cmd = "test -s {rtl} && test -s {tb} && cp {tb} {out}";
    cfg.run_cmd = "cat {out}";
    auto ok = run_testbench(rtl, "ALL_TESTS_PASSED\n", cfg);
    CHECK(ok.syntax_pass);
    CHECK(ok.function_pass);
    auto bad = run_testbench(rtl, "TEST_FAILED x\nALL_TESTS_PASSED\n", cfg);
    CHECK(bad.syntax_pass);
    CHECK_FALSE(bad.function_pass);
  }
  SUBCASE("compile failure") {
    cfg.compile_cmd = "echo ALL_TESTS_PASSED; exit 1";
    cfg.run_cmd = "echo ALL_TESTS_PASSED";
    auto r = run_testbench(rtl, "tb", cfg);
    CHECK_FALSE(r.syntax_pass);
    CHECK_FALSE(r.function_pass);
  }
  SUBCASE("missing simulator") {
    cfg.compile_cmd = "netreason-no-such-simulator {rtl}";
    CHECK_THROWS_WITH_AS(run_testbench(rtl, "tb", cfg), doctest::Contains("eval.SimulatorNotFound"), Error);
  }
  SUBCASE("timeout") {
    cfg.compile_cmd = "true";
    cfg.run_cmd = "sleep 10";
    cfg.timeout_s = 0.3;
    CHECK_THROWS_WITH_AS(run_testbench(rtl, "tb", cfg), doctest::Contains("eval.Timeout"), Error);
  }
}

// ----------------------------------------------------------------- corpus

namespace {

// Word-level semantics written out per template, independent of the
// generator's own reference_outputs.
std::map<std::string, std::uint64_t> oracle_semantics(const std::string& kind, int w, std::uint64_t a, std::uint64_t b,
                                                      std::uint64_t c, std::uint64_t s) {
  const std::uint64_t m = (1ULL << w) - 1, m2 = (1ULL << (2 * w)) - 1;
  auto cmp = [](std::uint64_t x, std::uint64_t y) {
    return std::map<std::string, std::uint64_t>{{"eq", x == y}, {"lt", x < y}, {"gt", x > y}};
  };
  if (kind == "adder") return {{"s", a + b}};
  if (kind == "subtractor") return {{"d", (a + (m + 1) - b) & m}};
  if (kind == "multiplier") return {{"p", a * b}};
  if (kind == "comparator") return cmp(a, b);
  if (kind == "mux") return {{"y", s ? b : a}};
  if (kind == "add_cmp") {
    auto r = cmp(a, b);
    r["s"] = a + b;
    return r;
  }
  if (kind == "addsub_mux") return {{"y", s ? (a + (m + 1) - b) & m : (a + b) & m}};
  if (kind == "mac") return {{"y", (a * b + c) & m2}};
  if (kind == "sub_cmp") {
    const auto d = (a + (m + 1) - b) & m;
    auto r = cmp(d, c);
    r["d"] = d;
    return r;
  }
  return {{"y", s ? a * b : a * (1ULL << w) + b}};
}

}  // namespace

TEST_CASE("4-bit ripple adder netlist matches a + b over all input pairs") {
  auto d = make_design("adder", 4, "rca4");
  netlist::Simulator sim(d.netlist, netlist::CellLibrary::builtin());
  for (std::uint64_t a = 0; a < 16; ++a)
    for (std::uint64_t b = 0; b < 16; ++b) {
      auto out = sim.run_words({{"a", a}, {"b", b}});
      CHECK((out["s"] & 15) == (a + b) % 16);
      CHECK(out["s"] == a + b);
    }
  for (const auto& [inst, l] : d.labels) CHECK(l == pred::FunctionLabel::Adder);
  CHECK(d.labels.size() == d.netlist.gates.size());
}

TEST_CASE("every template is functionally exact for widths 2..6") {
  for (const auto& kind : template_kinds()) {
    for (int w = 2; w <= std::min(6, max_width_for(kind)); ++w) {
      CAPTURE(kind);
      CAPTURE(w);
      auto d = make_design(kind, w, "dut");
      netlist::Simulator sim(d.netlist, netlist::CellLibrary::builtin());
      int bits = 0;
      for (const auto& s : d.inputs) bits += s.width;
      long mismatches = 0;
      for (std::uint64_t v = 0; v < (1ULL << bits); ++v) {
        std::map<std::string, std::uint64_t> in;
        int shift = 0;
        for (const auto& s : d.inputs) {
          in[s.name] = (v >> shift) & ((1ULL << s.width) - 1);
          shift += s.width;
        }
        const auto sel = in.count("sel") ? in["sel"] : in.count("op") ? in["op"] : 0;
        const auto expect = oracle_semantics(kind, w, in["a"], in["b"], in["c"], sel);
        const auto got = sim.run_words(in);
        for (const auto& [name, value] : expect) mismatches += got.at(name) != value;
        if (v % 7 == 0) CHECK(reference_outputs(d, in) == expect);
      }
      CHECK(mismatches == 0);
      CHECK(d.labels.size() == d.netlist.gates.size());
    }
  }
}

TEST_CASE("labels follow the source blocks") {
  auto single = make_design("comparator", 4, "c4");
  CHECK(label_set(single) == std::vector<pred::FunctionLabel>{pred::FunctionLabel::Comparator});
  auto composed = make_design("add_cmp", 4, "ac4");
  CHECK(label_set(composed).size() == 2);
  CHECK(label_set(make_design("addsub_mux", 3, "x")).size() == 3);
  CHECK(parse_labels(labels_text(composed.labels)) == composed.labels);
  CHECK_THROWS_WITH_AS(parse_labels("U1 adder extra\n"), doctest::Contains("eval.BadLabels"), Error);
  CHECK_THROWS_WITH_AS(make_design("divider", 4, "x"), doctest::Contains("eval.UnknownTemplate"), Error);
  CHECK_THROWS_WITH_AS(make_design("mac", 5, "x"), doctest::Contains("eval.BadWidth"), Error);
}

TEST_CASE("corpus generation is deterministic and every golden RTL passes") {
  CorpusConfig cfg;
  cfg.seed = 7;
  cfg.designs = 20;
  auto a = generate_synthetic_corpus(cfg);
  auto b = generate_synthetic_corpus(cfg);
  REQUIRE(a.size() == 20);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].netlist_text == b[i].netlist_text);
    CHECK(a[i].testbench == b[i].testbench);
    CHECK(a[i].labels == b[i].labels);
    auto r = run_testbench(a[i].golden_rtl, a[i].testbench);
    CHECK(r.function_pass);
    CHECK(a[i].netlist.name == a[i].name);
  }
  cfg.seed = 8;
  auto c = generate_synthetic_corpus(cfg);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs |= a[i].width != c[i].width;
  CHECK(differs);
}

TEST_CASE("wide designs use seeded random vectors") {
  auto d = make_design("sub_cmp", 6, "sc6");
  CHECK(d.testbench.find("1664525") != std::string::npos);
  CHECK(run_testbench(d.golden_rtl, d.testbench).function_pass);
  auto mutant = d.golden_rtl;
  mutant.replace(mutant.find("(a - b) < c"), 11, "(a - b) <= c");
  CHECK_FALSE(run_testbench(mutant, d.testbench).function_pass);
}

TEST_CASE("bundles round-trip through the directory layout") {
  auto root = fs::temp_directory_path() / "netreason_bundles";
  fs::remove_all(root);
  CorpusConfig cfg;
  cfg.designs = 3;
  auto designs = generate_synthetic_corpus(cfg);
  write_corpus(root, designs);
  for (int task = 1; task <= 3; ++task) {
    auto bundles = load_bundles(root / ("task" + std::to_string(task)));
    REQUIRE(bundles.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      auto expect = make_bundle(designs[i], task);
      CHECK(bundles[i].design == expect.design);
      CHECK(bundles[i].task == task);
      CHECK(bundles[i].netlist == expect.netlist);
      CHECK(bundles[i].prompt == expect.prompt);
      CHECK(bundles[i].golden == expect.golden);
      CHECK(bundles[i].testbench.has_value() == (task == 3));
    }
  }
  CHECK(fs::exists(root / "task3" / designs[0].name / "tb.v"));
  CHECK(fs::exists(root / "task1" / designs[0].name / "golden.txt"));
  CHECK(parse_labels(util::read_file(root / "labels" / (designs[0].name + ".txt"))) == designs[0].labels);
  util::write_file_atomic(root / "task1" / designs[0].name / "prompt.txt", "  \n");
  CHECK_THROWS_WITH_AS(load_bundles(root / "task1"), doctest::Contains("eval.BadBundle"), Error);
  fs::remove_all(root);
}

// ----------------------------------------------------------------- report

TEST_CASE("evaluate_run on ground truth, empty and mutated outputs") {
  CorpusConfig cfg;
  cfg.designs = 3;
  cfg.kinds = {"adder", "comparator", "mux"};
  auto designs = generate_synthetic_corpus(cfg);
  std::vector<BenchmarkBundle> t1, t3;
  RunOutputs gold1, gold3, empty;
  for (const auto& d : designs) {
    t1.push_back(make_bundle(d, 1));
    t3.push_back(make_bundle(d, 3));
    gold1[d.name] = {d.spec_text};
    gold3[d.name] = std::vector<std::string>(5, d.golden_rtl);
    empty[d.name] = {""};
  }
  auto r1 = evaluate_run(t1, gold1);
  CHECK(r1.mean.bleu == doctest::Approx(1.0));
  CHECK(r1.mean.rougeL.f1 == doctest::Approx(1.0));
  CHECK(r1.mean.emb_sim == doctest::Approx(1.0));
  CHECK_FALSE(r1.pass1.has_value());

  EvalConfig ec;
  ec.jobs = 3;
  auto r3 = evaluate_run(t3, gold3, ec);
  CHECK(r3.success_macro == 1.0);
  CHECK(r3.success_micro == 1.0);
  CHECK(*r3.pass1 == 1.0);
  CHECK(*r3.pass5 == 1.0);
  CHECK(r3.mean.bleu == doctest::Approx(1.0));

  auto e1 = evaluate_run(t1, empty);
  CHECK(e1.mean.bleu == 0.0);
  CHECK(e1.mean.rouge1.f1 == 0.0);
  CHECK(e1.mean.emb_sim == 0.0);
  auto e3 = evaluate_run(t3, empty);
  CHECK(e3.success_micro == 0.0);
  CHECK(e3.syntax_rate == 0.0);

  RunOutputs missing = gold1;
  missing.erase(designs[1].name);
  CHECK_THROWS_WITH_AS(evaluate_run(t1, missing), doctest::Contains("eval.MissingOutput"), Error);
}

TEST_CASE("aggregates equal hand-averaged per-design values") {
  CorpusConfig cfg;
  cfg.designs = 3;
  cfg.kinds = {"adder", "subtractor", "mux"};
  auto designs = generate_synthetic_corpus(cfg);
  std::vector<BenchmarkBundle> t3;
  for (const auto& d : designs) t3.push_back(make_bundle(d, 3));
  auto broken = [](std::string rtl) {
    auto p = rtl.find(" = ");
    return rtl.replace(p, 3, " = ~");
  };
  RunOutputs out;
  // 5/5, 2/5 and 1/2 correct
  out[designs[0].name] = std::vector<std::string>(5, designs[0].golden_rtl);
  out[designs[1].name] = {designs[1].golden_rtl, broken(designs[1].golden_rtl), designs[1].golden_rtl,
                          broken(designs[1].golden_rtl), "not verilog"};
  out[designs[2].name] = {broken(designs[2].golden_rtl), designs[2].golden_rtl};
  auto r = evaluate_run(t3, out);
  REQUIRE(r.designs.size() == 3);
  CHECK(r.designs[0].success_rate == 1.0);
  CHECK(r.designs[1].success_rate == doctest::Approx(0.4));
  CHECK(r.designs[2].success_rate == doctest::Approx(0.5));
  CHECK(r.success_macro == doctest::Approx((1.0 + 0.4 + 0.5) / 3));
  CHECK(r.success_micro == doctest::Approx(8.0 / 12));
  CHECK(r.syntax_rate == doctest::Approx(11.0 / 12));
  CHECK(*r.designs[1].pass1 == doctest::Approx(0.4));
  CHECK(*r.pass1 == doctest::Approx((1.0 + 0.4 + 0.5) / 3));
  CHECK(*r.pass5 == doctest::Approx((1.0 + 1.0) / 2));
  double bleu_sum = 0;
  for (const auto& d : r.designs) bleu_sum += d.mean.bleu;
  CHECK(r.mean.bleu == doctest::Approx(bleu_sum / 3));
  for (const auto& d : r.designs)
    for (const auto& s : d.samples) CHECK((!s.rtl->function_pass || s.rtl->syntax_pass));

  const auto csv = r.csv();
  CHECK(csv.find(designs[1].name + ",3,5,") != std::string::npos);
  CHECK(csv.find("\nALL,3,12,") != std::string::npos);
  CHECK(r.summary().find("Success rate (macro)") != std::string::npos);
  CHECK(r.summary().find("synthetic corpus") != std::string::npos);
  CHECK(r.json().find("\"success_micro\"") != std::string::npos);
}

TEST_CASE("judge scores flow into the report") {
  pred::MockLlmConfig mc;
  mc.judge_reply = "0.75";
  pred::MockLlmServer server(mc);
  server.start();
  pred::LlmClient client(mock_endpoint(server));
  auto d = make_design("adder", 3, "a3");
  EvalConfig ec;
  ec.client = &client;
  ec.judge = true;
  auto r = evaluate_run({make_bundle(d, 1)}, {{"a3", {d.spec_text, "something else"}}}, ec);
  REQUIRE(r.mean.gpt_score.has_value());
  CHECK(*r.mean.gpt_score == doctest::Approx(0.75));
}

TEST_CASE("outputs round-trip through sample files") {
  auto dir = fs::temp_directory_path() / "netreason_outputs";
  fs::remove_all(dir);
  std::vector<std::string> samples;
  for (int i = 0; i < 12; ++i) samples.push_back("s" + std::to_string(i));
  write_outputs(dir, "d0001", samples, ".txt");
  auto loaded = load_outputs(dir);
  CHECK(loaded.at("d0001") == samples);
  fs::remove_all(dir);
}

#include <benchmark/benchmark.h>

#include "netreason/align/decoder.hpp"
#include "netreason/align/tokenizer.hpp"
#include "netreason/encoder/encoder.hpp"
#include "netreason/eval/corpus.hpp"
#include "netreason/eval/metrics.hpp"
#include "netreason/eval/testbench.hpp"
#include "netreason/netlist/tag_graph.hpp"

using namespace netreason;

namespace {

const netlist::CellLibrary& lib() { return netlist::CellLibrary::builtin(); }

const eval::CorpusDesign& design(int width) {
  static std::map<int, eval::CorpusDesign> cache;
  auto it = cache.find(width);
  if (it == cache.end()) it = cache.emplace(width, eval::make_design("addsub_mux", width, "bench")).first;
  return it->second;
}

void BM_ParseNetlist(benchmark::State& state) {
  const auto& text = design(static_cast<int>(state.range(0))).netlist_text;
  for (auto _ : state) benchmark::DoNotOptimize(netlist::parse_netlist(text, lib()));
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseNetlist)->Arg(4)->Arg(16);

void BM_BuildTagGraph(benchmark::State& state) {
  const auto& n = design(static_cast<int>(state.range(0))).netlist;
  for (auto _ : state) benchmark::DoNotOptimize(netlist::build_tag_graph(n, lib()));
}
BENCHMARK(BM_BuildTagGraph)->Arg(4)->Arg(16);

void BM_Encode(benchmark::State& state) {
  const auto g = encoder::GraphInput::from(netlist::build_tag_graph(design(16).netlist, lib()));
  encoder::EncoderConfig cfg;
  cfg.dim = static_cast<int>(state.range(0));
  encoder::Encoder enc(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(enc.encode(g));
}
BENCHMARK(BM_Encode)->Arg(64)->Arg(256);

void BM_DecoderForward(benchmark::State& state) {
  align::DecoderConfig cfg;
  align::ToyDecoder dec(cfg);
  std::vector<int> tokens(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < tokens.size(); ++i) tokens[i] = static_cast<int>(i % align::Vocab::kBytes);
  const Eigen::RowVectorXd slot = Eigen::RowVectorXd::Zero(cfg.d_model);
  for (auto _ : state) benchmark::DoNotOptimize(dec.logits(tokens, 1, slot));
}
BENCHMARK(BM_DecoderForward)->Arg(64)->Arg(256);

void BM_Bleu(benchmark::State& state) {
  const auto& d = design(8);
  for (auto _ : state) benchmark::DoNotOptimize(eval::bleu(d.impl_text, d.spec_text));
}
BENCHMARK(BM_Bleu);

void BM_Testbench(benchmark::State& state) {
  const auto& d = design(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eval::run_testbench(d.golden_rtl, d.testbench));
}
BENCHMARK(BM_Testbench)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

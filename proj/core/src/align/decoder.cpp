#include "netreason/align/decoder.hpp"

#include <cmath>
#include <random>

#include "netreason/align/tokenizer.hpp"
#include "netreason/error.hpp"

namespace netreason::align {

namespace {

std::string block(const char* what, int b) { return std::string("dec.") + what + "." + std::to_string(b); }

void fill_uniform(nn::Param& p, std::mt19937_64& rng, double bound) {
  std::uniform_real_distribution<double> u(-bound, bound);
  for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] = u(rng);
}

}  // namespace

ToyDecoder::ToyDecoder(DecoderConfig cfg) : cfg_(cfg) {
  const int d = cfg_.d_model;
  if (d < 1 || cfg_.layers < 1 || cfg_.heads < 1 || cfg_.context < 1)
    fail("align.BadConfig", "decoder dimensions must be positive");
  if (d % cfg_.heads != 0) fail("align.BadConfig", "d_model must be divisible by heads");
  std::mt19937_64 rng(cfg_.seed);
  const double scale = 1.0 / std::sqrt(d);
  fill_uniform(params_.add("dec.tok", Vocab::kSize, d), rng, 0.1);
  fill_uniform(params_.add("dec.pos", cfg_.context, d), rng, 0.02);
  for (int b = 0; b < cfg_.layers; ++b) {
    params_.add(block("ln1_g", b), 1, d).value.setOnes();
    params_.add(block("ln1_b", b), 1, d);
    for (const char* w : {"wq", "wk", "wv", "wo"}) fill_uniform(params_.add(block(w, b), d, d), rng, scale);
    params_.add(block("ln2_g", b), 1, d).value.setOnes();
    params_.add(block("ln2_b", b), 1, d);
    fill_uniform(params_.add(block("w1", b), d, 4 * d), rng, scale);
    params_.add(block("b1", b), 1, 4 * d);
    fill_uniform(params_.add(block("w2", b), 4 * d, d), rng, 0.5 * scale);
    params_.add(block("b2", b), 1, d);
  }
  params_.add("dec.lnf_g", 1, d).value.setOnes();
  params_.add("dec.lnf_b", 1, d);
  if (!cfg_.tied_output) fill_uniform(params_.add("dec.out", d, Vocab::kSize), rng, scale);
  params_.add("dec.out_b", 1, Vocab::kSize);
}

nn::Var ToyDecoder::use(nn::Tape& tape, const std::string& name, bool track) const {
  const auto& p = params_.at(name);
  return track ? tape.param(const_cast<nn::Param&>(p)) : tape.constant(p.value);
}

nn::Var ToyDecoder::embed(nn::Tape& tape, const std::vector<int>& tokens, int graph_slot, nn::Var slot_value,
                          bool track) const {
  const int n = static_cast<int>(tokens.size());
  if (n == 0) fail("align.EmptySequence", "no tokens to embed");
  if (n > cfg_.context)
    fail("align.ContextOverflow",
         "sequence of " + std::to_string(n) + " tokens exceeds context " + std::to_string(cfg_.context));
  for (int t : tokens)
    if (t < 0 || t >= Vocab::kSize) fail("align.BadToken", "token id " + std::to_string(t));
  auto table = use(tape, "dec.tok", track);
  nn::Var tok;
  if (graph_slot < 0) {
    tok = tape.gather_rows(table, tokens);
  } else {
    if (graph_slot >= n) fail("align.BadGraphSlot", "graph slot outside the sequence");
    if (tape.value(slot_value).rows() != 1 || tape.value(slot_value).cols() != cfg_.d_model)
      fail("align.ShapeMismatch", "graph token width " + std::to_string(tape.value(slot_value).cols()) +
                                      " != d_model " + std::to_string(cfg_.d_model));
    std::vector<nn::Var> parts;
    if (graph_slot > 0) parts.push_back(tape.gather_rows(table, {tokens.begin(), tokens.begin() + graph_slot}));
    parts.push_back(slot_value);
    if (graph_slot + 1 < n) parts.push_back(tape.gather_rows(table, {tokens.begin() + graph_slot + 1, tokens.end()}));
    tok = tape.concat_rows(parts);
  }
  std::vector<int> positions(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) positions[static_cast<std::size_t>(i)] = i;
  return tape.add(tok, tape.gather_rows(use(tape, "dec.pos", track), std::move(positions)));
}

nn::Var ToyDecoder::forward(nn::Tape& tape, nn::Var x, bool track) const {
  const auto rows = tape.value(x).rows();
  if (rows > cfg_.context)
    fail("align.ContextOverflow",
         "sequence of " + std::to_string(rows) + " tokens exceeds context " + std::to_string(cfg_.context));
  if (tape.value(x).cols() != cfg_.d_model) fail("align.ShapeMismatch", "input width differs from d_model");
  const int dh = cfg_.d_model / cfg_.heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
  auto h = x;
  for (int b = 0; b < cfg_.layers; ++b) {
    auto a = tape.layer_norm(h, use(tape, block("ln1_g", b), track), use(tape, block("ln1_b", b), track));
    auto q = tape.matmul(a, use(tape, block("wq", b), track));
    auto k = tape.matmul(a, use(tape, block("wk", b), track));
    auto v = tape.matmul(a, use(tape, block("wv", b), track));
    std::vector<nn::Var> heads;
    for (int hd = 0; hd < cfg_.heads; ++hd) {
      auto qh = tape.slice_cols(q, hd * dh, dh);
      auto kh = tape.slice_cols(k, hd * dh, dh);
      auto vh = tape.slice_cols(v, hd * dh, dh);
      auto p = tape.causal_softmax(tape.scale(tape.matmul_nt(qh, kh), inv_sqrt));
      heads.push_back(tape.matmul(p, vh));
    }
    h = tape.add(h, tape.matmul(tape.concat_cols(heads), use(tape, block("wo", b), track)));
    auto f = tape.layer_norm(h, use(tape, block("ln2_g", b), track), use(tape, block("ln2_b", b), track));
    f = tape.gelu(tape.add_row(tape.matmul(f, use(tape, block("w1", b), track)), use(tape, block("b1", b), track)));
    f = tape.add_row(tape.matmul(f, use(tape, block("w2", b), track)), use(tape, block("b2", b), track));
    h = tape.add(h, f);
  }
  h = tape.layer_norm(h, use(tape, "dec.lnf_g", track), use(tape, "dec.lnf_b", track));
  auto logits = cfg_.tied_output ? tape.matmul_nt(h, use(tape, "dec.tok", track))
                                 : tape.matmul(h, use(tape, "dec.out", track));
  return tape.add_row(logits, use(tape, "dec.out_b", track));
}

nn::Matrix ToyDecoder::logits(const std::vector<int>& tokens, int graph_slot,
                              const Eigen::RowVectorXd& slot_value) const {
  nn::Tape tape;
  auto slot = tape.constant(graph_slot >= 0 ? nn::Matrix(slot_value) : nn::Matrix::Zero(1, cfg_.d_model));
  return tape.value(forward(tape, embed(tape, tokens, graph_slot, slot, false), false));
}

}  // namespace netreason::align

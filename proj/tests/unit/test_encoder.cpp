#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "netreason/encoder/encoder.hpp"
#include "netreason/encoder/features.hpp"
#include "netreason/error.hpp"
#include "netreason/netlist/netlist.hpp"
#include "support/random_netlist.hpp"

using namespace netreason;
using namespace netreason::encoder;
using netlist::CellLibrary;

namespace {

const CellLibrary& lib() { return CellLibrary::builtin(); }

netlist::TagGraph graph_of(const std::string& text) {
  return netlist::build_tag_graph(netlist::parse_netlist(text, lib()), lib());
}

const char* kAnd = "module m(input a,b, output y); AND2 g1(.A(a),.B(b),.Y(y)); endmodule";

netlist::TagNode gate_node(const char* cell, std::vector<std::pair<std::string, std::string>> pins) {
  netlist::Gate g{"u", cell, std::move(pins)};
  netlist::TagNode n;
  n.kind = netlist::NodeKind::Gate;
  n.cell = cell;
  n.instance = "u";
  n.expr = netlist::derive_gate_expr(g, lib());
  return n;
}

// Permutes node ids: new id = perm[old id].
netlist::TagGraph permute(const netlist::TagGraph& g, const std::vector<int>& perm) {
  netlist::TagGraph out;
  out.nodes.resize(g.nodes.size());
  for (const auto& n : g.nodes) {
    auto copy = n;
    copy.id = perm[static_cast<std::size_t>(n.id)];
    out.nodes[static_cast<std::size_t>(copy.id)] = copy;
  }
  for (const auto& e : g.edges)
    out.edges.push_back({perm[static_cast<std::size_t>(e.src)], perm[static_cast<std::size_t>(e.dst)]});
  std::reverse(out.edges.begin(), out.edges.end());
  return out;
}

}  // namespace

TEST_CASE("featurize gate and input nodes") {
  auto g = graph_of(kAnd);
  auto gate = featurize(g.nodes[2]);
  CHECK(gate(FeatureLayout::kAnd) == 1);
  CHECK(gate(FeatureLayout::kDepth) == 1);
  CHECK(gate(FeatureLayout::kSupport) == 2);
  CHECK(gate(FeatureLayout::kind_begin() + 1) == 1);

  auto pi = featurize(g.nodes[0]);
  for (int k : {FeatureLayout::kNot, FeatureLayout::kAnd, FeatureLayout::kOr, FeatureLayout::kXor})
    CHECK(pi(k) == 0);
  CHECK(pi(FeatureLayout::kind_begin() + 0) == 1);
  CHECK(pi.sum() == 2);  // support 1 plus the PI flag
  CHECK(FeatureLayout::size() == 51);
}

TEST_CASE("NAND2 and AND2 feature vectors differ only in inversion-related slots") {
  auto nand = featurize(gate_node("NAND2", {{"A", "a"}, {"B", "b"}, {"Y", "y"}}));
  auto and2 = featurize(gate_node("AND2", {{"A", "a"}, {"B", "b"}, {"Y", "y"}}));
  std::set<int> diff;
  for (int i = 0; i < FeatureLayout::size(); ++i)
    if (nand(i) != and2(i)) diff.insert(i);
  const auto& kinds = FeatureLayout::cell_kinds();
  int and_slot = FeatureLayout::kCellBegin +
                 static_cast<int>(std::find(kinds.begin(), kinds.end(), "AND2") - kinds.begin());
  int nand_slot = FeatureLayout::kCellBegin +
                  static_cast<int>(std::find(kinds.begin(), kinds.end(), "NAND2") - kinds.begin());
  int sig_and = FeatureLayout::signature_begin() + signature_bucket(netlist::BoolExpr::parse("a & b"));
  int sig_nand = FeatureLayout::signature_begin() + signature_bucket(netlist::BoolExpr::parse("!(a & b)"));
  std::set<int> expected{FeatureLayout::kNot, FeatureLayout::kDepth, and_slot, nand_slot};
  if (sig_and != sig_nand) expected.insert({sig_and, sig_nand});
  CHECK(diff == expected);
  CHECK(nand(FeatureLayout::kNot) - and2(FeatureLayout::kNot) == 1);
}

TEST_CASE("signature buckets ignore input naming and order") {
  auto a = gate_node("AOI21", {{"A", "p"}, {"B", "q"}, {"C", "r"}, {"Y", "y"}});
  auto b = gate_node("AOI21", {{"A", "zz"}, {"B", "c"}, {"C", "a0"}, {"Y", "y"}});
  CHECK(featurize(a) == featurize(b));
  CHECK(signature_bucket(netlist::BoolExpr::parse("(x & !y) | z")) ==
        signature_bucket(netlist::BoolExpr::parse("(!k & j) | m")));
}

TEST_CASE("edge-free graph with identical features embeds every node the same") {
  auto g = graph_of("module m(input a, b, c);\nendmodule\n");
  Encoder enc({});
  auto emb = enc.encode(g);
  for (Eigen::Index i = 1; i < emb.node_embeddings.rows(); ++i)
    CHECK((emb.node_embeddings.row(i) - emb.node_embeddings.row(0)).norm() < 1e-14);
  CHECK((emb.graph_embedding - emb.node_embeddings.row(0)).norm() < 1e-15);
}

TEST_CASE("property: embeddings are permutation equivariant and the pooled vector invariant") {
  std::mt19937_64 rng(21);
  Encoder enc({});
  for (int trial = 0; trial < 20; ++trial) {
    auto n = testsupport::random_netlist(rng, lib(), {3, 25, true});
    auto g = netlist::build_tag_graph(n, lib());
    std::vector<int> perm(g.nodes.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto a = enc.encode(g);
    auto b = enc.encode(permute(g, perm));
    CHECK((a.graph_embedding - b.graph_embedding).cwiseAbs().maxCoeff() < 1e-12);
    for (std::size_t i = 0; i < perm.size(); ++i)
      CHECK((a.node_embeddings.row(static_cast<Eigen::Index>(i)) -
             b.node_embeddings.row(perm[i]))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
  }
}

TEST_CASE("encode is bitwise deterministic") {
  auto g = graph_of(kAnd);
  Encoder enc({});
  auto a = enc.encode(g), b = enc.encode(g);
  CHECK(a.node_embeddings == b.node_embeddings);
  CHECK(a.graph_embedding == b.graph_embedding);
}

TEST_CASE("one-round forward pass with hand-set weights") {
  auto g = graph_of(kAnd);
  EncoderConfig cfg;
  cfg.layers = 1;
  cfg.dim = 64;
  Encoder enc(cfg);
  const int f = FeatureLayout::size();
  enc.params().at("enc.w_self.0").value = Eigen::MatrixXd::Identity(f, 64);
  enc.params().at("enc.w_in.0").value = Eigen::MatrixXd::Identity(f, 64);
  enc.params().at("enc.w_out.0").value.setZero();
  enc.params().at("enc.bias.0").value.setZero();
  auto x = featurize_graph(g);
  // nodes: 0 a, 1 b, 2 AND (reads a, b), 3 y (reads AND)
  Eigen::MatrixXd pre = Eigen::MatrixXd::Zero(4, 64);
  pre.leftCols(f).row(0) = x.row(0);
  pre.leftCols(f).row(1) = x.row(1);
  pre.leftCols(f).row(2) = x.row(2) + x.row(0) + x.row(1);
  pre.leftCols(f).row(3) = x.row(3) + x.row(2);
  Eigen::RowVectorXd expected = pre.array().tanh().matrix().colwise().mean();
  auto emb = enc.encode(g);
  CHECK((emb.graph_embedding - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("encoder gradients match finite differences") {
  std::mt19937_64 rng(22);
  EncoderConfig cfg;
  cfg.dim = 8;
  cfg.layers = 2;
  cfg.init_bound = 0.3;
  Encoder enc(cfg);
  auto g = GraphInput::from(graph_of(kAnd));
  Eigen::RowVectorXd probe = Eigen::RowVectorXd::LinSpaced(8, -1.0, 1.0);
  CHECK(encoder_grad_check(g, enc, probe) < 1e-4);

  auto n = testsupport::random_netlist(rng, lib(), {6, 12, true});
  auto rg = GraphInput::from(netlist::build_tag_graph(n, lib()));
  Eigen::RowVectorXd rprobe = Eigen::RowVectorXd::Random(8);
  CHECK(encoder_grad_check(rg, enc, rprobe) < 1e-3);
}

TEST_CASE("zero weights give zero gradients to weights fed by dead activations") {
  EncoderConfig cfg;
  cfg.dim = 8;
  cfg.layers = 2;
  Encoder enc(cfg);
  for (auto* p : enc.params().all()) p->value.setZero();
  auto g = GraphInput::from(graph_of(kAnd));
  Eigen::RowVectorXd probe = Eigen::RowVectorXd::Ones(8);
  enc.params().zero_grad();
  nn::Tape t;
  t.backward(t.matmul_nt(t.mean_rows(enc.forward(t, g)), t.constant(probe)));
  // layer-0 output is tanh(0) = 0, so layer-1 weights see zero inputs
  CHECK(enc.params().at("enc.w_self.1").grad.norm() == 0.0);
  CHECK(enc.params().at("enc.w_in.1").grad.norm() == 0.0);
  CHECK(enc.params().at("enc.bias.1").grad.norm() > 0.0);
  CHECK(encoder_grad_check(g, enc, probe) < 1e-4);
}

TEST_CASE("features-only mode freezes zeroed neighbour weights") {
  EncoderConfig cfg;
  cfg.message_passing = false;
  Encoder enc(cfg);
  CHECK(enc.params().at("enc.w_in.0").value.norm() == 0.0);
  CHECK_FALSE(enc.params().at("enc.w_in.0").trainable);
  CHECK(enc.params().at("enc.w_self.0").trainable);
  enc.set_trainable(true);
  CHECK_FALSE(enc.params().at("enc.w_out.2").trainable);
}

TEST_CASE("shape mismatch on wrong feature width") {
  Encoder enc({});
  GraphInput g;
  g.features = Eigen::MatrixXd::Zero(2, 3);
  CHECK_THROWS_WITH_AS(enc.encode(g), doctest::Contains("ShapeMismatch"), Error);
}

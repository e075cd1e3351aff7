#include <random>
#include <set>

#include "doctest.h"
#include "netreason/error.hpp"
#include "netreason/netlist/netlist.hpp"
#include "netreason/netlist/subcircuit.hpp"
#include "netreason/netlist/tag_graph.hpp"
#include "support/random_netlist.hpp"

using namespace netreason::netlist;
using netreason::Error;

namespace {

const char* kAndModule = "module m(input a,b, output y); AND2 g1(.A(a),.B(b),.Y(y)); endmodule";

const CellLibrary& lib() { return CellLibrary::builtin(); }

std::string error_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "none";
}

}  // namespace

TEST_CASE("parse minimal instance") {
  auto n = parse_netlist(kAndModule, lib());
  CHECK(n.name == "m");
  CHECK(n.gates.size() == 1);
  CHECK(n.ports.size() == 3);
  CHECK(n.source_text == kAndModule);
  CHECK(n.gates[0].net("A") == "a");
  CHECK(n.gates[0].net("Y") == "y");
}

TEST_CASE("comments are ignored but kept in source text") {
  std::string text =
      "module m(input a,b, output y); // func: adder\n"
      "/* block\n comment */ AND2 g1(.A(a),.B(b),.Y(y)); // func: adder\n"
      "endmodule // func: adder\n";
  auto n = parse_netlist(text, lib());
  CHECK(n.structurally_equal(parse_netlist(kAndModule, lib())));
  CHECK(n.source_text == text);
}

TEST_CASE("non-ANSI headers and vector ports are bit-blasted") {
  auto n = parse_netlist(
      "module v(a, y);\n input [1:0] a;\n output y;\n wire t;\n"
      " XOR2 x0(.A(a[0]), .B(a[1]), .Y(t));\n INV i0(.A(t), .Y(y));\nendmodule\n",
      lib());
  CHECK(n.input_bits() == std::vector<std::string>{"a[0]", "a[1]"});
  CHECK(n.nets() == std::vector<std::string>{"a[0]", "a[1]", "y", "t"});
  CHECK(extract_io_signals(n) == "inputs: a[1:0]; outputs: y");
}

TEST_CASE("parser error paths") {
  CHECK(error_code([] { parse_netlist("module m(input a, output y); FOO u(.A(a),.Y(y)); endmodule", lib()); }) ==
        "netlist.UnknownCell");
  CHECK(error_code([] {
          parse_netlist("module m(input a, output y); INV u1(.A(a),.Y(y)); INV u2(.A(a),.Y(y)); endmodule", lib());
        }) == "netlist.MultipleDrivers");
  CHECK(error_code([] { parse_netlist("module m(input a, output y); INV u1(.A(zz),.Y(y)); endmodule", lib()); }) ==
        "netlist.UndeclaredNet");
  CHECK(error_code([] { parse_netlist("module m(input a, output y); INV u1(.A(a) .Y(y)); endmodule", lib()); }) ==
        "netlist.SyntaxError");
  CHECK(error_code([] { parse_netlist("module m(input a, output y); INV u1(.A(a)); endmodule", lib()); }) ==
        "netlist.PinMismatch");
  CHECK(error_code([] { parse_netlist("module m(input a, input a, output y); endmodule", lib()); }) ==
        "netlist.SyntaxError");
  CHECK(error_code([] { parse_netlist("module m(input a, output y); INV u1(.A(a),.Y(a)); endmodule", lib()); }) ==
        "netlist.MultipleDrivers");
  try {
    parse_netlist("module m(input a,\n output y);\n INV u1(.A(a) .Y(y));\nendmodule", lib());
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("emit_verilog round-trips and is byte-stable") {
  auto n = parse_netlist(kAndModule, lib());
  auto text = emit_verilog(n);
  auto back = parse_netlist(text, lib());
  CHECK(back.structurally_equal(n));
  CHECK(emit_verilog(back) == text);
}

TEST_CASE("property: random netlists round-trip through emit and parse") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    auto n = testsupport::random_netlist(rng, lib());
    validate_netlist(n, lib());
    auto text = emit_verilog(n);
    auto back = parse_netlist(text, lib());
    CHECK(back.structurally_equal(n));
    CHECK(emit_verilog(back) == text);
  }
}

TEST_CASE("property: an injected second driver is rejected") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 50; ++i) {
    auto n = testsupport::random_netlist(rng, lib(), {2, 30, true});
    // point the last gate's output at the first gate's output net
    const auto& first = n.gates.front();
    auto target = first.pins.back().second;
    n.gates.back().pins.back().second = target;
    CHECK(error_code([&] { parse_netlist(emit_verilog(n), lib()); }) == "netlist.MultipleDrivers");
  }
}

TEST_CASE("TAGraph of the 1-gate AND module") {
  auto g = build_tag_graph(parse_netlist(kAndModule, lib()), lib());
  CHECK(g.nodes.size() == 4);
  CHECK(g.edges.size() == 3);
  CHECK(g.nodes[2].kind == NodeKind::Gate);
  CHECK(g.nodes[2].expr.to_string() == "a & b");
  CHECK(g.nodes[2].text() == "AND2 g1");
  CHECK(g.dump() ==
        "nodes 4\n0 pi PI a\n1 pi PI b\n2 gate AND2 a & b\n3 po PO y\nedges 3\n0 2\n1 2\n2 3\n");
}

TEST_CASE("register feedback loop yields an acyclic graph with one boundary node") {
  auto n = parse_netlist(
      "module t(input clk, output q);\n wire d;\n"
      " INV i0(.A(q), .Y(d));\n DFF r0(.D(d), .CK(clk), .Q(q));\nendmodule\n",
      lib());
  auto g = build_tag_graph(n, lib());
  int boundaries = 0;
  for (const auto& node : g.nodes) boundaries += node.kind == NodeKind::RegisterBoundary;
  CHECK(boundaries == 1);
  CHECK(g.nodes.size() == 5);  // clk, INV, DFF, REG boundary, q
  CHECK(g.topological_order().size() == g.nodes.size());
}

TEST_CASE("combinational loop is rejected with its path") {
  auto n = parse_netlist(
      "module t(input a, output y);\n wire p, q;\n"
      " AND2 g0(.A(a), .B(q), .Y(p));\n INV g1(.A(p), .Y(q));\n BUF g2(.A(q), .Y(y));\nendmodule\n",
      lib());
  try {
    build_tag_graph(n, lib());
    FAIL("expected CombinationalLoop");
  } catch (const Error& e) {
    CHECK(e.code() == "netlist.CombinationalLoop");
    std::string msg = e.what();
    CHECK(msg.find("g0") != std::string::npos);
    CHECK(msg.find("g1") != std::string::npos);
  }
}

TEST_CASE("property: graph counts match the text-scan oracle") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 100; ++i) {
    auto n = testsupport::random_netlist(rng, lib());
    auto text = emit_verilog(n);
    auto g = build_tag_graph(parse_netlist(text, lib()), lib());
    auto scan = testsupport::scan_counts(text, lib());
    CHECK(g.nodes.size() == scan.nodes);
    CHECK(g.edges.size() == scan.edges);
    std::size_t regs = 0;
    for (const auto& gate : n.gates) regs += lib().at(gate.cell).sequential ? 1 : 0;
    CHECK(g.nodes.size() == n.gates.size() + n.input_bits().size() + n.output_bits().size() + regs);
  }
}

TEST_CASE("split: small combinational design stays whole") {
  std::string text = "module c(input [4:0] a, output [4:0] y);\n wire [4:0] t;\n";
  for (int i = 0; i < 5; ++i) {
    auto s = std::to_string(i);
    text += " INV i" + s + "(.A(a[" + s + "]), .Y(t[" + s + "]));\n";
    text += " BUF b" + s + "(.A(t[" + s + "]), .Y(y[" + s + "]));\n";
  }
  text += "endmodule\n";
  auto n = parse_netlist(text, lib());
  REQUIRE(n.gates.size() == 10);
  auto r = split_subcircuits(n, lib(), 100);
  REQUIRE(r.subcircuits.size() == 1);
  CHECK(r.subcircuits[0].structurally_equal(n));
  CHECK(r.warnings.empty());
}

TEST_CASE("split: two independent cones with cap 1 partition the gates") {
  auto n = parse_netlist(
      "module c(input a, b, output y, z);\n INV g0(.A(a), .Y(y));\n INV g1(.A(b), .Y(z));\nendmodule\n",
      lib());
  auto r = split_subcircuits(n, lib(), 1);
  REQUIRE(r.subcircuits.size() == 2);
  CHECK(r.gate_sets[0] == std::vector<std::size_t>{0});
  CHECK(r.gate_sets[1] == std::vector<std::size_t>{1});
  CHECK(r.subcircuits[0].ports.size() == 2);
  CHECK(r.subcircuits[0].find_port("a") != nullptr);
  CHECK(r.subcircuits[0].find_port("y") != nullptr);
}

TEST_CASE("split: oversized single cone warns and stays whole") {
  auto n = parse_netlist(
      "module c(input a, output y);\n wire t;\n INV g0(.A(a), .Y(t));\n INV g1(.A(t), .Y(y));\nendmodule\n",
      lib());
  auto r = split_subcircuits(n, lib(), 1);
  CHECK(r.subcircuits.size() == 1);
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("property: split covers every gate and respects the cap") {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 60; ++i) {
    auto n = testsupport::random_netlist(rng, lib(), {5, 60, true});
    std::size_t cap = static_cast<std::size_t>(1 + i % 12);
    auto r = split_subcircuits(n, lib(), cap);
    std::set<std::size_t> covered;
    for (std::size_t k = 0; k < r.gate_sets.size(); ++k) {
      covered.insert(r.gate_sets[k].begin(), r.gate_sets[k].end());
      const auto& sub = r.subcircuits[k];
      CHECK(sub.gates.size() == r.gate_sets[k].size());
      // every subcircuit is a valid netlist on its own
      CHECK_NOTHROW(parse_netlist(emit_verilog(sub), lib()));
    }
    CHECK(covered.size() == n.gates.size());
    std::size_t oversized = 0;
    for (const auto& set : r.gate_sets) oversized += set.size() > cap ? 1 : 0;
    CHECK(oversized <= r.warnings.size());
  }
}

TEST_CASE("simulator evaluates word-level behaviour") {
  auto n = parse_netlist(
      "module ha(input a, b, output s, c);\n XOR2 x(.A(a), .B(b), .Y(s));\n AND2 n(.A(a), .B(b), .Y(c));\nendmodule\n",
      lib());
  Simulator sim(n, lib());
  for (std::uint64_t a = 0; a < 2; ++a)
    for (std::uint64_t b = 0; b < 2; ++b) {
      auto out = sim.run_words({{"a", a}, {"b", b}});
      CHECK(out["s"] + 2 * out["c"] == a + b);
    }
}

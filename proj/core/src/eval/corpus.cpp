#include "netreason/eval/corpus.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "netreason/align/instruction.hpp"
#include "netreason/error.hpp"
#include "netreason/util/io.hpp"

namespace netreason::eval {

namespace fs = std::filesystem;
using netlist::CellLibrary;
using netlist::Netlist;
using pred::FunctionLabel;

namespace {

using u64 = std::uint64_t;
using Bits = std::vector<std::string>;  // lsb first

u64 mask(int w) { return w >= 64 ? ~0ULL : (1ULL << w) - 1; }

// Emits library gates one at a time, each on a fresh wire, then renames
// the wires that feed output bits.
class Builder {
 public:
  explicit Builder(std::string name) : lib_(CellLibrary::builtin()) { n_.name = std::move(name); }

  Bits input(const std::string& name, int width) { return port(name, width, netlist::PortDir::Input); }
  void output(const std::string& name, int width) { port(name, width, netlist::PortDir::Output); }

  std::string gate(const std::string& cell, const Bits& ins, FunctionLabel label) {
    const auto& def = lib_.at(cell);
    if (def.inputs.size() != ins.size()) fail("eval.Internal", cell + " arity");
    netlist::Gate g;
    g.instance = "U" + std::to_string(n_.gates.size() + 1);
    g.cell = cell;
    for (std::size_t i = 0; i < ins.size(); ++i) g.pins.emplace_back(def.inputs[i], ins[i]);
    std::string out = "n" + std::to_string(++wire_count_);
    g.pins.emplace_back(def.output, out);
    wires_.insert(out);
    labels_[g.instance] = label;
    n_.gates.push_back(std::move(g));
    return out;
  }

  void drive(const std::string& port_name, const Bits& nets, FunctionLabel label) {
    const auto* p = n_.find_port(port_name);
    auto bits = p->bits();
    if (bits.size() != nets.size()) fail("eval.Internal", port_name + " width");
    for (std::size_t i = 0; i < bits.size(); ++i) drives_.push_back({bits[i], nets[i], label});
  }

  std::pair<Netlist, std::map<std::string, FunctionLabel>> finish() {
    std::map<std::string, std::string> rename;
    for (const auto& d : drives_) {
      if (wires_.contains(d.net) && !rename.contains(d.net)) {
        rename[d.net] = d.bit;
      } else {
        const std::string src = rename.contains(d.net) ? rename[d.net] : d.net;
        auto w = gate("BUF", {src}, d.label);
        rename[w] = d.bit;
      }
    }
    for (auto& g : n_.gates)
      for (auto& [formal, net] : g.pins) {
        auto it = rename.find(net);
        if (it != rename.end()) net = it->second;
      }
    for (const auto& w : wires_)
      if (!rename.contains(w)) live_.insert(w);
    // numeric wire order keeps emission stable and readable
    std::vector<std::pair<int, std::string>> order;
    for (const auto& w : live_) order.emplace_back(std::stoi(w.substr(1)), w);
    std::sort(order.begin(), order.end());
    for (const auto& [k, w] : order) n_.wires.push_back(netlist::Bus{w, false, 0, 0});
    netlist::validate_netlist(n_, lib_);
    return {n_, labels_};
  }

 private:
  Bits port(const std::string& name, int width, netlist::PortDir dir) {
    netlist::Port p;
    p.name = name;
    p.dir = dir;
    p.is_vector = width > 1;
    p.msb = width > 1 ? width - 1 : 0;
    p.lsb = 0;
    n_.ports.push_back(p);
    return p.bits();
  }

  struct Drive {
    std::string bit, net;
    FunctionLabel label;
  };
  const CellLibrary& lib_;
  Netlist n_;
  int wire_count_ = 0;
  std::set<std::string> wires_, live_;
  std::map<std::string, FunctionLabel> labels_;
  std::vector<Drive> drives_;
};

constexpr auto kAdd = FunctionLabel::Adder;
constexpr auto kSub = FunctionLabel::Subtractor;
constexpr auto kMul = FunctionLabel::Multiplier;
constexpr auto kCmp = FunctionLabel::Comparator;
constexpr auto kCtl = FunctionLabel::Control;

// Ripple-carry sum of a and b (b may be shorter), out_w result bits.
Bits ripple_add(Builder& g, const Bits& a, const Bits& b, std::size_t out_w) {
  Bits out;
  std::string carry;
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n && i < out_w; ++i) {
    const bool need_carry = i + 1 < out_w;
    Bits terms;
    if (i < a.size()) terms.push_back(a[i]);
    if (i < b.size()) terms.push_back(b[i]);
    if (!carry.empty()) terms.push_back(carry);
    if (terms.size() == 1) {
      out.push_back(terms[0]);
      carry.clear();
    } else if (terms.size() == 2) {
      out.push_back(g.gate("XOR2", {terms[0], terms[1]}, kAdd));
      carry = need_carry ? g.gate("AND2", {terms[0], terms[1]}, kAdd) : "";
    } else {
      auto p = g.gate("XOR2", {terms[0], terms[1]}, kAdd);
      out.push_back(g.gate("XOR2", {p, terms[2]}, kAdd));
      if (need_carry) {
        auto gen = g.gate("AND2", {terms[0], terms[1]}, kAdd);
        auto prop = g.gate("AND2", {p, terms[2]}, kAdd);
        carry = g.gate("OR2", {gen, prop}, kAdd);
      } else {
        carry.clear();
      }
    }
  }
  if (out_w > n) out.push_back(carry);
  return out;
}

// (a - b) mod 2^w through a ripple borrow chain.
Bits ripple_sub(Builder& g, const Bits& a, const Bits& b) {
  Bits out;
  std::string borrow;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool need = i + 1 < a.size();
    auto x = g.gate("XNOR2", {a[i], b[i]}, kSub);
    if (borrow.empty()) {
      out.push_back(g.gate("INV", {x}, kSub));
      if (need) {
        auto na = g.gate("INV", {a[i]}, kSub);
        borrow = g.gate("INV", {g.gate("NAND2", {na, b[i]}, kSub)}, kSub);
      }
    } else {
      out.push_back(g.gate("XNOR2", {x, borrow}, kSub));
      if (need) {
        auto na = g.gate("INV", {a[i]}, kSub);
        borrow = g.gate("INV", {g.gate("AOI22", {na, b[i], x, borrow}, kSub)}, kSub);
      }
    }
  }
  return out;
}

Bits array_multiply(Builder& g, const Bits& a, const Bits& b) {
  const std::size_t w = a.size() + b.size();
  std::vector<std::vector<std::string>> col(w);
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) col[i + j].push_back(g.gate("AND2", {a[j], b[i]}, kMul));
  Bits out;
  for (std::size_t k = 0; k < w; ++k) {
    auto& c = col[k];
    while (c.size() > 1) {
      const bool carry_out = k + 1 < w;
      if (c.size() >= 3) {
        auto x = c[0], y = c[1], z = c[2];
        c.erase(c.begin(), c.begin() + 3);
        c.push_back(g.gate("XOR3", {x, y, z}, kMul));
        if (carry_out) {
          auto m1 = g.gate("NAND2", {x, y}, kMul);
          auto m2 = g.gate("NAND2", {y, z}, kMul);
          auto m3 = g.gate("NAND2", {x, z}, kMul);
          col[k + 1].push_back(g.gate("NAND3", {m1, m2, m3}, kMul));
        }
      } else {
        auto x = c[0], y = c[1];
        c.erase(c.begin(), c.begin() + 2);
        c.push_back(g.gate("XOR2", {x, y}, kMul));
        if (carry_out) col[k + 1].push_back(g.gate("INV", {g.gate("NAND2", {x, y}, kMul)}, kMul));
      }
    }
    if (c.empty()) fail("eval.Internal", "empty product column");
    out.push_back(c[0]);
  }
  return out;
}

struct Compare {
  std::string eq, lt, gt;
};

Compare magnitude_compare(Builder& g, const Bits& a, const Bits& b) {
  Bits e;
  std::string gt, lt;
  for (std::size_t i = 0; i < a.size(); ++i) {
    e.push_back(g.gate("XNOR2", {a[i], b[i]}, kCmp));
    auto ga = g.gate("NOR2", {g.gate("INV", {a[i]}, kCmp), b[i]}, kCmp);
    auto lb = g.gate("NOR2", {a[i], g.gate("INV", {b[i]}, kCmp)}, kCmp);
    if (i == 0) {
      gt = ga;
      lt = lb;
    } else {
      gt = g.gate("INV", {g.gate("AOI21", {e[i], gt, ga}, kCmp)}, kCmp);
      lt = g.gate("INV", {g.gate("AOI21", {e[i], lt, lb}, kCmp)}, kCmp);
    }
  }
  Bits level = e;
  while (level.size() > 1) {
    Bits next;
    for (std::size_t i = 0; i < level.size();) {
      const std::size_t take = std::min<std::size_t>(4, level.size() - i);
      if (take == 1) {
        next.push_back(level[i]);
      } else {
        next.push_back(g.gate("AND" + std::to_string(take),
                              Bits(level.begin() + static_cast<std::ptrdiff_t>(i),
                                   level.begin() + static_cast<std::ptrdiff_t>(i + take)),
                              kCmp));
      }
      i += take;
    }
    level = std::move(next);
  }
  return {level[0], lt, gt};
}

Bits mux_bank(Builder& g, const Bits& when0, const Bits& when1, const std::string& sel) {
  Bits out;
  for (std::size_t i = 0; i < when0.size(); ++i) out.push_back(g.gate("MUX2", {when0[i], when1[i], sel}, kCtl));
  return out;
}

std::string io_list(const std::vector<IoSignal>& v) {
  std::string s;
  for (const auto& x : v) {
    if (!s.empty()) s += ", ";
    s += x.name + (x.width > 1 ? "[" + std::to_string(x.width - 1) + ":0]" : "");
  }
  return s;
}

std::string decl(const IoSignal& s) {
  return s.width > 1 ? "[" + std::to_string(s.width - 1) + ":0] " + s.name : s.name;
}

struct Text {
  std::string purpose, function, logic, control;
};

Text describe(const CorpusDesign& d) {
  const auto w = std::to_string(d.width);
  const auto w2 = std::to_string(2 * d.width);
  const std::string add_logic = "a " + w + "-bit ripple-carry adder whose bit slices use XOR gates for the sum and AND/OR gates for the carry";
  const std::string sub_logic = "a " + w + "-bit ripple-borrow subtractor with XNOR gates for the difference bits and AOI22/INV pairs propagating the borrow";
  const std::string mul_logic = "a " + w + "x" + w + " array multiplier in which AND gates form the partial products and XOR3 full adders with NAND majority carries reduce each column";
  const std::string cmp_logic = "a magnitude comparator that forms per-bit XNOR equality terms and NOR greater/less terms, chains the greater and less decisions from the least to the most significant bit through AOI21/INV stages, and ANDs the equality terms";
  const std::string no_ctl = "there is no data-dependent control; every output is a fixed function of the current inputs";
  const std::string cmp_fn = "eq is 1 when the operands are equal, lt when the first is smaller and gt when it is larger";
  const auto& k = d.kind;
  if (k == "adder")
    return {"an unsigned " + w + "-bit adder", "s equals a + b, with the carry out in the most significant bit of s",
            add_logic, no_ctl};
  if (k == "subtractor")
    return {"an unsigned " + w + "-bit subtractor", "d equals a - b modulo 2^" + w, sub_logic, no_ctl};
  if (k == "multiplier")
    return {"an unsigned " + w + "-bit multiplier", "p equals the full " + w2 + "-bit product a * b", mul_logic, no_ctl};
  if (k == "comparator")
    return {"an unsigned " + w + "-bit magnitude comparator", "for operands a and b, " + cmp_fn, cmp_logic, no_ctl};
  if (k == "mux")
    return {"a " + w + "-bit two-way multiplexer", "y equals b when sel is 1 and a when sel is 0",
            "a bank of " + w + " MUX2 cells, one per bit", "the select input sel steers every output bit between a and b"};
  if (k == "add_cmp")
    return {"an unsigned " + w + "-bit adder paired with a magnitude comparator",
            "s equals a + b with carry out, and for the same operands " + cmp_fn, add_logic + ", alongside " + cmp_logic,
            no_ctl};
  if (k == "addsub_mux")
    return {"an unsigned " + w + "-bit adder/subtractor",
            "y equals a - b when op is 1 and a + b when op is 0, both modulo 2^" + w,
            add_logic + " and " + sub_logic + " computed in parallel, followed by a bank of MUX2 cells",
            "the op input selects which of the two results drives y"};
  if (k == "mac")
    return {"an unsigned " + w + "-bit multiply-accumulate unit", "y equals a * b + c as a " + w2 + "-bit result",
            mul_logic + ", whose product feeds a " + w2 + "-bit ripple-carry adder with XOR sum gates and AND/OR carry gates",
            no_ctl};
  if (k == "sub_cmp")
    return {"an unsigned " + w + "-bit subtractor followed by a comparator",
            "d equals a - b modulo 2^" + w + ", and comparing d against c, " + cmp_fn, sub_logic + ", feeding " + cmp_logic,
            no_ctl};
  return {"an unsigned " + w + "-bit multiplier with a bypass path",
          "y equals a * b when sel is 1 and the concatenation {a, b} when sel is 0", mul_logic + ", followed by a bank of MUX2 cells",
          "the select input sel chooses between the product and the concatenated operands"};
}

std::string make_testbench(const CorpusDesign& d, std::uint64_t seed, int random_vectors) {
  std::ostringstream tb;
  int in_bits = 0;
  for (const auto& s : d.inputs) in_bits += s.width;
  const bool exhaustive = in_bits <= 12;
  tb << "`timescale 1ns/1ps\n";
  tb << "module tb;\n";
  for (const auto& s : d.inputs) tb << "  reg " << decl(s) << ";\n";
  for (const auto& s : d.outputs) tb << "  wire " << decl(s) << ";\n";
  for (const auto& s : d.outputs) tb << "  reg " << decl({"exp_" + s.name, s.width}) << ";\n";
  tb << "  integer errors;\n";
  if (exhaustive) {
    tb << "  integer ";
    for (std::size_t i = 0; i < d.inputs.size(); ++i) tb << (i ? ", " : "") << "i" << i;
    tb << ";\n";
  } else {
    tb << "  integer k;\n  reg [31:0] r;\n";
  }
  tb << "\n  " << d.name << " dut (";
  std::vector<IoSignal> all = d.inputs;
  all.insert(all.end(), d.outputs.begin(), d.outputs.end());
  for (std::size_t i = 0; i < all.size(); ++i) tb << (i ? ", " : "") << "." << all[i].name << "(" << all[i].name << ")";
  tb << ");\n\n";

  std::string fmt, args;
  for (const auto& s : d.inputs) {
    fmt += " " + s.name + "=%0d";
    args += ", " + s.name;
  }
  auto check = [&](const std::string& ind) {
    std::string c = ind + "#1;\n";
    for (const auto& s : d.outputs) c += ind + "exp_" + s.name + " = " + d.output_exprs.at(s.name) + ";\n";
    for (const auto& s : d.outputs) {
      c += ind + "if (" + s.name + " !== exp_" + s.name + ") begin\n";
      c += ind + "  errors = errors + 1;\n";
      c += ind + "  $display(\"TEST_FAILED " + s.name + ":" + fmt + " got=%0d expected=%0d\"" + args + ", " + s.name +
           ", exp_" + s.name + ");\n";
      c += ind + "end\n";
    }
    return c;
  };

  tb << "  initial begin\n    errors = 0;\n";
  if (exhaustive) {
    std::string ind = "    ";
    for (std::size_t i = 0; i < d.inputs.size(); ++i) {
      const auto v = "i" + std::to_string(i);
      tb << ind << "for (" << v << " = 0; " << v << " < " << (1ULL << d.inputs[i].width) << "; " << v << " = " << v
         << " + 1) begin\n";
      ind += "  ";
    }
    for (std::size_t i = 0; i < d.inputs.size(); ++i) tb << ind << d.inputs[i].name << " = i" << i << ";\n";
    tb << check(ind);
    for (std::size_t i = d.inputs.size(); i-- > 0;) {
      ind.resize(ind.size() - 2);
      tb << ind << "end\n";
    }
  } else {
    tb << "    r = 32'd" << (seed & 0xffffffffULL) << ";\n";
    tb << "    for (k = 0; k < " << random_vectors << "; k = k + 1) begin\n";
    for (const auto& s : d.inputs) {
      tb << "      r = r * 32'd1664525 + 32'd1013904223;\n";
      tb << "      " << s.name << " = r[31:16];\n";
    }
    tb << check("      ");
    tb << "    end\n";
  }
  tb << "    if (errors == 0) $display(\"" << "ALL_TESTS_PASSED" << "\");\n";
  tb << "    else $display(\"%0d mismatches\", errors);\n";
  tb << "    $finish;\n  end\nendmodule\n";
  return tb.str();
}

std::string make_rtl(const CorpusDesign& d) {
  std::ostringstream o;
  o << "module " << d.name << " (\n";
  std::vector<std::string> lines;
  for (const auto& s : d.inputs) lines.push_back("  input " + decl(s));
  for (const auto& s : d.outputs) lines.push_back("  output " + decl(s));
  for (std::size_t i = 0; i < lines.size(); ++i) o << lines[i] << (i + 1 < lines.size() ? ",\n" : "\n");
  o << ");\n";
  for (const auto& s : d.outputs) o << "  assign " << s.name << " = " << d.output_exprs.at(s.name) << ";\n";
  o << "endmodule\n";
  return o.str();
}

std::uint64_t mix(std::uint64_t seed, const std::string& s) { return util::fnv1a(s, seed ^ 0x9e3779b97f4a7c15ULL); }

}  // namespace

const std::vector<std::string>& template_kinds() {
  static const std::vector<std::string> k = {"adder", "subtractor", "multiplier", "comparator", "mux",
                                             "add_cmp", "addsub_mux", "mac", "sub_cmp", "mul_mux"};
  return k;
}

int max_width_for(const std::string& kind) {
  if (kind == "mac") return 4;
  if (kind == "multiplier" || kind == "mul_mux") return 6;
  return 16;
}

CorpusDesign make_design(const std::string& kind, int width, const std::string& name, std::uint64_t seed) {
  const auto& kinds = template_kinds();
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) fail("eval.UnknownTemplate", kind);
  if (width < 2 || width > max_width_for(kind))
    fail("eval.BadWidth", kind + " width " + std::to_string(width) + " outside 2.." + std::to_string(max_width_for(kind)));
  CorpusDesign d;
  d.name = name;
  d.kind = kind;
  d.width = width;
  const int w = width;
  Builder g(name);
  auto in = [&](const std::string& n, int bits) {
    d.inputs.push_back({n, bits});
    return g.input(n, bits);
  };
  auto out = [&](const std::string& n, int bits, const std::string& expr) {
    d.outputs.push_back({n, bits});
    d.output_exprs[n] = expr;
    g.output(n, bits);
  };
  auto cmp_outputs = [&](const std::string& lhs, const std::string& rhs) {
    out("eq", 1, lhs + " == " + rhs);
    out("lt", 1, lhs + " < " + rhs);
    out("gt", 1, lhs + " > " + rhs);
  };
  auto drive_cmp = [&](const Compare& c) {
    g.drive("eq", {c.eq}, kCmp);
    g.drive("lt", {c.lt}, kCmp);
    g.drive("gt", {c.gt}, kCmp);
  };
  const auto uw = static_cast<std::size_t>(w);

  if (kind == "adder") {
    auto a = in("a", w), b = in("b", w);
    out("s", w + 1, "a + b");
    g.drive("s", ripple_add(g, a, b, uw + 1), kAdd);
  } else if (kind == "subtractor") {
    auto a = in("a", w), b = in("b", w);
    out("d", w, "a - b");
    g.drive("d", ripple_sub(g, a, b), kSub);
  } else if (kind == "multiplier") {
    auto a = in("a", w), b = in("b", w);
    out("p", 2 * w, "a * b");
    g.drive("p", array_multiply(g, a, b), kMul);
  } else if (kind == "comparator") {
    auto a = in("a", w), b = in("b", w);
    cmp_outputs("a", "b");
    drive_cmp(magnitude_compare(g, a, b));
  } else if (kind == "mux") {
    auto a = in("a", w), b = in("b", w);
    auto sel = in("sel", 1);
    out("y", w, "sel ? b : a");
    g.drive("y", mux_bank(g, a, b, sel[0]), kCtl);
  } else if (kind == "add_cmp") {
    auto a = in("a", w), b = in("b", w);
    out("s", w + 1, "a + b");
    cmp_outputs("a", "b");
    g.drive("s", ripple_add(g, a, b, uw + 1), kAdd);
    drive_cmp(magnitude_compare(g, a, b));
  } else if (kind == "addsub_mux") {
    auto a = in("a", w), b = in("b", w);
    auto op = in("op", 1);
    out("y", w, "op ? a - b : a + b");
    auto sum = ripple_add(g, a, b, uw);
    auto diff = ripple_sub(g, a, b);
    g.drive("y", mux_bank(g, sum, diff, op[0]), kCtl);
  } else if (kind == "mac") {
    auto a = in("a", w), b = in("b", w), c = in("c", w);
    out("y", 2 * w, "a * b + c");
    g.drive("y", ripple_add(g, array_multiply(g, a, b), c, 2 * uw), kAdd);
  } else if (kind == "sub_cmp") {
    auto a = in("a", w), b = in("b", w), c = in("c", w);
    out("d", w, "a - b");
    out("eq", 1, "(a - b) == c");
    out("lt", 1, "(a - b) < c");
    out("gt", 1, "(a - b) > c");
    auto diff = ripple_sub(g, a, b);
    g.drive("d", diff, kSub);
    drive_cmp(magnitude_compare(g, diff, c));
  } else {  // mul_mux
    auto a = in("a", w), b = in("b", w);
    auto sel = in("sel", 1);
    out("y", 2 * w, "sel ? a * b : {a, b}");
    Bits cat = b;
    cat.insert(cat.end(), a.begin(), a.end());
    g.drive("y", mux_bank(g, cat, array_multiply(g, a, b), sel[0]), kCtl);
  }

  auto [net, labels] = g.finish();
  d.netlist_text = netlist::emit_verilog(net);
  d.netlist = netlist::parse_netlist(d.netlist_text, CellLibrary::builtin());
  d.labels = std::move(labels);

  const auto t = describe(d);
  const auto io = "inputs " + io_list(d.inputs) + "; outputs " + io_list(d.outputs);
  d.spec_text = "Interface: " + io + ".\nPurpose: module " + d.name + " is " + t.purpose + ".\nFunctionality: " +
                t.function + ".\nConstraints: purely combinational, unsigned operands, no clock or reset.\n";
  d.impl_text = "Combinational logic: the netlist implements " + t.logic +
                ".\nSequential behavior: none; the design has no registers, clock or reset.\nControl flow: " + t.control +
                ".\n";
  d.golden_rtl = make_rtl(d);
  d.testbench = make_testbench(d, mix(seed, name), 200);
  return d;
}

std::vector<CorpusDesign> generate_synthetic_corpus(const CorpusConfig& cfg) {
  if (cfg.designs < 0) fail("eval.BadConfig", "negative design count");
  if (cfg.min_width < 2 || cfg.max_width < cfg.min_width) fail("eval.BadConfig", "need 2 <= min_width <= max_width");
  const auto& kinds = cfg.kinds.empty() ? template_kinds() : cfg.kinds;
  std::mt19937_64 rng(cfg.seed);
  std::vector<CorpusDesign> out;
  for (int i = 0; i < cfg.designs; ++i) {
    const auto& kind = kinds[static_cast<std::size_t>(i) % kinds.size()];
    const int hi = std::min(cfg.max_width, max_width_for(kind));
    const int lo = std::min(cfg.min_width, hi);
    const int w = lo + static_cast<int>(rng() % static_cast<u64>(hi - lo + 1));
    char name[32];
    std::snprintf(name, sizeof name, "d%04d", i);
    auto d = make_design(kind, w, name, cfg.seed);
    if (cfg.random_vectors != 200) d.testbench = make_testbench(d, mix(cfg.seed, name), cfg.random_vectors);
    out.push_back(std::move(d));
  }
  return out;
}

std::map<std::string, std::uint64_t> reference_outputs(const CorpusDesign& d,
                                                       const std::map<std::string, std::uint64_t>& inputs) {
  auto get = [&](const char* n) {
    auto it = inputs.find(n);
    return it == inputs.end() ? 0ULL : it->second;
  };
  const int w = d.width;
  const u64 m = mask(w);
  const u64 a = get("a") & m, b = get("b") & m, c = get("c") & m;
  const u64 s1 = get("sel") & 1, op = get("op") & 1;
  std::map<std::string, u64> o;
  auto cmp = [&](u64 x, u64 y) {
    o["eq"] = x == y;
    o["lt"] = x < y;
    o["gt"] = x > y;
  };
  const auto& k = d.kind;
  if (k == "adder") o["s"] = a + b;
  else if (k == "subtractor") o["d"] = (a - b) & m;
  else if (k == "multiplier") o["p"] = a * b;
  else if (k == "comparator") cmp(a, b);
  else if (k == "mux") o["y"] = s1 ? b : a;
  else if (k == "add_cmp") {
    o["s"] = a + b;
    cmp(a, b);
  } else if (k == "addsub_mux") o["y"] = (op ? a - b : a + b) & m;
  else if (k == "mac") o["y"] = (a * b + c) & mask(2 * w);
  else if (k == "sub_cmp") {
    o["d"] = (a - b) & m;
    cmp(o["d"], c);
  } else if (k == "mul_mux") o["y"] = s1 ? a * b : (a << w) | b;
  else fail("eval.UnknownTemplate", k);
  return o;
}

std::vector<FunctionLabel> label_set(const CorpusDesign& d) {
  std::set<FunctionLabel> s;
  for (const auto& [inst, l] : d.labels) s.insert(l);
  return {s.begin(), s.end()};
}

std::string labels_text(const std::map<std::string, FunctionLabel>& labels) {
  std::string s;
  for (const auto& [inst, l] : labels) s += inst + " " + std::string(pred::to_string(l)) + "\n";
  return s;
}

std::map<std::string, FunctionLabel> parse_labels(std::string_view text) {
  std::map<std::string, FunctionLabel> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    auto t = util::trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream ls(t);
    std::string inst, label, extra;
    ls >> inst >> label;
    auto l = pred::parse_label(label);
    if (label.empty() || (ls >> extra) || !l)
      fail("eval.BadLabels", "line " + std::to_string(no) + ": expected '<instance> <label>'");
    out[inst] = *l;
  }
  return out;
}

BenchmarkBundle make_bundle(const CorpusDesign& d, int task) {
  BenchmarkBundle b;
  b.design = d.name;
  b.task = task;
  b.netlist = d.netlist_text;
  const auto io = "inputs " + io_list(d.inputs) + "; outputs " + io_list(d.outputs);
  switch (task) {
    case 1:
      b.prompt = align::instruction_template(align::Task::FuncDesc) + "\n";
      b.golden = d.spec_text;
      break;
    case 2:
      b.prompt = align::instruction_template(align::Task::ImplDetail) + "\n";
      b.golden = d.impl_text;
      break;
    case 3:
      b.prompt = "Reverse engineer this gate-level netlist into behavioral Verilog RTL with word-level operators. "
                 "Keep the module name " + d.name + " and the ports (" + io + ").\n";
      b.golden = d.golden_rtl;
      b.testbench = d.testbench;
      break;
    default: fail("eval.BadTask", "task must be 1, 2 or 3");
  }
  return b;
}

void write_bundle(const fs::path& dir, const BenchmarkBundle& b) {
  fs::create_directories(dir);
  util::write_file_atomic(dir / "netlist.v", b.netlist);
  util::write_file_atomic(dir / "prompt.txt", b.prompt);
  util::write_file_atomic(dir / (b.task == 3 ? "golden.v" : "golden.txt"), b.golden);
  if (b.testbench) util::write_file_atomic(dir / "tb.v", *b.testbench);
}

BenchmarkBundle read_bundle(const fs::path& dir) {
  auto need = [&](const fs::path& p) {
    if (!fs::exists(p)) fail("eval.BadBundle", p.string() + " is missing");
    auto s = util::read_file(p);
    if (util::trim(s).empty()) fail("eval.BadBundle", p.string() + " is empty");
    return s;
  };
  BenchmarkBundle b;
  b.design = dir.filename().string();
  b.netlist = need(dir / "netlist.v");
  b.prompt = need(dir / "prompt.txt");
  if (fs::exists(dir / "golden.v")) {
    b.task = 3;
    b.golden = need(dir / "golden.v");
    b.testbench = need(dir / "tb.v");
  } else {
    b.golden = need(dir / "golden.txt");
    b.task = b.prompt.find(align::instruction_template(align::Task::ImplDetail)) != std::string::npos ? 2 : 1;
  }
  return b;
}

std::vector<BenchmarkBundle> load_bundles(const fs::path& task_dir) {
  if (!fs::is_directory(task_dir)) fail("eval.BadBundle", task_dir.string() + " is not a directory");
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(task_dir))
    if (e.is_directory()) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  std::vector<BenchmarkBundle> out;
  for (const auto& d : dirs) out.push_back(read_bundle(d));
  return out;
}

void write_corpus(const fs::path& root, const std::vector<CorpusDesign>& designs) {
  nlohmann::json index = nlohmann::json::array();
  for (const auto& d : designs) {
    nlohmann::json labels = nlohmann::json::array();
    for (auto l : label_set(d)) labels.push_back(std::string(pred::to_string(l)));
    index.push_back({{"design", d.name}, {"kind", d.kind}, {"width", d.width}, {"gates", d.netlist.gates.size()},
                     {"labels", labels}});
    for (int task = 1; task <= 3; ++task)
      write_bundle(root / ("task" + std::to_string(task)) / d.name, make_bundle(d, task));
    util::write_file_atomic(root / "labels" / (d.name + ".txt"), labels_text(d.labels));
  }
  util::write_file_atomic(root / "designs.json", index.dump(2) + "\n");
}

}  // namespace netreason::eval

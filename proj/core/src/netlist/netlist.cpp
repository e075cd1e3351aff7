#include "netreason/netlist/netlist.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "netreason/error.hpp"
#include "netreason/util/verilog_lexer.hpp"

namespace netreason::netlist {

std::vector<std::string> Bus::bits() const {
  if (!is_vector) return {name};
  std::vector<std::string> out;
  const int step = msb >= lsb ? 1 : -1;
  for (int i = lsb;; i += step) {
    out.push_back(name + "[" + std::to_string(i) + "]");
    if (i == msb) break;
  }
  return out;
}

std::string Bus::range_text() const {
  if (!is_vector) return {};
  return "[" + std::to_string(msb) + ":" + std::to_string(lsb) + "]";
}

const std::string& Gate::net(std::string_view formal) const {
  for (const auto& [f, n] : pins)
    if (f == formal) return n;
  fail("netlist.PinMismatch", instance + " has no pin " + std::string(formal));
}

std::vector<std::string> Netlist::nets() const {
  std::vector<std::string> out;
  for (const auto& p : ports)
    for (auto& b : p.bits()) out.push_back(std::move(b));
  for (const auto& w : wires)
    for (auto& b : w.bits()) out.push_back(std::move(b));
  return out;
}

std::vector<std::string> Netlist::input_bits() const {
  std::vector<std::string> out;
  for (const auto& p : ports)
    if (p.dir == PortDir::Input)
      for (auto& b : p.bits()) out.push_back(std::move(b));
  return out;
}

std::vector<std::string> Netlist::output_bits() const {
  std::vector<std::string> out;
  for (const auto& p : ports)
    if (p.dir == PortDir::Output)
      for (auto& b : p.bits()) out.push_back(std::move(b));
  return out;
}

const Port* Netlist::find_port(std::string_view port_name) const {
  for (const auto& p : ports)
    if (p.name == port_name) return &p;
  return nullptr;
}

bool Netlist::structurally_equal(const Netlist& other) const {
  return name == other.name && ports == other.ports && gates == other.gates;
}

namespace {

using util::Token;
using util::TokenKind;

class NetlistParser {
 public:
  NetlistParser(std::string_view text, const CellLibrary& lib)
      : tokens_(util::lex_verilog(text, "netlist")), lib_(lib) {}

  Netlist parse() {
    expect_ident("module");
    n_.name = ident("module name");
    std::vector<std::string> header_names;
    if (accept("(")) {
      if (!accept(")")) {
        parse_port_list(header_names);
        expect(")");
      }
    }
    expect(";");
    while (!accept_ident("endmodule")) {
      if (peek().kind == TokenKind::End) error(peek(), "missing endmodule");
      parse_item();
    }
    if (peek().kind != TokenKind::End) error(peek(), "only one module per netlist is supported");
    for (const auto& h : header_names)
      if (n_.find_port(h) == nullptr) fail("netlist.UndeclaredNet", "port " + h + " has no direction");
    return std::move(n_);
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void error(const Token& t, const std::string& what) const {
    fail("netlist.SyntaxError", "line " + std::to_string(t.line) + ", col " +
                                    std::to_string(t.col) + ": " + what +
                                    (t.kind == TokenKind::End ? "" : " near '" + t.text + "'"));
  }

  bool accept(std::string_view sym) {
    if (peek().kind == TokenKind::Symbol && peek().text == sym) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(std::string_view sym) {
    if (!accept(sym)) error(peek(), "expected '" + std::string(sym) + "'");
  }
  bool accept_ident(std::string_view word) {
    if (peek().kind == TokenKind::Ident && peek().text == word) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect_ident(std::string_view word) {
    if (!accept_ident(word)) error(peek(), "expected '" + std::string(word) + "'");
  }
  std::string ident(const char* what) {
    if (peek().kind != TokenKind::Ident) error(peek(), std::string("expected ") + what);
    return next().text;
  }
  int integer() {
    if (peek().kind != TokenKind::Number || peek().text.find('\'') != std::string::npos)
      error(peek(), "expected integer");
    return std::stoi(next().text);
  }

  Bus parse_range_and_name(Bus bus) {
    if (accept("[")) {
      bus.is_vector = true;
      bus.msb = integer();
      expect(":");
      bus.lsb = integer();
      expect("]");
    }
    return bus;
  }

  void declare_name(const std::string& name, const Token& at) {
    if (!declared_.insert(name).second) error(at, "duplicate declaration of " + name);
  }

  void add_port(Port p, const Token& at) {
    declare_name(p.name, at);
    n_.ports.push_back(std::move(p));
  }

  void parse_port_list(std::vector<std::string>& header_names) {
    // ANSI: "input [3:0] a, b, output y"; non-ANSI: "a, b, y".
    std::optional<Port> proto;
    do {
      if (peek().kind == TokenKind::Ident && (peek().text == "input" || peek().text == "output")) {
        Port p;
        p.dir = next().text == "input" ? PortDir::Input : PortDir::Output;
        accept_ident("wire");
        p = Port{parse_range_and_name(p), p.dir};
        proto = p;
      } else if (peek().kind == TokenKind::Ident && peek().text == "inout") {
        error(peek(), "inout ports are not supported");
      }
      const Token& at = peek();
      auto name = ident("port name");
      if (proto) {
        Port p = *proto;
        p.name = name;
        add_port(std::move(p), at);
      } else {
        header_names.push_back(name);
      }
    } while (accept(","));
  }

  void parse_item() {
    const Token& head = peek();
    if (head.kind != TokenKind::Ident) error(head, "expected declaration or instance");
    if (head.text == "input" || head.text == "output" || head.text == "wire") {
      next();
      const bool is_wire = head.text == "wire";
      const PortDir dir = head.text == "input" ? PortDir::Input : PortDir::Output;
      if (!is_wire) accept_ident("wire");
      Bus proto = parse_range_and_name(Bus{});
      do {
        const Token& at = peek();
        Bus b = proto;
        b.name = ident("signal name");
        if (is_wire) {
          // "output y; wire y;" re-declares a port as a net; allowed.
          if (n_.find_port(b.name) != nullptr) continue;
          declare_name(b.name, at);
          n_.wires.push_back(std::move(b));
        } else {
          add_port(Port{b, dir}, at);
        }
      } while (accept(","));
      expect(";");
      return;
    }
    if (head.text == "assign" || head.text == "always" || head.text == "reg" ||
        head.text == "initial" || head.text == "inout")
      error(head, "'" + head.text + "' is not allowed in a structural netlist");
    parse_instance();
  }

  std::string parse_net_ref() {
    const Token& t = peek();
    if (t.kind == TokenKind::Number) {
      next();
      if (t.text == "1'b0" || t.text == "1'b1") return t.text;
      error(t, "only 1'b0 and 1'b1 constants may drive pins");
    }
    auto name = ident("net name");
    if (accept("[")) {
      int idx = integer();
      expect("]");
      return name + "[" + std::to_string(idx) + "]";
    }
    return name;
  }

  void parse_instance() {
    const Token& cell_tok = peek();
    auto cell_name = next().text;
    const CellDef* cell = lib_.find(cell_name);
    if (cell == nullptr)
      fail("netlist.UnknownCell", cell_name + " (line " + std::to_string(cell_tok.line) + ")");
    const Token& inst_tok = peek();
    Gate g;
    g.cell = cell_name;
    g.instance = ident("instance name");
    if (!instances_.insert(g.instance).second)
      fail("netlist.DuplicateName", "instance " + g.instance);
    (void)inst_tok;
    expect("(");
    std::map<std::string, std::string> conns;
    if (!accept(")")) {
      do {
        const Token& at = peek();
        if (!accept(".")) error(at, "only named port connections (.P(net)) are supported");
        auto formal = ident("formal port");
        expect("(");
        if (peek().kind == TokenKind::Symbol && peek().text == ")")
          fail("netlist.PinMismatch", g.instance + "." + formal + " is unconnected");
        auto net = parse_net_ref();
        expect(")");
        if (!conns.emplace(formal, net).second)
          fail("netlist.PinMismatch", g.instance + " connects " + formal + " twice");
      } while (accept(","));
      expect(")");
    }
    expect(";");
    for (const auto& formal : cell->ports()) {
      auto it = conns.find(formal);
      if (it == conns.end())
        fail("netlist.PinMismatch", g.instance + " (" + cell_name + ") missing pin " + formal);
      g.pins.emplace_back(formal, it->second);
      conns.erase(it);
    }
    if (!conns.empty())
      fail("netlist.PinMismatch",
           g.instance + " (" + cell_name + ") has no port " + conns.begin()->first);
    n_.gates.push_back(std::move(g));
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const CellLibrary& lib_;
  Netlist n_;
  std::set<std::string> declared_;
  std::set<std::string> instances_;
};

}  // namespace

void validate_netlist(const Netlist& n, const CellLibrary& lib) {
  std::unordered_set<std::string> declared;
  std::unordered_map<std::string, std::string> driver;
  std::set<std::string> names;
  for (const auto& p : n.ports)
    if (!names.insert(p.name).second) fail("netlist.DuplicateName", "port " + p.name);
  for (const auto& w : n.wires)
    if (!names.insert(w.name).second) fail("netlist.DuplicateName", "wire " + w.name);
  for (const auto& net : n.nets()) declared.insert(net);
  for (const auto& bit : n.input_bits()) driver[bit] = "input port";
  std::set<std::string> instances;
  for (const auto& g : n.gates) {
    if (!instances.insert(g.instance).second) fail("netlist.DuplicateName", "instance " + g.instance);
    const CellDef* cell = lib.find(g.cell);
    if (cell == nullptr) fail("netlist.UnknownCell", g.cell);
    auto ports = cell->ports();
    if (g.pins.size() != ports.size())
      fail("netlist.PinMismatch", g.instance + " pin count differs from " + g.cell);
    for (std::size_t i = 0; i < ports.size(); ++i) {
      const auto& [formal, net] = g.pins[i];
      if (formal != ports[i]) fail("netlist.PinMismatch", g.instance + " pin order/name " + formal);
      if (is_constant_net(net)) {
        if (formal == cell->output)
          fail("netlist.MultipleDrivers", g.instance + " drives constant " + net);
        continue;
      }
      if (!declared.contains(net)) fail("netlist.UndeclaredNet", net + " (instance " + g.instance + ")");
      if (formal == cell->output) {
        auto [it, inserted] = driver.emplace(net, g.instance);
        if (!inserted)
          fail("netlist.MultipleDrivers", net + " driven by " + it->second + " and " + g.instance);
      }
    }
  }
}

Netlist parse_netlist(std::string_view text, const CellLibrary& lib) {
  Netlist n = NetlistParser(text, lib).parse();
  validate_netlist(n, lib);
  n.source_text = std::string(text);
  return n;
}

std::string emit_verilog(const Netlist& n, const std::vector<std::string>& gate_comments) {
  std::string out = "module " + n.name + " (";
  for (std::size_t i = 0; i < n.ports.size(); ++i) {
    const auto& p = n.ports[i];
    out += i ? ",\n  " : "\n  ";
    out += p.dir == PortDir::Input ? "input " : "output ";
    if (p.is_vector) out += p.range_text() + " ";
    out += p.name;
  }
  out += n.ports.empty() ? ");\n" : "\n);\n";
  for (const auto& w : n.wires) {
    out += "  wire ";
    if (w.is_vector) out += w.range_text() + " ";
    out += w.name + ";\n";
  }
  for (std::size_t gi = 0; gi < n.gates.size(); ++gi) {
    const auto& g = n.gates[gi];
    out += "  " + g.cell + " " + g.instance + " (";
    for (std::size_t i = 0; i < g.pins.size(); ++i) {
      if (i) out += ", ";
      out += "." + g.pins[i].first + "(" + g.pins[i].second + ")";
    }
    out += ");";
    if (gi < gate_comments.size() && !gate_comments[gi].empty()) out += "  // " + gate_comments[gi];
    out += '\n';
  }
  out += "endmodule\n";
  return out;
}

std::string strip_comments(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      out += c;
      if (c == '\\' && i + 1 < text.size()) out += text[++i];
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') {
      in_string = true;
      out += c;
    } else if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') ++i;
      if (i < text.size()) out += '\n';
    } else if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
      auto end = text.find("*/", i + 2);
      auto stop = end == std::string_view::npos ? text.size() : end + 2;
      for (; i < stop; ++i)
        if (text[i] == '\n') out += '\n';
      --i;
    } else {
      out += c;
    }
  }
  // drop trailing blanks left behind by removed comments
  std::string cleaned;
  std::size_t start = 0;
  while (start <= out.size()) {
    auto end = out.find('\n', start);
    auto line = out.substr(start, end == std::string::npos ? std::string::npos : end - start);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
    cleaned += line;
    if (end == std::string::npos) break;
    cleaned += '\n';
    start = end + 1;
  }
  return cleaned;
}

BoolExpr derive_gate_expr(const Gate& gate, const CellLibrary& lib) {
  const CellDef& cell = lib.at(gate.cell);
  if (cell.sequential) fail("netlist.SequentialCell", gate.instance + " is a " + gate.cell);
  std::map<std::string, BoolExpr> subst;
  for (const auto& formal : cell.inputs) {
    const auto& net = gate.net(formal);
    subst.emplace(formal, is_constant_net(net) ? BoolExpr::constant(net == "1'b1")
                                               : BoolExpr::var(net));
  }
  return cell.function.substitute(subst);
}

std::string extract_io_signals(const Netlist& n) {
  auto list = [&](PortDir dir) {
    std::string s;
    for (const auto& p : n.ports) {
      if (p.dir != dir) continue;
      if (!s.empty()) s += ", ";
      s += p.name + p.range_text();
    }
    return s;
  };
  return "inputs: " + list(PortDir::Input) + "; outputs: " + list(PortDir::Output);
}

Simulator::Simulator(const Netlist& n, const CellLibrary& lib) : netlist_(n), lib_(&lib) {
  std::unordered_map<std::string, std::size_t> driver;
  std::vector<std::size_t> comb;
  for (std::size_t i = 0; i < n.gates.size(); ++i) {
    const auto& cell = lib.at(n.gates[i].cell);
    if (cell.sequential) continue;
    driver[n.gates[i].net(cell.output)] = i;
    comb.push_back(i);
  }
  std::vector<int> state(n.gates.size(), 0);  // 0 new, 1 visiting, 2 done
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (auto root : comb) {
    if (state[root]) continue;
    stack.emplace_back(root, 0);
    state[root] = 1;
    while (!stack.empty()) {
      auto& [gi, pin] = stack.back();
      const auto& g = n.gates[gi];
      const auto& cell = lib.at(g.cell);
      if (pin < cell.inputs.size()) {
        const auto& net = g.net(cell.inputs[pin++]);
        auto it = driver.find(net);
        if (it == driver.end()) continue;
        if (state[it->second] == 1) fail("netlist.CombinationalLoop", "through " + g.instance);
        if (state[it->second] == 0) {
          state[it->second] = 1;
          stack.emplace_back(it->second, 0);
        }
      } else {
        state[gi] = 2;
        order_.push_back(gi);
        stack.pop_back();
      }
    }
  }
  index_["1'b0"] = 0;
  index_["1'b1"] = 1;
  auto intern = [&](const std::string& net) {
    return index_.emplace(net, static_cast<std::uint32_t>(index_.size())).first->second;
  };
  for (const auto& net : n.nets()) intern(net);
  for (auto gi : order_) {
    const auto& g = n.gates[gi];
    const auto& cell = lib.at(g.cell);
    if (cell.inputs.size() > 6) fail("netlist.UnsupportedCell", g.cell + " has more than 6 inputs");
    Step s;
    for (const auto& formal : cell.inputs) s.in.push_back(intern(g.net(formal)));
    s.out = intern(g.net(cell.output));
    for (unsigned k = 0; k < (1U << cell.inputs.size()); ++k) {
      const bool v = cell.function.eval([&](const std::string& formal) {
        for (std::size_t i = 0; i < cell.inputs.size(); ++i)
          if (cell.inputs[i] == formal) return ((k >> i) & 1U) != 0;
        return false;
      });
      if (v) s.table |= std::uint64_t{1} << k;
    }
    steps_.push_back(std::move(s));
  }
}

std::vector<std::uint32_t> Simulator::index_of(const std::vector<std::string>& nets) const {
  std::vector<std::uint32_t> out;
  out.reserve(nets.size());
  for (const auto& n : nets) out.push_back(index_.at(n));
  return out;
}

void Simulator::evaluate(std::vector<char>& values) const {
  values[0] = 0;
  values[1] = 1;
  for (const auto& s : steps_) {
    unsigned k = 0;
    for (std::size_t i = 0; i < s.in.size(); ++i) k |= static_cast<unsigned>(values[s.in[i]]) << i;
    values[s.out] = static_cast<char>((s.table >> k) & 1U);
  }
}

std::map<std::string, bool> Simulator::run(const std::map<std::string, bool>& inputs) const {
  std::vector<char> values(index_.size(), 0);
  for (const auto& [net, v] : inputs) {
    auto it = index_.find(net);
    if (it != index_.end() && it->second > 1) values[it->second] = v;
  }
  evaluate(values);
  std::map<std::string, bool> out;
  for (const auto& net : netlist_.nets()) out[net] = values[index_.at(net)] != 0;
  return out;
}

std::map<std::string, std::uint64_t> Simulator::run_words(
    const std::map<std::string, std::uint64_t>& inputs) const {
  std::vector<char> values(index_.size(), 0);
  for (const auto& p : netlist_.ports) {
    if (p.dir != PortDir::Input) continue;
    auto it = inputs.find(p.name);
    std::uint64_t v = it == inputs.end() ? 0 : it->second;
    auto names = p.bits();
    for (std::size_t i = 0; i < names.size(); ++i) values[index_.at(names[i])] = ((v >> i) & 1U) != 0;
  }
  evaluate(values);
  std::map<std::string, std::uint64_t> out;
  for (const auto& p : netlist_.ports) {
    if (p.dir != PortDir::Output) continue;
    std::uint64_t v = 0;
    auto names = p.bits();
    for (std::size_t i = 0; i < names.size(); ++i)
      if (values[index_.at(names[i])]) v |= std::uint64_t{1} << i;
    out[p.name] = v;
  }
  return out;
}

}  // namespace netreason::netlist

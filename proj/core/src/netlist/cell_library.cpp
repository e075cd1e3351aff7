#include "netreason/netlist/cell_library.hpp"

#include <algorithm>
#include <sstream>

#include "netreason/error.hpp"
#include "netreason/util/io.hpp"

namespace netreason::netlist {

namespace {

constexpr std::string_view kBuiltinLibrary = R"(# Built-in cell library.
CELL INV   IN A OUT Y EXPR !A
CELL BUF   IN A OUT Y EXPR A
CELL AND2  IN A,B OUT Y EXPR A & B
CELL AND3  IN A,B,C OUT Y EXPR A & B & C
CELL AND4  IN A,B,C,D OUT Y EXPR A & B & C & D
CELL NAND2 IN A,B OUT Y EXPR !(A & B)
CELL NAND3 IN A,B,C OUT Y EXPR !(A & B & C)
CELL NAND4 IN A,B,C,D OUT Y EXPR !(A & B & C & D)
CELL OR2   IN A,B OUT Y EXPR A | B
CELL OR3   IN A,B,C OUT Y EXPR A | B | C
CELL OR4   IN A,B,C,D OUT Y EXPR A | B | C | D
CELL NOR2  IN A,B OUT Y EXPR !(A | B)
CELL NOR3  IN A,B,C OUT Y EXPR !(A | B | C)
CELL NOR4  IN A,B,C,D OUT Y EXPR !(A | B | C | D)
CELL XOR2  IN A,B OUT Y EXPR A ^ B
CELL XOR3  IN A,B,C OUT Y EXPR A ^ B ^ C
CELL XNOR2 IN A,B OUT Y EXPR !(A ^ B)
CELL XNOR3 IN A,B,C OUT Y EXPR !(A ^ B ^ C)
CELL AOI21 IN A,B,C OUT Y EXPR !((A & B) | C)
CELL OAI21 IN A,B,C OUT Y EXPR !((A | B) & C)
CELL AOI22 IN A,B,C,D OUT Y EXPR !((A & B) | (C & D))
CELL OAI22 IN A,B,C,D OUT Y EXPR !((A | B) & (C | D))
CELL MUX2  IN A,B,S OUT Y EXPR (S & B) | (!S & A)
CELL DFF   IN D,CK OUT Q EXPR D SEQ CLK CK D D
)";

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    auto t = util::trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

void validate(const CellDef& cell) {
  if (cell.inputs.empty()) fail("netlist.BadLibrary", cell.name + ": no inputs");
  if (cell.output.empty()) fail("netlist.BadLibrary", cell.name + ": no output");
  for (const auto& v : cell.function.support())
    if (!cell.has_input(v))
      fail("netlist.BadLibrary", cell.name + ": template references undeclared port " + v);
  if (cell.sequential) {
    if (!cell.has_input(cell.clock_port) || !cell.has_input(cell.data_port))
      fail("netlist.BadLibrary", cell.name + ": sequential cell needs declared CLK and D ports");
  }
  auto ports = cell.ports();
  std::sort(ports.begin(), ports.end());
  if (std::adjacent_find(ports.begin(), ports.end()) != ports.end())
    fail("netlist.BadLibrary", cell.name + ": duplicate port name");
}

}  // namespace

bool CellDef::has_input(std::string_view port) const {
  return std::find(inputs.begin(), inputs.end(), port) != inputs.end();
}

std::vector<std::string> CellDef::ports() const {
  auto p = inputs;
  p.push_back(output);
  return p;
}

void CellLibrary::add(CellDef cell) {
  validate(cell);
  auto name = cell.name;
  cells_.insert_or_assign(std::move(name), std::move(cell));
}

const CellDef* CellLibrary::find(std::string_view name) const {
  auto it = cells_.find(name);
  return it == cells_.end() ? nullptr : &it->second;
}

const CellDef& CellLibrary::at(std::string_view name) const {
  const auto* c = find(name);
  if (c == nullptr) fail("netlist.UnknownCell", std::string(name));
  return *c;
}

std::vector<std::string> CellLibrary::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : cells_) out.push_back(name);
  return out;
}

CellLibrary CellLibrary::parse(std::string_view text) {
  CellLibrary lib;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = util::trim(line);
    if (line.empty()) continue;
    auto where = "line " + std::to_string(line_no);
    auto expr_pos = line.find(" EXPR ");
    if (line.rfind("CELL ", 0) != 0 || expr_pos == std::string::npos)
      fail("netlist.BadLibrary", where + ": expected 'CELL <name> IN ... OUT ... EXPR ...'");
    std::istringstream head(line.substr(0, expr_pos));
    std::string kw_cell, name, kw_in, ins, kw_out, out;
    head >> kw_cell >> name >> kw_in >> ins >> kw_out >> out;
    if (kw_in != "IN" || kw_out != "OUT" || out.empty())
      fail("netlist.BadLibrary", where + ": malformed IN/OUT section");
    CellDef cell;
    cell.name = name;
    cell.inputs = split_commas(ins);
    cell.output = out;
    auto tail = line.substr(expr_pos + 6);
    auto seq_pos = tail.find(" SEQ ");
    if (seq_pos != std::string::npos) {
      std::istringstream seq(tail.substr(seq_pos + 5));
      std::string kw_clk, clk, kw_d, d;
      seq >> kw_clk >> clk >> kw_d >> d;
      if (kw_clk != "CLK" || kw_d != "D" || d.empty())
        fail("netlist.BadLibrary", where + ": malformed SEQ section");
      cell.sequential = true;
      cell.clock_port = clk;
      cell.data_port = d;
      tail.resize(seq_pos);
    }
    cell.function = BoolExpr::parse(tail);
    lib.add(std::move(cell));
  }
  return lib;
}

std::string CellLibrary::to_text() const {
  std::string out;
  for (const auto& [name, cell] : cells_) {
    out += "CELL " + name + " IN ";
    for (std::size_t i = 0; i < cell.inputs.size(); ++i) {
      if (i) out += ',';
      out += cell.inputs[i];
    }
    out += " OUT " + cell.output + " EXPR " + cell.function.to_string();
    if (cell.sequential) out += " SEQ CLK " + cell.clock_port + " D " + cell.data_port;
    out += '\n';
  }
  return out;
}

const CellLibrary& CellLibrary::builtin() {
  static const CellLibrary lib = parse(kBuiltinLibrary);
  return lib;
}

std::string_view CellLibrary::builtin_text() { return kBuiltinLibrary; }

}  // namespace netreason::netlist

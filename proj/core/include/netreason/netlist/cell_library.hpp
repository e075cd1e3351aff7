#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netreason/netlist/bool_expr.hpp"

namespace netreason::netlist {

struct CellDef {
  std::string name;
  std::vector<std::string> inputs;
  std::string output;
  BoolExpr function;  // over the formal input names
  bool sequential = false;
  std::string clock_port;  // sequential only
  std::string data_port;   // sequential only

  bool has_input(std::string_view port) const;
  /// Formal port order used for emission: inputs then output.
  std::vector<std::string> ports() const;
};

/// Cell-type table. Text grammar, one cell per line, '#' comments:
///
///   CELL <name> IN <p1,p2,...> OUT <p> EXPR <template> [SEQ CLK <p> D <p>]
///
/// Templates use ! & ^ | and parentheses over the IN ports and 0/1.
class CellLibrary {
 public:
  void add(CellDef cell);
  const CellDef* find(std::string_view name) const;
  const CellDef& at(std::string_view name) const;
  std::vector<std::string> names() const;  // sorted
  std::size_t size() const { return cells_.size(); }

  static CellLibrary parse(std::string_view text);
  std::string to_text() const;

  /// INV, BUF, AND/NAND/OR/NOR 2-4, XOR/XNOR 2-3, AOI/OAI 21/22, MUX2, DFF.
  static const CellLibrary& builtin();
  static std::string_view builtin_text();

 private:
  std::map<std::string, CellDef, std::less<>> cells_;
};

}  // namespace netreason::netlist

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "netreason/netlist/bool_expr.hpp"
#include "netreason/netlist/cell_library.hpp"

namespace netreason::netlist {

enum class PortDir { Input, Output };

/// A declared signal: scalar, or a vector [msb:lsb] bit-blasted into
/// 1-bit nets named "name[i]".
struct Bus {
  std::string name;
  bool is_vector = false;
  int msb = 0;
  int lsb = 0;

  int width() const { return is_vector ? (msb > lsb ? msb - lsb : lsb - msb) + 1 : 1; }
  /// Bit net names from lsb to msb.
  std::vector<std::string> bits() const;
  std::string range_text() const;  // "[3:0]" or ""

  friend bool operator==(const Bus&, const Bus&) = default;
};

struct Port : Bus {
  PortDir dir = PortDir::Input;

  friend bool operator==(const Port&, const Port&) = default;
};

inline bool is_constant_net(std::string_view net) { return net == "1'b0" || net == "1'b1"; }

struct Gate {
  std::string instance;
  std::string cell;
  /// formal port -> net, in the cell's port order (inputs, then output).
  std::vector<std::pair<std::string, std::string>> pins;

  const std::string& net(std::string_view formal) const;

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Structural gate-level design. Constructed by parse_netlist() or the
/// corpus generator; treat as immutable afterwards.
struct Netlist {
  std::string name;
  std::vector<Port> ports;
  std::vector<Bus> wires;
  std::vector<Gate> gates;
  std::string source_text;

  /// Port bits in declaration order, then wire bits.
  std::vector<std::string> nets() const;
  std::vector<std::string> input_bits() const;
  std::vector<std::string> output_bits() const;
  const Port* find_port(std::string_view port_name) const;

  /// Same name, ports and gates (pins included); wires and source text are
  /// not compared.
  bool structurally_equal(const Netlist& other) const;
};

/// Parses structural Verilog: one module, ANSI or non-ANSI port lists,
/// input/output/wire declarations, and cell instances with named
/// connections. Error codes: netlist.SyntaxError, netlist.UnknownCell,
/// netlist.UndeclaredNet, netlist.MultipleDrivers, netlist.PinMismatch,
/// netlist.DuplicateName.
Netlist parse_netlist(std::string_view text, const CellLibrary& lib);

/// Re-checks the invariants parse_netlist enforces; used for netlists
/// built in code.
void validate_netlist(const Netlist& n, const CellLibrary& lib);

/// Canonical Verilog, one gate instance per line. A non-empty
/// gate_comments entry (indexed like n.gates) is appended to that gate's
/// line as "// <comment>".
std::string emit_verilog(const Netlist& n, const std::vector<std::string>& gate_comments = {});

/// Removes // and /* */ comments, keeping line structure.
std::string strip_comments(std::string_view text);

/// Cell template instantiated with the gate's actual nets. Throws
/// netlist.SequentialCell for registers.
BoolExpr derive_gate_expr(const Gate& gate, const CellLibrary& lib);

/// "inputs: a[3:0], b[3:0]; outputs: y[4:0]" in declaration order.
std::string extract_io_signals(const Netlist& n);

/// Bit-level evaluation of the combinational part of a netlist. Register
/// outputs are treated as free inputs (set via `state`).
class Simulator {
 public:
  Simulator(const Netlist& n, const CellLibrary& lib);

  /// Values for every net; unspecified inputs default to 0.
  std::map<std::string, bool> run(const std::map<std::string, bool>& inputs) const;

  /// Word-level convenience: port name -> unsigned value (bit i = lsb+i).
  std::map<std::string, std::uint64_t> run_words(
      const std::map<std::string, std::uint64_t>& inputs) const;

 private:
  Netlist netlist_;
  const CellLibrary* lib_;  // must outlive the simulator
  std::vector<std::size_t> order_;  // combinational gates, topologically sorted

  // Compiled form: nets by index (0 and 1 are the constants), one truth
  // table lookup per gate in order_.
  struct Step {
    std::vector<std::uint32_t> in;
    std::uint32_t out = 0;
    std::uint64_t table = 0;  // bit k = output for input pattern k, input 0 as lsb
  };
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<Step> steps_;
  std::vector<std::uint32_t> index_of(const std::vector<std::string>& nets) const;
  void evaluate(std::vector<char>& values) const;
};

}  // namespace netreason::netlist

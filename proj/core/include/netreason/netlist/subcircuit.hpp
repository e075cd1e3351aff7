#pragma once

#include <string>
#include <vector>

#include "netreason/netlist/netlist.hpp"

namespace netreason::netlist {

struct SplitResult {
  std::vector<Netlist> subcircuits;
  /// For each subcircuit, indices into the original Netlist::gates.
  std::vector<std::vector<std::size_t>> gate_sets;
  std::vector<std::string> warnings;
};

/// Partitions a design into fan-in cones rooted at output bits, registers
/// and fanout-free gates (cones stop at inputs and register outputs), then
/// merges cones greedily in root order while the merged gate count stays
/// within size_cap. A single cone larger than the cap becomes its own
/// subcircuit and adds a warning. Nets crossing a cut become 1-bit ports.
SplitResult split_subcircuits(const Netlist& n, const CellLibrary& lib, std::size_t size_cap);

}  // namespace netreason::netlist

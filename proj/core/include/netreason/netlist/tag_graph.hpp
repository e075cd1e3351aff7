#pragma once

#include <string>
#include <vector>

#include "netreason/netlist/bool_expr.hpp"
#include "netreason/netlist/netlist.hpp"

namespace netreason::netlist {

enum class NodeKind { PrimaryInput, Gate, RegisterBoundary, PrimaryOutput };

const char* to_string(NodeKind kind);

struct TagNode {
  int id = 0;
  NodeKind kind = NodeKind::Gate;
  BoolExpr expr;
  std::string cell;      // "PI"/"PO"/"REG" for non-gate nodes
  std::string instance;  // gate instance, or the net name for PI/PO/REG nodes
  int gate_index = -1;   // index into Netlist::gates for Gate and RegisterBoundary nodes

  std::string text() const { return cell + " " + instance; }
};

struct TagEdge {
  int src = 0;
  int dst = 0;
  friend bool operator==(const TagEdge&, const TagEdge&) = default;
};

/// Text-attributed graph of a netlist. Nodes are ordered: input bits,
/// gates (netlist order), register boundaries, output bits. A register is a
/// Gate node consuming its pins plus a RegisterBoundary node driving its
/// output net, so the graph is acyclic whenever every loop crosses a
/// register. One edge per connected input pin, plus driver->PO edges.
struct TagGraph {
  std::vector<TagNode> nodes;
  std::vector<TagEdge> edges;

  /// Node ids of Gate nodes in netlist gate order.
  std::vector<int> gate_nodes() const;
  /// Kahn order; throws netlist.CombinationalLoop if cyclic.
  std::vector<int> topological_order() const;

  /// "node_id kind cell expr" lines, then "src dst" lines.
  std::string dump() const;
};

/// Throws netlist.CombinationalLoop naming the instances on a cycle.
TagGraph build_tag_graph(const Netlist& n, const CellLibrary& lib);

}  // namespace netreason::netlist

#include "netreason/netlist/tag_graph.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>

#include "netreason/error.hpp"

namespace netreason::netlist {

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::PrimaryInput: return "pi";
    case NodeKind::Gate: return "gate";
    case NodeKind::RegisterBoundary: return "reg";
    case NodeKind::PrimaryOutput: return "po";
  }
  return "?";
}

std::vector<int> TagGraph::gate_nodes() const {
  std::vector<int> out;
  for (const auto& node : nodes)
    if (node.kind == NodeKind::Gate) out.push_back(node.id);
  return out;
}

namespace {

std::vector<int> kahn(const TagGraph& g, std::vector<int>& indegree) {
  const auto n = g.nodes.size();
  std::vector<std::vector<int>> succ(n);
  indegree.assign(n, 0);
  for (const auto& e : g.edges) {
    succ[static_cast<std::size_t>(e.src)].push_back(e.dst);
    ++indegree[static_cast<std::size_t>(e.dst)];
  }
  std::queue<int> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push(static_cast<int>(i));
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    int v = ready.front();
    ready.pop();
    order.push_back(v);
    for (int w : succ[static_cast<std::size_t>(v)])
      if (--indegree[static_cast<std::size_t>(w)] == 0) ready.push(w);
  }
  return order;
}

[[noreturn]] void report_cycle(const TagGraph& g, const std::vector<int>& indegree) {
  // Every node left with indegree > 0 has a predecessor also left over, so
  // walking predecessors must revisit a node.
  std::vector<int> pred(g.nodes.size(), -1);
  for (const auto& e : g.edges)
    if (indegree[static_cast<std::size_t>(e.src)] > 0 && indegree[static_cast<std::size_t>(e.dst)] > 0)
      pred[static_cast<std::size_t>(e.dst)] = e.src;
  int start = -1;
  for (std::size_t i = 0; i < indegree.size(); ++i)
    if (indegree[i] > 0) {
      start = static_cast<int>(i);
      break;
    }
  std::vector<int> seen_at(g.nodes.size(), -1);
  std::vector<int> walk;
  int v = start;
  while (seen_at[static_cast<std::size_t>(v)] < 0) {
    seen_at[static_cast<std::size_t>(v)] = static_cast<int>(walk.size());
    walk.push_back(v);
    v = pred[static_cast<std::size_t>(v)];
  }
  std::vector<int> cycle(walk.begin() + seen_at[static_cast<std::size_t>(v)], walk.end());
  std::reverse(cycle.begin(), cycle.end());
  std::string path;
  for (int id : cycle) path += g.nodes[static_cast<std::size_t>(id)].instance + " -> ";
  path += g.nodes[static_cast<std::size_t>(cycle.front())].instance;
  fail("netlist.CombinationalLoop", path);
}

}  // namespace

std::vector<int> TagGraph::topological_order() const {
  std::vector<int> indegree;
  auto order = kahn(*this, indegree);
  if (order.size() != nodes.size()) report_cycle(*this, indegree);
  return order;
}

std::string TagGraph::dump() const {
  std::string out = "nodes " + std::to_string(nodes.size()) + "\n";
  for (const auto& node : nodes)
    out += std::to_string(node.id) + " " + to_string(node.kind) + " " + node.cell + " " +
           node.expr.to_string() + "\n";
  out += "edges " + std::to_string(edges.size()) + "\n";
  for (const auto& e : edges) out += std::to_string(e.src) + " " + std::to_string(e.dst) + "\n";
  return out;
}

TagGraph build_tag_graph(const Netlist& n, const CellLibrary& lib) {
  TagGraph g;
  std::unordered_map<std::string, int> driver;
  auto add = [&](NodeKind kind, BoolExpr expr, std::string cell, std::string instance, int gate) {
    int id = static_cast<int>(g.nodes.size());
    g.nodes.push_back(TagNode{id, kind, std::move(expr), std::move(cell), std::move(instance), gate});
    return id;
  };
  for (const auto& bit : n.input_bits())
    driver[bit] = add(NodeKind::PrimaryInput, BoolExpr::var(bit), "PI", bit, -1);
  std::vector<int> gate_node(n.gates.size());
  for (std::size_t i = 0; i < n.gates.size(); ++i) {
    const auto& gate = n.gates[i];
    const auto& cell = lib.at(gate.cell);
    BoolExpr expr = cell.sequential ? BoolExpr::var(gate.net(cell.data_port))
                                    : derive_gate_expr(gate, lib);
    gate_node[i] = add(NodeKind::Gate, std::move(expr), gate.cell, gate.instance, static_cast<int>(i));
    if (!cell.sequential) driver[gate.net(cell.output)] = gate_node[i];
  }
  for (std::size_t i = 0; i < n.gates.size(); ++i) {
    const auto& gate = n.gates[i];
    const auto& cell = lib.at(gate.cell);
    if (!cell.sequential) continue;
    const auto& q = gate.net(cell.output);
    driver[q] = add(NodeKind::RegisterBoundary, BoolExpr::var(q), gate.cell, gate.instance,
                    static_cast<int>(i));
  }
  for (std::size_t i = 0; i < n.gates.size(); ++i) {
    const auto& gate = n.gates[i];
    const auto& cell = lib.at(gate.cell);
    for (const auto& formal : cell.inputs) {
      auto it = driver.find(gate.net(formal));
      if (it != driver.end()) g.edges.push_back({it->second, gate_node[i]});
    }
  }
  for (const auto& bit : n.output_bits()) {
    int po = add(NodeKind::PrimaryOutput, BoolExpr::var(bit), "PO", bit, -1);
    auto it = driver.find(bit);
    if (it != driver.end()) g.edges.push_back({it->second, po});
  }
  g.topological_order();
  return g;
}

}  // namespace netreason::netlist

#include "netreason/netlist/subcircuit.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace netreason::netlist {

namespace {

struct Connectivity {
  std::unordered_map<std::string, std::size_t> driver;               // net -> gate
  std::unordered_map<std::string, std::vector<std::size_t>> readers;  // net -> gates
};

Connectivity connectivity(const Netlist& n, const CellLibrary& lib) {
  Connectivity c;
  for (std::size_t i = 0; i < n.gates.size(); ++i) {
    const auto& cell = lib.at(n.gates[i].cell);
    c.driver[n.gates[i].net(cell.output)] = i;
    for (const auto& formal : cell.inputs) c.readers[n.gates[i].net(formal)].push_back(i);
  }
  return c;
}

std::set<std::size_t> fanin_cone(const Netlist& n, const CellLibrary& lib, const Connectivity& c,
                                 std::size_t root) {
  std::set<std::size_t> cone{root};
  std::vector<std::size_t> stack{root};
  while (!stack.empty()) {
    auto gi = stack.back();
    stack.pop_back();
    const auto& cell = lib.at(n.gates[gi].cell);
    for (const auto& formal : cell.inputs) {
      auto it = c.driver.find(n.gates[gi].net(formal));
      if (it == c.driver.end()) continue;
      if (lib.at(n.gates[it->second].cell).sequential) continue;
      if (cone.insert(it->second).second) stack.push_back(it->second);
    }
  }
  return cone;
}

std::string bit_base(const std::string& net) {
  auto b = net.find('[');
  return b == std::string::npos ? net : net.substr(0, b);
}

Netlist extract(const Netlist& n, const CellLibrary& lib, const Connectivity& c,
                const std::vector<std::size_t>& gates, const std::string& name) {
  std::unordered_set<std::size_t> in_group(gates.begin(), gates.end());
  std::unordered_set<std::string> driven, read;
  for (auto gi : gates) {
    const auto& cell = lib.at(n.gates[gi].cell);
    driven.insert(n.gates[gi].net(cell.output));
    for (const auto& formal : cell.inputs) {
      const auto& net = n.gates[gi].net(formal);
      if (!is_constant_net(net)) read.insert(net);
    }
  }
  std::unordered_set<std::string> output_bits;
  for (const auto& bit : n.output_bits()) output_bits.insert(bit);
  std::unordered_set<std::string> port_bits;
  for (const auto& p : n.ports)
    for (const auto& b : p.bits()) port_bits.insert(b);

  Netlist sub;
  sub.name = name;
  std::set<std::string> used_names;
  for (const auto& p : n.ports) {
    bool keep = false;
    for (const auto& b : p.bits())
      keep |= p.dir == PortDir::Input ? read.contains(b) : driven.contains(b);
    if (keep) {
      sub.ports.push_back(p);
      used_names.insert(p.name);
    }
  }
  for (const auto& w : n.wires) used_names.insert(w.name);

  std::unordered_map<std::string, std::string> rename;
  std::set<std::string> internal_wires;
  auto classify_wire_bit = [&](const std::string& net, bool is_read) {
    bool cut_in = is_read && !driven.contains(net);
    // input bits arrive through the kept port; output bits driven here too
    if (port_bits.contains(net) && (!output_bits.contains(net) || !cut_in)) return;
    bool cut_out = !is_read && !output_bits.contains(net) && [&] {
      auto it = c.readers.find(net);
      if (it == c.readers.end()) return false;
      return std::any_of(it->second.begin(), it->second.end(),
                         [&](std::size_t r) { return !in_group.contains(r); });
    }();
    if (!cut_in && !cut_out) {
      internal_wires.insert(bit_base(net));
      return;
    }
    if (rename.contains(net)) return;
    std::string unique = net;
    if (net.find('[') != std::string::npos) {
      std::string port_name = bit_base(net) + "_" + net.substr(net.find('[') + 1);
      port_name.back() = '_';
      unique = port_name;
      for (int k = 1; used_names.contains(unique); ++k)
        unique = port_name + "_cut" + std::to_string(k);
    }
    used_names.insert(unique);
    rename[net] = unique;
    Port p;
    p.name = unique;
    p.dir = cut_in ? PortDir::Input : PortDir::Output;
    sub.ports.push_back(p);
  };
  for (auto gi : gates) {
    const auto& cell = lib.at(n.gates[gi].cell);
    for (const auto& formal : cell.inputs) {
      const auto& net = n.gates[gi].net(formal);
      if (!is_constant_net(net)) classify_wire_bit(net, true);
    }
    classify_wire_bit(n.gates[gi].net(cell.output), false);
  }
  for (const auto& w : n.wires) {
    if (!internal_wires.contains(w.name)) continue;
    // scalar wires that became ports are not re-declared
    if (!w.is_vector && rename.contains(w.name)) continue;
    sub.wires.push_back(w);
  }
  for (auto gi : gates) {
    Gate g = n.gates[gi];
    for (auto& [formal, net] : g.pins) {
      auto it = rename.find(net);
      if (it != rename.end()) net = it->second;
    }
    sub.gates.push_back(std::move(g));
  }
  sub.source_text = emit_verilog(sub);
  validate_netlist(sub, lib);
  return sub;
}

}  // namespace

SplitResult split_subcircuits(const Netlist& n, const CellLibrary& lib, std::size_t size_cap) {
  if (size_cap == 0) size_cap = 1;
  const auto c = connectivity(n, lib);
  std::vector<std::size_t> roots;
  std::unordered_set<std::size_t> seen;
  auto add_root = [&](std::size_t gi) {
    if (seen.insert(gi).second) roots.push_back(gi);
  };
  for (const auto& bit : n.output_bits()) {
    auto it = c.driver.find(bit);
    if (it != c.driver.end()) add_root(it->second);
  }
  for (std::size_t i = 0; i < n.gates.size(); ++i)
    if (lib.at(n.gates[i].cell).sequential) add_root(i);
  for (std::size_t i = 0; i < n.gates.size(); ++i) {
    const auto& out = n.gates[i].net(lib.at(n.gates[i].cell).output);
    if (!c.readers.contains(out)) add_root(i);
  }
  std::vector<std::set<std::size_t>> cones;
  for (auto r : roots) cones.push_back(fanin_cone(n, lib, c, r));

  SplitResult result;
  std::set<std::size_t> current;
  auto flush = [&] {
    if (current.empty()) return;
    result.gate_sets.emplace_back(current.begin(), current.end());
    current.clear();
  };
  for (std::size_t k = 0; k < cones.size(); ++k) {
    const auto& cone = cones[k];
    if (cone.size() > size_cap)
      result.warnings.push_back("cone rooted at " + n.gates[roots[k]].instance + " has " +
                                std::to_string(cone.size()) + " gates, above cap " +
                                std::to_string(size_cap));
    std::set<std::size_t> merged = current;
    merged.insert(cone.begin(), cone.end());
    if (!current.empty() && merged.size() > size_cap) {
      flush();
      current = cone;
    } else {
      current = std::move(merged);
    }
  }
  flush();

  if (result.gate_sets.size() == 1 && result.gate_sets[0].size() == n.gates.size()) {
    result.subcircuits.push_back(n);
    return result;
  }
  for (std::size_t k = 0; k < result.gate_sets.size(); ++k)
    result.subcircuits.push_back(
        extract(n, lib, c, result.gate_sets[k], n.name + "_sub" + std::to_string(k)));
  return result;
}

}  // namespace netreason::netlist

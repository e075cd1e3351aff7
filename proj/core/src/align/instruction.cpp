#include "netreason/align/instruction.hpp"

#include "netreason/align/tokenizer.hpp"
#include "netreason/error.hpp"

namespace netreason::align {

std::string_view to_string(Task t) { return t == Task::FuncDesc ? "func-desc" : "impl-detail"; }

Task parse_task(std::string_view s) {
  if (s == "func-desc" || s == "1") return Task::FuncDesc;
  if (s == "impl-detail" || s == "2") return Task::ImplDetail;
  fail("align.BadTask", "unknown task '" + std::string(s) + "'");
}

const std::string& instruction_template(Task t) {
  static const std::string func =
      "Describe the interface, purpose, functionality, and constraints of this netlist.";
  static const std::string impl =
      "Explain the combinational logic, sequential behavior, and control flow of this netlist.";
  return t == Task::FuncDesc ? func : impl;
}

InstructionPair assemble_instruction(const netlist::Netlist& n, Task task, std::string target) {
  if (target.empty()) fail("align.EmptyTarget", "target text is empty for " + n.name);
  return {instruction_template(task), netlist::extract_io_signals(n), std::move(target)};
}

std::vector<int> prompt_tokens(const InstructionPair& pair, int* graph_slot) {
  std::vector<int> seq{Vocab::kBos};
  auto append = [&](std::string_view s) {
    auto t = tokenize(s);
    seq.insert(seq.end(), t.begin(), t.end());
  };
  append(pair.instruction);
  append("\n");
  append(pair.io_text);
  append("\n");
  if (graph_slot) *graph_slot = static_cast<int>(seq.size());
  seq.push_back(Vocab::kGraph);
  append("\n");
  return seq;
}

TokenizedPair tokenize_pair(const InstructionPair& pair) {
  if (pair.target.empty()) fail("align.EmptyTarget", "target text is empty");
  TokenizedPair out;
  auto seq = prompt_tokens(pair, &out.graph_slot);
  out.prompt_length = static_cast<int>(seq.size());
  auto t = tokenize(pair.target);
  seq.insert(seq.end(), t.begin(), t.end());
  seq.push_back(Vocab::kEos);
  out.inputs.assign(seq.begin(), seq.end() - 1);
  out.targets.assign(seq.begin() + 1, seq.end());
  out.weights.resize(out.targets.size());
  for (std::size_t i = 0; i < out.targets.size(); ++i)
    out.weights[i] = static_cast<int>(i) + 1 >= out.prompt_length ? 1.0 : 0.0;
  return out;
}

}  // namespace netreason::align

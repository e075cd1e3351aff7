#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "netreason/netlist/netlist.hpp"

namespace netreason::align {

enum class Task { FuncDesc, ImplDetail };

std::string_view to_string(Task t);
/// Accepts "func-desc" / "impl-detail" (also "1" / "2").
Task parse_task(std::string_view s);

/// Question text for a task.
const std::string& instruction_template(Task t);

struct InstructionPair {
  std::string instruction;
  std::string io_text;
  std::string target;
};

/// Throws align.EmptyTarget when target is empty.
InstructionPair assemble_instruction(const netlist::Netlist& n, Task task, std::string target);

/// Token layout of a pair:
///
///   BOS instruction '\n' io_text '\n' GRAPH '\n' target EOS
///
/// `inputs` drops the final token and `targets` the first, so position t
/// predicts token t + 1. Only predictions of target bytes and EOS carry
/// weight 1.
struct TokenizedPair {
  std::vector<int> inputs;
  std::vector<int> targets;
  std::vector<double> weights;
  int graph_slot = -1;
  int prompt_length = 0;  // tokens up to and including the '\n' after GRAPH
};

TokenizedPair tokenize_pair(const InstructionPair& pair);

/// Prompt tokens only (everything before the target), for generation.
std::vector<int> prompt_tokens(const InstructionPair& pair, int* graph_slot);

}  // namespace netreason::align

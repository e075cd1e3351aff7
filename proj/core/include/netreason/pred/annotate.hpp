#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "netreason/netlist/netlist.hpp"
#include "netreason/pred/head.hpp"

namespace netreason::pred {

struct AnnotateOptions {
  bool include_confidence = true;
};

/// Emits the netlist with one trailing comment per gate line:
///
///   AND2 g1 (.A(a), .B(b), .Y(y));  // func: adder (p=0.93)
///
/// Throws pred.MissingPrediction naming the first gate without a prediction.
std::string annotate_netlist(const netlist::Netlist& n, const std::map<std::string, GatePrediction>& preds,
                             const AnnotateOptions& opts = {});

/// Number of "// func:" annotations in a text.
std::size_t count_annotations(std::string_view text);

/// Removes "// func: ..." comments, leaving every other byte in place.
std::string remove_annotations(std::string_view text);

struct Message {
  std::string role;
  std::string content;
};

struct PromptMessages {
  std::vector<Message> messages;
};

struct PromptOptions {
  /// false drops the gate annotations (ablation) and nothing else.
  bool include_annotations = true;
  /// User-message template; {netlist} is replaced by the netlist text.
  /// Empty selects the built-in template.
  std::string user_template;
  std::string system_text;
};

const std::string& default_system_text();
const std::string& default_user_template();

/// System preamble plus one user message holding the annotated netlist and
/// the two-step instructions (infer the word-level function, then write RTL).
PromptMessages build_cot_prompt(std::string_view annotated, const PromptOptions& opts = {});

/// Plain-text rendering used for prompt artifacts.
std::string render_prompt(const PromptMessages& p);

/// RTL from a completion: the first ```verilog block, else the first fenced
/// block, else the span from "module" to "endmodule". Returns the text
/// unchanged when none of these is present.
std::string extract_rtl(std::string_view completion);

}  // namespace netreason::pred

#include "netreason/pred/annotate.hpp"

#include <cstdio>
#include <optional>

#include "netreason/error.hpp"

namespace netreason::pred {

std::string annotate_netlist(const netlist::Netlist& n, const std::map<std::string, GatePrediction>& preds,
                             const AnnotateOptions& opts) {
  std::vector<std::string> comments;
  comments.reserve(n.gates.size());
  for (const auto& g : n.gates) {
    auto it = preds.find(g.instance);
    if (it == preds.end()) fail("pred.MissingPrediction", "no prediction for gate " + g.instance);
    std::string c = "func: " + std::string(to_string(it->second.label));
    if (opts.include_confidence) {
      char buf[32];
      std::snprintf(buf, sizeof buf, " (p=%.2f)", it->second.confidence);
      c += buf;
    }
    comments.push_back(std::move(c));
  }
  return netlist::emit_verilog(n, comments);
}

std::size_t count_annotations(std::string_view text) {
  std::size_t count = 0;
  for (auto pos = text.find("// func:"); pos != std::string_view::npos; pos = text.find("// func:", pos + 1)) ++count;
  return count;
}

std::string remove_annotations(std::string_view text) {
  std::string out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    auto line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    auto pos = line.find("// func:");
    if (pos != std::string_view::npos) {
      line = line.substr(0, pos);
      while (!line.empty() && line.back() == ' ') line.remove_suffix(1);
    }
    out += line;
    if (end == std::string_view::npos) break;
    out += '\n';
    start = end + 1;
  }
  return out;
}

const std::string& default_system_text() {
  static const std::string text =
      "You are a hardware engineer who recovers register-transfer level designs from gate-level netlists.";
  return text;
}

const std::string& default_user_template() {
  static const std::string text =
      "The gate-level netlist below was produced by logic synthesis. A gate line may end with a \"func:\"\n"
      "comment giving the predicted function class of that gate and the prediction confidence p.\n"
      "\n"
      "```verilog\n"
      "{netlist}"
      "```\n"
      "\n"
      "Answer in two steps.\n"
      "Step 1: From the netlist and its gate annotations, infer the word-level arithmetic function the\n"
      "circuit computes and describe it briefly.\n"
      "Step 2: Write synthesizable RTL for that function. Keep the module name and every port name and\n"
      "width unchanged. Express the logic with word-level RTL operations, avoiding bit-level operations.\n"
      "Put the complete module in a single ```verilog code block.\n";
  return text;
}

PromptMessages build_cot_prompt(std::string_view annotated, const PromptOptions& opts) {
  std::string netlist_text = opts.include_annotations ? std::string(annotated) : remove_annotations(annotated);
  if (!netlist_text.empty() && netlist_text.back() != '\n') netlist_text += '\n';
  std::string user = opts.user_template.empty() ? default_user_template() : opts.user_template;
  auto pos = user.find("{netlist}");
  if (pos == std::string::npos) fail("pred.BadTemplate", "prompt template lacks a {netlist} placeholder");
  user.replace(pos, 9, netlist_text);
  PromptMessages p;
  p.messages.push_back({"system", opts.system_text.empty() ? default_system_text() : opts.system_text});
  p.messages.push_back({"user", std::move(user)});
  return p;
}

std::string render_prompt(const PromptMessages& p) {
  std::string out;
  for (const auto& m : p.messages) out += "### " + m.role + "\n" + m.content + (m.content.ends_with('\n') ? "" : "\n");
  return out;
}

std::string extract_rtl(std::string_view completion) {
  auto fenced = [&](std::string_view opener) -> std::optional<std::string> {
    auto open = completion.find(opener);
    if (open == std::string_view::npos) return std::nullopt;
    auto body = completion.find('\n', open);
    if (body == std::string_view::npos) return std::nullopt;
    auto close = completion.find("```", body + 1);
    if (close == std::string_view::npos) return std::nullopt;
    return std::string(completion.substr(body + 1, close - body - 1));
  };
  if (auto v = fenced("```verilog")) return *v;
  if (auto v = fenced("```")) return *v;
  auto m = completion.find("module");
  auto e = completion.rfind("endmodule");
  if (m != std::string_view::npos && e != std::string_view::npos && e > m)
    return std::string(completion.substr(m, e + 9 - m)) + "\n";
  return std::string(completion);
}

}  // namespace netreason::pred

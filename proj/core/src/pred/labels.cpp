#include "netreason/pred/labels.hpp"

#include <string>

#include "netreason/error.hpp"

namespace netreason::pred {

namespace {

constexpr std::array<std::string_view, kNumLabels> kNames{"adder", "multiplier", "comparator", "subtractor",
                                                          "control"};

}  // namespace

std::string_view to_string(FunctionLabel l) { return kNames[static_cast<std::size_t>(code(l))]; }

std::string_view display_name(FunctionLabel l) {
  return l == FunctionLabel::Control ? "controller" : to_string(l);
}

std::optional<FunctionLabel> parse_label(std::string_view s) {
  for (int c = 0; c < kNumLabels; ++c)
    if (kNames[static_cast<std::size_t>(c)] == s) return static_cast<FunctionLabel>(c);
  if (s == "controller") return FunctionLabel::Control;
  return std::nullopt;
}

FunctionLabel label_from_code(int c) {
  if (c < 0 || c >= kNumLabels) fail("pred.BadLabel", "label code " + std::to_string(c) + " outside 0..4");
  return static_cast<FunctionLabel>(c);
}

}  // namespace netreason::pred

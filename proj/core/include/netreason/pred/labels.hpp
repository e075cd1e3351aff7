#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace netreason::pred {

/// Gate function classes; the integer codes are stable.
enum class FunctionLabel : int { Adder = 0, Multiplier = 1, Comparator = 2, Subtractor = 3, Control = 4 };

inline constexpr int kNumLabels = 5;

/// Short name used in files and annotations: adder, multiplier,
/// comparator, subtractor, control.
std::string_view to_string(FunctionLabel l);
/// Human-facing name; "controller" for Control.
std::string_view display_name(FunctionLabel l);
/// Accepts either spelling.
std::optional<FunctionLabel> parse_label(std::string_view s);

inline int code(FunctionLabel l) { return static_cast<int>(l); }
FunctionLabel label_from_code(int c);

}  // namespace netreason::pred

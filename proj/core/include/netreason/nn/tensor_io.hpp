#pragma once

#include <string>
#include <string_view>

#include "netreason/nn/param.hpp"

namespace netreason::nn {

/// Text tensor dump:
///
///   netreason-tensors 1
///   count <n>
///   tensor <name> <rows> <cols>
///   <cols values per line, rows lines, %.17g>
///
/// Values round-trip exactly.
std::string save_tensors(const ParamStore& store);

/// Loads into existing parameters; names and shapes must match
/// (nn.ShapeMismatch / nn.BadCheckpoint otherwise).
void load_tensors(ParamStore& store, std::string_view text);

}  // namespace netreason::nn

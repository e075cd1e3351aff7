#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace netreason::align {

/// Byte-level vocabulary: ids 0..255 are raw bytes, followed by four
/// special tokens.
struct Vocab {
  static constexpr int kBytes = 256;
  static constexpr int kPad = 256;
  static constexpr int kBos = 257;
  static constexpr int kEos = 258;
  static constexpr int kGraph = 259;
  static constexpr int kSize = 260;
};

std::vector<int> tokenize(std::string_view text);

/// Concatenates byte tokens; special tokens are dropped.
std::string detokenize(const std::vector<int>& tokens);

}  // namespace netreason::align

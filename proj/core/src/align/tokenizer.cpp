#include "netreason/align/tokenizer.hpp"

namespace netreason::align {

std::vector<int> tokenize(std::string_view text) {
  std::vector<int> out;
  out.reserve(text.size());
  for (char c : text) out.push_back(static_cast<unsigned char>(c));
  return out;
}

std::string detokenize(const std::vector<int>& tokens) {
  std::string out;
  for (int t : tokens)
    if (t >= 0 && t < Vocab::kBytes) out.push_back(static_cast<char>(t));
  return out;
}

}  // namespace netreason::align

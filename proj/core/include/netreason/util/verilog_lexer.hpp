#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace netreason::util {

enum class TokenKind { Ident, Number, Symbol, String, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  int line = 1;
  int col = 1;
};

/// Splits Verilog source into tokens. Line and block comments and
/// compiler directives (`timescale etc.) are dropped. Sized literals such
/// as 4'b1010 come back as a single Number token. Throws
/// "<error_prefix>.SyntaxError" on malformed input.
std::vector<Token> lex_verilog(std::string_view source, std::string_view error_prefix);

}  // namespace netreason::util

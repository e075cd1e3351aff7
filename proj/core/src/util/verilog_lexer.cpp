#include "netreason/util/verilog_lexer.hpp"

#include <array>
#include <cctype>

#include "netreason/error.hpp"

namespace netreason::util {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

}  // namespace

std::vector<Token> lex_verilog(std::string_view src, std::string_view error_prefix) {
  static constexpr std::array<std::string_view, 17> kMulti = {
      "===", "!==", "<<<", ">>>", "==", "!=", "<=", ">=", "&&", "||",
      "<<",  ">>",  "~&",  "~|",  "~^", "^~", "**"};
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto error = [&](const std::string& what) {
    fail(std::string(error_prefix) + ".SyntaxError",
         "line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + what);
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      auto end = src.find("*/", i + 2);
      if (end == std::string_view::npos) error("unterminated block comment");
      advance(end + 2 - i);
      continue;
    }
    if (c == '`') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.col = col;
    if (ident_start(c) || c == '$') {
      std::size_t j = i + 1;
      while (j < src.size() && ident_char(src[j])) ++j;
      tok.kind = TokenKind::Ident;
      tok.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '\'') {
      std::size_t j = i;
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      if (j < src.size() && src[j] == '\'') {
        ++j;
        if (j < src.size() && (src[j] == 's' || src[j] == 'S')) ++j;
        if (j >= src.size() || std::string_view("bBoOdDhH").find(src[j]) == std::string_view::npos)
          error("bad base in sized literal");
        ++j;
        std::size_t digits = j;
        while (j < src.size() && (std::isxdigit(static_cast<unsigned char>(src[j])) ||
                                  src[j] == '_' || src[j] == 'x' || src[j] == 'X' ||
                                  src[j] == 'z' || src[j] == 'Z'))
          ++j;
        if (j == digits) error("sized literal without digits");
      }
      tok.kind = TokenKind::Number;
      tok.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (c == '"') {
      std::size_t j = i + 1;
      std::string value;
      while (j < src.size() && src[j] != '"') {
        if (src[j] == '\\' && j + 1 < src.size()) {
          char e = src[j + 1];
          value += e == 'n' ? '\n' : e == 't' ? '\t' : e;
          j += 2;
        } else {
          if (src[j] == '\n') error("newline in string literal");
          value += src[j++];
        }
      }
      if (j >= src.size()) error("unterminated string literal");
      tok.kind = TokenKind::String;
      tok.text = value;
      advance(j + 1 - i);
    } else {
      tok.kind = TokenKind::Symbol;
      std::size_t len = 1;
      for (auto m : kMulti) {
        if (src.substr(i, m.size()) == m) {
          len = m.size();
          break;
        }
      }
      tok.text = std::string(src.substr(i, len));
      if (len == 1 && std::string_view("()[]{};:,.=#@?+-*/%&|^~!<>").find(c) ==
                          std::string_view::npos)
        error(std::string("unexpected character '") + c + "'");
      advance(len);
    }
    out.push_back(std::move(tok));
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

}  // namespace netreason::util

#include "netreason/netlist/bool_expr.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <set>

#include "netreason/error.hpp"

namespace netreason::netlist {

struct BoolExpr::Node {
  ExprOp op;
  std::string name;
  std::vector<BoolExpr> operands;
};

BoolExpr::BoolExpr() : BoolExpr(constant(false)) {}

BoolExpr::BoolExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

BoolExpr BoolExpr::constant(bool value) {
  static const auto zero = std::make_shared<const Node>(Node{ExprOp::Const0, {}, {}});
  static const auto one = std::make_shared<const Node>(Node{ExprOp::Const1, {}, {}});
  return BoolExpr(value ? one : zero);
}

BoolExpr BoolExpr::var(std::string name) {
  return BoolExpr(std::make_shared<const Node>(Node{ExprOp::Var, std::move(name), {}}));
}

BoolExpr BoolExpr::make_not(BoolExpr operand) {
  return BoolExpr(std::make_shared<const Node>(Node{ExprOp::Not, {}, {std::move(operand)}}));
}

BoolExpr BoolExpr::make(ExprOp op, std::vector<BoolExpr> operands) {
  switch (op) {
    case ExprOp::Const0: return constant(false);
    case ExprOp::Const1: return constant(true);
    case ExprOp::Not:
      if (operands.size() != 1) fail("netlist.BadExpr", "NOT takes one operand");
      return make_not(std::move(operands[0]));
    case ExprOp::Var: fail("netlist.BadExpr", "use BoolExpr::var for leaves");
    default:
      if (operands.size() < 2) fail("netlist.BadExpr", "n-ary operator needs >= 2 operands");
      return BoolExpr(std::make_shared<const Node>(Node{op, {}, std::move(operands)}));
  }
}

ExprOp BoolExpr::op() const { return node_->op; }
const std::string& BoolExpr::name() const { return node_->name; }
const std::vector<BoolExpr>& BoolExpr::operands() const { return node_->operands; }

namespace {

void collect_support(const BoolExpr& e, std::set<std::string>& out) {
  if (e.op() == ExprOp::Var) {
    out.insert(e.name());
    return;
  }
  for (const auto& child : e.operands()) collect_support(child, out);
}

bool is_atom(const BoolExpr& e) {
  return e.op() == ExprOp::Var || e.op() == ExprOp::Const0 || e.op() == ExprOp::Const1 ||
         e.op() == ExprOp::Not;
}

void print(const BoolExpr& e, std::string& out, bool top) {
  switch (e.op()) {
    case ExprOp::Const0: out += '0'; return;
    case ExprOp::Const1: out += '1'; return;
    case ExprOp::Var: out += e.name(); return;
    case ExprOp::Not:
      out += '!';
      print(e.operands()[0], out, false);
      return;
    default: break;
  }
  const char* sep = e.op() == ExprOp::And ? " & " : e.op() == ExprOp::Or ? " | " : " ^ ";
  if (!top) out += '(';
  bool first = true;
  for (const auto& child : e.operands()) {
    if (!first) out += sep;
    first = false;
    print(child, out, is_atom(child));
  }
  if (!top) out += ')';
}

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  BoolExpr parse() {
    auto e = parse_or();
    skip();
    if (pos_ != text_.size()) error("trailing input");
    return e;
  }

 private:
  [[noreturn]] void error(const std::string& what) {
    fail("netlist.BadExpr", what + " at offset " + std::to_string(pos_) + " in '" +
                                std::string(text_) + "'");
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  BoolExpr parse_nary(ExprOp op, char sym, BoolExpr (ExprParser::*next)()) {
    std::vector<BoolExpr> items{(this->*next)()};
    while (accept(sym)) items.push_back((this->*next)());
    if (items.size() == 1) return items[0];
    return BoolExpr::make(op, std::move(items));
  }

  BoolExpr parse_or() { return parse_nary(ExprOp::Or, '|', &ExprParser::parse_xor); }
  BoolExpr parse_xor() { return parse_nary(ExprOp::Xor, '^', &ExprParser::parse_and); }
  BoolExpr parse_and() { return parse_nary(ExprOp::And, '&', &ExprParser::parse_unary); }

  BoolExpr parse_unary() {
    if (accept('!') || accept('~')) return BoolExpr::make_not(parse_unary());
    if (accept('(')) {
      auto e = parse_or();
      if (!accept(')')) error("expected ')'");
      return e;
    }
    skip();
    if (pos_ >= text_.size()) error("unexpected end");
    char c = text_[pos_];
    if (c == '0' || c == '1') {
      ++pos_;
      return BoolExpr::constant(c == '1');
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      auto start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
              text_[pos_] == '$'))
        ++pos_;
      if (pos_ < text_.size() && text_[pos_] == '[') {
        while (pos_ < text_.size() && text_[pos_] != ']') ++pos_;
        if (pos_ == text_.size()) error("unterminated bit select");
        ++pos_;
      }
      return BoolExpr::var(std::string(text_.substr(start, pos_ - start)));
    }
    error(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::string> BoolExpr::support() const {
  std::set<std::string> s;
  collect_support(*this, s);
  return {s.begin(), s.end()};
}

int BoolExpr::depth() const {
  if (op() == ExprOp::Var || op() == ExprOp::Const0 || op() == ExprOp::Const1) return 0;
  int d = 0;
  for (const auto& child : operands()) d = std::max(d, child.depth());
  return d + 1;
}

int BoolExpr::count(ExprOp kind) const {
  int n = op() == kind ? 1 : 0;
  for (const auto& child : operands()) n += child.count(kind);
  return n;
}

bool BoolExpr::eval(const std::function<bool(const std::string&)>& value_of) const {
  switch (op()) {
    case ExprOp::Const0: return false;
    case ExprOp::Const1: return true;
    case ExprOp::Var: return value_of(name());
    case ExprOp::Not: return !operands()[0].eval(value_of);
    case ExprOp::And:
      for (const auto& c : operands())
        if (!c.eval(value_of)) return false;
      return true;
    case ExprOp::Or:
      for (const auto& c : operands())
        if (c.eval(value_of)) return true;
      return false;
    case ExprOp::Xor: {
      bool v = false;
      for (const auto& c : operands()) v ^= c.eval(value_of);
      return v;
    }
  }
  return false;
}

BoolExpr BoolExpr::substitute(const std::map<std::string, BoolExpr>& substitution) const {
  switch (op()) {
    case ExprOp::Const0:
    case ExprOp::Const1: return *this;
    case ExprOp::Var: {
      auto it = substitution.find(name());
      return it == substitution.end() ? *this : it->second;
    }
    default: {
      std::vector<BoolExpr> children;
      children.reserve(operands().size());
      for (const auto& c : operands()) children.push_back(c.substitute(substitution));
      return make(op(), std::move(children));
    }
  }
}

std::string BoolExpr::to_string() const {
  std::string out;
  print(*this, out, true);
  return out;
}

BoolExpr BoolExpr::parse(std::string_view text) { return ExprParser(text).parse(); }

bool operator==(const BoolExpr& a, const BoolExpr& b) {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op() || a.name() != b.name()) return false;
  return a.operands() == b.operands();
}

TruthTable::TruthTable(int num_vars, std::vector<std::uint64_t> words)
    : num_vars_(num_vars), words_(std::move(words)) {}

std::size_t TruthTable::count_ones() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::string TruthTable::to_string() const {
  std::string s(size(), '0');
  for (std::size_t i = 0; i < size(); ++i)
    if (bit(i)) s[i] = '1';
  return s;
}

TruthTable truth_table(const BoolExpr& expr) { return truth_table(expr, expr.support()); }

TruthTable truth_table(const BoolExpr& expr, const std::vector<std::string>& vars) {
  const int n = static_cast<int>(vars.size());
  if (n > kMaxTruthTableVars)
    fail("netlist.SupportTooLarge",
         std::to_string(n) + " variables exceeds " + std::to_string(kMaxTruthTableVars));
  std::map<std::string, int> position;
  for (int i = 0; i < n; ++i) position[vars[static_cast<std::size_t>(i)]] = i;
  const std::size_t rows = std::size_t{1} << n;
  std::vector<std::uint64_t> words((rows + 63) / 64, 0);
  for (std::size_t row = 0; row < rows; ++row) {
    auto value_of = [&](const std::string& v) {
      auto it = position.find(v);
      if (it == position.end()) fail("netlist.BadExpr", "variable '" + v + "' not in order");
      return ((row >> (n - 1 - it->second)) & 1U) != 0;
    };
    if (expr.eval(value_of)) words[row / 64] |= std::uint64_t{1} << (row % 64);
  }
  return TruthTable(n, std::move(words));
}

}  // namespace netreason::netlist

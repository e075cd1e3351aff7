#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace netreason::netlist {

enum class ExprOp { Const0, Const1, Var, Not, And, Or, Xor };

/// Immutable Boolean expression tree. Leaves are net names or constants;
/// And/Or/Xor are n-ary. Copies share structure.
class BoolExpr {
 public:
  BoolExpr();  // constant 0

  static BoolExpr constant(bool value);
  static BoolExpr var(std::string name);
  static BoolExpr make_not(BoolExpr operand);
  static BoolExpr make(ExprOp op, std::vector<BoolExpr> operands);

  ExprOp op() const;
  const std::string& name() const;  // Var only
  const std::vector<BoolExpr>& operands() const;

  /// Sorted, de-duplicated leaf names.
  std::vector<std::string> support() const;
  int depth() const;
  /// Number of operator nodes of the given kind (an n-ary AND counts once).
  int count(ExprOp op) const;

  bool eval(const std::function<bool(const std::string&)>& value_of) const;

  /// Replaces each Var by the expression the substitution maps it to;
  /// vars missing from the map are left in place.
  BoolExpr substitute(const std::map<std::string, BoolExpr>& substitution) const;

  /// Infix form using ! & ^ | with explicit parentheses; this is also the
  /// template grammar accepted by parse().
  std::string to_string() const;

  static BoolExpr parse(std::string_view text);

  friend bool operator==(const BoolExpr& a, const BoolExpr& b);

 private:
  struct Node;
  explicit BoolExpr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

/// Truth table over a fixed variable order; bit i is the value on the
/// i-th assignment in lexicographic order, where the first variable is the
/// most significant position of the assignment index.
class TruthTable {
 public:
  TruthTable() = default;
  TruthTable(int num_vars, std::vector<std::uint64_t> words);

  int num_vars() const { return num_vars_; }
  std::size_t size() const { return std::size_t{1} << num_vars_; }
  bool bit(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  const std::vector<std::uint64_t>& words() const { return words_; }
  std::size_t count_ones() const;

  /// "0001" for AND(a,b): character i is bit i.
  std::string to_string() const;

  friend bool operator==(const TruthTable&, const TruthTable&) = default;

 private:
  int num_vars_ = 0;
  std::vector<std::uint64_t> words_;
};

inline constexpr int kMaxTruthTableVars = 16;

/// Evaluates over expr.support() in that order. Throws
/// netlist.SupportTooLarge above kMaxTruthTableVars.
TruthTable truth_table(const BoolExpr& expr);
TruthTable truth_table(const BoolExpr& expr, const std::vector<std::string>& vars);

}  // namespace netreason::netlist

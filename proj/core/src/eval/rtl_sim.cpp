#include "netreason/eval/rtl_sim.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include "netreason/error.hpp"
#include "netreason/util/verilog_lexer.hpp"

namespace netreason::eval {

namespace {

using u64 = std::uint64_t;
using util::Token;
using util::TokenKind;

u64 mask(int w) { return w >= 64 ? ~0ULL : (1ULL << w) - 1; }

enum class EK { Num, Str, Time, Ident, Unary, Binary, Ternary, Concat, Repl, Index, Range };

struct Expr;
using ExprP = std::unique_ptr<Expr>;

struct Expr {
  EK kind = EK::Num;
  std::string op;
  std::string name;  // identifier, or string literal text
  int var = -1;
  u64 value = 0;
  int width = 32;
  std::vector<ExprP> args;
  int line = 0;
};

enum class SK { Block, Assign, If, Case, For, While, Repeat, Delay, Display, Write, Finish, Null };

struct Stmt;
using StmtP = std::unique_ptr<Stmt>;

struct CaseItem {
  std::vector<ExprP> labels;  // empty = default
  StmtP body;
};

struct Stmt {
  SK kind = SK::Null;
  ExprP lhs, rhs, cond;
  std::vector<StmtP> body;  // block statements; If: then, else
  std::vector<CaseItem> items;
  StmtP init, step;
  std::vector<ExprP> args;
  int line = 0;
};

enum class VK { Wire, Reg, Integer, Param };
enum class Dir { None, In, Out, InOut };

struct Var {
  std::string name;
  VK kind = VK::Wire;
  Dir dir = Dir::None;
  ExprP msb, lsb;
  ExprP init;
  int line = 0;
};

struct ContAssign {
  ExprP lhs, rhs;
  int line = 0;
};

struct Conn {
  std::string port;  // empty when positional
  ExprP expr;        // null for an empty named connection
};

struct InstDecl {
  std::string module, name;
  std::vector<Conn> params;
  std::vector<Conn> conns;
  int line = 0;
};

struct Module {
  std::string name, file;
  int line = 0;
  std::vector<std::string> ports;
  std::vector<Var> vars;
  std::unordered_map<std::string, int> index;
  std::vector<ContAssign> assigns;
  std::vector<StmtP> combs;
  std::vector<StmtP> initials;
  std::vector<InstDecl> insts;
};

[[noreturn]] void syntax(const std::string& file, int line, const std::string& msg) {
  fail("eval.RtlSyntax", file + ":" + std::to_string(line) + ": " + msg);
}

// ---------------------------------------------------------------- parser

class Parser {
 public:
  Parser(std::string file, std::string_view text) : file_(std::move(file)) {
    try {
      toks_ = util::lex_verilog(text, "eval");
    } catch (const Error& e) {
      fail("eval.RtlSyntax", file_ + ": " + e.what());
    }
  }

  std::vector<Module> parse() {
    std::vector<Module> mods;
    while (!at_end()) {
      if (is("module") || is("macromodule")) {
        mods.push_back(parse_module());
      } else {
        error("expected 'module'");
      }
    }
    return mods;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == TokenKind::End; }
  bool is(std::string_view s, std::size_t k = 0) const {
    const auto& t = peek(k);
    return (t.kind == TokenKind::Ident || t.kind == TokenKind::Symbol) && t.text == s;
  }
  Token next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool accept(std::string_view s) {
    if (!is(s)) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void error(const std::string& msg) const {
    syntax(file_, peek().line, msg + (at_end() ? " at end of input" : " near '" + peek().text + "'"));
  }
  [[noreturn]] void unsupported(const std::string& what) const {
    syntax(file_, peek().line, what + " is not supported by the built-in evaluator");
  }
  void expect(std::string_view s) {
    if (!accept(s)) error("expected '" + std::string(s) + "'");
  }
  std::string ident() {
    if (peek().kind != TokenKind::Ident || peek().text.starts_with("$")) error("expected identifier");
    return next().text;
  }

  static bool keyword(std::string_view s) {
    static const std::unordered_set<std::string_view> kw = {
        "module", "endmodule", "input", "output", "inout", "wire", "reg", "logic", "integer", "parameter",
        "localparam", "assign", "always", "always_comb", "initial", "begin", "end", "if", "else", "case",
        "casez", "casex", "endcase", "default", "for", "while", "repeat", "forever", "signed", "genvar",
        "generate", "endgenerate", "function", "endfunction", "task", "endtask", "posedge", "negedge", "or"};
    return kw.contains(s);
  }

  Module parse_module() {
    Module m;
    m.file = file_;
    m.line = peek().line;
    next();
    m.name = ident();
    if (accept("#")) {
      expect("(");
      if (!is(")")) {
        do {
          accept("parameter");
          accept("integer");
          if (is("signed")) unsupported("signed arithmetic");
          Var v;
          v.kind = VK::Param;
          v.line = peek().line;
          parse_range(v.msb, v.lsb);
          v.name = ident();
          expect("=");
          v.init = parse_expr();
          add_var(m, std::move(v));
        } while (accept(","));
      }
      expect(")");
    }
    if (accept("(")) {
      if (!is(")")) {
        if (is("input") || is("output") || is("inout")) {
          parse_ansi_ports(m);
        } else {
          do m.ports.push_back(ident());
          while (accept(","));
        }
      }
      expect(")");
    }
    expect(";");
    while (!accept("endmodule")) {
      if (at_end()) error("missing 'endmodule'");
      parse_item(m);
    }
    return m;
  }

  void parse_ansi_ports(Module& m) {
    Dir dir = Dir::None;
    VK kind = VK::Wire;
    ExprP msb, lsb;
    do {
      if (is("input") || is("output") || is("inout")) {
        dir = parse_dir();
        kind = parse_net_kind(VK::Wire);
        if (is("signed")) unsupported("signed arithmetic");
        msb.reset();
        lsb.reset();
        parse_range(msb, lsb);
      }
      Var v;
      v.line = peek().line;
      v.name = ident();
      v.dir = dir;
      v.kind = kind;
      v.msb = clone(msb);
      v.lsb = clone(lsb);
      m.ports.push_back(v.name);
      add_var(m, std::move(v));
    } while (accept(","));
  }

  Dir parse_dir() {
    auto t = next().text;
    if (t == "inout") unsupported("inout port");
    return t == "input" ? Dir::In : Dir::Out;
  }

  VK parse_net_kind(VK fallback) {
    if (accept("wire")) return VK::Wire;
    if (accept("reg") || accept("logic")) return VK::Reg;
    if (accept("integer")) return VK::Integer;
    return fallback;
  }

  bool parse_range(ExprP& msb, ExprP& lsb) {
    if (!accept("[")) return false;
    msb = parse_expr();
    expect(":");
    lsb = parse_expr();
    expect("]");
    return true;
  }

  void add_var(Module& m, Var v) {
    auto it = m.index.find(v.name);
    if (it == m.index.end()) {
      m.index[v.name] = static_cast<int>(m.vars.size());
      m.vars.push_back(std::move(v));
      return;
    }
    // non-ANSI style: "output [3:0] y;" followed by "reg [3:0] y;"
    auto& old = m.vars[static_cast<std::size_t>(it->second)];
    bool merge = (old.dir != Dir::None) != (v.dir != Dir::None) && old.kind != VK::Param && v.kind != VK::Param;
    if (!merge) syntax(file_, v.line, "duplicate declaration of '" + v.name + "'");
    if (v.dir != Dir::None) old.dir = v.dir;
    if (v.kind != VK::Wire) old.kind = v.kind;
    if (!old.msb && v.msb) {
      old.msb = std::move(v.msb);
      old.lsb = std::move(v.lsb);
    }
  }

  static ExprP clone(const ExprP& e) {
    if (!e) return nullptr;
    auto c = std::make_unique<Expr>();
    c->kind = e->kind;
    c->op = e->op;
    c->name = e->name;
    c->value = e->value;
    c->width = e->width;
    c->line = e->line;
    for (const auto& a : e->args) c->args.push_back(clone(a));
    return c;
  }

  void parse_item(Module& m) {
    const int line = peek().line;
    if (is("input") || is("output") || is("inout")) {
      Dir dir = parse_dir();
      VK kind = parse_net_kind(VK::Wire);
      if (is("signed")) unsupported("signed arithmetic");
      ExprP msb, lsb;
      parse_range(msb, lsb);
      do {
        Var v;
        v.line = peek().line;
        v.name = ident();
        v.dir = dir;
        v.kind = kind;
        v.msb = clone(msb);
        v.lsb = clone(lsb);
        if (std::find(m.ports.begin(), m.ports.end(), v.name) == m.ports.end())
          syntax(file_, v.line, "'" + v.name + "' is not in the port list");
        add_var(m, std::move(v));
      } while (accept(","));
      expect(";");
      return;
    }
    if (is("wire") || is("reg") || is("logic") || is("integer")) {
      VK kind = parse_net_kind(VK::Wire);
      if (is("signed")) unsupported("signed arithmetic");
      ExprP msb, lsb;
      if (kind != VK::Integer) parse_range(msb, lsb);
      do {
        Var v;
        v.line = peek().line;
        v.name = ident();
        v.kind = kind;
        v.msb = clone(msb);
        v.lsb = clone(lsb);
        if (is("[")) unsupported("memory array");
        if (accept("=")) {
          auto lhs = std::make_unique<Expr>();
          lhs->kind = EK::Ident;
          lhs->name = v.name;
          lhs->line = v.line;
          auto rhs = parse_expr();
          if (kind == VK::Wire) {
            m.assigns.push_back({std::move(lhs), std::move(rhs), v.line});
          } else {
            v.init = std::move(rhs);
          }
        }
        add_var(m, std::move(v));
      } while (accept(","));
      expect(";");
      return;
    }
    if (is("parameter") || is("localparam")) {
      next();
      accept("integer");
      if (is("signed")) unsupported("signed arithmetic");
      ExprP msb, lsb;
      parse_range(msb, lsb);
      do {
        Var v;
        v.kind = VK::Param;
        v.line = peek().line;
        v.name = ident();
        v.msb = clone(msb);
        v.lsb = clone(lsb);
        expect("=");
        v.init = parse_expr();
        add_var(m, std::move(v));
      } while (accept(","));
      expect(";");
      return;
    }
    if (accept("assign")) {
      if (is("#")) unsupported("delayed continuous assignment");
      do {
        auto lhs = parse_lvalue();
        expect("=");
        m.assigns.push_back({std::move(lhs), parse_expr(), line});
      } while (accept(","));
      expect(";");
      return;
    }
    if (accept("always_comb")) {
      m.combs.push_back(parse_stmt());
      return;
    }
    if (accept("always")) {
      if (!accept("@")) unsupported("always block without event control");
      if (!accept("*")) {
        expect("(");
        if (!accept("*")) {
          do {
            if (is("posedge") || is("negedge")) unsupported("clocked always block");
            parse_expr();
          } while (accept("or") || accept(","));
        }
        expect(")");
      }
      m.combs.push_back(parse_stmt());
      return;
    }
    if (accept("initial")) {
      m.initials.push_back(parse_stmt());
      return;
    }
    if (is("genvar") || is("generate") || is("function") || is("task") || is("specify"))
      unsupported("'" + peek().text + "'");
    if (peek().kind == TokenKind::Ident && !keyword(peek().text) && !peek().text.starts_with("$")) {
      parse_instances(m);
      return;
    }
    error("unexpected token in module body");
  }

  void parse_conns(std::vector<Conn>& out) {
    expect("(");
    if (accept(")")) return;
    do {
      Conn c;
      if (accept(".")) {
        c.port = ident();
        expect("(");
        if (!is(")")) c.expr = parse_expr();
        expect(")");
      } else {
        c.expr = parse_expr();
      }
      out.push_back(std::move(c));
    } while (accept(","));
    expect(")");
  }

  void parse_instances(Module& m) {
    const int line = peek().line;
    std::string type = ident();
    std::vector<Conn> params;
    if (accept("#")) parse_conns(params);
    do {
      InstDecl d;
      d.line = line;
      d.module = type;
      d.name = ident();
      if (is("[")) unsupported("instance array");
      for (const auto& p : params) d.params.push_back({p.port, clone(p.expr)});
      parse_conns(d.conns);
      m.insts.push_back(std::move(d));
    } while (accept(","));
    expect(";");
  }

  // statements

  StmtP make(SK k, int line) {
    auto s = std::make_unique<Stmt>();
    s->kind = k;
    s->line = line;
    return s;
  }

  StmtP parse_stmt() {
    const int line = peek().line;
    if (accept(";")) return make(SK::Null, line);
    if (accept("begin")) {
      auto s = make(SK::Block, line);
      if (accept(":")) ident();
      while (!accept("end")) {
        if (at_end()) error("missing 'end'");
        s->body.push_back(parse_stmt());
      }
      return s;
    }
    if (accept("if")) {
      auto s = make(SK::If, line);
      expect("(");
      s->cond = parse_expr();
      expect(")");
      s->body.push_back(parse_stmt());
      s->body.push_back(accept("else") ? parse_stmt() : make(SK::Null, line));
      return s;
    }
    if (is("case") || is("casez") || is("casex")) {
      next();
      auto s = make(SK::Case, line);
      expect("(");
      s->cond = parse_expr();
      expect(")");
      while (!accept("endcase")) {
        if (at_end()) error("missing 'endcase'");
        CaseItem item;
        if (accept("default")) {
          accept(":");
        } else {
          do item.labels.push_back(parse_expr());
          while (accept(","));
          expect(":");
        }
        item.body = parse_stmt();
        s->items.push_back(std::move(item));
      }
      return s;
    }
    if (accept("for")) {
      auto s = make(SK::For, line);
      expect("(");
      s->init = parse_assign_stmt(false);
      expect(";");
      s->cond = parse_expr();
      expect(";");
      s->step = parse_assign_stmt(false);
      expect(")");
      s->body.push_back(parse_stmt());
      return s;
    }
    if (accept("while") || accept("repeat")) {
      auto s = make(toks_[pos_ - 1].text == "while" ? SK::While : SK::Repeat, line);
      expect("(");
      s->cond = parse_expr();
      expect(")");
      s->body.push_back(parse_stmt());
      return s;
    }
    if (is("forever") || is("@") || is("wait") || is("fork")) unsupported("'" + peek().text + "' statement");
    if (accept("#")) {
      auto s = make(SK::Delay, line);
      s->cond = parse_delay_value();
      s->body.push_back(parse_stmt());
      return s;
    }
    if (peek().kind == TokenKind::Ident && peek().text.starts_with("$")) return parse_system_task();
    auto s = parse_assign_stmt(true);
    expect(";");
    return s;
  }

  ExprP parse_delay_value() {
    if (accept("(")) {
      auto e = parse_expr();
      expect(")");
      return e;
    }
    if (peek().kind != TokenKind::Number && peek().kind != TokenKind::Ident) error("expected delay value");
    auto e = parse_primary();
    if (is(".")) {  // fractional delay such as #0.5: rounds down to whole units
      next();
      if (peek().kind == TokenKind::Number) next();
    }
    return e;
  }

  StmtP parse_assign_stmt(bool allow_nonblocking) {
    const int line = peek().line;
    auto s = make(SK::Assign, line);
    s->lhs = parse_lvalue();
    if (!accept("=")) {
      if (!(allow_nonblocking && accept("<="))) error("expected '='");
    }
    if (is("#")) unsupported("intra-assignment delay");
    s->rhs = parse_expr();
    return s;
  }

  StmtP parse_system_task() {
    const int line = peek().line;
    std::string name = next().text;
    if (name == "$display" || name == "$write" || name == "$strobe") {
      auto s = make(name == "$write" ? SK::Write : SK::Display, line);
      if (accept("(")) {
        if (!is(")")) {
          do s->args.push_back(parse_expr());
          while (accept(","));
        }
        expect(")");
      }
      expect(";");
      return s;
    }
    if (name == "$finish" || name == "$stop") {
      auto s = make(SK::Finish, line);
      if (accept("(")) {
        if (!is(")")) parse_expr();
        expect(")");
      }
      expect(";");
      return s;
    }
    if (name == "$dumpfile" || name == "$dumpvars" || name == "$timeformat") {
      if (accept("(")) {
        int depth = 1;
        while (depth > 0 && !at_end()) {
          if (is("(")) ++depth;
          if (is(")")) --depth;
          next();
        }
      }
      expect(";");
      return make(SK::Null, line);
    }
    syntax(file_, line, "system task " + name + " is not supported by the built-in evaluator");
  }

  // expressions

  ExprP node(EK k, int line) {
    auto e = std::make_unique<Expr>();
    e->kind = k;
    e->line = line;
    return e;
  }

  ExprP parse_lvalue() {
    const int line = peek().line;
    if (accept("{")) {
      auto e = node(EK::Concat, line);
      do e->args.push_back(parse_lvalue());
      while (accept(","));
      expect("}");
      return e;
    }
    return parse_ident_ref();
  }

  ExprP parse_ident_ref() {
    const int line = peek().line;
    auto name = ident();
    if (keyword(name)) syntax(file_, line, "unexpected keyword '" + name + "'");
    if (!accept("[")) {
      auto e = node(EK::Ident, line);
      e->name = name;
      return e;
    }
    auto first = parse_expr();
    if (is("+:") || is("-:")) unsupported("indexed part select");
    if (accept(":")) {
      auto e = node(EK::Range, line);
      e->name = name;
      e->args.push_back(std::move(first));
      e->args.push_back(parse_expr());
      expect("]");
      return e;
    }
    expect("]");
    if (is("[")) unsupported("multi-dimensional select");
    auto e = node(EK::Index, line);
    e->name = name;
    e->args.push_back(std::move(first));
    return e;
  }

  ExprP parse_expr() {
    auto c = parse_binary(0);
    if (!is("?")) return c;
    const int line = peek().line;
    next();
    auto e = node(EK::Ternary, line);
    e->args.push_back(std::move(c));
    e->args.push_back(parse_expr());
    expect(":");
    e->args.push_back(parse_expr());
    return e;
  }

  static int precedence(std::string_view op) {
    static const std::unordered_map<std::string_view, int> p = {
        {"||", 1}, {"&&", 2}, {"|", 3},   {"^", 4},   {"~^", 4},  {"^~", 4},  {"&", 5},  {"==", 6},
        {"!=", 6}, {"===", 6}, {"!==", 6}, {"<", 7},  {"<=", 7},  {">", 7},   {">=", 7}, {"<<", 8},
        {">>", 8}, {"<<<", 8}, {">>>", 8}, {"+", 9},  {"-", 9},   {"*", 10},  {"/", 10}, {"%", 10},
        {"**", 11}};
    auto it = p.find(op);
    return it == p.end() ? -1 : it->second;
  }

  ExprP parse_binary(int min_prec) {
    auto lhs = parse_unary();
    for (;;) {
      if (peek().kind != TokenKind::Symbol) return lhs;
      const int p = precedence(peek().text);
      if (p < 0 || p <= min_prec - 1 || p < min_prec) return lhs;
      const int line = peek().line;
      auto op = next().text;
      auto rhs = parse_binary(op == "**" ? p : p + 1);
      auto e = node(EK::Binary, line);
      e->op = op;
      e->args.push_back(std::move(lhs));
      e->args.push_back(std::move(rhs));
      lhs = std::move(e);
    }
  }

  ExprP parse_unary() {
    static const std::unordered_set<std::string_view> ops = {"+", "-", "!", "~", "&", "~&", "|", "~|", "^", "~^", "^~"};
    if (peek().kind == TokenKind::Symbol && ops.contains(peek().text)) {
      const int line = peek().line;
      auto e = node(EK::Unary, line);
      e->op = next().text;
      e->args.push_back(parse_unary());
      return e;
    }
    return parse_primary();
  }

  ExprP parse_number(const Token& t) {
    auto e = node(EK::Num, t.line);
    std::string s;
    for (char c : t.text)
      if (c != '_') s.push_back(c);
    auto q = s.find('\'');
    if (q == std::string::npos) {
      u64 v = 0;
      for (char c : s) {
        if (v > (~0ULL - 9) / 10) syntax(file_, t.line, "literal too large");
        v = v * 10 + static_cast<u64>(c - '0');
      }
      e->value = v;
      e->width = std::max(32, 64 - std::countl_zero(v | 1));
      return e;
    }
    int width = 32;
    if (q > 0) {
      width = std::stoi(s.substr(0, q));
      if (width < 1 || width > 64) syntax(file_, t.line, "literal width " + std::to_string(width) + " outside 1..64");
    }
    std::size_t i = q + 1;
    if (s[i] == 's' || s[i] == 'S') ++i;
    const char base = static_cast<char>(std::tolower(static_cast<unsigned char>(s[i++])));
    const int radix = base == 'b' ? 2 : base == 'o' ? 8 : base == 'd' ? 10 : 16;
    u64 v = 0;
    for (; i < s.size(); ++i) {
      char c = static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
      if (c == 'x' || c == 'z' || c == '?') syntax(file_, t.line, "x/z literal bits are not supported");
      int d = std::isdigit(static_cast<unsigned char>(c)) ? c - '0' : c - 'a' + 10;
      if (d >= radix) syntax(file_, t.line, "bad digit in literal " + t.text);
      v = v * static_cast<u64>(radix) + static_cast<u64>(d);
    }
    e->value = v & mask(width);
    e->width = width;
    return e;
  }

  ExprP parse_primary() {
    const auto& t = peek();
    const int line = t.line;
    if (t.kind == TokenKind::Number) return parse_number(next());
    if (t.kind == TokenKind::String) {
      auto e = node(EK::Str, line);
      e->name = next().text;
      return e;
    }
    if (t.kind == TokenKind::Ident && (t.text == "$time" || t.text == "$stime")) {
      next();
      return node(EK::Time, line);
    }
    if (t.kind == TokenKind::Ident && t.text.starts_with("$"))
      syntax(file_, line, "system function " + t.text + " is not supported by the built-in evaluator");
    if (accept("(")) {
      auto e = parse_expr();
      expect(")");
      return e;
    }
    if (accept("{")) {
      auto first = parse_expr();
      if (accept("{")) {
        auto e = node(EK::Repl, line);
        e->args.push_back(std::move(first));
        do e->args.push_back(parse_expr());
        while (accept(","));
        expect("}");
        expect("}");
        return e;
      }
      auto e = node(EK::Concat, line);
      e->args.push_back(std::move(first));
      while (accept(",")) e->args.push_back(parse_expr());
      expect("}");
      return e;
    }
    if (t.kind == TokenKind::Ident) return parse_ident_ref();
    error("expected expression");
  }

  std::string file_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------- resolution

void resolve(Expr* e, const Module& m) {
  if (!e) return;
  if (e->kind == EK::Ident || e->kind == EK::Index || e->kind == EK::Range) {
    auto it = m.index.find(e->name);
    if (it == m.index.end()) syntax(m.file, e->line, "undeclared identifier '" + e->name + "'");
    e->var = it->second;
  }
  for (auto& a : e->args) resolve(a.get(), m);
}

void resolve(Stmt* s, const Module& m) {
  if (!s) return;
  resolve(s->lhs.get(), m);
  resolve(s->rhs.get(), m);
  resolve(s->cond.get(), m);
  for (auto& b : s->body) resolve(b.get(), m);
  for (auto& it : s->items) {
    for (auto& l : it.labels) resolve(l.get(), m);
    resolve(it.body.get(), m);
  }
  resolve(s->init.get(), m);
  resolve(s->step.get(), m);
  for (auto& a : s->args)
    if (a->kind != EK::Str) resolve(a.get(), m);
}

void check_lvalue(const Expr& e, const Module& m) {
  if (e.kind == EK::Concat) {
    for (const auto& a : e.args) check_lvalue(*a, m);
    return;
  }
  if (e.kind != EK::Ident && e.kind != EK::Index && e.kind != EK::Range)
    syntax(m.file, e.line, "invalid assignment target");
  if (m.vars[static_cast<std::size_t>(e.var)].kind == VK::Param)
    syntax(m.file, e.line, "cannot assign to parameter '" + e.name + "'");
}

void check_stmt_lvalues(const Stmt* s, const Module& m) {
  if (!s) return;
  if (s->kind == SK::Assign) check_lvalue(*s->lhs, m);
  for (const auto& b : s->body) check_stmt_lvalues(b.get(), m);
  for (const auto& it : s->items) check_stmt_lvalues(it.body.get(), m);
  check_stmt_lvalues(s->init.get(), m);
  check_stmt_lvalues(s->step.get(), m);
}

void resolve_module(Module& m) {
  for (const auto& p : m.ports) {
    auto it = m.index.find(p);
    if (it == m.index.end() || m.vars[static_cast<std::size_t>(it->second)].dir == Dir::None)
      syntax(m.file, m.line, "port '" + p + "' has no direction declaration");
  }
  for (auto& v : m.vars) {
    resolve(v.msb.get(), m);
    resolve(v.lsb.get(), m);
    resolve(v.init.get(), m);
  }
  for (auto& a : m.assigns) {
    resolve(a.lhs.get(), m);
    resolve(a.rhs.get(), m);
    check_lvalue(*a.lhs, m);
  }
  for (auto& s : m.combs) {
    resolve(s.get(), m);
    check_stmt_lvalues(s.get(), m);
  }
  for (auto& s : m.initials) {
    resolve(s.get(), m);
    check_stmt_lvalues(s.get(), m);
  }
  for (auto& d : m.insts) {
    for (auto& p : d.params) resolve(p.expr.get(), m);
    for (auto& c : d.conns) resolve(c.expr.get(), m);
  }
}

// ------------------------------------------------------------- runtime

struct Inst {
  const Module* mod = nullptr;
  std::string path;
  std::vector<u64> val;
  std::vector<int> width;
  std::vector<int> msb, lsb;
  struct Child {
    std::unique_ptr<Inst> inst;
    std::vector<std::pair<int, const Expr*>> inputs;   // child var <- parent expr
    std::vector<std::pair<int, const Expr*>> outputs;  // parent lvalue <- child var
  };
  std::vector<Child> kids;
};

struct Finished {};

class Engine {
 public:
  Engine(double timeout_s, long max_steps)
      : deadline_(std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                         std::chrono::duration<double>(timeout_s))),
        max_steps_(max_steps) {}

  std::string out;
  u64 time = 0;

  [[noreturn]] void runtime(const Inst& in, int line, const std::string& msg) const {
    fail("eval.RtlRuntime", in.mod->file + ":" + std::to_string(line) + ": " + msg);
  }

  void tick(const Inst& in, int line) {
    if (++steps_ > max_steps_) runtime(in, line, "statement limit exceeded");
    if ((steps_ & 0xfff) == 0 && std::chrono::steady_clock::now() > deadline_)
      fail("eval.Timeout", "simulation exceeded its time limit");
  }

  int width(const Expr& e, const Inst& in) const {
    switch (e.kind) {
      case EK::Num: return e.width;
      case EK::Str: return std::max<int>(8, 8 * static_cast<int>(e.name.size()));
      case EK::Time: return 64;
      case EK::Ident: return in.width[static_cast<std::size_t>(e.var)];
      case EK::Index: return 1;
      case EK::Range: {
        auto m = static_cast<long long>(const_eval(*e.args[0], in));
        auto l = static_cast<long long>(const_eval(*e.args[1], in));
        return static_cast<int>(std::llabs(m - l) + 1);
      }
      case EK::Unary:
        if (e.op == "~" || e.op == "-" || e.op == "+") return width(*e.args[0], in);
        return 1;
      case EK::Binary: {
        const auto& op = e.op;
        if (op == "==" || op == "!=" || op == "===" || op == "!==" || op == "<" || op == "<=" || op == ">" ||
            op == ">=" || op == "&&" || op == "||")
          return 1;
        if (op == "<<" || op == ">>" || op == "<<<" || op == ">>>" || op == "**") return width(*e.args[0], in);
        return std::max(width(*e.args[0], in), width(*e.args[1], in));
      }
      case EK::Ternary: return std::max(width(*e.args[1], in), width(*e.args[2], in));
      case EK::Concat: {
        int w = 0;
        for (const auto& a : e.args) w += width(*a, in);
        if (w > 64) runtime(in, e.line, "concatenation wider than 64 bits");
        return w;
      }
      case EK::Repl: {
        int w = 0;
        for (std::size_t i = 1; i < e.args.size(); ++i) w += width(*e.args[i], in);
        auto n = const_eval(*e.args[0], in);
        if (n * static_cast<u64>(w) > 64) runtime(in, e.line, "replication wider than 64 bits");
        return static_cast<int>(n) * w;
      }
    }
    return 1;
  }

  u64 const_eval(const Expr& e, const Inst& in) const {
    return const_cast<Engine*>(this)->eval(e, const_cast<Inst&>(in), width(e, in));
  }

  // bit offset of index i within variable v
  long long offset(const Inst& in, int v, long long i) const {
    const auto m = in.msb[static_cast<std::size_t>(v)], l = in.lsb[static_cast<std::size_t>(v)];
    return m >= l ? i - l : l - i;
  }

  u64 eval(const Expr& e, Inst& in, int ctx) {
    const u64 m = mask(ctx);
    switch (e.kind) {
      case EK::Num: return e.value & m;
      case EK::Str: {
        u64 v = 0;
        for (char c : e.name) v = (v << 8) | static_cast<unsigned char>(c);
        return v & m;
      }
      case EK::Time: return time & m;
      case EK::Ident: return in.val[static_cast<std::size_t>(e.var)] & m;
      case EK::Index: {
        auto i = static_cast<long long>(eval(*e.args[0], in, width(*e.args[0], in)));
        auto off = offset(in, e.var, i);
        if (off < 0 || off >= in.width[static_cast<std::size_t>(e.var)]) return 0;
        return (in.val[static_cast<std::size_t>(e.var)] >> off) & 1ULL & m;
      }
      case EK::Range: {
        auto hi = static_cast<long long>(const_eval(*e.args[0], in));
        auto lo = static_cast<long long>(const_eval(*e.args[1], in));
        auto o1 = offset(in, e.var, hi), o2 = offset(in, e.var, lo);
        auto base = std::min(o1, o2);
        int w = static_cast<int>(std::llabs(o1 - o2) + 1);
        if (base < 0 || base + w > in.width[static_cast<std::size_t>(e.var)])
          runtime(in, e.line, "part select outside '" + e.name + "'");
        return (in.val[static_cast<std::size_t>(e.var)] >> base) & mask(w) & m;
      }
      case EK::Unary: return eval_unary(e, in, ctx);
      case EK::Binary: return eval_binary(e, in, ctx);
      case EK::Ternary: {
        const auto& c = *e.args[0];
        return eval(c, in, width(c, in)) != 0 ? eval(*e.args[1], in, ctx) : eval(*e.args[2], in, ctx);
      }
      case EK::Concat: {
        u64 v = 0;
        for (const auto& a : e.args) {
          int w = width(*a, in);
          v = (w >= 64 ? 0 : v << w) | eval(*a, in, w);
        }
        return v & m;
      }
      case EK::Repl: {
        auto n = const_eval(*e.args[0], in);
        u64 part = 0;
        int pw = 0;
        for (std::size_t i = 1; i < e.args.size(); ++i) {
          int w = width(*e.args[i], in);
          part = (w >= 64 ? 0 : part << w) | eval(*e.args[i], in, w);
          pw += w;
        }
        u64 v = 0;
        for (u64 k = 0; k < n; ++k) v = (pw >= 64 ? 0 : v << pw) | part;
        return v & m;
      }
    }
    return 0;
  }

  u64 eval_unary(const Expr& e, Inst& in, int ctx) {
    const auto& a = *e.args[0];
    const auto& op = e.op;
    if (op == "~") return ~eval(a, in, ctx) & mask(ctx);
    if (op == "-") return (0 - eval(a, in, ctx)) & mask(ctx);
    if (op == "+") return eval(a, in, ctx);
    const int w = width(a, in);
    const u64 v = eval(a, in, w);
    u64 r = 0;
    if (op == "!") r = v == 0;
    else if (op == "&") r = v == mask(w);
    else if (op == "~&") r = v != mask(w);
    else if (op == "|") r = v != 0;
    else if (op == "~|") r = v == 0;
    else if (op == "^") r = std::popcount(v) & 1;
    else r = !(std::popcount(v) & 1);
    return r & mask(ctx);
  }

  u64 eval_binary(const Expr& e, Inst& in, int ctx) {
    const auto& a = *e.args[0];
    const auto& b = *e.args[1];
    const auto& op = e.op;
    const u64 m = mask(ctx);
    if (op == "&&" || op == "||") {
      bool x = eval(a, in, width(a, in)) != 0;
      if (op == "&&" && !x) return 0;
      if (op == "||" && x) return 1 & m;
      return (eval(b, in, width(b, in)) != 0) & m;
    }
    if (op == "==" || op == "!=" || op == "===" || op == "!==" || op == "<" || op == "<=" || op == ">" ||
        op == ">=") {
      const int w = std::max(width(a, in), width(b, in));
      const u64 x = eval(a, in, w), y = eval(b, in, w);
      bool r = op == "==" || op == "===" ? x == y
               : op == "!=" || op == "!==" ? x != y
               : op == "<"                 ? x < y
               : op == "<="                ? x <= y
               : op == ">"                 ? x > y
                                           : x >= y;
      return static_cast<u64>(r) & m;
    }
    if (op == "<<" || op == ">>" || op == "<<<" || op == ">>>") {
      const u64 x = eval(a, in, ctx);
      const u64 s = eval(b, in, width(b, in));
      if (s >= 64) return 0;
      return (op[0] == '<' ? x << s : x >> s) & m;
    }
    if (op == "**") {
      u64 base = eval(a, in, ctx), exp = eval(b, in, width(b, in)), r = 1;
      for (; exp; exp >>= 1, base *= base)
        if (exp & 1) r *= base;
      return r & m;
    }
    const u64 x = eval(a, in, ctx), y = eval(b, in, ctx);
    if (op == "+") return (x + y) & m;
    if (op == "-") return (x - y) & m;
    if (op == "*") return (x * y) & m;
    if (op == "/") return y == 0 ? m : (x / y) & m;
    if (op == "%") return y == 0 ? m : (x % y) & m;
    if (op == "&") return x & y;
    if (op == "|") return x | y;
    if (op == "^") return x ^ y;
    return ~(x ^ y) & m;  // ~^ ^~
  }

  // Writes the low bits of `value` into an lvalue; returns whether any
  // stored bit changed.
  bool store(const Expr& lv, Inst& in, u64 value) {
    if (lv.kind == EK::Concat) {
      bool changed = false;
      for (auto it = lv.args.rbegin(); it != lv.args.rend(); ++it) {
        int w = width(**it, in);
        changed |= store(**it, in, value & mask(w));
        value = w >= 64 ? 0 : value >> w;
      }
      return changed;
    }
    const auto v = static_cast<std::size_t>(lv.var);
    u64& slot = in.val[v];
    const u64 old = slot;
    const int vw = in.width[v];
    if (lv.kind == EK::Ident) {
      slot = value & mask(vw);
    } else if (lv.kind == EK::Index) {
      auto i = static_cast<long long>(eval(*lv.args[0], in, width(*lv.args[0], in)));
      auto off = offset(in, lv.var, i);
      if (off < 0 || off >= vw) return false;
      slot = (slot & ~(1ULL << off)) | ((value & 1ULL) << off);
    } else {
      auto o1 = offset(in, lv.var, static_cast<long long>(const_eval(*lv.args[0], in)));
      auto o2 = offset(in, lv.var, static_cast<long long>(const_eval(*lv.args[1], in)));
      auto base = std::min(o1, o2);
      int w = static_cast<int>(std::llabs(o1 - o2) + 1);
      if (base < 0 || base + w > vw) runtime(in, lv.line, "part select outside '" + lv.name + "'");
      const u64 field = mask(w) << base;
      slot = (slot & ~field) | ((value << base) & field);
    }
    return slot != old;
  }

  bool assign(const Expr& lhs, const Expr& rhs, Inst& in) {
    const int ctx = std::max(width(lhs, in), width(rhs, in));
    return store(lhs, in, eval(rhs, in, std::min(ctx, 64)));
  }

  bool truthy(const Expr& e, Inst& in) { return eval(e, in, width(e, in)) != 0; }

  void settle(Inst& in) {
    for (int iter = 0; iter < 256; ++iter) {
      bool changed = false;
      for (auto& k : in.kids) {
        for (const auto& [cv, pe] : k.inputs) {
          const int cw = k.inst->width[static_cast<std::size_t>(cv)];
          k.inst->val[static_cast<std::size_t>(cv)] = eval(*pe, in, std::max(cw, width(*pe, in))) & mask(cw);
        }
        settle(*k.inst);
        for (const auto& [cv, pe] : k.outputs) changed |= store(*pe, in, k.inst->val[static_cast<std::size_t>(cv)]);
      }
      for (const auto& a : in.mod->assigns) changed |= assign(*a.lhs, *a.rhs, in);
      for (const auto& s : in.mod->combs) {
        auto before = in.val;
        exec(*s, in, false);
        changed |= before != in.val;
      }
      if (!changed) return;
    }
    runtime(in, in.mod->line, "combinational logic in '" + in.path + "' does not settle");
  }

  void exec(const Stmt& s, Inst& in, bool timed) {
    tick(in, s.line);
    switch (s.kind) {
      case SK::Null: return;
      case SK::Block:
        for (const auto& b : s.body) exec(*b, in, timed);
        return;
      case SK::Assign: assign(*s.lhs, *s.rhs, in); return;
      case SK::If: exec(truthy(*s.cond, in) ? *s.body[0] : *s.body[1], in, timed); return;
      case SK::Case: {
        const int cw = width(*s.cond, in);
        for (const auto& item : s.items) {
          bool hit = item.labels.empty();
          for (const auto& l : item.labels) {
            const int w = std::max(cw, width(*l, in));
            if (eval(*s.cond, in, w) == eval(*l, in, w)) {
              hit = true;
              break;
            }
          }
          if (hit && !item.labels.empty()) return exec(*item.body, in, timed);
        }
        for (const auto& item : s.items)
          if (item.labels.empty()) return exec(*item.body, in, timed);
        return;
      }
      case SK::For:
        for (exec(*s.init, in, timed); truthy(*s.cond, in); exec(*s.step, in, timed)) {
          exec(*s.body[0], in, timed);
          tick(in, s.line);
        }
        return;
      case SK::While:
        while (truthy(*s.cond, in)) {
          exec(*s.body[0], in, timed);
          tick(in, s.line);
        }
        return;
      case SK::Repeat:
        for (u64 n = eval(*s.cond, in, width(*s.cond, in)); n > 0; --n) exec(*s.body[0], in, timed);
        return;
      case SK::Delay:
        if (!timed) runtime(in, s.line, "delay inside combinational logic");
        time += eval(*s.cond, in, width(*s.cond, in));
        settle(root(in));
        exec(*s.body[0], in, timed);
        return;
      case SK::Display:
      case SK::Write:
        out += format(s, in);
        if (s.kind == SK::Display) out += '\n';
        return;
      case SK::Finish: throw Finished{};
    }
  }

  Inst* top = nullptr;
  Inst& root(Inst&) { return *top; }

  std::string format(const Stmt& s, Inst& in) {
    std::string r;
    std::size_t i = 0;
    auto value_text = [&](const Expr& e, char conv, bool pad) {
      const int w = width(e, in);
      const u64 v = eval(e, in, w);
      std::string t;
      if (conv == 'd') {
        t = std::to_string(v);
        if (pad) {
          std::size_t digits = std::to_string(mask(w)).size();
          if (t.size() < digits) t.insert(0, digits - t.size(), ' ');
        }
      } else if (conv == 'b') {
        for (int b = w - 1; b >= 0; --b) t += ((v >> b) & 1) ? '1' : '0';
        if (!pad) t.erase(0, std::min(t.find_first_not_of('0'), t.size() - 1));
      } else if (conv == 'h' || conv == 'x' || conv == 'o') {
        const int bits = conv == 'o' ? 3 : 4;
        const int n = (w + bits - 1) / bits;
        for (int d = n - 1; d >= 0; --d) t += "0123456789abcdef"[(v >> (d * bits)) & ((1u << bits) - 1)];
        if (!pad) t.erase(0, std::min(t.find_first_not_of('0'), t.size() - 1));
      } else if (conv == 'c') {
        t += static_cast<char>(v & 0xff);
      } else if (conv == 's') {
        for (int b = (w + 7) / 8 - 1; b >= 0; --b) {
          char c = static_cast<char>((v >> (8 * b)) & 0xff);
          if (c) t += c;
        }
      } else {  // t
        t = std::to_string(v);
      }
      return t;
    };
    while (i < s.args.size()) {
      const auto& a = *s.args[i++];
      if (a.kind != EK::Str) {
        r += value_text(a, 'd', true);
        continue;
      }
      const auto& f = a.name;
      for (std::size_t k = 0; k < f.size(); ++k) {
        if (f[k] != '%') {
          r += f[k];
          continue;
        }
        if (++k >= f.size()) break;
        if (f[k] == '%') {
          r += '%';
          continue;
        }
        int field = -1;
        while (k < f.size() && std::isdigit(static_cast<unsigned char>(f[k]))) {
          field = std::max(field, 0) * 10 + (f[k] - '0');
          ++k;
        }
        if (k >= f.size()) break;
        char conv = static_cast<char>(std::tolower(static_cast<unsigned char>(f[k])));
        if (conv == 'm') {
          r += in.path;
          continue;
        }
        if (std::string_view("dbhxocst").find(conv) == std::string_view::npos)
          runtime(in, s.line, std::string("unsupported format %") + conv);
        if (i >= s.args.size()) runtime(in, s.line, "missing argument for format");
        auto t = value_text(*s.args[i++], conv, field < 0);
        if (field > 0 && static_cast<int>(t.size()) < field) t.insert(0, static_cast<std::size_t>(field) - t.size(), ' ');
        r += t;
      }
    }
    return r;
  }

 private:
  std::chrono::steady_clock::time_point deadline_;
  long max_steps_;
  long steps_ = 0;
};

}  // namespace

struct RtlDesign::Impl {
  std::vector<Module> modules;
  std::unordered_map<std::string, std::size_t> by_name;
  std::string top;

  const Module& module(const std::string& name) const { return modules[by_name.at(name)]; }

  std::unique_ptr<Inst> elaborate(const Module& m, const std::string& path, Engine& eng,
                                  const std::vector<std::pair<int, u64>>& overrides, int depth) const {
    if (depth > 64) syntax(m.file, m.line, "instance hierarchy too deep (recursive instantiation?)");
    auto in = std::make_unique<Inst>();
    in->mod = &m;
    in->path = path;
    const auto n = m.vars.size();
    in->val.assign(n, 0);
    in->width.assign(n, 32);
    in->msb.assign(n, 31);
    in->lsb.assign(n, 0);
    auto set_range = [&](std::size_t i) {
      const auto& v = m.vars[i];
      if (!v.msb) {
        in->width[i] = v.kind == VK::Integer || v.kind == VK::Param ? in->width[i] : 1;
        in->msb[i] = in->width[i] - 1;
        return;
      }
      auto hi = static_cast<long long>(eng.const_eval(*v.msb, *in));
      auto lo = static_cast<long long>(eng.const_eval(*v.lsb, *in));
      // values above 2^31 are negative numbers in a 32-bit context
      if (hi >= (1LL << 31)) hi -= (1LL << 32);
      if (lo >= (1LL << 31)) lo -= (1LL << 32);
      const auto w = std::llabs(hi - lo) + 1;
      if (w > 64) syntax(m.file, v.line, "'" + v.name + "' is wider than 64 bits");
      in->width[i] = static_cast<int>(w);
      in->msb[i] = static_cast<int>(hi);
      in->lsb[i] = static_cast<int>(lo);
    };
    for (std::size_t i = 0; i < n; ++i) {
      const auto& v = m.vars[i];
      if (v.kind != VK::Param) continue;
      auto ov = std::find_if(overrides.begin(), overrides.end(), [&](const auto& p) { return p.first == static_cast<int>(i); });
      if (v.msb) {
        set_range(i);
      } else {
        in->width[i] = std::max(1, eng.width(*v.init, *in));
        in->msb[i] = in->width[i] - 1;
      }
      in->val[i] = (ov != overrides.end() ? ov->second : eng.eval(*v.init, *in, in->width[i])) & mask(in->width[i]);
    }
    for (std::size_t i = 0; i < n; ++i)
      if (m.vars[i].kind != VK::Param) set_range(i);
    for (std::size_t i = 0; i < n; ++i)
      if (m.vars[i].kind != VK::Param && m.vars[i].init)
        in->val[i] = eng.eval(*m.vars[i].init, *in, in->width[i]) & mask(in->width[i]);

    for (const auto& d : m.insts) {
      auto it = by_name.find(d.module);
      if (it == by_name.end()) syntax(m.file, d.line, "unknown module '" + d.module + "'");
      const auto& cm = modules[it->second];
      std::vector<int> cparams;
      for (std::size_t i = 0; i < cm.vars.size(); ++i)
        if (cm.vars[i].kind == VK::Param) cparams.push_back(static_cast<int>(i));
      std::vector<std::pair<int, u64>> ov;
      for (std::size_t k = 0; k < d.params.size(); ++k) {
        const auto& p = d.params[k];
        int target = -1;
        if (p.port.empty()) {
          if (k >= cparams.size()) syntax(m.file, d.line, "too many parameter overrides for '" + d.module + "'");
          target = cparams[k];
        } else {
          auto pi = cm.index.find(p.port);
          if (pi == cm.index.end() || cm.vars[static_cast<std::size_t>(pi->second)].kind != VK::Param)
            syntax(m.file, d.line, "'" + d.module + "' has no parameter '" + p.port + "'");
          target = pi->second;
        }
        if (p.expr) ov.emplace_back(target, eng.const_eval(*p.expr, *in));
      }
      Inst::Child child;
      child.inst = elaborate(cm, path + "." + d.name, eng, ov, depth + 1);
      for (std::size_t k = 0; k < d.conns.size(); ++k) {
        const auto& c = d.conns[k];
        std::string port;
        if (c.port.empty()) {
          if (k >= cm.ports.size()) syntax(m.file, d.line, "too many connections for '" + d.module + "'");
          port = cm.ports[k];
        } else {
          port = c.port;
        }
        auto pi = cm.index.find(port);
        if (pi == cm.index.end() || std::find(cm.ports.begin(), cm.ports.end(), port) == cm.ports.end())
          syntax(m.file, d.line, "'" + d.module + "' has no port '" + port + "'");
        if (!c.expr) continue;
        const auto dir = cm.vars[static_cast<std::size_t>(pi->second)].dir;
        if (dir == Dir::In) {
          child.inputs.emplace_back(pi->second, c.expr.get());
        } else {
          check_lvalue(*c.expr, m);
          child.outputs.emplace_back(pi->second, c.expr.get());
        }
      }
      in->kids.push_back(std::move(child));
    }
    return in;
  }
};

RtlDesign::RtlDesign(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
RtlDesign::RtlDesign(RtlDesign&&) noexcept = default;
RtlDesign& RtlDesign::operator=(RtlDesign&&) noexcept = default;
RtlDesign::~RtlDesign() = default;

const std::string& RtlDesign::top() const { return impl_->top; }

RtlDesign RtlDesign::compile(const std::vector<Source>& sources) {
  auto impl = std::make_unique<Impl>();
  for (const auto& src : sources) {
    for (auto& m : Parser(src.name, src.text).parse()) {
      if (impl->by_name.contains(m.name)) syntax(m.file, m.line, "module '" + m.name + "' defined twice");
      impl->by_name[m.name] = impl->modules.size();
      impl->modules.push_back(std::move(m));
    }
  }
  if (impl->modules.empty()) fail("eval.RtlSyntax", "no modules found");
  std::unordered_set<std::string> instantiated;
  for (auto& m : impl->modules) {
    resolve_module(m);
    for (const auto& d : m.insts) instantiated.insert(d.module);
  }
  std::vector<const Module*> tops;
  for (const auto& m : impl->modules)
    if (!instantiated.contains(m.name)) tops.push_back(&m);
  if (tops.size() > 1) {
    std::vector<const Module*> with_initial;
    for (const auto* m : tops)
      if (!m->initials.empty()) with_initial.push_back(m);
    if (with_initial.size() == 1) tops = with_initial;
  }
  if (tops.size() != 1) fail("eval.RtlSyntax", "cannot determine a single top module");
  impl->top = tops[0]->name;
  // elaborate once to surface width and connection errors at compile time
  Engine eng(60, 1'000'000);
  impl->elaborate(*tops[0], impl->top, eng, {}, 0);
  return RtlDesign(std::move(impl));
}

std::string RtlDesign::run(double timeout_s, long max_steps) const {
  Engine eng(timeout_s, max_steps);
  auto top = impl_->elaborate(impl_->module(impl_->top), impl_->top, eng, {}, 0);
  eng.top = top.get();
  try {
    eng.settle(*top);
    for (const auto& s : top->mod->initials) eng.exec(*s, *top, true);
  } catch (const Finished&) {
  }
  return eng.out;
}

}  // namespace netreason::eval

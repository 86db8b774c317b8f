#include "expr.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace symctl {

namespace {

NodePtr make_node(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

bool is_unary_fn(Op op) {
  switch (op) {
    case Op::Sin: case Op::Cos: case Op::Tan: case Op::Atan:
    case Op::Exp: case Op::Sqrt: case Op::Abs: case Op::Sign:
      return true;
    default:
      return false;
  }
}

const char* fn_name(Op op) {
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tan: return "tan";
    case Op::Atan: return "atan";
    case Op::Exp: return "exp";
    case Op::Sqrt: return "sqrt";
    case Op::Abs: return "abs";
    case Op::Sign: return "sign";
    default: return "?";
  }
}

// Real-valued kernels shared by the recursive evaluator and the tape.
double real_unary(Op op, double v, const std::function<std::string()>& where) {
  auto fail = [&](const char* msg) -> double { throw Error(ErrorKind::Domain, std::string(msg) + " in '" + where() + "'"); };
  switch (op) {
    case Op::Neg: return -v;
    case Op::Sin: return std::sin(v);
    case Op::Cos: return std::cos(v);
    case Op::Tan:
      if (std::fabs(std::cos(v)) < 1e-12) return fail("tan evaluated at a pole");
      return std::tan(v);
    case Op::Atan: return std::atan(v);
    case Op::Exp: return std::exp(v);
    case Op::Sqrt:
      if (v < 0) return fail("sqrt of a negative value");
      return std::sqrt(v);
    case Op::Abs: return std::fabs(v);
    case Op::Sign: return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
    default: return fail("bad unary operator");
  }
}

double real_pow(double v, int k, const std::function<std::string()>& where) {
  if (k < 0 && v == 0.0) throw Error(ErrorKind::Domain, "negative power of zero in '" + where() + "'");
  double r = 1.0;
  double base = k < 0 ? 1.0 / v : v;
  for (int i = 0, n = std::abs(k); i < n; ++i) r *= base;
  return r;
}

double real_binary(Op op, double a, double b, const std::function<std::string()>& where) {
  switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div:
      if (b == 0.0) throw Error(ErrorKind::Domain, "division by zero in '" + where() + "'");
      return a / b;
    default: throw Error(ErrorKind::Internal, "bad binary operator");
  }
}

Interval interval_unary(Op op, const Interval& v) {
  switch (op) {
    case Op::Neg: return -v;
    case Op::Sin: return sin(v);
    case Op::Cos: return cos(v);
    case Op::Tan: return tan(v);
    case Op::Atan: return atan(v);
    case Op::Exp: return exp(v);
    case Op::Sqrt: return sqrt(v);
    case Op::Abs: return abs(v);
    case Op::Sign:
      if (v.lo() > 0) return Interval(1.0);
      if (v.hi() < 0) return Interval(-1.0);
      return Interval(v.lo() < 0 ? -1.0 : 0.0, v.hi() > 0 ? 1.0 : 0.0);
    default: throw Error(ErrorKind::Internal, "bad unary operator");
  }
}

Interval interval_binary(Op op, const Interval& a, const Interval& b) {
  switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div: return a / b;
    default: throw Error(ErrorKind::Internal, "bad binary operator");
  }
}

double fold(Op op, double a, double b, int k) {
  auto where = [] { return std::string("constant expression"); };
  if (op == Op::Pow) return real_pow(a, k, where);
  if (op == Op::Neg || is_unary_fn(op)) return real_unary(op, a, where);
  return real_binary(op, a, b, where);
}

}  // namespace

// ---------------------------------------------------------------------------
// Smart constructors

Expr Expr::constant(double v) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Const;
  n->value = v;
  return Expr(n);
}

Expr Expr::state(int i) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::StateVar;
  n->index = i;
  return Expr(n);
}

Expr Expr::input(int i) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::InputVar;
  n->index = i;
  return Expr(n);
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.node().value + b.node().value);
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  return Expr(make_node(Op::Add, a.ptr(), b.ptr()));
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.node().value - b.node().value);
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  return Expr(make_node(Op::Sub, a.ptr(), b.ptr()));
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.node().value * b.node().value);
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  return Expr(make_node(Op::Mul, a.ptr(), b.ptr()));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_constant(0.0)) throw Error(ErrorKind::Domain, "division by constant zero");
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.node().value / b.node().value);
  if (a.is_constant(0.0)) return Expr::constant(0.0);
  if (b.is_constant(1.0)) return a;
  return Expr(make_node(Op::Div, a.ptr(), b.ptr()));
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.node().value);
  if (a.node().op == Op::Neg) return Expr(a.node().a);
  return Expr(make_node(Op::Neg, a.ptr()));
}

Expr pow(const Expr& a, int k) {
  if (k == 0) return Expr::constant(1.0);
  if (k == 1) return a;
  if (a.is_constant()) return Expr::constant(fold(Op::Pow, a.node().value, 0.0, k));
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Pow;
  n->a = a.ptr();
  n->exponent = k;
  return Expr(n);
}

Expr apply(Op fn, const Expr& a) {
  if (fn == Op::Neg) return -a;
  if (!is_unary_fn(fn)) throw Error(ErrorKind::Internal, "apply: not a unary function");
  if (a.is_constant()) return Expr::constant(fold(fn, a.node().value, 0.0, 0));
  return Expr(make_node(fn, a.ptr()));
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  bool integral = false;
  int line = 1, col = 1;
};

class Lexer {
 public:
  Lexer(std::string_view s, int line) : s_(s), line_(line) {}

  Token next() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) advance();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= s_.size()) {
      t.kind = Tok::End;
      return t;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(t);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) advance();
      t.kind = Tok::Ident;
      t.text = std::string(s_.substr(start, pos_ - start));
      return t;
    }
    advance();
    t.text = std::string(1, c);
    switch (c) {
      case '+': t.kind = Tok::Plus; return t;
      case '-': t.kind = Tok::Minus; return t;
      case '*': t.kind = Tok::Star; return t;
      case '/': t.kind = Tok::Slash; return t;
      case '^': t.kind = Tok::Caret; return t;
      case '(': t.kind = Tok::LParen; return t;
      case ')': t.kind = Tok::RParen; return t;
      default: throw SyntaxError(std::string("unexpected character '") + c + "'", t.line, t.col);
    }
  }

 private:
  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  Token number(Token& t) {
    const std::size_t start = pos_;
    bool integral = true;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) advance();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      integral = false;
      advance();
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) advance();
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      integral = false;
      advance();
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) advance();
      if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
        throw SyntaxError("malformed number exponent", t.line, t.col);
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) advance();
    }
    t.kind = Tok::Number;
    t.text = std::string(s_.substr(start, pos_ - start));
    t.integral = integral;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size())
      throw SyntaxError("malformed number '" + t.text + "'", t.line, t.col);
    return t;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
  int col_ = 1;
};

const std::map<std::string, Op, std::less<>>& functions() {
  static const std::map<std::string, Op, std::less<>> fns = {
      {"sin", Op::Sin}, {"cos", Op::Cos},   {"tan", Op::Tan}, {"atan", Op::Atan},
      {"exp", Op::Exp}, {"sqrt", Op::Sqrt}, {"abs", Op::Abs}, {"neg", Op::Neg},
      {"sign", Op::Sign},
  };
  return fns;
}

class Parser {
 public:
  Parser(std::string_view text, const SymbolTable& symbols, int line) : lex_(text, line), sym_(symbols) {
    cur_ = lex_.next();
  }

  Expr parse() {
    Expr e = expr();
    if (cur_.kind != Tok::End) fail("unexpected '" + cur_.text + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    if (cur_.kind == Tok::End) throw SyntaxError(msg.empty() ? "unexpected end of input" : msg + " (end of input)", cur_.line, cur_.col);
    throw SyntaxError(msg, cur_.line, cur_.col);
  }

  void take() { cur_ = lex_.next(); }

  void expect(Tok k, const char* what) {
    if (cur_.kind != k) {
      if (cur_.kind == Tok::End) fail("");
      fail(std::string("expected ") + what + " but found '" + cur_.text + "'");
    }
    take();
  }

  Expr expr() {
    Expr e = term();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      const bool plus = cur_.kind == Tok::Plus;
      take();
      Expr r = term();
      e = plus ? e + r : e - r;
    }
    return e;
  }

  Expr term() {
    Expr e = factor();
    while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
      const bool mul = cur_.kind == Tok::Star;
      const Token at = cur_;
      take();
      Expr r = factor();
      if (!mul && r.is_constant(0.0)) throw SyntaxError("division by constant zero", at.line, at.col);
      e = mul ? e * r : e / r;
    }
    return e;
  }

  Expr factor() {
    if (cur_.kind == Tok::Minus) {
      take();
      return -factor();
    }
    Expr b = base();
    if (cur_.kind == Tok::Caret) {
      take();
      bool negative = false;
      if (cur_.kind == Tok::Minus) {
        negative = true;
        take();
      }
      if (cur_.kind == Tok::End) fail("");
      if (cur_.kind != Tok::Number || !cur_.integral)
        throw Error(ErrorKind::NonIntegerExponent, "non-integer exponent '" + cur_.text + "' at line " +
                                                       std::to_string(cur_.line) + ", column " + std::to_string(cur_.col));
      const int k = static_cast<int>(cur_.number);
      take();
      return pow(b, negative ? -k : k);
    }
    return b;
  }

  Expr base() {
    const Token t = cur_;
    switch (t.kind) {
      case Tok::Number:
        take();
        return Expr::constant(t.number);
      case Tok::LParen: {
        take();
        Expr e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident:
        take();
        return identifier(t);
      case Tok::End:
        fail("");
      default:
        fail("unexpected '" + t.text + "'");
    }
  }

  Expr identifier(const Token& t) {
    if (auto it = functions().find(t.text); it != functions().end()) {
      if (cur_.kind != Tok::LParen) fail("expected '(' after function '" + t.text + "'");
      take();
      Expr arg = expr();
      expect(Tok::RParen, "')'");
      return apply(it->second, arg);
    }
    if (auto it = sym_.definitions.find(t.text); it != sym_.definitions.end()) return it->second;
    if (auto it = sym_.constants.find(t.text); it != sym_.constants.end()) return Expr::constant(it->second);
    if (t.text == "pi") return Expr::constant(std::numbers::pi);
    if (t.text.size() >= 2 && (t.text[0] == 'x' || t.text[0] == 'u')) {
      int idx = 0;
      auto [ptr, ec] = std::from_chars(t.text.data() + 1, t.text.data() + t.text.size(), idx);
      if (ec == std::errc() && ptr == t.text.data() + t.text.size() && t.text[1] != '0') {
        const int limit = t.text[0] == 'x' ? sym_.state_dim : sym_.input_dim;
        if (idx >= 1 && idx <= limit) return t.text[0] == 'x' ? Expr::state(idx - 1) : Expr::input(idx - 1);
      }
    }
    throw Error(ErrorKind::UnknownIdentifier, "unknown identifier '" + t.text + "' at line " +
                                                  std::to_string(t.line) + ", column " + std::to_string(t.col));
  }

  Lexer lex_;
  const SymbolTable& sym_;
  Token cur_;
};

}  // namespace

Expr parse_expr(std::string_view text, const SymbolTable& symbols, int line) {
  return Parser(text, symbols, line).parse();
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const ExprNode& n) {
  switch (n.op) {
    case Op::Add: case Op::Sub: return 1;
    case Op::Mul: case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, ptr);
  if (v < 0) return "(" + s + ")";
  return s;
}

void print(const ExprNode& n, std::string& out) {
  auto child = [&](const ExprNode& c, int min_prec) {
    if (precedence(c) < min_prec) {
      out += '(';
      print(c, out);
      out += ')';
    } else {
      print(c, out);
    }
  };
  switch (n.op) {
    case Op::Const: out += format_number(n.value); break;
    case Op::StateVar: out += "x" + std::to_string(n.index + 1); break;
    case Op::InputVar: out += "u" + std::to_string(n.index + 1); break;
    case Op::Neg: out += '-'; child(*n.a, 3); break;
    case Op::Add: child(*n.a, 1); out += " + "; child(*n.b, 2); break;
    case Op::Sub: child(*n.a, 1); out += " - "; child(*n.b, 2); break;
    case Op::Mul: child(*n.a, 2); out += "*"; child(*n.b, 3); break;
    case Op::Div: child(*n.a, 2); out += "/"; child(*n.b, 3); break;
    case Op::Pow: child(*n.a, 5); out += "^" + std::to_string(n.exponent); break;
    default:
      out += fn_name(n.op);
      out += '(';
      print(*n.a, out);
      out += ')';
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string s;
  if (e.valid()) print(e.node(), s);
  return s;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double eval_real_node(const ExprNode& n, std::span<const double> x, std::span<const double> u) {
  auto where = [&] { return to_string(Expr(std::shared_ptr<const ExprNode>(std::shared_ptr<const ExprNode>{}, &n))); };
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::StateVar: return x[n.index];
    case Op::InputVar: return u[n.index];
    case Op::Pow: return real_pow(eval_real_node(*n.a, x, u), n.exponent, where);
    case Op::Add: case Op::Sub: case Op::Mul: case Op::Div:
      return real_binary(n.op, eval_real_node(*n.a, x, u), eval_real_node(*n.b, x, u), where);
    default: return real_unary(n.op, eval_real_node(*n.a, x, u), where);
  }
}

Interval eval_interval_node(const ExprNode& n, const Box& x, const Box& u) {
  switch (n.op) {
    case Op::Const: return Interval(n.value);
    case Op::StateVar: return x[n.index];
    case Op::InputVar: return u[n.index];
    default: break;
  }
  try {
    switch (n.op) {
      case Op::Pow: return pow(eval_interval_node(*n.a, x, u), n.exponent);
      case Op::Add: case Op::Sub: case Op::Mul: case Op::Div:
        return interval_binary(n.op, eval_interval_node(*n.a, x, u), eval_interval_node(*n.b, x, u));
      default: return interval_unary(n.op, eval_interval_node(*n.a, x, u));
    }
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::Domain || std::string_view(err.what()).find(" in '") != std::string_view::npos) throw;
    const Expr view(std::shared_ptr<const ExprNode>(std::shared_ptr<const ExprNode>{}, &n));
    throw Error(ErrorKind::Domain, std::string(err.what()) + " in '" + to_string(view) + "'");
  }
}

void check_dims(const Expr& e, std::size_t n, std::size_t m) {
  if (max_state_index(e) >= static_cast<int>(n) || max_input_index(e) >= static_cast<int>(m))
    throw Error(ErrorKind::Dimension, "expression references variables beyond the supplied dimensions");
}

}  // namespace

double eval_constant(const Expr& e) {
  if (max_state_index(e) >= 0 || max_input_index(e) >= 0)
    throw Error(ErrorKind::InvalidArgument, "expression is not constant: " + to_string(e));
  return eval_real_node(e.node(), {}, {});
}

double eval_real(const Expr& e, std::span<const double> x, std::span<const double> u) {
  check_dims(e, x.size(), u.size());
  const double v = eval_real_node(e.node(), x, u);
  if (!std::isfinite(v)) throw Error(ErrorKind::Domain, "non-finite result of '" + to_string(e) + "'");
  return v;
}

Interval eval_interval(const Expr& e, const Box& x, const Box& u) {
  check_dims(e, x.dims(), u.dims());
  return eval_interval_node(e.node(), x, u);
}

namespace {

int max_index(const ExprNode& n, Op var, std::unordered_map<const ExprNode*, int>& memo) {
  if (auto it = memo.find(&n); it != memo.end()) return it->second;
  int r = -1;
  if (n.op == var) r = n.index;
  if (n.a) r = std::max(r, max_index(*n.a, var, memo));
  if (n.b) r = std::max(r, max_index(*n.b, var, memo));
  memo.emplace(&n, r);
  return r;
}

}  // namespace

int max_state_index(const Expr& e) {
  std::unordered_map<const ExprNode*, int> memo;
  return max_index(e.node(), Op::StateVar, memo);
}

int max_input_index(const Expr& e) {
  std::unordered_map<const ExprNode*, int> memo;
  return max_index(e.node(), Op::InputVar, memo);
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

Expr derive(const NodePtr& np, Variable v, std::unordered_map<const ExprNode*, Expr>& memo) {
  const ExprNode& n = *np;
  if (auto it = memo.find(&n); it != memo.end()) return it->second;
  const Expr self(np);
  Expr d;
  switch (n.op) {
    case Op::Const: d = Expr::constant(0.0); break;
    case Op::StateVar:
      d = Expr::constant(v.kind == VarKind::State && v.index == n.index ? 1.0 : 0.0);
      break;
    case Op::InputVar:
      d = Expr::constant(v.kind == VarKind::Input && v.index == n.index ? 1.0 : 0.0);
      break;
    default: {
      const Expr a(n.a);
      const Expr da = derive(n.a, v, memo);
      switch (n.op) {
        case Op::Neg: d = -da; break;
        case Op::Add: d = da + derive(n.b, v, memo); break;
        case Op::Sub: d = da - derive(n.b, v, memo); break;
        case Op::Mul: {
          const Expr b(n.b);
          d = da * b + a * derive(n.b, v, memo);
          break;
        }
        case Op::Div: {
          const Expr b(n.b);
          const Expr db = derive(n.b, v, memo);
          d = da / b - a * db / pow(b, 2);
          break;
        }
        case Op::Pow:
          d = Expr::constant(n.exponent) * pow(a, n.exponent - 1) * da;
          break;
        case Op::Sin: d = apply(Op::Cos, a) * da; break;
        case Op::Cos: d = -(apply(Op::Sin, a) * da); break;
        case Op::Tan: d = (Expr::constant(1.0) + pow(self, 2)) * da; break;
        case Op::Atan: d = da / (Expr::constant(1.0) + pow(a, 2)); break;
        case Op::Exp: d = self * da; break;
        case Op::Sqrt: d = da / (Expr::constant(2.0) * self); break;
        case Op::Abs: d = apply(Op::Sign, a) * da; break;
        case Op::Sign: d = Expr::constant(0.0); break;
        default: throw Error(ErrorKind::Internal, "differentiate: unexpected node");
      }
    }
  }
  memo.emplace(&n, d);
  return d;
}

}  // namespace

Expr differentiate(const Expr& e, Variable var) {
  std::unordered_map<const ExprNode*, Expr> memo;
  return derive(e.ptr(), var, memo);
}

// ---------------------------------------------------------------------------
// Tape

namespace {

using TapeKey = std::tuple<Op, std::uint32_t, std::uint32_t, int, int, std::uint64_t>;

}  // namespace

Tape::Tape(std::span<const Expr> outputs) {
  std::map<TapeKey, std::uint32_t> structural;
  std::unordered_map<const ExprNode*, std::uint32_t> by_node;
  std::function<std::uint32_t(const NodePtr&)> emit = [&](const NodePtr& np) -> std::uint32_t {
    if (auto it = by_node.find(np.get()); it != by_node.end()) return it->second;
    Instr ins;
    ins.op = np->op;
    ins.index = np->index;
    ins.exponent = np->exponent;
    ins.value = np->value;
    if (np->a) ins.a = emit(np->a);
    if (np->b) ins.b = emit(np->b);
    const TapeKey key{ins.op, ins.a, ins.b, ins.index, ins.exponent, std::bit_cast<std::uint64_t>(ins.value)};
    std::uint32_t reg;
    if (auto it = structural.find(key); it != structural.end()) {
      reg = it->second;
    } else {
      reg = static_cast<std::uint32_t>(code_.size());
      code_.push_back(ins);
      origin_.push_back(np);
      structural.emplace(key, reg);
    }
    by_node.emplace(np.get(), reg);
    return reg;
  };
  for (const auto& e : outputs) out_regs_.push_back(emit(e.ptr()));
}

void Tape::domain_failure(std::size_t instr, const std::string& what) const {
  throw Error(ErrorKind::Domain, what + " in '" + to_string(Expr(origin_[instr])) + "'");
}

void Tape::eval_interval(const Box& x, const Box& u, std::span<Interval> out, std::vector<Interval>& r) const {
  r.resize(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    try {
      switch (in.op) {
        case Op::Const: r[i] = Interval(in.value); break;
        case Op::StateVar: r[i] = x[in.index]; break;
        case Op::InputVar: r[i] = u[in.index]; break;
        case Op::Add: r[i] = r[in.a] + r[in.b]; break;
        case Op::Sub: r[i] = r[in.a] - r[in.b]; break;
        case Op::Mul: r[i] = r[in.a] * r[in.b]; break;
        case Op::Div: r[i] = r[in.a] / r[in.b]; break;
        case Op::Pow: r[i] = pow(r[in.a], in.exponent); break;
        default: r[i] = interval_unary(in.op, r[in.a]); break;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Domain) throw;
      domain_failure(i, e.what());
    }
  }
  for (std::size_t k = 0; k < out_regs_.size(); ++k) out[k] = r[out_regs_[k]];
}

void Tape::eval_real(std::span<const double> x, std::span<const double> u, std::span<double> out,
                     std::vector<double>& r) const {
  r.resize(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    auto where = [&] { return to_string(Expr(origin_[i])); };
    switch (in.op) {
      case Op::Const: r[i] = in.value; break;
      case Op::StateVar: r[i] = x[in.index]; break;
      case Op::InputVar: r[i] = u[in.index]; break;
      case Op::Add: r[i] = r[in.a] + r[in.b]; break;
      case Op::Sub: r[i] = r[in.a] - r[in.b]; break;
      case Op::Mul: r[i] = r[in.a] * r[in.b]; break;
      case Op::Div: r[i] = real_binary(Op::Div, r[in.a], r[in.b], where); break;
      case Op::Pow: r[i] = real_pow(r[in.a], in.exponent, where); break;
      default: r[i] = real_unary(in.op, r[in.a], where); break;
    }
  }
  for (std::size_t k = 0; k < out_regs_.size(); ++k) {
    out[k] = r[out_regs_[k]];
    if (!std::isfinite(out[k])) domain_failure(out_regs_[k], "non-finite result");
  }
}

// ---------------------------------------------------------------------------
// SystemModel

SystemModel::SystemModel(std::vector<Expr> components, int input_dim, Box X, Box U)
    : f_(std::move(components)), input_dim_(static_cast<std::size_t>(input_dim)), X_(std::move(X)), U_(std::move(U)) {
  const std::size_t n = f_.size();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "model needs at least one state component");
  if (X_.dims() != n) throw Error(ErrorKind::Dimension, "state domain X has wrong dimension");
  if (U_.dims() != input_dim_) throw Error(ErrorKind::Dimension, "input domain U has wrong dimension");
  if (X_.is_empty() || U_.is_empty()) throw Error(ErrorKind::EmptyInput, "state and input domains must be non-empty");
  for (const auto& iv : X_.intervals())
    if (!std::isfinite(iv.lo()) || !std::isfinite(iv.hi())) throw Error(ErrorKind::InvalidArgument, "X must be bounded");
  for (const auto& iv : U_.intervals())
    if (!std::isfinite(iv.lo()) || !std::isfinite(iv.hi())) throw Error(ErrorKind::InvalidArgument, "U must be bounded");
  for (const auto& e : f_) {
    if (!e.valid()) throw Error(ErrorKind::InvalidArgument, "missing model component");
    if (max_state_index(e) >= static_cast<int>(n) || max_input_index(e) >= static_cast<int>(input_dim_))
      throw Error(ErrorKind::UnknownIdentifier, "model component references undeclared variables");
  }
  periodic.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) jx_.push_back(differentiate(f_[i], {VarKind::State, static_cast<int>(j)}));
    for (std::size_t j = 0; j < input_dim_; ++j) ju_.push_back(differentiate(f_[i], {VarKind::Input, static_cast<int>(j)}));
  }
  f_tape_ = std::make_shared<Tape>(f_);
  jx_tape_ = std::make_shared<Tape>(jx_);
  ju_tape_ = std::make_shared<Tape>(ju_);
}

std::vector<double> SystemModel::eval(std::span<const double> x, std::span<const double> u) const {
  if (x.size() != state_dim() || u.size() != input_dim()) throw Error(ErrorKind::Dimension, "eval: dimension mismatch");
  std::vector<double> out(state_dim());
  thread_local std::vector<double> scratch;
  f_tape_->eval_real(x, u, out, scratch);
  return out;
}

Box SystemModel::enclose(const Box& x, const Box& u, InclusionKind kind) const {
  const std::size_t n = state_dim();
  if (x.dims() != n || u.dims() != input_dim()) throw Error(ErrorKind::Dimension, "enclose: dimension mismatch");
  thread_local std::vector<Interval> scratch;
  std::vector<Interval> natural(n);
  if (kind != InclusionKind::Centered) {
    f_tape_->eval_interval(x, u, natural, scratch);
    if (kind == InclusionKind::Natural) return Box(std::move(natural));
  }
  // Mean-value form: f(c) + J([x]) ([x] - c).
  const auto c = x.center();
  std::vector<Interval> at_center(n), jac(n * n);
  f_tape_->eval_interval(Box::point(c), u, at_center, scratch);
  jx_tape_->eval_interval(x, u, jac, scratch);
  std::vector<Interval> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Interval acc = at_center[i];
    for (std::size_t j = 0; j < n; ++j) acc = acc + jac[i * n + j] * (x[j] - Interval(c[j]));
    out[i] = acc;
  }
  if (kind == InclusionKind::Hybrid) {
    for (std::size_t i = 0; i < n; ++i) {
      const Interval both = intersect(out[i], natural[i]);
      out[i] = both.is_empty() ? natural[i] : both;
    }
  }
  return Box(std::move(out));
}

LipschitzBound lipschitz_blocks(const SystemModel& model, double state_pad, double input_pad, std::size_t max_boxes) {
  const std::size_t n = model.state_dim(), m = model.input_dim();
  const Box dx = inflate(model.X(), state_pad);
  const Box du = inflate(model.U(), input_pad);
  const std::size_t dims = n + m;
  std::size_t per_dim = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(max_boxes), 1.0 / dims) + 1e-9)));
  auto edges = [&](const Interval& iv) {
    std::vector<double> e(per_dim + 1);
    for (std::size_t k = 0; k <= per_dim; ++k) e[k] = iv.lo() + iv.width() * static_cast<double>(k) / static_cast<double>(per_dim);
    e.front() = iv.lo();
    e.back() = iv.hi();
    return e;
  };
  std::vector<std::vector<double>> grid;
  for (std::size_t i = 0; i < n; ++i) grid.push_back(edges(dx[i]));
  for (std::size_t i = 0; i < m; ++i) grid.push_back(edges(du[i]));

  LipschitzBound lb;
  std::vector<Interval> jx(n * n), ju(n * m), scratch;
  std::vector<std::size_t> idx(dims, 0);
  std::vector<Interval> xs(n), us(m);
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) xs[i] = Interval(grid[i][idx[i]], grid[i][idx[i] + 1]);
    for (std::size_t i = 0; i < m; ++i) us[i] = Interval(grid[n + i][idx[n + i]], grid[n + i][idx[n + i] + 1]);
    const Box bx(xs), bu(us);
    try {
      model.jacobian_x_tape().eval_interval(bx, bu, jx, scratch);
      if (m > 0) model.jacobian_u_tape().eval_interval(bx, bu, ju, scratch);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Domain) throw;
      throw Error(ErrorKind::Domain, std::string("Lipschitz bound: ") + e.what() +
                                         " over the padded domain; shrink the domain or padding, or give an explicit Lipschitz override");
    }
    for (std::size_t i = 0; i < n; ++i) {
      double sx = 0.0, su = 0.0;
      for (std::size_t j = 0; j < n; ++j) sx = rounding::add_bounds(sx, jx[i * n + j].mag()).second;
      for (std::size_t j = 0; j < m; ++j) su = rounding::add_bounds(su, ju[i * m + j].mag()).second;
      lb.state_block = std::max(lb.state_block, sx);
      lb.input_block = std::max(lb.input_block, su);
    }
    std::size_t d = 0;
    while (d < dims && ++idx[d] == per_dim) idx[d++] = 0;
    if (d == dims) break;
  }
  if (!std::isfinite(lb.state_block) || !std::isfinite(lb.input_block))
    throw Error(ErrorKind::Domain, "Lipschitz bound is not finite over the padded domain");
  return lb;
}

double lipschitz_bound(const SystemModel& model, double state_pad, double input_pad) {
  return lipschitz_blocks(model, state_pad, input_pad).combined();
}

// ---------------------------------------------------------------------------
// Model files

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

Box parse_box_list(std::string_view text, const SymbolTable& consts, int line) {
  std::vector<Interval> ivs;
  std::size_t pos = 0;
  while (true) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) break;
    if (text[pos] != '[') throw SyntaxError("expected '[' in interval list", line, static_cast<int>(pos) + 1);
    const std::size_t close = text.find(']', pos);
    if (close == std::string_view::npos) throw SyntaxError("missing ']' in interval list", line, static_cast<int>(pos) + 1);
    const std::string_view inner = text.substr(pos + 1, close - pos - 1);
    const std::size_t comma = inner.find(',');
    if (comma == std::string_view::npos) throw SyntaxError("interval needs 'lo, hi'", line, static_cast<int>(pos) + 1);
    const double lo = eval_constant(parse_expr(inner.substr(0, comma), consts, line));
    const double hi = eval_constant(parse_expr(inner.substr(comma + 1), consts, line));
    if (!(lo <= hi)) throw SyntaxError("interval lower bound exceeds upper bound", line, static_cast<int>(pos) + 1);
    ivs.emplace_back(lo, hi);
    pos = close + 1;
  }
  if (ivs.empty()) throw SyntaxError("empty interval list", line, 1);
  return Box(std::move(ivs));
}

}  // namespace

SystemModel SystemModel::from_string(std::string_view text) {
  SymbolTable syms;
  std::optional<Box> X, U;
  std::map<int, Expr> comps;
  std::optional<double> lipschitz;
  std::vector<int> periodic_dims;
  bool have_states = false, have_inputs = false;

  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    std::size_t sp = 0;
    while (sp < line.size() && !std::isspace(static_cast<unsigned char>(line[sp])) && line[sp] != '=') ++sp;
    const std::string head = line.substr(0, sp);
    std::string rest = trim(std::string_view(line).substr(sp));

    auto rhs_after_eq = [&](std::string_view s) -> std::pair<std::string, std::string> {
      const auto eq = s.find('=');
      if (eq == std::string_view::npos) throw SyntaxError("expected '='", line_no, static_cast<int>(sp) + 1);
      return {trim(s.substr(0, eq)), trim(s.substr(eq + 1))};
    };
    auto to_int = [&](const std::string& s) {
      int v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size() || v < 0) throw SyntaxError("expected a nonnegative integer", line_no, 1);
      return v;
    };

    if (head == "states") {
      syms.state_dim = to_int(rest);
      have_states = true;
    } else if (head == "inputs") {
      syms.input_dim = to_int(rest);
      have_inputs = true;
    } else if (head == "const") {
      auto [name, rhs] = rhs_after_eq(rest);
      SymbolTable only_consts;
      only_consts.constants = syms.constants;
      syms.constants[name] = eval_constant(parse_expr(rhs, only_consts, line_no));
    } else if (head == "let") {
      auto [name, rhs] = rhs_after_eq(rest);
      syms.definitions[name] = parse_expr(rhs, syms, line_no);
    } else if (head == "X" || head == "U") {
      if (!rest.empty() && rest.front() == '=') rest = trim(std::string_view(rest).substr(1));
      SymbolTable only_consts;
      only_consts.constants = syms.constants;
      (head == "X" ? X : U) = parse_box_list(rest, only_consts, line_no);
    } else if (head.size() >= 2 && head[0] == 'f' && std::all_of(head.begin() + 1, head.end(), ::isdigit)) {
      if (!have_states || !have_inputs) throw SyntaxError("declare 'states' and 'inputs' before components", line_no, 1);
      const int k = to_int(head.substr(1));
      if (k < 1 || k > syms.state_dim) throw SyntaxError("component index out of range: " + head, line_no, 1);
      auto [_, rhs] = rhs_after_eq(line);
      comps[k - 1] = parse_expr(rhs, syms, line_no);
    } else if (head == "lipschitz") {
      if (!rest.empty() && rest.front() == '=') rest = trim(std::string_view(rest).substr(1));
      SymbolTable only_consts;
      only_consts.constants = syms.constants;
      lipschitz = eval_constant(parse_expr(rest, only_consts, line_no));
    } else if (head == "periodic") {
      std::istringstream names(rest);
      std::string name;
      while (names >> name) {
        if (name.size() < 2 || name[0] != 'x') throw SyntaxError("periodic expects state names like x3", line_no, 1);
        const int k = to_int(name.substr(1));
        if (k < 1 || k > syms.state_dim) throw SyntaxError("periodic dimension out of range", line_no, 1);
        periodic_dims.push_back(k - 1);
      }
    } else {
      throw SyntaxError("unknown model directive '" + head + "'", line_no, 1);
    }
  }
  if (!have_states || !have_inputs) throw SyntaxError("model must declare 'states' and 'inputs'", line_no, 1);
  if (!X || !U) throw SyntaxError("model must declare domains X and U", line_no, 1);
  std::vector<Expr> f;
  for (int i = 0; i < syms.state_dim; ++i) {
    auto it = comps.find(i);
    if (it == comps.end()) throw SyntaxError("missing component f" + std::to_string(i + 1), line_no, 1);
    f.push_back(it->second);
  }
  SystemModel model(std::move(f), syms.input_dim, *X, *U);
  model.lipschitz_override = lipschitz;
  model.constants = syms.constants;
  for (int d : periodic_dims) model.periodic[d] = true;
  return model;
}

SystemModel SystemModel::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

}  // namespace symctl

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "interval.hpp"

namespace symctl {

enum class Op : std::uint8_t {
  Const,
  StateVar,
  InputVar,
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Sin,
  Cos,
  Tan,
  Atan,
  Exp,
  Sqrt,
  Abs,
  Sign,  // only produced by differentiation of abs
};

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  Op op;
  double value = 0.0;  // Const
  int index = 0;       // StateVar/InputVar (0-based)
  int exponent = 0;    // Pow
  NodePtr a, b;
};

enum class VarKind { State, Input };
struct Variable {
  VarKind kind;
  int index;  // 0-based
};

/*
 * Immutable expression tree (a DAG when named sub-expressions are shared).
 * Construction goes through the smart constructors below, which fold
 * constants and trivial identities.
 */
class Expr {
 public:
  Expr() = default;
  explicit Expr(NodePtr n) : node_(std::move(n)) {}

  static Expr constant(double v);
  static Expr state(int i);
  static Expr input(int i);

  const ExprNode& node() const { return *node_; }
  const NodePtr& ptr() const { return node_; }
  bool valid() const { return node_ != nullptr; }
  bool is_constant() const { return node_ && node_->op == Op::Const; }
  bool is_constant(double v) const { return is_constant() && node_->value == v; }

 private:
  NodePtr node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& a, int k);
Expr apply(Op fn, const Expr& a);

/* Names visible while parsing: variable ranges, numeric constants and named sub-expressions. */
struct SymbolTable {
  int state_dim = 0;
  int input_dim = 0;
  std::map<std::string, double, std::less<>> constants;
  std::map<std::string, Expr, std::less<>> definitions;
};

/*
 * Grammar:
 *   expr   := term (("+"|"-") term)*
 *   term   := factor (("*"|"/") factor)*
 *   factor := "-" factor | base ("^" ["-"] integer)?
 *   base   := number | ident | "(" expr ")" | func "(" expr ")"
 * `line` offsets reported positions when the text comes from a larger file.
 */
Expr parse_expr(std::string_view text, const SymbolTable& symbols, int line = 1);

/* Evaluates an expression built only from constants. */
double eval_constant(const Expr& e);

double eval_real(const Expr& e, std::span<const double> x, std::span<const double> u);
Interval eval_interval(const Expr& e, const Box& x, const Box& u);
Expr differentiate(const Expr& e, Variable var);

/* Highest state/input index referenced, or -1. */
int max_state_index(const Expr& e);
int max_input_index(const Expr& e);

std::string to_string(const Expr& e);

/*
 * Flat evaluation program for several expressions at once. Shared
 * sub-expressions (by identity or structure) are evaluated once.
 */
class Tape {
 public:
  explicit Tape(std::span<const Expr> outputs);

  std::size_t outputs() const noexcept { return out_regs_.size(); }
  std::size_t registers() const noexcept { return code_.size(); }

  /* `scratch` is resized as needed and can be reused across calls. */
  void eval_interval(const Box& x, const Box& u, std::span<Interval> out, std::vector<Interval>& scratch) const;
  void eval_real(std::span<const double> x, std::span<const double> u, std::span<double> out,
                 std::vector<double>& scratch) const;

 private:
  struct Instr {
    Op op;
    std::uint32_t a = 0, b = 0;
    int index = 0;
    int exponent = 0;
    double value = 0.0;
  };
  [[noreturn]] void domain_failure(std::size_t instr, const std::string& what) const;

  std::vector<Instr> code_;
  std::vector<NodePtr> origin_;  // for error messages
  std::vector<std::uint32_t> out_regs_;
};

enum class InclusionKind {
  Natural,   // natural interval extension
  Centered,  // mean-value form around the box center
  Hybrid,    // intersection of natural and mean-value enclosures
};

/*
 * Discrete-time system x+ = f(x, u) over compact domains X and U.
 */
class SystemModel {
 public:
  SystemModel(std::vector<Expr> components, int input_dim, Box X, Box U);

  static SystemModel from_string(std::string_view text);
  static SystemModel from_file(const std::string& path);

  std::size_t state_dim() const noexcept { return f_.size(); }
  std::size_t input_dim() const noexcept { return input_dim_; }
  const std::vector<Expr>& components() const noexcept { return f_; }
  const Box& X() const noexcept { return X_; }
  const Box& U() const noexcept { return U_; }

  std::optional<double> lipschitz_override;
  /* Per state dimension; a periodic dimension wraps with period equal to the width of X. */
  std::vector<bool> periodic;
  /* Named constants seen while parsing, echoed into manifests. */
  std::map<std::string, double, std::less<>> constants;

  std::vector<double> eval(std::span<const double> x, std::span<const double> u) const;
  /* Enclosure of f(x_box, u_box). */
  Box enclose(const Box& x, const Box& u, InclusionKind kind = InclusionKind::Natural) const;

  const Tape& f_tape() const { return *f_tape_; }
  const Tape& jacobian_x_tape() const { return *jx_tape_; }
  const Tape& jacobian_u_tape() const { return *ju_tape_; }
  /* d f_i / d x_j at row-major position i*n + j (symbolic). */
  const std::vector<Expr>& jacobian_x() const noexcept { return jx_; }
  const std::vector<Expr>& jacobian_u() const noexcept { return ju_; }

 private:
  std::vector<Expr> f_;
  std::size_t input_dim_;
  Box X_, U_;
  std::vector<Expr> jx_, ju_;
  std::shared_ptr<const Tape> f_tape_, jx_tape_, ju_tape_;
};

struct LipschitzBound {
  double state_block = 0.0;  // sup ||d f/d x||_inf
  double input_block = 0.0;  // sup ||d f/d u||_inf
  double combined() const { return std::max(state_block, input_block); }
};

/*
 * Rigorous upper bound of the Jacobian row sums over (X + state_pad B) x (U + input_pad B).
 * The padded domain is split into a uniform grid of at most `max_boxes` pieces.
 */
LipschitzBound lipschitz_blocks(const SystemModel& model, double state_pad, double input_pad,
                                std::size_t max_boxes = 4096);
double lipschitz_bound(const SystemModel& model, double state_pad, double input_pad);

}  // namespace symctl

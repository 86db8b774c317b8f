#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsys.hpp"

namespace symctl {

enum class LtlOp { True, False, Atom, Not, And, Or, Implies, Next, Eventually, Always, Until, WeakUntil };

struct LtlNode;
using Ltl = std::shared_ptr<const LtlNode>;

struct LtlNode {
  LtlOp op;
  std::string atom;
  Ltl lhs, rhs;
};

namespace ltl {
Ltl truth();
Ltl falsity();
Ltl atom(std::string name);
Ltl neg(Ltl a);
Ltl conj(Ltl a, Ltl b);
Ltl disj(Ltl a, Ltl b);
Ltl implies(Ltl a, Ltl b);
Ltl next(Ltl a);
Ltl eventually(Ltl a);
Ltl always(Ltl a);
Ltl until(Ltl a, Ltl b);
Ltl weak_until(Ltl a, Ltl b);
}  // namespace ltl

bool equal(const Ltl& a, const Ltl& b);

/*
 * ASCII syntax: G/[] F/<> X U W ! & | -> true false, parentheses.
 * Precedence: unary > U, W (right assoc) > & > | > -> (right assoc).
 * With `declared` non-empty, every atom must be listed there.
 */
Ltl parse_ltl(std::string_view text, std::span<const std::string> declared = {});
std::string to_string(const Ltl& f);

/* Conventional name of the complement atom of p. */
std::string complement_name(const std::string& p);

/*
 * Positive normal form: -> expanded, negations pushed to atoms. When `complement`
 * is given, each negated atom !p becomes the atom complement(p).
 */
Ltl to_pnf(const Ltl& f, const std::function<std::string(const std::string&)>& complement = {});

bool is_pnf(const Ltl& f);
bool is_propositional(const Ltl& f);
/* Atom names in first-occurrence order. */
std::vector<std::string> atoms_of(const Ltl& f);

enum class FragmentKind { Safety, Reach, ReachAvoid, Recurrence, Unsupported };

/*
 * Supported shapes, with propositional safe / within / goal / initial:
 *   Safety      initial & G safe
 *   Reach       initial & F goal
 *   ReachAvoid  initial & G safe & (within U goal)      (F goal means within = true)
 *   Recurrence  initial & G safe & G F goal
 */
struct Fragment {
  FragmentKind kind = FragmentKind::Unsupported;
  Ltl safe, within, goal, initial;
  std::string reason;
};

Fragment classify(const Ltl& pnf);
Ltl canonical_formula(const Fragment& fr);
const char* to_string(FragmentKind k) noexcept;

enum class Verdict { Sat, Violated, Unknown };
const char* to_string(Verdict v) noexcept;

/*
 * Three-valued evaluation on a finite prefix. Atoms are looked up by name in
 * `props`; an unknown atom "!p" is read as the negation of p.
 */
Verdict monitor(const Ltl& f, std::span<const LabelMask> trace, std::span<const std::string> props);

}  // namespace symctl

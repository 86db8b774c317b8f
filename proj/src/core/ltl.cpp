#include "ltl.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>

namespace symctl {

namespace ltl {

namespace {
Ltl make(LtlOp op, Ltl a = nullptr, Ltl b = nullptr, std::string name = {}) {
  return std::make_shared<const LtlNode>(LtlNode{op, std::move(name), std::move(a), std::move(b)});
}
}  // namespace

Ltl truth() { return make(LtlOp::True); }
Ltl falsity() { return make(LtlOp::False); }
Ltl atom(std::string name) { return make(LtlOp::Atom, nullptr, nullptr, std::move(name)); }
Ltl neg(Ltl a) { return make(LtlOp::Not, std::move(a)); }
Ltl conj(Ltl a, Ltl b) { return make(LtlOp::And, std::move(a), std::move(b)); }
Ltl disj(Ltl a, Ltl b) { return make(LtlOp::Or, std::move(a), std::move(b)); }
Ltl implies(Ltl a, Ltl b) { return make(LtlOp::Implies, std::move(a), std::move(b)); }
Ltl next(Ltl a) { return make(LtlOp::Next, std::move(a)); }
Ltl eventually(Ltl a) { return make(LtlOp::Eventually, std::move(a)); }
Ltl always(Ltl a) { return make(LtlOp::Always, std::move(a)); }
Ltl until(Ltl a, Ltl b) { return make(LtlOp::Until, std::move(a), std::move(b)); }
Ltl weak_until(Ltl a, Ltl b) { return make(LtlOp::WeakUntil, std::move(a), std::move(b)); }

}  // namespace ltl

bool equal(const Ltl& a, const Ltl& b) {
  if (!a || !b) return !a && !b;
  if (a->op != b->op || a->atom != b->atom) return false;
  return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { Ident, LParen, RParen, Not, And, Or, Implies, Always, Eventually, Next, Until, WeakUntil, True, False, End };

struct Token {
  Tok kind;
  std::string text;
  int column;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    const int col = static_cast<int>(i) + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      std::string w(s.substr(i, j - i));
      Tok k = Tok::Ident;
      if (w == "G") k = Tok::Always;
      else if (w == "F") k = Tok::Eventually;
      else if (w == "X") k = Tok::Next;
      else if (w == "U") k = Tok::Until;
      else if (w == "W") k = Tok::WeakUntil;
      else if (w == "true") k = Tok::True;
      else if (w == "false") k = Tok::False;
      out.push_back({k, std::move(w), col});
      i = j;
      continue;
    }
    auto two = [&](std::string_view t) { return s.substr(i, 2) == t; };
    if (two("->")) out.push_back({Tok::Implies, "->", col}), i += 2;
    else if (two("[]")) out.push_back({Tok::Always, "[]", col}), i += 2;
    else if (two("<>")) out.push_back({Tok::Eventually, "<>", col}), i += 2;
    else if (two("&&")) out.push_back({Tok::And, "&&", col}), i += 2;
    else if (two("||")) out.push_back({Tok::Or, "||", col}), i += 2;
    else if (c == '&') out.push_back({Tok::And, "&", col}), ++i;
    else if (c == '|') out.push_back({Tok::Or, "|", col}), ++i;
    else if (c == '!' || c == '~') out.push_back({Tok::Not, "!", col}), ++i;
    else if (c == '(') out.push_back({Tok::LParen, "(", col}), ++i;
    else if (c == ')') out.push_back({Tok::RParen, ")", col}), ++i;
    else throw SyntaxError(std::string("unexpected character '") + c + "'", 1, col);
  }
  out.push_back({Tok::End, "", static_cast<int>(s.size()) + 1});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, std::span<const std::string> declared) : t_(std::move(toks)), declared_(declared) {}

  Ltl parse() {
    Ltl f = implication();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek() const { return t_[p_]; }
  Token take() { return t_[p_++]; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(peek().kind == Tok::End ? msg + " (end of input)" : msg, 1, peek().column);
  }

  Ltl implication() {
    Ltl a = disjunction();
    if (peek().kind == Tok::Implies) {
      take();
      return ltl::implies(a, implication());
    }
    return a;
  }
  Ltl disjunction() {
    Ltl a = conjunction();
    while (peek().kind == Tok::Or) {
      take();
      a = ltl::disj(a, conjunction());
    }
    return a;
  }
  Ltl conjunction() {
    Ltl a = binary_temporal();
    while (peek().kind == Tok::And) {
      take();
      a = ltl::conj(a, binary_temporal());
    }
    return a;
  }
  Ltl binary_temporal() {
    Ltl a = unary();
    if (peek().kind == Tok::Until) {
      take();
      return ltl::until(a, binary_temporal());
    }
    if (peek().kind == Tok::WeakUntil) {
      take();
      return ltl::weak_until(a, binary_temporal());
    }
    return a;
  }
  Ltl unary() {
    switch (peek().kind) {
      case Tok::Not: take(); return ltl::neg(unary());
      case Tok::Always: take(); return ltl::always(unary());
      case Tok::Eventually: take(); return ltl::eventually(unary());
      case Tok::Next: take(); return ltl::next(unary());
      default: return primary();
    }
  }
  Ltl primary() {
    const Token& tk = peek();
    switch (tk.kind) {
      case Tok::True: take(); return ltl::truth();
      case Tok::False: take(); return ltl::falsity();
      case Tok::LParen: {
        take();
        Ltl f = implication();
        if (peek().kind != Tok::RParen) fail("expected ')'");
        take();
        return f;
      }
      case Tok::Ident: {
        if (!declared_.empty() && std::find(declared_.begin(), declared_.end(), tk.text) == declared_.end())
          throw Error(ErrorKind::UnknownIdentifier,
                      "undeclared proposition '" + tk.text + "' at line 1, column " + std::to_string(tk.column));
        return ltl::atom(take().text);
      }
      default: fail("expected a formula");
    }
  }

  std::vector<Token> t_;
  std::span<const std::string> declared_;
  std::size_t p_ = 0;
};

int prec(LtlOp op) {
  switch (op) {
    case LtlOp::Implies: return 1;
    case LtlOp::Or: return 2;
    case LtlOp::And: return 3;
    case LtlOp::Until:
    case LtlOp::WeakUntil: return 4;
    case LtlOp::Not:
    case LtlOp::Next:
    case LtlOp::Eventually:
    case LtlOp::Always: return 5;
    default: return 6;
  }
}

void print(const Ltl& f, std::string& out, int need) {
  const int p = prec(f->op);
  const bool paren = p < need;
  if (paren) out += '(';
  switch (f->op) {
    case LtlOp::True: out += "true"; break;
    case LtlOp::False: out += "false"; break;
    case LtlOp::Atom: out += f->atom; break;
    case LtlOp::Not: out += '!'; print(f->lhs, out, 5); break;
    case LtlOp::Next: out += "X "; print(f->lhs, out, 5); break;
    case LtlOp::Eventually: out += "F "; print(f->lhs, out, 5); break;
    case LtlOp::Always: out += "G "; print(f->lhs, out, 5); break;
    case LtlOp::And:
    case LtlOp::Or:
      print(f->lhs, out, p);
      out += f->op == LtlOp::And ? " & " : " | ";
      print(f->rhs, out, p + 1);
      break;
    case LtlOp::Implies:
    case LtlOp::Until:
    case LtlOp::WeakUntil:
      print(f->lhs, out, p + 1);
      out += f->op == LtlOp::Implies ? " -> " : f->op == LtlOp::Until ? " U " : " W ";
      print(f->rhs, out, p);
      break;
  }
  if (paren) out += ')';
}

}  // namespace

Ltl parse_ltl(std::string_view text, std::span<const std::string> declared) {
  return Parser(lex(text), declared).parse();
}

std::string to_string(const Ltl& f) {
  std::string s;
  print(f, s, 0);
  return s;
}

std::string complement_name(const std::string& p) { return "!" + p; }

// ---------------------------------------------------------------------------
// Positive normal form

namespace {

Ltl pnf(const Ltl& f, bool negate, const std::function<std::string(const std::string&)>& comp) {
  using namespace ltl;
  switch (f->op) {
    case LtlOp::True: return negate ? falsity() : truth();
    case LtlOp::False: return negate ? truth() : falsity();
    case LtlOp::Atom:
      if (!negate) return f;
      return comp ? atom(comp(f->atom)) : neg(f);
    case LtlOp::Not: return pnf(f->lhs, !negate, comp);
    case LtlOp::And:
      return negate ? disj(pnf(f->lhs, true, comp), pnf(f->rhs, true, comp))
                    : conj(pnf(f->lhs, false, comp), pnf(f->rhs, false, comp));
    case LtlOp::Or:
      return negate ? conj(pnf(f->lhs, true, comp), pnf(f->rhs, true, comp))
                    : disj(pnf(f->lhs, false, comp), pnf(f->rhs, false, comp));
    case LtlOp::Implies:
      return negate ? conj(pnf(f->lhs, false, comp), pnf(f->rhs, true, comp))
                    : disj(pnf(f->lhs, true, comp), pnf(f->rhs, false, comp));
    case LtlOp::Next: return next(pnf(f->lhs, negate, comp));
    case LtlOp::Eventually: return negate ? always(pnf(f->lhs, true, comp)) : eventually(pnf(f->lhs, false, comp));
    case LtlOp::Always: return negate ? eventually(pnf(f->lhs, true, comp)) : always(pnf(f->lhs, false, comp));
    case LtlOp::Until:
      // !(a U b) = !b W (!a & !b)
      if (negate)
        return weak_until(pnf(f->rhs, true, comp), conj(pnf(f->lhs, true, comp), pnf(f->rhs, true, comp)));
      return until(pnf(f->lhs, false, comp), pnf(f->rhs, false, comp));
    case LtlOp::WeakUntil:
      // !(a W b) = !b U (!a & !b)
      if (negate) return until(pnf(f->rhs, true, comp), conj(pnf(f->lhs, true, comp), pnf(f->rhs, true, comp)));
      return weak_until(pnf(f->lhs, false, comp), pnf(f->rhs, false, comp));
  }
  return f;
}

void collect_atoms(const Ltl& f, std::vector<std::string>& out) {
  if (!f) return;
  if (f->op == LtlOp::Atom && std::find(out.begin(), out.end(), f->atom) == out.end()) out.push_back(f->atom);
  collect_atoms(f->lhs, out);
  collect_atoms(f->rhs, out);
}

}  // namespace

Ltl to_pnf(const Ltl& f, const std::function<std::string(const std::string&)>& complement) {
  return pnf(f, false, complement);
}

bool is_pnf(const Ltl& f) {
  if (!f) return true;
  if (f->op == LtlOp::Implies) return false;
  if (f->op == LtlOp::Not) return f->lhs->op == LtlOp::Atom;
  return is_pnf(f->lhs) && is_pnf(f->rhs);
}

bool is_propositional(const Ltl& f) {
  if (!f) return true;
  switch (f->op) {
    case LtlOp::Next:
    case LtlOp::Eventually:
    case LtlOp::Always:
    case LtlOp::Until:
    case LtlOp::WeakUntil: return false;
    default: return is_propositional(f->lhs) && is_propositional(f->rhs);
  }
}

std::vector<std::string> atoms_of(const Ltl& f) {
  std::vector<std::string> out;
  collect_atoms(f, out);
  return out;
}

// ---------------------------------------------------------------------------
// Fragments

namespace {

void flatten_and(const Ltl& f, std::vector<Ltl>& out) {
  if (f->op == LtlOp::And) {
    flatten_and(f->lhs, out);
    flatten_and(f->rhs, out);
  } else if (f->op != LtlOp::True) {
    out.push_back(f);
  }
}

Ltl fold_and(const std::vector<Ltl>& v) {
  if (v.empty()) return ltl::truth();
  Ltl r = v[0];
  for (std::size_t i = 1; i < v.size(); ++i) r = ltl::conj(r, v[i]);
  return r;
}

Fragment unsupported(std::string why) {
  Fragment fr;
  fr.reason = std::move(why);
  return fr;
}

}  // namespace

Fragment classify(const Ltl& f) {
  if (!is_pnf(f)) return unsupported("formula is not in positive normal form");
  std::vector<Ltl> parts, initial, safe, recur;
  std::vector<std::pair<Ltl, Ltl>> reach;  // (within, goal)
  flatten_and(f, parts);
  for (const auto& c : parts) {
    if (is_propositional(c)) {
      initial.push_back(c);
    } else if (c->op == LtlOp::Always && is_propositional(c->lhs)) {
      safe.push_back(c->lhs);
    } else if (c->op == LtlOp::Always && c->lhs->op == LtlOp::Eventually && is_propositional(c->lhs->lhs)) {
      recur.push_back(c->lhs->lhs);
    } else if (c->op == LtlOp::Eventually && is_propositional(c->lhs)) {
      reach.emplace_back(ltl::truth(), c->lhs);
    } else if (c->op == LtlOp::Until && is_propositional(c->lhs) && is_propositional(c->rhs)) {
      reach.emplace_back(c->lhs, c->rhs);
    } else {
      return unsupported("conjunct '" + to_string(c) +
                         "' is not one of G p, F p, p U q, G F p or a propositional initial condition");
    }
  }
  Fragment fr;
  fr.initial = fold_and(initial);
  fr.safe = fold_and(safe);
  fr.within = ltl::truth();
  if (!recur.empty()) {
    if (recur.size() > 1 || !reach.empty()) return unsupported("recurrence combined with other liveness goals needs memory");
    fr.kind = FragmentKind::Recurrence;
    fr.goal = recur[0];
    return fr;
  }
  if (reach.size() > 1) return unsupported("several reach obligations need a strategy with memory");
  if (reach.size() == 1) {
    fr.within = reach[0].first;
    fr.goal = reach[0].second;
    const bool plain = safe.empty() && reach[0].first->op == LtlOp::True;
    fr.kind = plain ? FragmentKind::Reach : FragmentKind::ReachAvoid;
    return fr;
  }
  if (!safe.empty()) {
    fr.kind = FragmentKind::Safety;
    fr.goal = ltl::truth();
    return fr;
  }
  return unsupported("no temporal obligation");
}

Ltl canonical_formula(const Fragment& fr) {
  using namespace ltl;
  auto is_true = [](const Ltl& f) { return f->op == LtlOp::True; };
  std::vector<Ltl> parts;
  if (!is_true(fr.initial)) parts.push_back(fr.initial);
  switch (fr.kind) {
    case FragmentKind::Safety: parts.push_back(always(fr.safe)); break;
    case FragmentKind::Reach: parts.push_back(eventually(fr.goal)); break;
    case FragmentKind::ReachAvoid:
      if (!is_true(fr.safe)) parts.push_back(always(fr.safe));
      parts.push_back(is_true(fr.within) ? eventually(fr.goal) : until(fr.within, fr.goal));
      break;
    case FragmentKind::Recurrence:
      if (!is_true(fr.safe)) parts.push_back(always(fr.safe));
      parts.push_back(always(eventually(fr.goal)));
      break;
    case FragmentKind::Unsupported:
      throw Error(ErrorKind::Unsupported, "unsupported fragment: " + fr.reason);
  }
  return fold_and(parts);
}

const char* to_string(FragmentKind k) noexcept {
  switch (k) {
    case FragmentKind::Safety: return "safety";
    case FragmentKind::Reach: return "reach";
    case FragmentKind::ReachAvoid: return "reach-avoid";
    case FragmentKind::Recurrence: return "recurrence";
    case FragmentKind::Unsupported: return "unsupported";
  }
  return "?";
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Sat: return "SAT";
    case Verdict::Violated: return "VIOLATED";
    case Verdict::Unknown: return "UNKNOWN";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Monitor: Kleene values 0 false, 1 unknown, 2 true. Index n stands for every unseen
// position at once, where atoms are unknown.

namespace {

using V = std::int8_t;
constexpr V kF = 0, kU = 1, kT = 2;

struct Eval {
  std::span<const LabelMask> trace;
  std::span<const std::string> props;

  V atom_at(const std::string& name, std::size_t i) const {
    if (i >= trace.size()) return kU;
    for (std::size_t k = 0; k < props.size(); ++k)
      if (props[k] == name) return ((trace[i] >> k) & 1U) ? kT : kF;
    if (name.size() > 1 && name[0] == '!') return static_cast<V>(kT - atom_at(name.substr(1), i));
    throw Error(ErrorKind::UnknownIdentifier, "monitor: unknown proposition '" + name + "'");
  }

  std::vector<V> run(const Ltl& f) const {
    const std::size_t n = trace.size();
    std::vector<V> v(n + 1);
    switch (f->op) {
      case LtlOp::True: std::fill(v.begin(), v.end(), kT); break;
      case LtlOp::False: std::fill(v.begin(), v.end(), kF); break;
      case LtlOp::Atom:
        for (std::size_t i = 0; i <= n; ++i) v[i] = atom_at(f->atom, i);
        break;
      case LtlOp::Not: {
        const auto a = run(f->lhs);
        for (std::size_t i = 0; i <= n; ++i) v[i] = static_cast<V>(kT - a[i]);
        break;
      }
      case LtlOp::And:
      case LtlOp::Or:
      case LtlOp::Implies: {
        const auto a = run(f->lhs), b = run(f->rhs);
        for (std::size_t i = 0; i <= n; ++i) {
          if (f->op == LtlOp::And) v[i] = std::min(a[i], b[i]);
          else if (f->op == LtlOp::Or) v[i] = std::max(a[i], b[i]);
          else v[i] = std::max(static_cast<V>(kT - a[i]), b[i]);
        }
        break;
      }
      case LtlOp::Next: {
        const auto a = run(f->lhs);
        for (std::size_t i = 0; i < n; ++i) v[i] = a[i + 1];
        v[n] = a[n];
        break;
      }
      case LtlOp::Eventually:
      case LtlOp::Always: {
        const auto a = run(f->lhs);
        const bool ev = f->op == LtlOp::Eventually;
        v[n] = a[n];
        for (std::size_t i = n; i-- > 0;) v[i] = ev ? std::max(a[i], v[i + 1]) : std::min(a[i], v[i + 1]);
        break;
      }
      case LtlOp::Until:
      case LtlOp::WeakUntil: {
        const auto a = run(f->lhs), b = run(f->rhs);
        // the unseen future is uniform: b false forever refutes U, a true forever proves W
        v[n] = f->op == LtlOp::Until ? b[n] : std::max(a[n], b[n]);
        for (std::size_t i = n; i-- > 0;) v[i] = std::max(b[i], std::min(a[i], v[i + 1]));
        break;
      }
    }
    return v;
  }
};

}  // namespace

Verdict monitor(const Ltl& f, std::span<const LabelMask> trace, std::span<const std::string> props) {
  if (trace.empty()) throw Error(ErrorKind::EmptyInput, "monitor needs a non-empty trace");
  const V r = Eval{trace, props}.run(f)[0];
  return r == kT ? Verdict::Sat : r == kF ? Verdict::Violated : Verdict::Unknown;
}

}  // namespace symctl

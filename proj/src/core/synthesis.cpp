#include "synthesis.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace symctl {

std::size_t Strategy::winning_count() const { return static_cast<std::size_t>(std::count(winning.begin(), winning.end(), 1)); }

ReverseIndex::ReverseIndex(const TransitionSystem& ts) {
  const std::size_t ns = ts.num_states(), na = ts.num_actions();
  if (ns * na >= std::numeric_limits<std::uint32_t>::max())
    throw Error(ErrorKind::Unsupported, "too many state-action pairs for the reverse index");
  const auto off = ts.offsets();
  const auto succ = ts.successors();
  offsets_.assign(ns + 1, 0);
  for (StateId s : succ) ++offsets_[s + 1];
  for (std::size_t q = 0; q < ns; ++q) offsets_[q + 1] += offsets_[q];
  groups_.resize(succ.size());
  std::vector<std::uint64_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t g = 0; g < ns * na; ++g)
    for (std::uint64_t k = off[g]; k < off[g + 1]; ++k) groups_[fill[succ[k]]++] = static_cast<std::uint32_t>(g);
}

namespace {

bool post_within(const TransitionSystem& ts, StateId q, ActionId a, const StateSet& z) {
  for (StateId s : ts.post(q, a))
    if (!z[s]) return false;
  return true;
}

std::int32_t lowest_action_into(const TransitionSystem& ts, StateId q, const StateSet& z) {
  for (ActionId a = 0; a < ts.num_actions(); ++a)
    if (ts.is_admissible(q, a) && post_within(ts, q, a, z)) return static_cast<std::int32_t>(a);
  return -1;
}

void check_size(const TransitionSystem& ts, const StateSet& s, const char* what) {
  if (s.size() != ts.num_states()) throw Error(ErrorKind::Dimension, std::string(what) + " set has the wrong size");
}

Strategy empty_strategy(std::size_t ns) {
  Strategy s;
  s.winning.assign(ns, 0);
  s.action.assign(ns, -1);
  s.rank.assign(ns, kNoRank);
  return s;
}

}  // namespace

StateSet cpre(const TransitionSystem& ts, const StateSet& z) {
  check_size(ts, z, "target");
  StateSet out(ts.num_states(), 0);
  for (StateId q = 0; q < ts.num_states(); ++q) out[q] = lowest_action_into(ts, q, z) >= 0;
  return out;
}

Strategy solve_safety(const TransitionSystem& ts, const StateSet& safe) {
  check_size(ts, safe, "safe");
  const std::size_t ns = ts.num_states(), na = ts.num_actions();
  const ReverseIndex rev(ts);
  const auto off = ts.offsets();
  const auto succ = ts.successors();
  StateSet z = safe;
  std::vector<std::uint32_t> bad(ns * na, 0), alive(ns, 0);
  for (std::size_t g = 0; g < ns * na; ++g) {
    if (off[g] == off[g + 1]) continue;
    for (std::uint64_t k = off[g]; k < off[g + 1]; ++k) bad[g] += !z[succ[k]];
    if (bad[g] == 0) ++alive[g / na];
  }
  std::vector<StateId> work;
  for (StateId q = 0; q < ns; ++q) {
    if (!z[q]) work.push_back(q);
    else if (alive[q] == 0) {
      z[q] = 0;
      work.push_back(q);
    }
  }
  while (!work.empty()) {
    const StateId s = work.back();
    work.pop_back();
    for (std::uint32_t g : rev.preds(s)) {
      if (bad[g]++ != 0) continue;
      const StateId q = static_cast<StateId>(g / na);
      if (--alive[q] == 0 && z[q]) {
        z[q] = 0;
        work.push_back(q);
      }
    }
  }
  Strategy st = empty_strategy(ns);
  st.winning = z;
  for (StateId q = 0; q < ns; ++q)
    if (z[q]) {
      st.action[q] = lowest_action_into(ts, q, z);
      st.rank[q] = 0;
    }
  return st;
}

Strategy solve_reach(const TransitionSystem& ts, const StateSet& goal, const StateSet& within) {
  check_size(ts, goal, "goal");
  check_size(ts, within, "within");
  const std::size_t ns = ts.num_states(), na = ts.num_actions();
  const ReverseIndex rev(ts);
  const auto off = ts.offsets();
  std::vector<std::uint32_t> remaining(ns * na);
  for (std::size_t g = 0; g < ns * na; ++g) remaining[g] = static_cast<std::uint32_t>(off[g + 1] - off[g]);

  Strategy st = empty_strategy(ns);
  std::vector<StateId> frontier;
  for (StateId q = 0; q < ns; ++q)
    if (goal[q]) {
      st.rank[q] = 0;
      frontier.push_back(q);
    }
  for (std::uint32_t level = 0; !frontier.empty(); ++level) {
    std::vector<StateId> next;
    for (StateId s : frontier)
      for (std::uint32_t g : rev.preds(s)) {
        if (--remaining[g] != 0) continue;
        const StateId q = static_cast<StateId>(g / na);
        if (st.rank[q] == kNoRank && within[q]) {
          st.rank[q] = level + 1;
          next.push_back(q);
        }
      }
    frontier = std::move(next);
  }
  for (StateId q = 0; q < ns; ++q) st.winning[q] = st.rank[q] != kNoRank;
  for (StateId q = 0; q < ns; ++q) {
    if (!st.winning[q]) continue;
    if (st.rank[q] == 0) {
      st.action[q] = lowest_action_into(ts, q, st.winning);
      continue;
    }
    for (ActionId a = 0; a < na && st.action[q] < 0; ++a) {
      if (!ts.is_admissible(q, a)) continue;
      bool ok = true;
      for (StateId s : ts.post(q, a)) ok &= st.rank[s] < st.rank[q];
      if (ok) st.action[q] = static_cast<std::int32_t>(a);
    }
  }
  return st;
}

Strategy solve_recurrence(const TransitionSystem& ts, const StateSet& goal, const StateSet& within) {
  check_size(ts, goal, "goal");
  check_size(ts, within, "within");
  const std::size_t ns = ts.num_states();
  StateSet z = within;
  while (true) {
    const StateSet pre = cpre(ts, z);
    StateSet base(ns, 0);
    for (StateId q = 0; q < ns; ++q) base[q] = goal[q] && within[q] && z[q] && pre[q];
    Strategy r = solve_reach(ts, base, within);
    StateSet y(ns, 0);
    for (StateId q = 0; q < ns; ++q) y[q] = r.winning[q] && z[q];
    if (y == z) {
      // base states must return into the recurrence set, not merely stay winning for the reach
      for (StateId q = 0; q < ns; ++q)
        if (base[q]) r.action[q] = lowest_action_into(ts, q, z);
      return r;
    }
    z = std::move(y);
  }
}

StateSet states_satisfying(const TransitionSystem& ts, const Ltl& f) {
  if (!is_propositional(f)) throw Error(ErrorKind::Unsupported, "expected a propositional formula: " + to_string(f));
  const std::size_t ns = ts.num_states();
  StateSet out(ns, 0);
  switch (f->op) {
    case LtlOp::True: std::fill(out.begin(), out.end(), 1); return out;
    case LtlOp::False: return out;
    case LtlOp::Atom: {
      const auto idx = ts.proposition_index(f->atom);
      if (!idx) throw Error(ErrorKind::InvalidArgument, "proposition '" + f->atom + "' is not a label of the abstraction");
      for (StateId q = 0; q < ns; ++q) out[q] = ts.has_label(q, *idx);
      return out;
    }
    case LtlOp::Not: {
      auto a = states_satisfying(ts, f->lhs);
      for (auto& v : a) v = !v;
      return a;
    }
    default: {
      const auto a = states_satisfying(ts, f->lhs), b = states_satisfying(ts, f->rhs);
      for (StateId q = 0; q < ns; ++q) {
        if (f->op == LtlOp::And) out[q] = a[q] && b[q];
        else if (f->op == LtlOp::Or) out[q] = a[q] || b[q];
        else out[q] = !a[q] || b[q];
      }
      return out;
    }
  }
}

SynthesisResult synthesize(const TransitionSystem& ts, const Fragment& fr, std::span<const StateId> initial) {
  if (fr.kind == FragmentKind::Unsupported) throw Error(ErrorKind::Unsupported, "unsupported specification: " + fr.reason);
  const std::size_t ns = ts.num_states();
  StateSet in(ns, 1);
  if (const auto idx = ts.proposition_index("in"))
    for (StateId q = 0; q < ns; ++q) in[q] = ts.has_label(q, *idx);
  StateSet safe = states_satisfying(ts, fr.safe);
  for (StateId q = 0; q < ns; ++q) safe[q] = safe[q] && in[q];

  SynthesisResult res;
  switch (fr.kind) {
    case FragmentKind::Safety: res.strategy = solve_safety(ts, safe); break;
    case FragmentKind::Reach:
    case FragmentKind::ReachAvoid: {
      const Strategy keep = solve_safety(ts, safe);
      StateSet goal = states_satisfying(ts, fr.goal), within = states_satisfying(ts, fr.within);
      for (StateId q = 0; q < ns; ++q) {
        goal[q] = goal[q] && keep.winning[q];
        within[q] = within[q] && safe[q];
      }
      Strategy st = solve_reach(ts, goal, within);
      for (StateId q = 0; q < ns; ++q) {
        const bool climbing = st.winning[q] && st.rank[q] > 0;
        if (!climbing && keep.winning[q]) {
          st.action[q] = keep.action[q];
          st.rank[q] = 0;
        }
      }
      res.strategy = std::move(st);
      break;
    }
    case FragmentKind::Recurrence: {
      res.strategy = solve_recurrence(ts, states_satisfying(ts, fr.goal), safe);
      break;
    }
    case FragmentKind::Unsupported: break;
  }
  for (StateId q : initial) {
    if (q >= ns) throw Error(ErrorKind::InvalidArgument, "initial state out of range");
    if (!res.strategy.winning[q]) res.losing_initial.push_back(q);
  }
  res.realizable = initial.empty() ? res.strategy.winning_count() > 0 : res.losing_initial.empty();
  std::ostringstream os;
  os << (res.realizable ? "REALIZABLE" : "UNREALIZABLE-FOR-T") << ": " << res.strategy.winning_count() << " of " << ns
     << " states winning";
  if (!res.losing_initial.empty()) os << ", " << res.losing_initial.size() << " initial states losing";
  res.message = os.str();
  return res;
}

bool strategy_closed(const TransitionSystem& ts, const Strategy& s) {
  for (StateId q = 0; q < ts.num_states(); ++q) {
    if (s.winning[q] && !s.defined(q)) return false;
    if (!s.defined(q)) continue;
    const auto a = static_cast<ActionId>(s.action[q]);
    if (!ts.is_admissible(q, a)) return false;
    for (StateId t : ts.post(q, a))
      if (!s.defined(t)) return false;
  }
  return true;
}

bool ranks_descend(const TransitionSystem& ts, const Strategy& s) {
  for (StateId q = 0; q < ts.num_states(); ++q) {
    if (!s.winning[q] || s.rank[q] == 0) continue;
    for (StateId t : ts.post(q, static_cast<ActionId>(s.action[q])))
      if (s.rank[t] >= s.rank[q]) return false;
  }
  return true;
}

void write_strategy(std::ostream& os, const Strategy& s) {
  os << "# state action rank\n";
  for (std::size_t q = 0; q < s.action.size(); ++q)
    if (s.action[q] >= 0) os << q << ' ' << s.action[q] << ' ' << s.rank[q] << (s.winning[q] ? "" : " c") << '\n';
}

Strategy read_strategy(std::istream& is, std::size_t num_states) {
  Strategy s = empty_strategy(num_states);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::uint64_t q = 0;
    std::int64_t a = 0;
    std::uint64_t r = 0;
    if (!(ls >> q >> a >> r) || q >= num_states || a < 0)
      throw SyntaxError("malformed strategy row", lineno, 1);
    std::string tag;
    ls >> tag;
    s.action[q] = static_cast<std::int32_t>(a);
    s.rank[q] = static_cast<std::uint32_t>(r);
    s.winning[q] = tag != "c";
  }
  return s;
}

}  // namespace symctl

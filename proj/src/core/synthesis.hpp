#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ltl.hpp"
#include "tsys.hpp"

namespace symctl {

using StateSet = std::vector<char>;  // indicator over states

inline constexpr std::uint32_t kNoRank = std::numeric_limits<std::uint32_t>::max();

/*
 * Memoryless strategy. `action` is defined (>= 0) on the controller domain, which
 * contains the winning set and, for reach objectives, the safe continuation used
 * after the goal is visited.
 */
struct Strategy {
  StateSet winning;
  std::vector<std::int32_t> action;
  std::vector<std::uint32_t> rank;

  std::size_t winning_count() const;
  bool defined(StateId q) const { return action[q] >= 0; }
};

/* Predecessor groups (q * num_actions + a) of every state. */
class ReverseIndex {
 public:
  explicit ReverseIndex(const TransitionSystem& ts);
  std::span<const std::uint32_t> preds(StateId q) const {
    return {groups_.data() + offsets_[q], groups_.data() + offsets_[q + 1]};
  }

 private:
  std::vector<std::uint64_t> offsets_;
  std::vector<std::uint32_t> groups_;
};

StateSet cpre(const TransitionSystem& ts, const StateSet& z);

Strategy solve_safety(const TransitionSystem& ts, const StateSet& safe);
Strategy solve_reach(const TransitionSystem& ts, const StateSet& goal, const StateSet& within);
Strategy solve_recurrence(const TransitionSystem& ts, const StateSet& goal, const StateSet& within);

/* Abstract states satisfying a propositional formula over the labels. */
StateSet states_satisfying(const TransitionSystem& ts, const Ltl& f);

struct SynthesisResult {
  Strategy strategy;
  bool realizable = false;
  std::vector<StateId> losing_initial;
  std::string message;
};

/*
 * Dispatches on the fragment. Safe and within sets are intersected with the
 * states labelled "in", so the sink is never winning. Reach objectives target
 * goal states inside the safe winning set and keep playing safe afterwards.
 * Realizable iff every initial state is winning (and some state wins when
 * `initial` is empty).
 */
SynthesisResult synthesize(const TransitionSystem& ts, const Fragment& fr, std::span<const StateId> initial);

/* Post-hoc checks: closure on the controller domain and, with `ranked`, rank descent off the goal. */
bool strategy_closed(const TransitionSystem& ts, const Strategy& s);
bool ranks_descend(const TransitionSystem& ts, const Strategy& s);

/* Rows "state action rank" for states with a defined action. */
void write_strategy(std::ostream& os, const Strategy& s);
Strategy read_strategy(std::istream& is, std::size_t num_states);

}  // namespace symctl

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace symctl {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;
using LabelMask = std::uint64_t;

inline constexpr std::size_t kMaxPropositions = 64;

struct Triple {
  StateId q;
  ActionId a;
  StateId q2;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/*
 * Finite transition system (Q, A, R, Pi, L). States and actions are dense
 * indices; R is stored grouped by (q, a) with sorted, duplicate-free successor
 * runs. Labels are bit masks over at most 64 propositions.
 */
class TransitionSystem {
 public:
  TransitionSystem() = default;

  /* offsets has num_states*num_actions + 1 entries; each run of succ must be sorted and unique. */
  static TransitionSystem from_csr(std::size_t num_states, std::size_t num_actions,
                                   std::vector<std::uint64_t> offsets, std::vector<StateId> succ,
                                   std::vector<std::string> props, std::vector<LabelMask> labels,
                                   bool require_nonblocking = true);

  std::size_t num_states() const noexcept { return n_states_; }
  std::size_t num_actions() const noexcept { return n_actions_; }
  std::size_t num_transitions() const noexcept { return succ_.size(); }

  std::span<const StateId> post(StateId q, ActionId a) const {
    const std::size_t g = static_cast<std::size_t>(q) * n_actions_ + a;
    return {succ_.data() + offsets_[g], succ_.data() + offsets_[g + 1]};
  }
  bool has_transition(StateId q, ActionId a, StateId q2) const;
  bool is_admissible(StateId q, ActionId a) const {
    const std::size_t g = static_cast<std::size_t>(q) * n_actions_ + a;
    return offsets_[g + 1] > offsets_[g];
  }
  std::vector<ActionId> admissible(StateId q) const;

  const std::vector<std::string>& propositions() const noexcept { return props_; }
  std::optional<std::size_t> proposition_index(std::string_view name) const;
  LabelMask labels(StateId q) const { return labels_[q]; }
  bool has_label(StateId q, std::size_t prop) const { return (labels_[q] >> prop) & 1U; }
  std::vector<std::string> label_names(StateId q) const;

  std::string state_name(StateId q) const;
  std::string action_name(ActionId a) const;
  void set_state_names(std::vector<std::string> names);
  void set_action_names(std::vector<std::string> names);
  const std::vector<std::string>& state_names() const noexcept { return state_names_; }
  const std::vector<std::string>& action_names() const noexcept { return action_names_; }

  const std::vector<std::uint64_t>& offsets() const noexcept { return offsets_; }
  const std::vector<StateId>& successors() const noexcept { return succ_; }
  const std::vector<LabelMask>& label_masks() const noexcept { return labels_; }

  /* Every triple in ascending (q, a, q') order. */
  std::vector<Triple> triples() const;

  friend bool operator==(const TransitionSystem&, const TransitionSystem&) = default;

 private:
  std::size_t n_states_ = 0, n_actions_ = 0;
  std::vector<std::uint64_t> offsets_;
  std::vector<StateId> succ_;
  std::vector<std::string> props_;
  std::vector<LabelMask> labels_;
  std::vector<std::string> state_names_, action_names_;
};

/* Collects triples and labels in any order; finalize() sorts and validates. */
class TransitionSystemBuilder {
 public:
  TransitionSystemBuilder(std::size_t num_states, std::size_t num_actions, std::vector<std::string> props = {});

  void add(StateId q, ActionId a, StateId q2);
  void label(StateId q, std::size_t prop);
  void label(StateId q, std::string_view prop);
  void set_labels(StateId q, LabelMask mask);
  void set_state_names(std::vector<std::string> names) { state_names_ = std::move(names); }
  void set_action_names(std::vector<std::string> names) { action_names_ = std::move(names); }

  /* Fails with InvalidArgument if some state has no admissible action and require_nonblocking is set. */
  TransitionSystem finalize(bool require_nonblocking = true) const;

 private:
  std::size_t n_states_, n_actions_;
  std::vector<std::string> props_;
  std::vector<Triple> triples_;
  std::vector<LabelMask> labels_;
  std::vector<std::string> state_names_, action_names_;
};

/* T (+) Delta. Delta must be disjoint from R and only use admissible (q, a) pairs. */
TransitionSystem apply_overlay(const TransitionSystem& ts, std::span<const Triple> delta);

/* Relation between two finite index sets with forward and inverse adjacency. */
class Relation {
 public:
  Relation() = default;
  Relation(std::size_t left_size, std::size_t right_size, std::vector<std::pair<StateId, StateId>> pairs);
  static Relation identity(std::size_t n);

  std::size_t left_size() const noexcept { return fwd_off_.empty() ? 0 : fwd_off_.size() - 1; }
  std::size_t right_size() const noexcept { return inv_off_.empty() ? 0 : inv_off_.size() - 1; }
  std::size_t size() const noexcept { return fwd_.size(); }

  std::span<const StateId> image(StateId q1) const { return {fwd_.data() + fwd_off_[q1], fwd_.data() + fwd_off_[q1 + 1]}; }
  std::span<const StateId> preimage(StateId q2) const { return {inv_.data() + inv_off_[q2], inv_.data() + inv_off_[q2 + 1]}; }
  bool contains(StateId q1, StateId q2) const;
  std::vector<std::pair<StateId, StateId>> pairs() const;
  bool single_valued() const;

  friend bool operator==(const Relation&, const Relation&) = default;

 private:
  std::vector<std::uint32_t> fwd_off_, inv_off_;
  std::vector<StateId> fwd_, inv_;
};

/* second o first: pairs (x, z) with (x, y) in first and (y, z) in second. */
Relation compose(const Relation& first, const Relation& second);

enum class CheckMode { Abstraction, FeedbackRefinement, AlternatingSimulation };

enum class Violation { None, Totality, Transition, Labels, Actions };

struct CheckWitness {
  StateId q1, q2;
  ActionId a2, a1;
};

struct CheckResult {
  bool pass = true;
  Violation violated = Violation::None;
  StateId q1 = 0, q2 = 0;
  ActionId a2 = 0;
  std::string message;
  /* On PASS: one chosen a1 per (q1, q2, a2). */
  std::vector<CheckWitness> witnesses;
};

/*
 * Checks the abstraction relation from t1 to t2: totality of alpha, label
 * under-approximation L2(q2) in L1(q1), and for every (q1, q2) in alpha and
 * admissible a2 a witness a1 admissible at q1 such that alpha(Post1(q, a1)) is
 * contained in Post2(q2, a2) for every q in alpha^-1(q2). Witnesses are searched
 * in ascending action order. Propositions are matched by name.
 */
CheckResult check_abstraction(const TransitionSystem& t1, const TransitionSystem& t2, const Relation& alpha,
                              bool keep_witnesses = true);
/* Same action a2 at both levels: a2 admissible at q1 and alpha(Post1(q1, a2)) in Post2(q2, a2). */
CheckResult check_feedback_refinement(const TransitionSystem& t1, const TransitionSystem& t2, const Relation& alpha);
/* Per-q1 choice: every successor of q1 under a1 meets Post2(q2, a2) through alpha. */
CheckResult check_alternating_sim(const TransitionSystem& t1, const TransitionSystem& t2, const Relation& alpha);
CheckResult check_relation(CheckMode mode, const TransitionSystem& t1, const TransitionSystem& t2, const Relation& alpha);

const char* to_string(Violation v) noexcept;

/* Memoryless strategy: action per state, or -1 where undefined. */
using StateStrategy = std::vector<std::int32_t>;

/*
 * alpha-implementation of mu2 on t1: each x takes the abstraction witness a1
 * for (x, q, mu2(q)) with q the first related abstract state. Undefined where
 * mu2 is undefined or no witness exists.
 */
StateStrategy implement_strategy(const TransitionSystem& t1, const TransitionSystem& t2, const Relation& alpha,
                                 const StateStrategy& mu2);

struct TraceInclusionResult {
  bool pass = true;
  std::size_t explored_pairs = 0;
  std::string message;
  /* Offending prefix of (x, q) pairs on FAIL. */
  std::vector<std::pair<StateId, StateId>> prefix;
};

/*
 * Explores every mu1-controlled execution of t1 up to `horizon` steps from the
 * given initial states and checks that it lifts through alpha to a
 * mu2-controlled execution of t2 with L2(q_k) in L1(x_k) at every step.
 * Branches stop where mu2 is undefined. Horizon 0 checks initial labels only.
 */
TraceInclusionResult bounded_trace_inclusion(const TransitionSystem& t1, const StateStrategy& mu1,
                                             const TransitionSystem& t2, const StateStrategy& mu2,
                                             const Relation& alpha, int horizon, std::span<const StateId> initial);

/*
 * Text format:
 *   states x0 x1 ...   | state_count N
 *   actions a b ...    | action_count M
 *   props p1 p2 ...
 *   q a q'             one transition
 *   q : p1 p2          labels
 * '#' starts a comment.
 */
TransitionSystem parse_transition_system(std::string_view text);
TransitionSystem load_transition_system(const std::string& path);
std::string format_transition_system(const TransitionSystem& ts);

/* Lines "q1 ~ q2" naming states of t1 and t2. */
Relation parse_relation(std::string_view text, const TransitionSystem& t1, const TransitionSystem& t2);
Relation load_relation(const std::string& path, const TransitionSystem& t1, const TransitionSystem& t2);
/* Lines "q a q'" over the states and actions of ts. */
std::vector<Triple> parse_overlay(std::string_view text, const TransitionSystem& ts);

/* Compact little-endian binary form. */
void write_binary(std::ostream& os, const TransitionSystem& ts);
TransitionSystem read_binary(std::istream& is);

}  // namespace symctl

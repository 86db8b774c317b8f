#include "tsys.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace symctl {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

// ---------------------------------------------------------------------------
// TransitionSystem

TransitionSystem TransitionSystem::from_csr(std::size_t num_states, std::size_t num_actions,
                                            std::vector<std::uint64_t> offsets, std::vector<StateId> succ,
                                            std::vector<std::string> props, std::vector<LabelMask> labels,
                                            bool require_nonblocking) {
  if (props.size() > kMaxPropositions) throw Error(ErrorKind::InvalidArgument, "at most 64 propositions are supported");
  if (offsets.size() != num_states * num_actions + 1 || offsets.front() != 0 || offsets.back() != succ.size())
    throw Error(ErrorKind::InvalidArgument, "malformed transition offsets");
  if (labels.size() != num_states) throw Error(ErrorKind::InvalidArgument, "label vector has wrong size");
  for (std::size_t g = 0; g + 1 < offsets.size(); ++g) {
    if (offsets[g] > offsets[g + 1]) throw Error(ErrorKind::InvalidArgument, "transition offsets must be nondecreasing");
    for (std::uint64_t k = offsets[g]; k < offsets[g + 1]; ++k) {
      if (succ[k] >= num_states) throw Error(ErrorKind::InvalidArgument, "successor index out of range");
      if (k > offsets[g] && succ[k - 1] >= succ[k]) throw Error(ErrorKind::InvalidArgument, "successor runs must be sorted and unique");
    }
  }
  const LabelMask allowed = props.size() == 64 ? ~LabelMask{0} : ((LabelMask{1} << props.size()) - 1);
  for (LabelMask m : labels)
    if (m & ~allowed) throw Error(ErrorKind::InvalidArgument, "label references an undeclared proposition");

  TransitionSystem ts;
  ts.n_states_ = num_states;
  ts.n_actions_ = num_actions;
  ts.offsets_ = std::move(offsets);
  ts.succ_ = std::move(succ);
  ts.props_ = std::move(props);
  ts.labels_ = std::move(labels);
  if (require_nonblocking) {
    for (StateId q = 0; q < num_states; ++q) {
      bool any = false;
      for (ActionId a = 0; a < num_actions && !any; ++a) any = ts.is_admissible(q, a);
      if (!any) throw Error(ErrorKind::InvalidArgument, "state " + ts.state_name(q) + " has no admissible action");
    }
  }
  return ts;
}

bool TransitionSystem::has_transition(StateId q, ActionId a, StateId q2) const {
  const auto p = post(q, a);
  return std::binary_search(p.begin(), p.end(), q2);
}

std::vector<ActionId> TransitionSystem::admissible(StateId q) const {
  std::vector<ActionId> out;
  for (ActionId a = 0; a < n_actions_; ++a)
    if (is_admissible(q, a)) out.push_back(a);
  return out;
}

std::optional<std::size_t> TransitionSystem::proposition_index(std::string_view name) const {
  for (std::size_t i = 0; i < props_.size(); ++i)
    if (props_[i] == name) return i;
  return std::nullopt;
}

std::vector<std::string> TransitionSystem::label_names(StateId q) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < props_.size(); ++i)
    if (has_label(q, i)) out.push_back(props_[i]);
  return out;
}

std::string TransitionSystem::state_name(StateId q) const {
  return q < state_names_.size() ? state_names_[q] : std::to_string(q);
}

std::string TransitionSystem::action_name(ActionId a) const {
  return a < action_names_.size() ? action_names_[a] : std::to_string(a);
}

void TransitionSystem::set_state_names(std::vector<std::string> names) {
  if (!names.empty() && names.size() != n_states_) throw Error(ErrorKind::InvalidArgument, "state name count mismatch");
  state_names_ = std::move(names);
}

void TransitionSystem::set_action_names(std::vector<std::string> names) {
  if (!names.empty() && names.size() != n_actions_) throw Error(ErrorKind::InvalidArgument, "action name count mismatch");
  action_names_ = std::move(names);
}

std::vector<Triple> TransitionSystem::triples() const {
  std::vector<Triple> out;
  out.reserve(succ_.size());
  for (StateId q = 0; q < n_states_; ++q)
    for (ActionId a = 0; a < n_actions_; ++a)
      for (StateId q2 : post(q, a)) out.push_back({q, a, q2});
  return out;
}

// ---------------------------------------------------------------------------
// Builder

TransitionSystemBuilder::TransitionSystemBuilder(std::size_t num_states, std::size_t num_actions,
                                                 std::vector<std::string> props)
    : n_states_(num_states), n_actions_(num_actions), props_(std::move(props)), labels_(num_states, 0) {
  if (props_.size() > kMaxPropositions) throw Error(ErrorKind::InvalidArgument, "at most 64 propositions are supported");
}

void TransitionSystemBuilder::add(StateId q, ActionId a, StateId q2) {
  if (q >= n_states_ || q2 >= n_states_ || a >= n_actions_)
    throw Error(ErrorKind::InvalidArgument, "transition references an invalid index");
  triples_.push_back({q, a, q2});
}

void TransitionSystemBuilder::label(StateId q, std::size_t prop) {
  if (q >= n_states_ || prop >= props_.size()) throw Error(ErrorKind::InvalidArgument, "label references an invalid index");
  labels_[q] |= LabelMask{1} << prop;
}

void TransitionSystemBuilder::label(StateId q, std::string_view prop) {
  for (std::size_t i = 0; i < props_.size(); ++i)
    if (props_[i] == prop) return label(q, i);
  throw Error(ErrorKind::InvalidArgument, "unknown proposition '" + std::string(prop) + "'");
}

void TransitionSystemBuilder::set_labels(StateId q, LabelMask mask) {
  if (q >= n_states_) throw Error(ErrorKind::InvalidArgument, "label references an invalid state");
  labels_[q] = mask;
}

TransitionSystem TransitionSystemBuilder::finalize(bool require_nonblocking) const {
  std::vector<Triple> t = triples_;
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  std::vector<std::uint64_t> offsets(n_states_ * n_actions_ + 1, 0);
  std::vector<StateId> succ;
  succ.reserve(t.size());
  for (const auto& tr : t) {
    ++offsets[static_cast<std::size_t>(tr.q) * n_actions_ + tr.a + 1];
    succ.push_back(tr.q2);
  }
  for (std::size_t g = 1; g < offsets.size(); ++g) offsets[g] += offsets[g - 1];
  // names first so that blocking-state errors can use them
  TransitionSystem probe = TransitionSystem::from_csr(n_states_, n_actions_, offsets, succ, props_, labels_, false);
  probe.set_state_names(state_names_);
  probe.set_action_names(action_names_);
  if (require_nonblocking) {
    for (StateId q = 0; q < n_states_; ++q)
      if (probe.admissible(q).empty())
        throw Error(ErrorKind::InvalidArgument, "state " + probe.state_name(q) + " has no admissible action");
  }
  return probe;
}

// ---------------------------------------------------------------------------
// Overlays

TransitionSystem apply_overlay(const TransitionSystem& ts, std::span<const Triple> delta) {
  auto describe = [&](const Triple& t) {
    return "(" + ts.state_name(t.q) + ", " + ts.action_name(t.a) + ", " + ts.state_name(t.q2) + ")";
  };
  std::vector<Triple> extra(delta.begin(), delta.end());
  for (const auto& t : extra) {
    if (t.q >= ts.num_states() || t.q2 >= ts.num_states() || t.a >= ts.num_actions())
      throw Error(ErrorKind::InvalidOverlay, "overlay triple references an invalid index");
    if (ts.has_transition(t.q, t.a, t.q2))
      throw Error(ErrorKind::InvalidOverlay, "overlay triple " + describe(t) + " already belongs to the relation");
    if (!ts.is_admissible(t.q, t.a))
      throw Error(ErrorKind::InvalidOverlay, "overlay triple " + describe(t) + " uses an action that is not admissible");
  }
  std::sort(extra.begin(), extra.end());
  extra.erase(std::unique(extra.begin(), extra.end()), extra.end());

  const std::size_t groups = ts.num_states() * ts.num_actions();
  std::vector<std::uint64_t> offsets(groups + 1, 0);
  std::vector<StateId> succ;
  succ.reserve(ts.num_transitions() + extra.size());
  std::size_t e = 0;
  for (std::size_t g = 0; g < groups; ++g) {
    const StateId q = static_cast<StateId>(g / ts.num_actions());
    const ActionId a = static_cast<ActionId>(g % ts.num_actions());
    const auto base = ts.post(q, a);
    const std::size_t start = succ.size();
    std::size_t e_end = e;
    while (e_end < extra.size() && extra[e_end].q == q && extra[e_end].a == a) ++e_end;
    std::vector<StateId> add;
    for (std::size_t k = e; k < e_end; ++k) add.push_back(extra[k].q2);
    std::merge(base.begin(), base.end(), add.begin(), add.end(), std::back_inserter(succ));
    e = e_end;
    offsets[g + 1] = offsets[g] + (succ.size() - start);
  }
  TransitionSystem out = TransitionSystem::from_csr(ts.num_states(), ts.num_actions(), std::move(offsets), std::move(succ),
                                                    ts.propositions(), ts.label_masks(), false);
  out.set_state_names(ts.state_names());
  out.set_action_names(ts.action_names());
  return out;
}

// ---------------------------------------------------------------------------
// Relations

Relation::Relation(std::size_t left_size, std::size_t right_size, std::vector<std::pair<StateId, StateId>> pairs) {
  for (const auto& [a, b] : pairs)
    if (a >= left_size || b >= right_size) throw Error(ErrorKind::InvalidArgument, "relation pair out of range");
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  fwd_off_.assign(left_size + 1, 0);
  inv_off_.assign(right_size + 1, 0);
  for (const auto& [a, b] : pairs) {
    ++fwd_off_[a + 1];
    ++inv_off_[b + 1];
  }
  for (std::size_t i = 1; i < fwd_off_.size(); ++i) fwd_off_[i] += fwd_off_[i - 1];
  for (std::size_t i = 1; i < inv_off_.size(); ++i) inv_off_[i] += inv_off_[i - 1];
  fwd_.resize(pairs.size());
  inv_.resize(pairs.size());
  std::vector<std::uint32_t> fill(inv_off_.begin(), inv_off_.end() - 1);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    fwd_[k] = pairs[k].second;
    inv_[fill[pairs[k].second]++] = pairs[k].first;
  }
}

Relation Relation::identity(std::size_t n) {
  std::vector<std::pair<StateId, StateId>> p;
  for (StateId i = 0; i < n; ++i) p.emplace_back(i, i);
  return Relation(n, n, std::move(p));
}

bool Relation::contains(StateId q1, StateId q2) const {
  const auto im = image(q1);
  return std::binary_search(im.begin(), im.end(), q2);
}

std::vector<std::pair<StateId, StateId>> Relation::pairs() const {
  std::vector<std::pair<StateId, StateId>> out;
  for (StateId a = 0; a < left_size(); ++a)
    for (StateId b : image(a)) out.emplace_back(a, b);
  return out;
}

bool Relation::single_valued() const {
  for (StateId a = 0; a < left_size(); ++a)
    if (image(a).size() > 1) return false;
  return true;
}

Relation compose(const Relation& first, const Relation& second) {
  if (first.right_size() != second.left_size()) throw Error(ErrorKind::Dimension, "compose: index spaces do not match");
  std::vector<std::pair<StateId, StateId>> out;
  for (StateId x = 0; x < first.left_size(); ++x)
    for (StateId y : first.image(x))
      for (StateId z : second.image(y)) out.emplace_back(x, z);
  return Relation(first.left_size(), second.right_size(), std::move(out));
}

// ---------------------------------------------------------------------------
// Checkers

namespace {

// Maps each proposition bit of `from` onto the bit of the same name in `to`.
struct LabelMap {
  std::vector<int> bit;
  bool subset(LabelMask from_mask, LabelMask to_mask) const {
    for (std::size_t i = 0; i < bit.size(); ++i) {
      if (!((from_mask >> i) & 1U)) continue;
      if (bit[i] < 0 || !((to_mask >> bit[i]) & 1U)) return false;
    }
    return true;
  }
};

LabelMap label_map(const TransitionSystem& from, const TransitionSystem& to) {
  LabelMap m;
  for (const auto& p : from.propositions()) {
    const auto idx = to.proposition_index(p);
    m.bit.push_back(idx ? static_cast<int>(*idx) : -1);
  }
  return m;
}

void check_shapes(const TransitionSystem& t1, const TransitionSystem& t2, const Relation& alpha) {
  if (alpha.left_size() != t1.num_states() || alpha.right_size() != t2.num_states())
    throw Error(ErrorKind::Dimension, "relation does not match the state spaces");
}

CheckResult fail(Violation v, StateId q1, StateId q2, ActionId a2, std::string msg) {
  CheckResult r;
  r.pass = false;
  r.violated = v;
  r.q1 = q1;
  r.q2 = q2;
  r.a2 = a2;
  r.message = std::move(msg);
  return r;
}

// Conditions shared by every mode: totality of alpha and label under-approximation.
std::optional<CheckResult> check_common(const TransitionSystem& t1, const TransitionSystem& t2, const Relation& alpha) {
  for (StateId q1 = 0; q1 < t1.num_states(); ++q1)
    if (alpha.image(q1).empty())
      return fail(Violation::Totality, q1, 0, 0, "state " + t1.state_name(q1) + " is not related to any abstract state");
  const LabelMap lm = label_map(t2, t1);
  for (StateId q1 = 0; q1 < t1.num_states(); ++q1)
    for (StateId q2 : alpha.image(q1))
      if (!lm.subset(t2.labels(q2), t1.labels(q1)))
        return fail(Violation::Labels, q1, q2, 0,
                    "labels of " + t2.state_name(q2) + " are not contained in labels of " + t1.state_name(q1));
  return std::nullopt;
}

// alpha(S) as a sorted set.
void alpha_image(const Relation& alpha, std::span<const StateId> states, std::vector<StateId>& out) {
  out.clear();
  for (StateId s : states)
    for (StateId q : alpha.image(s)) out.push_back(q);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

// Union over q in alpha^-1(q2) of alpha(Post1(q, a1)), for every a1.
std::vector<std::vector<StateId>> uniform_images(const TransitionSystem& t1, const Relation& alpha, StateId q2) {
  std::vector<std::vector<StateId>> out(t1.num_actions());
  std::vector<StateId> tmp;
  for (ActionId a1 = 0; a1 < t1.num_actions(); ++a1) {
    auto& acc = out[a1];
    for (StateId q : alpha.preimage(q2)) {
      alpha_image(alpha, t1.post(q, a1), tmp);
      acc.insert(acc.end(), tmp.begin(), tmp.end());
    }
    std::sort(acc.begin(), acc.end());
    acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
  }
  return out;
}

std::string triple_text(const TransitionSystem& t1, const TransitionSystem& t2, StateId q1, StateId q2, ActionId a2) {
  return "(" + t1.state_name(q1) + ", " + t2.state_name(q2) + ", " + t2.action_name(a2) + ")";
}

}  // namespace

const char* to_string(Violation v) noexcept {
  switch (v) {
    case Violation::None: return "none";
    case Violation::Totality: return "totality";
    case Violation::Transition: return "transition";
    case Violation::Labels: return "labels";
    case Violation::Actions: return "actions";
  }
  return "?";
}

CheckResult check_abstraction(const TransitionSystem& t1, const TransitionSystem& t2, const Relation& alpha,
                              bool keep_witnesses) {
  check_shapes(t1, t2, alpha);
  if (auto r = check_common(t1, t2, alpha)) return *r;
  CheckResult ok;
  for (StateId q2 = 0; q2 < t2.num_states(); ++q2) {
    if (alpha.preimage(q2).empty()) continue;
    const auto images = uniform_images(t1, alpha, q2);
    for (StateId q1 : alpha.preimage(q2)) {
      for (ActionId a2 = 0; a2 < t2.num_actions(); ++a2) {
        const auto target = t2.post(q2, a2);
        if (target.empty()) continue;
        std::optional<ActionId> witness;
        for (ActionId a1 = 0; a1 < t1.num_actions() && !witness; ++a1)
          if (t1.is_admissible(q1, a1) && std::includes(target.begin(), target.end(), images[a1].begin(), images[a1].end()))
            witness = a1;
        if (!witness)
          return fail(Violation::Transition, q1, q2, a2,
                      "no action of " + t1.state_name(q1) + " matches " + triple_text(t1, t2, q1, q2, a2) +
                          " uniformly over the preimage of " + t2.state_name(q2));
        if (keep_witnesses) ok.witnesses.push_back({q1, q2, a2, *witness});
      }
    }
  }
  return ok;
}

CheckResult check_feedback_refinement(const TransitionSystem& t1, const TransitionSystem& t2, const Relation& alpha) {
  check_shapes(t1, t2, alpha);
  if (auto r = check_common(t1, t2, alpha)) return *r;
  CheckResult ok;
  std::vector<StateId> img;
  for (StateId q1 = 0; q1 < t1.num_states(); ++q1) {
    for (StateId q2 : alpha.image(q1)) {
      for (ActionId a = 0; a < t2.num_actions(); ++a) {
        if (!t2.is_admissible(q2, a)) continue;
        if (a >= t1.num_actions() || !t1.is_admissible(q1, a))
          return fail(Violation::Actions, q1, q2, a,
                      "action " + t2.action_name(a) + " admissible at " + t2.state_name(q2) + " but not at " + t1.state_name(q1));
        alpha_image(alpha, t1.post(q1, a), img);
        const auto target = t2.post(q2, a);
        if (!std::includes(target.begin(), target.end(), img.begin(), img.end()))
          return fail(Violation::Transition, q1, q2, a, "successors escape at " + triple_text(t1, t2, q1, q2, a));
        ok.witnesses.push_back({q1, q2, a, a});
      }
    }
  }
  return ok;
}

CheckResult check_alternating_sim(const TransitionSystem& t1, const TransitionSystem& t2, const Relation& alpha) {
  check_shapes(t1, t2, alpha);
  if (auto r = check_common(t1, t2, alpha)) return *r;
  CheckResult ok;
  for (StateId q1 = 0; q1 < t1.num_states(); ++q1) {
    for (StateId q2 : alpha.image(q1)) {
      for (ActionId a2 = 0; a2 < t2.num_actions(); ++a2) {
        const auto target = t2.post(q2, a2);
        if (target.empty()) continue;
        std::optional<ActionId> witness;
        for (ActionId a1 = 0; a1 < t1.num_actions() && !witness; ++a1) {
          const auto succ = t1.post(q1, a1);
          if (succ.empty()) continue;
          bool all = true;
          for (StateId s : succ) {
            bool meets = false;
            for (StateId q : alpha.image(s)) meets |= std::binary_search(target.begin(), target.end(), q);
            if (!meets) {
              all = false;
              break;
            }
          }
          if (all) witness = a1;
        }
        if (!witness)
          return fail(Violation::Transition, q1, q2, a2, "no matching action at " + triple_text(t1, t2, q1, q2, a2));
        ok.witnesses.push_back({q1, q2, a2, *witness});
      }
    }
  }
  return ok;
}

CheckResult check_relation(CheckMode mode, const TransitionSystem& t1, const TransitionSystem& t2, const Relation& alpha) {
  switch (mode) {
    case CheckMode::Abstraction: return check_abstraction(t1, t2, alpha);
    case CheckMode::FeedbackRefinement: return check_feedback_refinement(t1, t2, alpha);
    case CheckMode::AlternatingSimulation: return check_alternating_sim(t1, t2, alpha);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown check mode");
}

StateStrategy implement_strategy(const TransitionSystem& t1, const TransitionSystem& t2, const Relation& alpha,
                                 const StateStrategy& mu2) {
  check_shapes(t1, t2, alpha);
  if (mu2.size() != t2.num_states()) throw Error(ErrorKind::Dimension, "strategy size does not match the abstract system");
  StateStrategy mu1(t1.num_states(), -1);
  std::unordered_map<StateId, std::vector<std::vector<StateId>>> cache;
  for (StateId x = 0; x < t1.num_states(); ++x) {
    const auto im = alpha.image(x);
    if (im.empty()) continue;
    const StateId q = im.front();
    if (mu2[q] < 0) continue;
    auto it = cache.find(q);
    if (it == cache.end()) it = cache.emplace(q, uniform_images(t1, alpha, q)).first;
    const auto target = t2.post(q, static_cast<ActionId>(mu2[q]));
    for (ActionId a1 = 0; a1 < t1.num_actions(); ++a1) {
      const auto& img = it->second[a1];
      if (t1.is_admissible(x, a1) && std::includes(target.begin(), target.end(), img.begin(), img.end())) {
        mu1[x] = static_cast<std::int32_t>(a1);
        break;
      }
    }
  }
  return mu1;
}

TraceInclusionResult bounded_trace_inclusion(const TransitionSystem& t1, const StateStrategy& mu1,
                                             const TransitionSystem& t2, const StateStrategy& mu2,
                                             const Relation& alpha, int horizon, std::span<const StateId> initial) {
  check_shapes(t1, t2, alpha);
  if (horizon < 0) throw Error(ErrorKind::InvalidArgument, "horizon must be nonnegative");
  if (mu1.size() != t1.num_states() || mu2.size() != t2.num_states())
    throw Error(ErrorKind::Dimension, "strategy sizes do not match the systems");
  const LabelMap lm = label_map(t2, t1);

  struct Node {
    StateId x, q;
    std::int64_t parent;
    int depth;
  };
  std::vector<Node> nodes;
  std::unordered_map<std::uint64_t, std::size_t> seen;
  TraceInclusionResult res;

  auto prefix_of = [&](std::int64_t idx, StateId x, StateId q) {
    std::vector<std::pair<StateId, StateId>> p{{x, q}};
    for (std::int64_t k = idx; k >= 0; k = nodes[k].parent) p.emplace_back(nodes[k].x, nodes[k].q);
    std::reverse(p.begin(), p.end());
    return p;
  };
  auto failure = [&](std::int64_t parent, StateId x, StateId q, std::string msg) {
    res.pass = false;
    res.message = std::move(msg);
    res.prefix = prefix_of(parent, x, q);
    res.explored_pairs = nodes.size();
    return res;
  };
  auto key = [](StateId x, StateId q) { return (static_cast<std::uint64_t>(x) << 32) | q; };

  std::deque<std::size_t> work;
  for (StateId x : initial) {
    if (x >= t1.num_states()) throw Error(ErrorKind::InvalidArgument, "initial state out of range");
    for (StateId q : alpha.image(x)) {
      if (!lm.subset(t2.labels(q), t1.labels(x)))
        return failure(-1, x, q, "initial labels of " + t2.state_name(q) + " not contained in " + t1.state_name(x));
      if (seen.emplace(key(x, q), nodes.size()).second) {
        work.push_back(nodes.size());
        nodes.push_back({x, q, -1, 0});
      }
    }
  }
  while (!work.empty()) {
    const std::size_t idx = work.front();
    work.pop_front();
    const Node n = nodes[idx];
    if (n.depth >= horizon || mu2[n.q] < 0) continue;
    const auto a = static_cast<ActionId>(mu2[n.q]);
    if (mu1[n.x] < 0) return failure(static_cast<std::int64_t>(idx), n.x, n.q, "concrete strategy undefined at " + t1.state_name(n.x));
    const auto u = static_cast<ActionId>(mu1[n.x]);
    const auto succ = t1.post(n.x, u);
    if (succ.empty())
      return failure(static_cast<std::int64_t>(idx), n.x, n.q, "concrete strategy picks an inadmissible action at " + t1.state_name(n.x));
    const auto target = t2.post(n.q, a);
    for (StateId x2 : succ) {
      for (StateId q2 : alpha.image(x2)) {
        if (!std::binary_search(target.begin(), target.end(), q2))
          return failure(static_cast<std::int64_t>(idx), x2, q2,
                         "step to " + t1.state_name(x2) + " does not lift: " + t2.state_name(q2) + " is not a successor of " +
                             t2.state_name(n.q) + " under " + t2.action_name(a));
        if (!lm.subset(t2.labels(q2), t1.labels(x2)))
          return failure(static_cast<std::int64_t>(idx), x2, q2, "labels of " + t2.state_name(q2) + " not contained in " + t1.state_name(x2));
        if (seen.emplace(key(x2, q2), nodes.size()).second) {
          work.push_back(nodes.size());
          nodes.push_back({x2, q2, static_cast<std::int64_t>(idx), n.depth + 1});
        }
      }
    }
  }
  res.explored_pairs = nodes.size();
  return res;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

std::vector<std::string> split_words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> w;
  std::string s;
  while (in >> s) w.push_back(s);
  return w;
}

std::string strip_comment(std::string line) {
  if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
  return line;
}

std::size_t parse_count(const std::string& s, int line) {
  std::size_t v = 0;
  try {
    std::size_t used = 0;
    v = std::stoul(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw SyntaxError("expected a count, found '" + s + "'", line, 1);
  }
  return v;
}

std::map<std::string, StateId, std::less<>> name_index(const std::vector<std::string>& names, std::size_t count) {
  std::map<std::string, StateId, std::less<>> m;
  for (std::size_t i = 0; i < count; ++i) m[i < names.size() ? names[i] : std::to_string(i)] = static_cast<StateId>(i);
  return m;
}

}  // namespace

TransitionSystem parse_transition_system(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  std::optional<std::size_t> n_states, n_actions;
  std::vector<std::string> state_names, action_names, props;
  struct Pending {
    std::vector<std::string> words;
    int line;
  };
  std::vector<Pending> body;
  while (std::getline(in, raw)) {
    ++line_no;
    auto w = split_words(strip_comment(raw));
    if (w.empty()) continue;
    if (w[0] == "states") {
      state_names.assign(w.begin() + 1, w.end());
      n_states = state_names.size();
    } else if (w[0] == "state_count" && w.size() == 2) {
      n_states = parse_count(w[1], line_no);
    } else if (w[0] == "actions") {
      action_names.assign(w.begin() + 1, w.end());
      n_actions = action_names.size();
    } else if (w[0] == "action_count" && w.size() == 2) {
      n_actions = parse_count(w[1], line_no);
    } else if (w[0] == "props" || w[0] == "propositions") {
      props.assign(w.begin() + 1, w.end());
    } else {
      body.push_back({std::move(w), line_no});
    }
  }
  if (!n_states) throw SyntaxError("missing 'states' or 'state_count' header", line_no, 1);
  if (!n_actions) throw SyntaxError("missing 'actions' or 'action_count' header", line_no, 1);
  const auto sidx = name_index(state_names, *n_states);
  const auto aidx = name_index(action_names, *n_actions);
  if (sidx.size() != *n_states) throw SyntaxError("duplicate state names", 1, 1);
  if (aidx.size() != *n_actions) throw SyntaxError("duplicate action names", 1, 1);

  TransitionSystemBuilder b(*n_states, *n_actions, props);
  auto state = [&](const std::string& s, int line) {
    auto it = sidx.find(s);
    if (it == sidx.end()) throw SyntaxError("unknown state '" + s + "'", line, 1);
    return it->second;
  };
  for (const auto& p : body) {
    const auto& w = p.words;
    if (w.size() >= 2 && w[1] == ":") {
      const StateId q = state(w[0], p.line);
      for (std::size_t k = 2; k < w.size(); ++k) {
        auto it = std::find(props.begin(), props.end(), w[k]);
        if (it == props.end()) throw SyntaxError("undeclared proposition '" + w[k] + "'", p.line, 1);
        b.label(q, static_cast<std::size_t>(it - props.begin()));
      }
    } else if (w.size() == 3) {
      auto ai = aidx.find(w[1]);
      if (ai == aidx.end()) throw SyntaxError("unknown action '" + w[1] + "'", p.line, 1);
      b.add(state(w[0], p.line), ai->second, state(w[2], p.line));
    } else {
      throw SyntaxError("expected 'q a q2' or 'q : props'", p.line, 1);
    }
  }
  b.set_state_names(state_names);
  b.set_action_names(action_names);
  return b.finalize();
}

TransitionSystem load_transition_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open transition system file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_transition_system(ss.str());
}

std::string format_transition_system(const TransitionSystem& ts) {
  std::ostringstream out;
  if (ts.state_names().empty()) {
    out << "state_count " << ts.num_states() << "\n";
  } else {
    out << "states";
    for (const auto& s : ts.state_names()) out << ' ' << s;
    out << "\n";
  }
  if (ts.action_names().empty()) {
    out << "action_count " << ts.num_actions() << "\n";
  } else {
    out << "actions";
    for (const auto& s : ts.action_names()) out << ' ' << s;
    out << "\n";
  }
  out << "props";
  for (const auto& p : ts.propositions()) out << ' ' << p;
  out << "\n";
  for (StateId q = 0; q < ts.num_states(); ++q)
    for (ActionId a = 0; a < ts.num_actions(); ++a)
      for (StateId q2 : ts.post(q, a)) out << ts.state_name(q) << ' ' << ts.action_name(a) << ' ' << ts.state_name(q2) << "\n";
  for (StateId q = 0; q < ts.num_states(); ++q) {
    if (ts.labels(q) == 0) continue;
    out << ts.state_name(q) << " :";
    for (const auto& p : ts.label_names(q)) out << ' ' << p;
    out << "\n";
  }
  return out.str();
}

Relation parse_relation(std::string_view text, const TransitionSystem& t1, const TransitionSystem& t2) {
  const auto i1 = name_index(t1.state_names(), t1.num_states());
  const auto i2 = name_index(t2.state_names(), t2.num_states());
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  std::vector<std::pair<StateId, StateId>> pairs;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto w = split_words(strip_comment(raw));
    if (w.empty()) continue;
    if (w.size() != 3 || w[1] != "~") throw SyntaxError("expected 'q1 ~ q2'", line_no, 1);
    auto a = i1.find(w[0]);
    auto b = i2.find(w[2]);
    if (a == i1.end()) throw SyntaxError("unknown state '" + w[0] + "'", line_no, 1);
    if (b == i2.end()) throw SyntaxError("unknown state '" + w[2] + "'", line_no, 1);
    pairs.emplace_back(a->second, b->second);
  }
  return Relation(t1.num_states(), t2.num_states(), std::move(pairs));
}

Relation load_relation(const std::string& path, const TransitionSystem& t1, const TransitionSystem& t2) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open relation file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_relation(ss.str(), t1, t2);
}

std::vector<Triple> parse_overlay(std::string_view text, const TransitionSystem& ts) {
  const auto si = name_index(ts.state_names(), ts.num_states());
  const auto ai = name_index(ts.action_names(), ts.num_actions());
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  std::vector<Triple> out;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto w = split_words(strip_comment(raw));
    if (w.empty()) continue;
    if (w.size() != 3) throw SyntaxError("expected 'q a q2'", line_no, 1);
    auto q = si.find(w[0]);
    auto a = ai.find(w[1]);
    auto q2 = si.find(w[2]);
    if (q == si.end() || a == ai.end() || q2 == si.end()) throw SyntaxError("unknown state or action", line_no, 1);
    out.push_back({q->second, a->second, q2->second});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Binary format

namespace {

constexpr char kMagic[8] = {'S', 'Y', 'M', 'T', 'S', '0', '0', '1'};

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw Error(ErrorKind::Io, "truncated binary transition system");
  return v;
}

void put_strings(std::ostream& os, const std::vector<std::string>& v) {
  put<std::uint64_t>(os, v.size());
  for (const auto& s : v) {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
}

std::vector<std::string> get_strings(std::istream& is) {
  const auto n = get<std::uint64_t>(is);
  std::vector<std::string> v;
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string s(get<std::uint32_t>(is), '\0');
    if (!is.read(s.data(), static_cast<std::streamsize>(s.size()))) throw Error(ErrorKind::Io, "truncated binary transition system");
    v.push_back(std::move(s));
  }
  return v;
}

template <class T>
void put_vector(std::ostream& os, const std::vector<T>& v) {
  put<std::uint64_t>(os, v.size());
  os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <class T>
std::vector<T> get_vector(std::istream& is) {
  const auto n = get<std::uint64_t>(is);
  std::vector<T> v(n);
  if (!is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T))))
    throw Error(ErrorKind::Io, "truncated binary transition system");
  return v;
}

}  // namespace

void write_binary(std::ostream& os, const TransitionSystem& ts) {
  os.write(kMagic, sizeof kMagic);
  put<std::uint64_t>(os, ts.num_states());
  put<std::uint64_t>(os, ts.num_actions());
  put_strings(os, ts.propositions());
  put_strings(os, ts.state_names());
  put_strings(os, ts.action_names());
  put_vector(os, ts.label_masks());
  put_vector(os, ts.offsets());
  put_vector(os, ts.successors());
}

TransitionSystem read_binary(std::istream& is) {
  char magic[8];
  if (!is.read(magic, sizeof magic) || !std::equal(magic, magic + 8, kMagic))
    throw Error(ErrorKind::Io, "not a binary transition system");
  const auto ns = get<std::uint64_t>(is);
  const auto na = get<std::uint64_t>(is);
  auto props = get_strings(is);
  auto snames = get_strings(is);
  auto anames = get_strings(is);
  auto labels = get_vector<LabelMask>(is);
  auto offsets = get_vector<std::uint64_t>(is);
  auto succ = get_vector<StateId>(is);
  TransitionSystem ts = TransitionSystem::from_csr(ns, na, std::move(offsets), std::move(succ), std::move(props),
                                                   std::move(labels), false);
  ts.set_state_names(std::move(snames));
  ts.set_action_names(std::move(anames));
  return ts;
}

}  // namespace symctl

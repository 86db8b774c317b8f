#pragma once

// Random finite systems and definitional reference checkers shared by the unit
// and acceptance suites. The reference checkers use std::set and plain loops,
// independent of the library's CSR-based implementation.

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "tsys.hpp"

namespace testgen {

using namespace symctl;

inline std::vector<std::string> default_props(std::size_t k) {
  std::vector<std::string> p;
  for (std::size_t i = 0; i < k; ++i) p.push_back("p" + std::to_string(i));
  return p;
}

/* Every state gets at least one admissible action; with all_admissible every (q, a) is. */
inline TransitionSystem random_ts(std::mt19937_64& rng, std::size_t nq, std::size_t na, std::size_t nprops,
                                  double p_action = 0.7, double p_succ = 0.35, bool all_admissible = false) {
  std::uniform_real_distribution<double> u(0, 1);
  TransitionSystemBuilder b(nq, na, default_props(nprops));
  for (StateId q = 0; q < nq; ++q) {
    bool any = false;
    for (ActionId a = 0; a < na; ++a) {
      const bool on = all_admissible || u(rng) < p_action || (!any && a + 1 == na);
      if (!on) continue;
      any = true;
      bool added = false;
      for (StateId q2 = 0; q2 < nq; ++q2)
        if (u(rng) < p_succ) {
          b.add(q, a, q2);
          added = true;
        }
      if (!added) b.add(q, a, static_cast<StateId>(rng() % nq));
    }
    for (std::size_t p = 0; p < nprops; ++p)
      if (u(rng) < 0.5) b.label(q, p);
  }
  return b.finalize();
}

inline Relation random_total_relation(std::mt19937_64& rng, std::size_t n1, std::size_t n2, bool multi) {
  std::vector<std::pair<StateId, StateId>> pairs;
  for (StateId q = 0; q < n1; ++q) {
    pairs.emplace_back(q, static_cast<StateId>(rng() % n2));
    if (multi && rng() % 3 == 0) pairs.emplace_back(q, static_cast<StateId>(rng() % n2));
  }
  return Relation(n1, n2, pairs);
}

inline std::set<StateId> image_of(const Relation& r, const std::set<StateId>& s) {
  std::set<StateId> out;
  for (StateId x : s)
    for (StateId y : r.image(x)) out.insert(y);
  return out;
}

inline std::set<StateId> post_set(const TransitionSystem& t, StateId q, ActionId a) {
  const auto p = t.post(q, a);
  return {p.begin(), p.end()};
}

/*
 * Builds T2 over n2 states and na2 actions with T1 <=_alpha T2 by construction.
 * Requires every action of t1 to be admissible at every state.
 */
inline TransitionSystem abstract_of(std::mt19937_64& rng, const TransitionSystem& t1, const Relation& alpha, std::size_t na2) {
  const std::size_t n2 = alpha.right_size();
  std::uniform_real_distribution<double> u(0, 1);
  TransitionSystemBuilder b(n2, na2, t1.propositions());
  for (StateId q2 = 0; q2 < n2; ++q2) {
    const auto pre = alpha.preimage(q2);
    for (ActionId a2 = 0; a2 < na2; ++a2) {
      if (a2 > 0 && u(rng) < 0.3) continue;
      std::set<StateId> target;
      if (!pre.empty()) {
        const ActionId a1 = static_cast<ActionId>(rng() % t1.num_actions());
        for (StateId q : pre) {
          const auto img = image_of(alpha, post_set(t1, q, a1));
          target.insert(img.begin(), img.end());
        }
      }
      for (StateId extra = 0; extra < n2; ++extra)
        if (u(rng) < 0.15) target.insert(extra);
      if (target.empty()) target.insert(static_cast<StateId>(rng() % n2));
      for (StateId t : target) b.add(q2, a2, t);
    }
    LabelMask common = ~LabelMask{0};
    if (pre.empty()) common = rng();
    for (StateId q : pre) common &= t1.labels(q);
    for (std::size_t p = 0; p < t1.propositions().size(); ++p)
      if (((common >> p) & 1U) && u(rng) < 0.7) b.label(q2, p);
  }
  return b.finalize();
}

inline std::vector<Triple> random_overlay(std::mt19937_64& rng, const TransitionSystem& t, std::size_t tries) {
  std::set<Triple> out;
  for (std::size_t k = 0; k < tries; ++k) {
    const StateId q = static_cast<StateId>(rng() % t.num_states());
    const ActionId a = static_cast<ActionId>(rng() % t.num_actions());
    const StateId q2 = static_cast<StateId>(rng() % t.num_states());
    if (t.is_admissible(q, a) && !t.has_transition(q, a, q2)) out.insert({q, a, q2});
  }
  return {out.begin(), out.end()};
}

inline bool labels_included(const TransitionSystem& t2, StateId q2, const TransitionSystem& t1, StateId q1) {
  for (const auto& name : t2.label_names(q2)) {
    const auto names1 = t1.label_names(q1);
    if (std::find(names1.begin(), names1.end(), name) == names1.end()) return false;
  }
  return true;
}

/* Direct transcription of the abstraction conditions. */
inline bool reference_abstraction(const TransitionSystem& t1, const TransitionSystem& t2, const Relation& alpha) {
  for (StateId q1 = 0; q1 < t1.num_states(); ++q1)
    if (alpha.image(q1).empty()) return false;
  for (const auto& [q1, q2] : alpha.pairs()) {
    if (!labels_included(t2, q2, t1, q1)) return false;
    for (ActionId a2 = 0; a2 < t2.num_actions(); ++a2) {
      const auto target = post_set(t2, q2, a2);
      if (target.empty()) continue;
      bool found = false;
      for (ActionId a1 = 0; a1 < t1.num_actions() && !found; ++a1) {
        if (post_set(t1, q1, a1).empty()) continue;
        bool ok = true;
        for (StateId q = 0; q < t1.num_states() && ok; ++q) {
          if (!alpha.contains(q, q2)) continue;
          for (StateId y : image_of(alpha, post_set(t1, q, a1))) ok &= target.count(y) > 0;
        }
        found = ok;
      }
      if (!found) return false;
    }
  }
  return true;
}

inline bool reference_alternating(const TransitionSystem& t1, const TransitionSystem& t2, const Relation& alpha) {
  for (StateId q1 = 0; q1 < t1.num_states(); ++q1)
    if (alpha.image(q1).empty()) return false;
  for (const auto& [q1, q2] : alpha.pairs()) {
    if (!labels_included(t2, q2, t1, q1)) return false;
    for (ActionId a2 = 0; a2 < t2.num_actions(); ++a2) {
      const auto target = post_set(t2, q2, a2);
      if (target.empty()) continue;
      bool found = false;
      for (ActionId a1 = 0; a1 < t1.num_actions() && !found; ++a1) {
        const auto succ = post_set(t1, q1, a1);
        if (succ.empty()) continue;
        bool ok = true;
        for (StateId s : succ) {
          bool meets = false;
          for (StateId y : alpha.image(s)) meets |= target.count(y) > 0;
          ok &= meets;
        }
        found = ok;
      }
      if (!found) return false;
    }
  }
  return true;
}

}  // namespace testgen

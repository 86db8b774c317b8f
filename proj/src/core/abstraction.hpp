#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "expr.hpp"
#include "interval.hpp"
#include "reach.hpp"
#include "tsys.hpp"

namespace symctl {

struct AbstractionParams {
  double delta1 = 0, delta2 = 0;
  double eps1 = 0, eps2 = 0;
  std::vector<double> eta;  // one entry broadcasts
  std::vector<double> mu;
  double eps = 0;           // reach slack
  double L = 0;             // Lipschitz bound
  bool sound_only = false;  // skip the completeness inequalities
  InclusionKind inclusion = InclusionKind::Natural;
};

struct ParamReport {
  bool ok = false;
  bool gaps_ok = false;        // delta1 < delta2, eps1 < eps2
  double growth_slack = 0;     // delta2 - (delta1 + L(eta+mu) + eta + eps)
  double label_slack = 0;      // eps2 - (eta + (eps1+eps2)/2)
  double max_eta = 0;          // largest pitch meeting both inequalities for the given mu
  double max_mu = 0;           // largest input pitch for the given eta
  std::string message;
};

/* Checks the parameter inequalities using the largest pitch per vector. */
ParamReport validate_params(const AbstractionParams& p);

/*
 * Integer lattice anchored at the origin. State x owns cell k with
 * k*eta <= x < (k+1)*eta in each dimension; the sink X^c is the last index.
 */
class Quantizer {
 public:
  Quantizer(const Box& X, const Box& U, std::vector<double> eta, std::vector<double> mu,
            std::vector<bool> periodic = {});

  std::size_t state_dim() const noexcept { return eta_.size(); }
  std::size_t input_dim() const noexcept { return mu_.size(); }
  std::size_t num_cells() const noexcept { return cells_; }
  std::size_t num_states() const noexcept { return cells_ + 1; }
  StateId sink() const noexcept { return static_cast<StateId>(cells_); }
  std::size_t num_actions() const noexcept { return actions_; }
  const Box& X() const noexcept { return X_; }
  const Box& U() const noexcept { return U_; }
  std::span<const double> eta() const noexcept { return eta_; }
  std::span<const double> mu() const noexcept { return mu_; }
  std::span<const std::int64_t> lattice_lo() const noexcept { return klo_; }
  std::span<const std::int64_t> lattice_hi() const noexcept { return khi_; }
  std::span<const std::int64_t> input_lo() const noexcept { return jlo_; }
  std::span<const std::int64_t> input_hi() const noexcept { return jhi_; }
  const std::vector<bool>& periodic() const noexcept { return periodic_; }

  /* Lattice coordinate owning v along dimension i (unclamped). */
  std::int64_t coordinate(std::size_t i, double v) const;
  /* Wraps periodic coordinates into X; others unchanged. */
  std::vector<double> wrap(std::span<const double> x) const;
  StateId quantize_state(std::span<const double> x) const;
  std::vector<std::int64_t> coordinates(StateId q) const;
  /* Closed cell [eta k, eta (k+1)]. */
  Box cell(StateId q) const;

  /* Lattice point mu*floor(u/mu), clamped into the in-U lattice range. */
  ActionId quantize_input(std::span<const double> u) const;
  std::vector<double> decode(ActionId a) const;

  /* All cells meeting the box (after periodic wrapping); `escapes` is set if the box leaves X. */
  void cover(const Box& b, std::vector<StateId>& out, bool& escapes) const;

 private:
  StateId index_of(std::span<const std::int64_t> k) const;

  Box X_, U_;
  std::vector<double> eta_, mu_;
  std::vector<bool> periodic_;
  std::vector<std::int64_t> klo_, khi_, jlo_, jhi_;
  std::vector<std::size_t> stride_, ustride_;
  std::size_t cells_ = 0, actions_ = 0;
};

/* Named regions, each a union of boxes inside X. "in" is reserved and equals X. */
class PropositionAtlas {
 public:
  explicit PropositionAtlas(Box X);

  std::size_t add(const std::string& name, std::vector<Box> region);
  /* Registers X \ region(name) under `complement_name` (idempotent). */
  std::size_t add_complement(const std::string& name, const std::string& complement_name);
  std::optional<std::size_t> find(const std::string& name) const;
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<Box>& region(std::size_t i) const { return regions_.at(i); }
  const Box& X() const noexcept { return X_; }

  /* Unstrengthened membership of a concrete state (false outside X). */
  LabelMask labels_at(std::span<const double> x) const;
  /* Propositions whose region covers inflate(box, margin) intersected with X. */
  LabelMask strengthened_label(const Box& box, double margin) const;

 private:
  Box X_;
  std::vector<std::string> names_;
  std::vector<std::vector<Box>> regions_;
};

struct BuildOptions {
  unsigned workers = 0;  // 0 means hardware concurrency
};

struct Abstraction {
  TransitionSystem ts;
  Quantizer quantizer;
  AbstractionParams params;
  ParamReport report;
  double build_seconds = 0;
  std::size_t reach_leaves = 0;
};

/* Throws ErrorKind::Parameter when validation fails outside sound-only mode. */
Abstraction build_abstraction(const SystemModel& model, const PropositionAtlas& atlas, const AbstractionParams& params,
                              const BuildOptions& options = {});

struct SandwichReport {
  bool lower_ok = true;         // S1 below T
  bool upper_ok = true;         // T below S2
  bool labels_lower_ok = true;  // L_T(q) within L_S1(x)
  bool labels_upper_ok = true;  // L_S2(x) within L_T(q)
  std::size_t samples = 0;
  std::string witness;
  bool pass() const { return lower_ok && upper_ok && labels_lower_ok && labels_upper_ok; }
};

SandwichReport sandwich_spot_check(const SystemModel& model, const PropositionAtlas& atlas, const Abstraction& abs,
                                   std::size_t samples, std::uint64_t seed);

/* Binary transition system dump plus a key = value manifest. */
void write_abstraction(const Abstraction& abs, const std::string& dir);
std::string abstraction_manifest(const Abstraction& abs);

}  // namespace symctl

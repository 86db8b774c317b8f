#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abstraction.hpp"
#include "ltl.hpp"
#include "synthesis.hpp"

namespace symctl {

/* kappa(x) = decode(action(quantize(x))); undefined off the strategy domain. */
class ConcreteController {
 public:
  ConcreteController(Quantizer quantizer, Strategy strategy);

  const Quantizer& quantizer() const noexcept { return quantizer_; }
  const Strategy& strategy() const noexcept { return strategy_; }

  /* Abstract state of x, or the sink outside X. */
  StateId cell_of(std::span<const double> x) const { return quantizer_.quantize_state(x); }
  bool defined_at(std::span<const double> x) const;
  std::optional<std::vector<double>> input_at(std::span<const double> x) const;
  /* Throws ErrorKind::UndefinedController where input_at is empty. */
  std::vector<double> operator()(std::span<const double> x) const;

 private:
  Quantizer quantizer_;
  Strategy strategy_;
};

ConcreteController refine(const Strategy& strategy, const Quantizer& quantizer);

enum class RunStatus { Running, Completed, LeftDomain, LeftWinning, UndefinedController };
const char* to_string(RunStatus s) noexcept;

enum class NoiseSampling { Uniform, Corners };

struct SimOptions {
  std::size_t horizon = 100;
  double delta = 0;     // disturbance radius
  double eps_meas = 0;  // measurement radius
  std::uint64_t seed = 0;
  NoiseSampling sampling = NoiseSampling::Uniform;
};

/* One row per visited state; u and w are NaN on the final row. */
struct Step {
  std::size_t t = 0;
  std::vector<double> x, xhat, u, w;
  StateId cell = 0;
};

struct Trajectory {
  std::vector<Step> steps;
  RunStatus status = RunStatus::Running;
};

/*
 * x(t+1) = f(x(t), kappa(xhat(t))) + w(t), xhat = x + e, with w and e drawn
 * from the delta- and eps-boxes (e first, then w, per step). Periodic
 * dimensions are wrapped after each step. Stops early when x leaves X or the
 * controller is undefined at xhat (LeftWinning if also undefined at x).
 */
Trajectory simulate(const SystemModel& model, const ConcreteController& controller, std::span<const double> x0,
                    const SimOptions& options);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/*
 * Verdict of a finite run against a supported fragment, read on unstrengthened
 * labels. Leaving X, a safe or within violation gives Violated; a goal visit
 * otherwise gives Sat; recurrence and safety runs without violation fall back
 * to the monitor of f & G in.
 */
Verdict verify_run(const Trajectory& traj, const PropositionAtlas& atlas, const Ltl& formula);

/* Point sample of a union of boxes (box chosen by volume, degenerate boxes by count). */
std::vector<double> sample_region(std::span<const Box> region, std::uint64_t seed);

struct BatchResult {
  std::vector<Trajectory> runs;
  std::vector<Verdict> verdicts;
  std::size_t sat = 0, violated = 0, unknown = 0;
  std::string summary() const;
};

/* Run i uses seed + i and starts at sample_region(initial, seed + i). */
BatchResult simulate_batch(const SystemModel& model, const ConcreteController& controller,
                           const PropositionAtlas& atlas, const Ltl& formula, std::span<const Box> initial,
                           std::size_t runs, const SimOptions& options, unsigned workers = 0);

}  // namespace symctl

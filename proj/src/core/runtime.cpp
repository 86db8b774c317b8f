#include "runtime.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "error.hpp"

namespace symctl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double noise(std::mt19937_64& rng, double r, NoiseSampling s) {
  const double v = unit(rng);
  if (s == NoiseSampling::Corners) return v < 0.5 ? -r : r;
  return -r + 2 * r * v;
}

std::vector<double> nans(std::size_t n) { return std::vector<double>(n, kNaN); }

void put(std::ostream& os, double v) {
  if (std::isnan(v)) return;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

ConcreteController::ConcreteController(Quantizer quantizer, Strategy strategy)
    : quantizer_(std::move(quantizer)), strategy_(std::move(strategy)) {
  if (strategy_.action.size() != quantizer_.num_states())
    throw Error(ErrorKind::Dimension, "strategy size " + std::to_string(strategy_.action.size()) +
                                          " does not match the quantizer's " +
                                          std::to_string(quantizer_.num_states()) + " states");
}

bool ConcreteController::defined_at(std::span<const double> x) const {
  const StateId q = cell_of(x);
  return q != quantizer_.sink() && strategy_.defined(q);
}

std::optional<std::vector<double>> ConcreteController::input_at(std::span<const double> x) const {
  const StateId q = cell_of(x);
  if (q == quantizer_.sink() || !strategy_.defined(q)) return std::nullopt;
  return quantizer_.decode(static_cast<ActionId>(strategy_.action[q]));
}

std::vector<double> ConcreteController::operator()(std::span<const double> x) const {
  auto u = input_at(x);
  if (!u) throw Error(ErrorKind::UndefinedController, "controller undefined at " + to_string(Box::point(x)));
  return *u;
}

ConcreteController refine(const Strategy& strategy, const Quantizer& quantizer) {
  return ConcreteController(quantizer, strategy);
}

const char* to_string(RunStatus s) noexcept {
  switch (s) {
    case RunStatus::Running: return "running";
    case RunStatus::Completed: return "completed";
    case RunStatus::LeftDomain: return "left_domain";
    case RunStatus::LeftWinning: return "left_winning";
    case RunStatus::UndefinedController: return "undefined_controller";
  }
  return "?";
}

Trajectory simulate(const SystemModel& model, const ConcreteController& controller, std::span<const double> x0,
                    const SimOptions& options) {
  const std::size_t n = model.state_dim(), m = model.input_dim();
  if (x0.size() != n) throw Error(ErrorKind::Dimension, "initial state has the wrong dimension");
  if (!(options.delta >= 0) || !(options.eps_meas >= 0))
    throw Error(ErrorKind::InvalidArgument, "noise radii must be non-negative");
  const Quantizer& qz = controller.quantizer();
  std::mt19937_64 rng(options.seed);
  Trajectory tr;
  std::vector<double> x = qz.wrap(x0);
  for (std::size_t t = 0;; ++t) {
    Step s;
    s.t = t;
    s.x = x;
    s.cell = qz.quantize_state(x);
    s.xhat = nans(n);
    s.u = nans(m);
    s.w = nans(n);
    RunStatus stop = RunStatus::Running;
    if (s.cell == qz.sink())
      stop = RunStatus::LeftDomain;
    else if (t == options.horizon)
      stop = RunStatus::Completed;
    if (stop != RunStatus::Running) {
      tr.steps.push_back(std::move(s));
      tr.status = stop;
      return tr;
    }
    for (std::size_t i = 0; i < n; ++i) s.xhat[i] = x[i] + noise(rng, options.eps_meas, options.sampling);
    auto u = controller.input_at(s.xhat);
    if (!u) {
      tr.status = controller.strategy().defined(s.cell) ? RunStatus::UndefinedController : RunStatus::LeftWinning;
      tr.steps.push_back(std::move(s));
      return tr;
    }
    s.u = std::move(*u);
    for (std::size_t i = 0; i < n; ++i) s.w[i] = noise(rng, options.delta, options.sampling);
    auto y = model.eval(x, s.u);
    for (std::size_t i = 0; i < n; ++i) y[i] += s.w[i];
    x = qz.wrap(y);
    tr.steps.push_back(std::move(s));
  }
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  if (traj.steps.empty()) return;
  const auto& f = traj.steps.front();
  os << "t";
  for (std::size_t i = 1; i <= f.x.size(); ++i) os << ",x" << i;
  for (std::size_t i = 1; i <= f.xhat.size(); ++i) os << ",xhat" << i;
  for (std::size_t i = 1; i <= f.u.size(); ++i) os << ",u" << i;
  for (std::size_t i = 1; i <= f.w.size(); ++i) os << ",w" << i;
  os << ",status\n";
  for (std::size_t k = 0; k < traj.steps.size(); ++k) {
    const auto& s = traj.steps[k];
    os << s.t;
    for (const auto* v : {&s.x, &s.xhat, &s.u, &s.w})
      for (double d : *v) {
        os << ',';
        put(os, d);
      }
    os << ',' << to_string(k + 1 == traj.steps.size() ? traj.status : RunStatus::Running) << '\n';
  }
}

Verdict verify_run(const Trajectory& traj, const PropositionAtlas& atlas, const Ltl& formula) {
  const Ltl pnf = to_pnf(formula, complement_name);
  const Fragment fr = classify(pnf);
  if (fr.kind == FragmentKind::Unsupported) throw Error(ErrorKind::Unsupported, fr.reason);
  if (traj.steps.empty()) return Verdict::Unknown;

  // complement atoms are read as the negation of the base region
  std::vector<std::string> props = atlas.names();
  for (auto& p : props)
    if (p.size() > 1 && p[0] == '!' && atlas.find(p.substr(1))) p = "\x01" + p;
  const std::size_t in_bit = *atlas.find("in");

  auto holds = [&](const Ltl& p, LabelMask m) {
    if (!p) return true;
    return monitor(p, std::span<const LabelMask>(&m, 1), props) == Verdict::Sat;
  };

  std::vector<LabelMask> trace;
  trace.reserve(traj.steps.size());
  for (const auto& s : traj.steps) trace.push_back(atlas.labels_at(s.x));

  if (!holds(fr.initial, trace.front())) return Verdict::Violated;
  const bool reaching = fr.kind == FragmentKind::Reach || fr.kind == FragmentKind::ReachAvoid;
  bool goal_hit = false;
  for (LabelMask m : trace) {
    if (!((m >> in_bit) & 1U)) return Verdict::Violated;
    if (!holds(fr.safe, m)) return Verdict::Violated;
    if (reaching && !goal_hit) {
      if (holds(fr.goal, m))
        goal_hit = true;
      else if (!holds(fr.within, m))
        return Verdict::Violated;
    }
  }
  if (reaching) return goal_hit ? Verdict::Sat : Verdict::Unknown;
  return monitor(ltl::conj(pnf, ltl::always(ltl::atom("in"))), trace, props);
}

std::vector<double> sample_region(std::span<const Box> region, std::uint64_t seed) {
  if (region.empty()) throw Error(ErrorKind::EmptyInput, "empty initial region");
  std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<double> vol(region.size());
  for (std::size_t k = 0; k < region.size(); ++k) {
    double v = 1;
    for (const auto& iv : region[k].intervals()) v *= iv.hi() - iv.lo();
    vol[k] = v;
  }
  double total = 0;
  for (double v : vol) total += v;
  if (!(total > 0)) std::fill(vol.begin(), vol.end(), 1.0), total = static_cast<double>(vol.size());
  double pick = unit(rng) * total;
  std::size_t k = 0;
  while (k + 1 < vol.size() && pick >= vol[k]) pick -= vol[k++];
  const Box& b = region[k];
  std::vector<double> x(b.dims());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::min(b[i].lo() + unit(rng) * (b[i].hi() - b[i].lo()), b[i].hi());
  return x;
}

std::string BatchResult::summary() const {
  std::size_t counts[5] = {};
  for (const auto& r : runs) ++counts[static_cast<int>(r.status)];
  std::ostringstream os;
  os << "runs = " << runs.size() << "\n"
     << "sat = " << sat << "\n"
     << "violated = " << violated << "\n"
     << "unknown = " << unknown << "\n";
  for (int s = 1; s < 5; ++s) os << "status_" << to_string(static_cast<RunStatus>(s)) << " = " << counts[s] << "\n";
  return os.str();
}

BatchResult simulate_batch(const SystemModel& model, const ConcreteController& controller,
                           const PropositionAtlas& atlas, const Ltl& formula, std::span<const Box> initial,
                           std::size_t runs, const SimOptions& options, unsigned workers) {
  BatchResult res;
  res.runs.resize(runs);
  res.verdicts.resize(runs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    try {
      for (std::size_t i; (i = next.fetch_add(1)) < runs;) {
        SimOptions o = options;
        o.seed = options.seed + i;
        const auto x0 = sample_region(initial, o.seed);
        res.runs[i] = simulate(model, controller, x0, o);
        res.verdicts[i] = verify_run(res.runs[i], atlas, formula);
      }
    } catch (...) {
      std::lock_guard lk(failure_mu);
      if (!failure) failure = std::current_exception();
      next = runs;
    }
  };
  unsigned w = workers ? workers : std::max(1U, std::thread::hardware_concurrency());
  w = static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(runs, 1)));
  if (w <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < w; ++k) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  for (Verdict v : res.verdicts) {
    if (v == Verdict::Sat) ++res.sat;
    else if (v == Verdict::Violated) ++res.violated;
    else ++res.unknown;
  }
  return res;
}

}  // namespace symctl

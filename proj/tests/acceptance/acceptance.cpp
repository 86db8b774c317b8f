// One PASS/FAIL line per primary acceptance criterion. Exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../common/game_oracle.hpp"
#include "../common/random_systems.hpp"
#include "pipeline.hpp"
#include "reach.hpp"
#include "tsys.hpp"

using namespace symctl;

namespace {

const std::string kData = SYMCTL_DATA_DIR;

// pinned tolerances and budgets
constexpr double kReferenceStates = 12880, kReferenceTransitions = 3023040;
constexpr double kStateFactor = 1.25, kTransitionFactor = 2.0;
constexpr double kNominalBudgetSeconds = 120.0;
constexpr std::size_t kNominalRuns = 100;
constexpr std::size_t kRobustRuns = 100;
constexpr double kRobustDelta = 0.05, kStressDelta = 0.15;
constexpr std::size_t kReachPoints = 10000;
constexpr double kReachSlack = 1e-9;  // absolute slack on the linear distance check
constexpr std::size_t kSandwichSystems = 10, kSandwichSamples = 10000;
constexpr std::size_t kRelationInstances = 100;
constexpr std::size_t kGameInstances = 200;
constexpr std::size_t kNoisyRuns = 1000;
constexpr unsigned kManyWorkers = 4;

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

template <class F>
void guarded(const std::string& name, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(false, name, std::string("exception: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

void nominal_bicycle() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = open_project(load_config(kData + "/bicycle_nominal.yaml"));
  const auto abs = abstract_project(p);
  const auto syn = synthesize_project(p, abs);
  SimulationConfig sim = p.config.sim;
  sim.runs = kNominalRuns;
  sim.delta = 0;
  sim.eps_meas = 0;
  const auto batch = syn.realizable ? simulate_project(p, abs.quantizer, syn.strategy, sim) : BatchResult{};
  const double total = seconds_since(t0);
  const double ns = abs.ts.num_states(), nt = abs.ts.num_transitions();
  const bool states_ok = ns >= kReferenceStates / kStateFactor && ns <= kReferenceStates * kStateFactor;
  const bool trans_ok = nt >= kReferenceTransitions / kTransitionFactor && nt <= kReferenceTransitions * kTransitionFactor;
  const bool ok = states_ok && trans_ok && syn.realizable && batch.sat == kNominalRuns && total <= kNominalBudgetSeconds;
  report(ok, "nominal bicycle reproduction",
         fmt("states=%.0f in [%.0f, %.0f], transitions=%.0f in [%.0f, %.0f], %s, SAT %zu/%zu, total %.1fs <= %.0fs",
             ns, kReferenceStates / kStateFactor, kReferenceStates * kStateFactor, nt, kReferenceTransitions / kTransitionFactor,
             kReferenceTransitions * kTransitionFactor, syn.realizable ? "REALIZABLE" : "UNREALIZABLE-FOR-T", batch.sat,
             kNominalRuns, total));
}

void robust_bicycle() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = open_project(load_config(kData + "/bicycle_robust.yaml"));
  SynthesisResult syn;
  std::size_t states = 0, transitions = 0;
  std::optional<Quantizer> qz;
  {
    const auto abs = abstract_project(p);
    states = abs.ts.num_states();
    transitions = abs.ts.num_transitions();
    syn = synthesize_project(p, abs);
    qz = abs.quantizer;
  }
  if (!syn.realizable) {
    report(false, "robust bicycle variant",
           fmt("delta1=%.2f eta=%.2f: UNREALIZABLE-FOR-T (%zu states)", p.params.delta1, p.params.eta[0], states));
    return;
  }
  SimulationConfig sim = p.config.sim;
  sim.runs = kRobustRuns;
  sim.delta = kRobustDelta;
  const auto nominal = simulate_project(p, *qz, syn.strategy, sim);
  sim.delta = kStressDelta;
  const auto stress = simulate_project(p, *qz, syn.strategy, sim);
  const bool ok = nominal.sat == kRobustRuns && stress.violated >= 1;
  report(ok, "robust bicycle variant",
         fmt("delta1=%.2f eta=%.2f: %zu states, %zu transitions, REALIZABLE; |w|<=%.2f SAT %zu/%zu; "
             "|w|<=%.2f VIOLATED %zu/%zu (need >=1); %.1fs",
             p.params.delta1, p.params.eta[0], states, transitions, kRobustDelta, nominal.sat, kRobustRuns,
             kStressDelta, stress.violated, kRobustRuns, seconds_since(t0)));
}

// ---------------------------------------------------------------------------
// over-approximation suite

struct Point2 {
  double x, y;
};

double cross(Point2 o, Point2 a, Point2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  std::vector<Point2> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

bool in_convex(const std::vector<Point2>& hull, Point2 p, double slack) {
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point2 a = hull[i], b = hull[(i + 1) % hull.size()];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (cross(a, b, p) < -slack * len) return false;
  }
  return true;
}

struct ReachFixture {
  std::string name;
  SystemModel model;
  Box cell;
  std::vector<double> u;
  double delta, eps;
  // linear part for the exact image, empty for nonlinear fixtures
  std::vector<std::vector<double>> A;
  std::vector<double> c;  // A x + c with u already folded in
};

SystemModel model_text(const std::string& text) { return SystemModel::from_string(text); }

std::vector<ReachFixture> reach_fixtures() {
  std::vector<ReachFixture> fx;
  auto lin1 = [&](double a, double b, double off, Box cell, double u, double delta, double eps) {
    const auto m = model_text(fmt("states 1\ninputs 1\nX [-10, 10]\nU [-1, 1]\nf1 = (%.17g)*x1 + (%.17g)*u1 + (%.17g)\n", a, b, off));
    fx.push_back({fmt("linear1d a=%g", a), m, cell, {u}, delta, eps, {{a}}, {b * u + off}});
  };
  lin1(2.0, 1.0, 0.0, Box{{0, 1}}, 0.0, 0.1, 0.05);
  lin1(-0.5, 1.0, 0.3, Box{{-1, 0.5}}, 0.5, 0.0, 0.1);
  lin1(1.3, -2.0, 0.0, Box{{2, 2.2}}, -0.4, 0.02, 0.01);
  lin1(0.9, 1.0, -1.0, Box{{-3, -2}}, 1.0, 0.2, 0.2);
  lin1(-3.0, 0.5, 0.0, Box{{0.1, 0.4}}, 0.3, 0.05, 0.03);

  auto lin2 = [&](std::vector<std::vector<double>> A, std::vector<double> b, Box cell, double u, double delta,
                  double eps) {
    const auto m = model_text(fmt("states 2\ninputs 1\nX [-10, 10] [-10, 10]\nU [-1, 1]\n"
                                  "f1 = (%.17g)*x1 + (%.17g)*x2 + (%.17g)*u1\nf2 = (%.17g)*x1 + (%.17g)*x2 + (%.17g)*u1\n",
                                  A[0][0], A[0][1], b[0], A[1][0], A[1][1], b[1]));
    fx.push_back({fmt("linear2d [%g %g; %g %g]", A[0][0], A[0][1], A[1][0], A[1][1]), m, cell, {u}, delta, eps, A,
                  {b[0] * u, b[1] * u}});
  };
  const double cs = std::cos(0.7), sn = std::sin(0.7);
  lin2({{cs, -sn}, {sn, cs}}, {1, 0}, Box{{0, 1}, {0, 1}}, 0.2, 0.0, 0.1);
  lin2({{1, 0.3}, {0, 1}}, {0, 0.3}, Box{{-1, -0.5}, {0.5, 1}}, -1.0, 0.05, 0.05);
  lin2({{0.9, 0.4}, {-0.4, 0.9}}, {0.1, 0.1}, Box{{2, 2.5}, {-1, -0.8}}, 0.5, 0.1, 0.08);
  lin2({{2, 1}, {1, 2}}, {1, -1}, Box{{0, 0.2}, {0, 0.2}}, 0.7, 0.01, 0.02);
  lin2({{-1, 0.5}, {0.25, -0.75}}, {0, 1}, Box{{1, 1.5}, {1, 1.1}}, -0.3, 0.0, 0.04);

  auto nonlin = [&](const std::string& name, const std::string& text, Box cell, std::vector<double> u, double delta,
                    double eps) { fx.push_back({name, model_text(text), cell, std::move(u), delta, eps, {}, {}}); };
  const auto bike = SystemModel::from_file(kData + "/bicycle.model");
  const double pi = std::acos(-1.0);
  fx.push_back({"bicycle cell A", bike, Box{{7.6, 7.8}, {0.4, 0.6}, {1.4, 1.6}}, {0.9, 0.3}, 0.0, 1.0, {}, {}});
  fx.push_back({"bicycle cell B", bike, Box{{8.8, 9.0}, {2.0, 2.2}, {-0.2, 0.0}}, {-0.6, -0.9}, 0.05, 0.5, {}, {}});
  fx.push_back({"bicycle cell C", bike, Box{{9.2, 9.3}, {0.1, 0.2}, {pi - 0.1, pi}}, {0.3, 0.6}, 0.05, 0.25, {}, {}});
  nonlin("pendulum", "states 2\ninputs 1\nX [-4, 4] [-4, 4]\nU [-1, 1]\nf1 = x1 + 0.1*x2\nf2 = x2 - 0.1*sin(x1) + 0.1*u1\n",
         Box{{0.5, 0.7}, {-0.3, 0.0}}, {0.4}, 0.01, 0.02);
  nonlin("van der pol", "states 2\ninputs 1\nX [-4, 4] [-4, 4]\nU [-1, 1]\nf1 = x1 + 0.1*x2\nf2 = x2 + 0.1*((1 - x1^2)*x2 - x1 + u1)\n",
         Box{{1.0, 1.2}, {0.5, 0.6}}, {-1.0}, 0.0, 0.05);
  nonlin("logistic", "states 1\ninputs 1\nX [-2, 2]\nU [-1, 1]\nf1 = 3.5*x1*(1 - x1) + 0.1*u1\n", Box{{0.3, 0.6}}, {0.2},
         0.02, 0.05);
  nonlin("cubic", "states 1\ninputs 1\nX [-2, 2]\nU [-1, 1]\nf1 = x1 - 0.3*x1^3 + u1\n", Box{{-1.5, -1.0}}, {0.5}, 0.0, 0.02);
  nonlin("exp atan", "states 2\ninputs 2\nX [-3, 3] [-3, 3]\nU [-1, 1] [-1, 1]\nf1 = atan(x2) + u1\nf2 = 0.5*exp(-x1^2) + x2*u2\n",
         Box{{-0.5, 0.5}, {1.0, 1.5}}, {0.1, -0.7}, 0.03, 0.05);
  nonlin("sqrt abs", "states 1\ninputs 1\nX [0, 4]\nU [0, 1]\nf1 = sqrt(x1 + 1) + abs(u1 - 0.5)\n", Box{{1, 3}}, {0.9}, 0.0,
         0.01);
  nonlin("tan", "states 1\ninputs 1\nX [-1, 1]\nU [-1, 1]\nf1 = tan(x1) * cos(u1)\n", Box{{-0.6, 0.6}}, {0.3}, 0.01, 0.05);
  return fx;
}

bool in_paving(const Paving& p, std::span<const double> y) {
  for (const auto& b : p.boxes)
    if (contains(b, y)) return true;
  return false;
}

// every paving box lies within eps of the exact image {A x + c + w}
bool within_eps_of_exact(const ReachFixture& f, const Paving& p) {
  const double r = f.delta + f.eps + kReachSlack;
  if (f.A.size() == 1) {
    const double a = f.A[0][0];
    const double lo = std::min(a * f.cell[0].lo(), a * f.cell[0].hi()) + f.c[0];
    const double hi = std::max(a * f.cell[0].lo(), a * f.cell[0].hi()) + f.c[0];
    for (const auto& b : p.boxes)
      if (b[0].lo() < lo - r || b[0].hi() > hi + r) return false;
    return true;
  }
  std::vector<Point2> pts;
  for (double x : {f.cell[0].lo(), f.cell[0].hi()})
    for (double y : {f.cell[1].lo(), f.cell[1].hi()})
      for (double dx : {-r, r})
        for (double dy : {-r, r})
          pts.push_back({f.A[0][0] * x + f.A[0][1] * y + f.c[0] + dx, f.A[1][0] * x + f.A[1][1] * y + f.c[1] + dy});
  const auto hull = convex_hull(pts);
  for (const auto& b : p.boxes)
    for (double x : {b[0].lo(), b[0].hi()})
      for (double y : {b[1].lo(), b[1].hi()})
        if (!in_convex(hull, {x, y}, kReachSlack)) return false;
  return true;
}

void reach_suite() {
  const auto fixtures = reach_fixtures();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U01(0, 1);
  std::size_t covered = 0, tight = 0, linear = 0;
  std::string worst;
  for (const auto& f : fixtures) {
    const double L = std::max(lipschitz_blocks(f.model, 0, 0, 64).state_block, 1e-9);
    const auto p = over_reach(f.model, f.cell, f.u, f.delta, f.eps, L);
    bool all_in = true;
    const std::size_t n = f.model.state_dim();
    std::vector<double> x(n);
    for (std::size_t k = 0; k < kReachPoints && all_in; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        const double t = k < 64 ? static_cast<double>((k >> i) & 1U) : U01(rng);
        x[i] = f.cell[i].lo() + t * (f.cell[i].hi() - f.cell[i].lo());
      }
      auto y = f.model.eval(x, f.u);
      for (std::size_t i = 0; i < n; ++i) y[i] += f.delta * (k % 7 == 0 ? ((k >> i) & 1U ? 1 : -1) : 2 * U01(rng) - 1);
      if (!in_paving(p, y)) {
        all_in = false;
        worst = f.name + " misses a sampled image point";
      }
    }
    covered += all_in;
    if (!f.A.empty()) {
      ++linear;
      if (within_eps_of_exact(f, p))
        ++tight;
      else
        worst = f.name + " paving exceeds the exact image by more than eps";
    }
  }
  const bool ok = covered == fixtures.size() && tight == linear && fixtures.size() == 20;
  report(ok, "reach over-approximation suite",
         fmt("%zu/%zu fixtures contain all %zu sampled images; %zu/%zu linear pavings within eps of the exact image%s%s",
             covered, fixtures.size(), kReachPoints, tight, linear, worst.empty() ? "" : "; ", worst.c_str()));
}

// ---------------------------------------------------------------------------

std::string random_poly(std::mt19937_64& rng, const std::vector<std::string>& vars, double scale) {
  std::uniform_real_distribution<double> c(-scale, scale);
  std::string s = fmt("(%.4f)", c(rng));
  for (std::size_t i = 0; i < vars.size(); ++i) {
    s += fmt(" + (%.4f)*%s", c(rng), vars[i].c_str());
    for (std::size_t j = i; j < vars.size(); ++j) s += fmt(" + (%.4f)*%s*%s", 0.5 * c(rng), vars[i].c_str(), vars[j].c_str());
  }
  return s;
}

void sandwich_suite() {
  std::mt19937_64 rng(77);
  std::size_t passed = 0, validated = 0;
  std::string witness;
  for (std::size_t k = 0; k < kSandwichSystems; ++k) {
    const bool two = k % 2 == 1;
    std::string text;
    if (!two) {
      text = "states 1\ninputs 1\nX [-1, 1]\nU [-0.5, 0.5]\nf1 = 0.6*x1 + u1 + " + random_poly(rng, {"x1"}, 0.2) + "\n";
    } else {
      text = "states 2\ninputs 1\nX [-1, 1] [-1, 1]\nU [-0.5, 0.5]\n"
             "f1 = 0.7*x1 + 0.2*x2 + " + random_poly(rng, {"x1", "x2"}, 0.1) + "\n"
             "f2 = 0.7*x2 + u1 + " + random_poly(rng, {"x1", "x2"}, 0.1) + "\n";
    }
    const auto m = SystemModel::from_string(text);
    PropositionAtlas at(m.X());
    std::uniform_real_distribution<double> pos(-0.8, 0.3);
    std::vector<Interval> ivs;
    for (std::size_t i = 0; i < m.state_dim(); ++i) {
      const double lo = pos(rng);
      ivs.emplace_back(lo, lo + 0.5);
    }
    at.add("region", {Box(ivs)});
    AbstractionParams p;
    p.eta = {two ? 0.1 : 0.05};
    p.mu = {0.1};
    p.eps = 0.05;
    p.L = lipschitz_blocks(m, 0, 0).combined();
    p.delta1 = 0.01;
    p.delta2 = p.delta1 + p.L * (p.eta[0] + p.mu[0]) + p.eta[0] + p.eps + 0.01;
    p.eps1 = 0;
    p.eps2 = 2 * p.eta[0] + 0.02;
    const bool valid = validate_params(p).ok;
    validated += valid;
    if (!valid) continue;
    const auto abs = build_abstraction(m, at, p);
    const auto rep = sandwich_spot_check(m, at, abs, kSandwichSamples, 100 + k);
    passed += rep.pass() && rep.samples >= kSandwichSamples;
    if (!rep.pass() && witness.empty()) witness = rep.witness;
  }
  report(passed == kSandwichSystems, "sandwich suite",
         fmt("%zu/%zu random polynomial systems (1-D and 2-D) validated; %zu/%zu pass both directions with %zu samples%s%s",
             validated, kSandwichSystems, passed, kSandwichSystems, kSandwichSamples, witness.empty() ? "" : "; ",
             witness.c_str()));
}

// ---------------------------------------------------------------------------

void relation_suite() {
  const std::string dir = kData + "/example1/";
  const auto t1 = load_transition_system(dir + "t1.ts");
  const auto t2 = load_transition_system(dir + "t2.ts");
  const auto t3 = load_transition_system(dir + "t3.ts");
  const auto a12 = load_relation(dir + "alpha.rel", t1, t2);
  const auto a13 = load_relation(dir + "alpha.rel", t1, t3);
  const bool alt12 = check_alternating_sim(t1, t2, a12).pass;
  const bool abs12 = check_abstraction(t1, t2, a12).pass;
  const bool abs13 = check_abstraction(t1, t3, a13).pass;
  const bool example = alt12 && !abs12 && abs13;

  std::mt19937_64 rng(31);
  std::size_t reflexive = 0, transitive = 0;
  for (std::size_t i = 0; i < kRelationInstances; ++i) {
    const auto t = testgen::random_ts(rng, 2 + rng() % 6, 1 + rng() % 3, 2);
    const auto delta = testgen::random_overlay(rng, t, 6);
    reflexive += check_abstraction(t, apply_overlay(t, delta), Relation::identity(t.num_states())).pass;
  }
  for (std::size_t i = 0; i < kRelationInstances; ++i) {
    const std::size_t n1 = 3 + rng() % 5, n2 = 2 + rng() % 4, n3 = 1 + rng() % 3;
    const auto s1 = testgen::random_ts(rng, n1, 2, 2, 1.0, 0.3, true);
    const auto r1 = testgen::random_total_relation(rng, n1, n2, true);
    const auto s2 = testgen::abstract_of(rng, s1, r1, 3);
    TransitionSystemBuilder full(n2, 3, s2.propositions());
    for (const auto& tr : s2.triples()) full.add(tr.q, tr.a, tr.q2);
    for (StateId q = 0; q < n2; ++q) {
      full.set_labels(q, s2.labels(q));
      for (ActionId a = 0; a < 3; ++a)
        if (!s2.is_admissible(q, a))
          for (StateId s : s2.post(q, 0)) full.add(q, a, s);
    }
    const auto s2f = full.finalize();
    const auto r2 = testgen::random_total_relation(rng, n2, n3, true);
    const auto s3 = testgen::abstract_of(rng, s2f, r2, 2);
    const bool premises = check_abstraction(s1, s2f, r1).pass && check_abstraction(s2f, s3, r2).pass;
    transitive += premises && check_abstraction(s1, s3, compose(r1, r2)).pass;
  }
  const bool ok = example && reflexive == kRelationInstances && transitive == kRelationInstances;
  report(ok, "relation checker suite",
         fmt("example: alternating T1/T2 %s, abstraction T1/T2 %s, abstraction T1/T3 %s; reflexivity %zu/%zu; "
             "composition %zu/%zu",
             alt12 ? "PASS" : "FAIL", abs12 ? "PASS" : "FAIL", abs13 ? "PASS" : "FAIL", reflexive, kRelationInstances,
             transitive, kRelationInstances));
}

// ---------------------------------------------------------------------------

void synthesis_oracle() {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> U(0, 1);
  auto random_set = [&](std::size_t n, double p) {
    StateSet s(n);
    for (auto& v : s) v = U(rng) < p;
    return s;
  };
  std::size_t agree = 0, nontrivial = 0;
  for (std::size_t i = 0; i < kGameInstances; ++i) {
    const std::size_t n = 1 + rng() % 8, na = 1 + rng() % 3;
    const auto ts = testgen::random_ts(rng, n, na, 0, 0.7, 0.3);
    const auto goal = random_set(n, 0.25), within = random_set(n, 0.8), safe = random_set(n, 0.8);
    const StateSet none(n, 0);
    const auto sf = solve_safety(ts, safe).winning;
    const auto rc = solve_reach(ts, goal, within).winning;
    const auto rr = solve_recurrence(ts, goal, within).winning;
    const bool same = sf == oracle::winning(ts, oracle::Goal::Safety, none, safe) &&
                      rc == oracle::winning(ts, oracle::Goal::Reach, goal, within) &&
                      rr == oracle::winning(ts, oracle::Goal::Recurrence, goal, within);
    agree += same;
    nontrivial += std::count(rc.begin(), rc.end(), 1) > 0 && std::count(rc.begin(), rc.end(), 0) > 0;
  }
  report(agree == kGameInstances, "synthesis oracle equivalence",
         fmt("%zu/%zu random games (|Q|<=8, |A|<=3) match exhaustive evaluation for safety, reach and recurrence "
             "(%zu with mixed reach outcome)",
             agree, kGameInstances, nontrivial));
}

// ---------------------------------------------------------------------------

void measurement_robustness() {
  const auto p = open_project(load_config(kData + "/line_measured.yaml"));
  const auto abs = abstract_project(p);
  const auto syn = synthesize_project(p, abs);
  SimulationConfig sim = p.config.sim;
  sim.runs = kNoisyRuns;
  const double L = abs.params.L, e = sim.eps_meas;
  const double margin = (abs.params.eps1 + abs.params.eps2) / 2;
  const bool condition = (L + 1) * e <= abs.params.delta1 && e <= margin && e > 0;
  const auto uniform = syn.realizable ? simulate_project(p, abs.quantizer, syn.strategy, sim) : BatchResult{};
  sim.sampling = NoiseSampling::Corners;
  sim.seed += kNoisyRuns;
  const auto corners = syn.realizable ? simulate_project(p, abs.quantizer, syn.strategy, sim) : BatchResult{};
  const bool ok = condition && syn.realizable && uniform.runs.size() == kNoisyRuns && uniform.violated == 0 &&
                  corners.violated == 0;
  report(ok, "measurement-error robustness",
         fmt("L=%g eps_meas=%g delta1=%g: (L+1)eps=%g <= delta1 %s, label margin %g; VIOLATED %zu/%zu uniform, "
             "%zu/%zu corner noise",
             L, e, abs.params.delta1, (L + 1) * e, condition ? "holds" : "fails", margin, uniform.violated,
             uniform.runs.size(), corners.violated, corners.runs.size()));
}

// ---------------------------------------------------------------------------

std::string dump(const TransitionSystem& ts) {
  std::ostringstream os;
  write_binary(os, ts);
  return os.str();
}

std::string csvs(const BatchResult& b) {
  std::ostringstream os;
  for (const auto& r : b.runs) write_trajectory_csv(os, r);
  return os.str();
}

void determinism() {
  const auto p = open_project(load_config(kData + "/bicycle_nominal.yaml"));
  const auto one = abstract_project(p, {.workers = 1});
  const auto many = abstract_project(p, {.workers = kManyWorkers});
  const bool same_abs = dump(one.ts) == dump(many.ts);
  const auto syn = synthesize_project(p, one);
  SimulationConfig sim = p.config.sim;
  sim.runs = 20;
  sim.delta = 0.05;
  sim.eps_meas = 0.02;
  sim.seed = 99;
  const auto a = simulate_project(p, one.quantizer, syn.strategy, sim, 1);
  const auto b = simulate_project(p, one.quantizer, syn.strategy, sim, kManyWorkers);
  sim.seed = 100;
  const auto c = simulate_project(p, one.quantizer, syn.strategy, sim, 1);
  const bool same_sim = csvs(a) == csvs(b) && a.summary() == b.summary();
  const bool seeds_matter = csvs(a) != csvs(c);
  report(same_abs && same_sim && seeds_matter, "determinism",
         fmt("abstraction bytes at 1 vs %u workers %s (%zu bytes); seeded simulations %s; different seeds %s",
             kManyWorkers, same_abs ? "identical" : "DIFFER", dump(one.ts).size(),
             same_sim ? "reproduce bit for bit" : "DIFFER", seeds_matter ? "differ" : "coincide"));
}

}  // namespace

int main() {
  guarded("nominal bicycle reproduction", nominal_bicycle);
  guarded("robust bicycle variant", robust_bicycle);
  guarded("reach over-approximation suite", reach_suite);
  guarded("sandwich suite", sandwich_suite);
  guarded("relation checker suite", relation_suite);
  guarded("synthesis oracle equivalence", synthesis_oracle);
  guarded("measurement-error robustness", measurement_robustness);
  guarded("determinism", determinism);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

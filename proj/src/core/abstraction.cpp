#include "abstraction.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace symctl {

namespace {

double vmax(std::span<const double> v) {
  double m = 0;
  for (double x : v) m = std::max(m, x);
  return m;
}

std::vector<double> broadcast(std::vector<double> v, std::size_t n, const char* what) {
  if (v.size() == 1) v.assign(n, v[0]);
  if (v.size() != n)
    throw Error(ErrorKind::Parameter, std::string(what) + " needs 1 or " + std::to_string(n) + " entries");
  for (double x : v)
    if (!(x > 0) || !std::isfinite(x)) throw Error(ErrorKind::Parameter, std::string(what) + " must be positive");
  return v;
}

// largest k with k*p <= v, in the rounding of the products themselves
std::int64_t floor_lattice(double v, double p) {
  if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite coordinate");
  const double r = std::floor(v / p);
  if (std::fabs(r) > 4e18) throw Error(ErrorKind::Parameter, "lattice coordinate out of range");
  auto k = static_cast<std::int64_t>(r);
  while (static_cast<double>(k) * p > v) --k;
  while (static_cast<double>(k + 1) * p <= v) ++k;
  return k;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

template <typename T>
std::string join(std::span<const T> v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------

ParamReport validate_params(const AbstractionParams& p) {
  ParamReport r;
  const double eta = vmax(p.eta), mu = vmax(p.mu), L = p.L;
  const double all[] = {p.delta1, p.delta2, p.eps1, p.eps2, eta, mu, p.eps, L};
  for (double v : all)
    if (!std::isfinite(v)) {
      r.message = "parameters must be finite";
      return r;
    }
  r.gaps_ok = p.delta1 >= 0 && p.delta1 < p.delta2 && p.eps1 >= 0 && p.eps1 < p.eps2;
  r.growth_slack = p.delta2 - (p.delta1 + L * (eta + mu) + eta + p.eps);
  r.label_slack = p.eps2 - (eta + (p.eps1 + p.eps2) / 2);
  r.max_eta = std::max(0.0, std::min((p.delta2 - p.delta1 - L * mu - p.eps) / (L + 1), (p.eps2 - p.eps1) / 2));
  r.max_mu = L > 0 ? std::max(0.0, (p.delta2 - p.delta1 - (L + 1) * eta - p.eps) / L)
                   : std::numeric_limits<double>::infinity();
  r.ok = r.gaps_ok && r.growth_slack >= 0 && r.label_slack > 0;
  std::ostringstream os;
  if (r.ok) {
    os << "parameters ok";
  } else {
    if (!r.gaps_ok) os << "need 0 <= delta1 < delta2 and 0 <= eps1 < eps2; ";
    if (r.growth_slack < 0)
      os << "delta1 + L(eta+mu) + eta + eps exceeds delta2 by " << -r.growth_slack << "; ";
    if (r.label_slack <= 0) os << "eta + (eps1+eps2)/2 must be below eps2; ";
    os << "maximal feasible eta " << r.max_eta << " (for mu " << mu << "), maximal feasible mu " << r.max_mu
       << " (for eta " << eta << ")";
  }
  r.message = os.str();
  return r;
}

// ---------------------------------------------------------------------------

Quantizer::Quantizer(const Box& X, const Box& U, std::vector<double> eta, std::vector<double> mu,
                     std::vector<bool> periodic)
    : X_(X), U_(U), eta_(broadcast(std::move(eta), X.dims(), "eta")), mu_(broadcast(std::move(mu), U.dims(), "mu")),
      periodic_(std::move(periodic)) {
  if (X_.is_empty() || U_.is_empty()) throw Error(ErrorKind::Parameter, "empty state or input domain");
  if (periodic_.empty()) periodic_.assign(X_.dims(), false);
  if (periodic_.size() != X_.dims()) throw Error(ErrorKind::Dimension, "periodic flags do not match the state dimension");
  const std::size_t n = X_.dims(), m = U_.dims();
  klo_.resize(n);
  khi_.resize(n);
  stride_.resize(n);
  double cells = 1;
  for (std::size_t i = 0; i < n; ++i) {
    klo_[i] = coordinate(i, X_[i].lo());
    khi_[i] = coordinate(i, X_[i].hi());
    cells *= static_cast<double>(khi_[i] - klo_[i] + 1);
  }
  if (cells > 4.0e9) throw Error(ErrorKind::Parameter, "state lattice too large");
  cells_ = 1;
  for (std::size_t i = n; i-- > 0;) {
    stride_[i] = cells_;
    cells_ *= static_cast<std::size_t>(khi_[i] - klo_[i] + 1);
  }
  jlo_.resize(m);
  jhi_.resize(m);
  ustride_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    jhi_[i] = floor_lattice(U_[i].hi(), mu_[i]);
    std::int64_t j = floor_lattice(U_[i].lo(), mu_[i]);
    if (static_cast<double>(j) * mu_[i] < U_[i].lo()) ++j;
    jlo_[i] = j;
    if (jlo_[i] > jhi_[i])
      throw Error(ErrorKind::Parameter, "input pitch mu leaves no lattice point in U along dimension " + std::to_string(i + 1));
  }
  actions_ = 1;
  for (std::size_t i = m; i-- > 0;) {
    ustride_[i] = actions_;
    actions_ *= static_cast<std::size_t>(jhi_[i] - jlo_[i] + 1);
  }
}

std::int64_t Quantizer::coordinate(std::size_t i, double v) const { return floor_lattice(v, eta_[i]); }

std::vector<double> Quantizer::wrap(std::span<const double> x) const {
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!periodic_[i] || !std::isfinite(y[i])) continue;
    const double lo = X_[i].lo(), hi = X_[i].hi(), P = hi - lo;
    if (y[i] >= lo && y[i] <= hi) continue;
    double r = std::fmod(y[i] - lo, P);
    if (r < 0) r += P;
    y[i] = std::min(lo + r, hi);
  }
  return y;
}

StateId Quantizer::index_of(std::span<const std::int64_t> k) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < k.size(); ++i) idx += static_cast<std::size_t>(k[i] - klo_[i]) * stride_[i];
  return static_cast<StateId>(idx);
}

StateId Quantizer::quantize_state(std::span<const double> x) const {
  if (x.size() != state_dim()) throw Error(ErrorKind::Dimension, "state has wrong dimension");
  for (double v : x)
    if (!std::isfinite(v)) return sink();
  const auto y = wrap(x);
  if (!contains(X_, y)) return sink();
  std::vector<std::int64_t> k(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) k[i] = std::clamp(coordinate(i, y[i]), klo_[i], khi_[i]);
  return index_of(k);
}

std::vector<std::int64_t> Quantizer::coordinates(StateId q) const {
  if (q >= cells_) throw Error(ErrorKind::InvalidArgument, "the sink has no lattice coordinates");
  std::vector<std::int64_t> k(state_dim());
  std::size_t r = q;
  for (std::size_t i = 0; i < k.size(); ++i) {
    k[i] = klo_[i] + static_cast<std::int64_t>(r / stride_[i]);
    r %= stride_[i];
  }
  return k;
}

Box Quantizer::cell(StateId q) const {
  const auto k = coordinates(q);
  std::vector<Interval> ivs;
  for (std::size_t i = 0; i < k.size(); ++i)
    ivs.emplace_back(static_cast<double>(k[i]) * eta_[i], static_cast<double>(k[i] + 1) * eta_[i]);
  return Box(std::move(ivs));
}

ActionId Quantizer::quantize_input(std::span<const double> u) const {
  if (u.size() != input_dim()) throw Error(ErrorKind::Dimension, "input has wrong dimension");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const std::int64_t j = std::clamp(floor_lattice(u[i], mu_[i]), jlo_[i], jhi_[i]);
    idx += static_cast<std::size_t>(j - jlo_[i]) * ustride_[i];
  }
  return static_cast<ActionId>(idx);
}

std::vector<double> Quantizer::decode(ActionId a) const {
  if (a >= actions_) throw Error(ErrorKind::InvalidArgument, "action index out of range");
  std::vector<double> u(input_dim());
  std::size_t r = a;
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = static_cast<double>(jlo_[i] + static_cast<std::int64_t>(r / ustride_[i])) * mu_[i];
    r %= ustride_[i];
  }
  return u;
}

void Quantizer::cover(const Box& b, std::vector<StateId>& out, bool& escapes) const {
  const std::size_t n = state_dim();
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> ranges(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = X_[i].lo(), hi = X_[i].hi();
    double blo = b[i].lo(), bhi = b[i].hi();
    if (periodic_[i]) {
      const double P = hi - lo;
      if (bhi - blo >= P) {
        ranges[i].emplace_back(klo_[i], khi_[i]);
        continue;
      }
      double r = std::fmod(blo - lo, P);
      if (r < 0) r += P;
      const double shift = (lo + r) - blo;
      blo = rounding::next_down(blo + shift);
      bhi = rounding::next_up(bhi + shift);
      blo = std::max(blo, lo);
      if (bhi <= hi) {
        ranges[i].emplace_back(coordinate(i, blo), coordinate(i, bhi));
      } else {
        ranges[i].emplace_back(coordinate(i, blo), khi_[i]);
        ranges[i].emplace_back(klo_[i], coordinate(i, std::min(hi, rounding::next_up(bhi - P))));
      }
    } else {
      if (blo < lo || bhi > hi) escapes = true;
      blo = std::max(blo, lo);
      bhi = std::min(bhi, hi);
      if (blo > bhi) return;
      ranges[i].emplace_back(coordinate(i, blo), coordinate(i, bhi));
    }
    for (auto& [a, c] : ranges[i]) {
      a = std::clamp(a, klo_[i], khi_[i]);
      c = std::clamp(c, klo_[i], khi_[i]);
    }
  }
  // odometer over the product of ranges
  std::vector<std::size_t> which(n, 0);
  std::vector<std::int64_t> k(n);
  for (std::size_t i = 0; i < n; ++i) k[i] = ranges[i][0].first;
  while (true) {
    out.push_back(index_of(k));
    std::size_t i = n;
    while (i-- > 0) {
      if (k[i] < ranges[i][which[i]].second) {
        ++k[i];
        break;
      }
      if (which[i] + 1 < ranges[i].size()) {
        ++which[i];
        k[i] = ranges[i][which[i]].first;
        break;
      }
      which[i] = 0;
      k[i] = ranges[i][0].first;
      if (i == 0) return;
    }
  }
}

// ---------------------------------------------------------------------------

PropositionAtlas::PropositionAtlas(Box X) : X_(std::move(X)) {
  names_.push_back("in");
  regions_.push_back({X_});
}

std::size_t PropositionAtlas::add(const std::string& name, std::vector<Box> region) {
  if (name.empty()) throw Error(ErrorKind::InvalidArgument, "proposition name must not be empty");
  if (find(name)) throw Error(ErrorKind::InvalidArgument, "proposition '" + name + "' declared twice");
  if (names_.size() >= kMaxPropositions) throw Error(ErrorKind::InvalidArgument, "at most 64 propositions are supported");
  std::vector<Box> clipped;
  for (const auto& b : region) {
    if (b.dims() != X_.dims()) throw Error(ErrorKind::Dimension, "region of '" + name + "' has wrong dimension");
    Box c = intersect(b, X_);
    if (!c.is_empty()) clipped.push_back(std::move(c));
  }
  names_.push_back(name);
  regions_.push_back(std::move(clipped));
  return names_.size() - 1;
}

std::size_t PropositionAtlas::add_complement(const std::string& name, const std::string& complement_name) {
  if (auto existing = find(complement_name)) return *existing;
  const auto base = find(name);
  if (!base) throw Error(ErrorKind::InvalidArgument, "unknown proposition '" + name + "'");
  std::vector<Box> pieces{X_};
  for (const auto& r : regions_[*base]) {
    std::vector<Box> next;
    for (const auto& p : pieces)
      for (auto& s : subtract(p, r)) next.push_back(std::move(s));
    pieces = std::move(next);
  }
  return add(complement_name, std::move(pieces));
}

std::optional<std::size_t> PropositionAtlas::find(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

LabelMask PropositionAtlas::labels_at(std::span<const double> x) const {
  if (!contains(X_, x)) return 0;
  LabelMask m = 0;
  for (std::size_t i = 0; i < names_.size(); ++i)
    for (const auto& b : regions_[i])
      if (contains(b, x)) {
        m |= LabelMask{1} << i;
        break;
      }
  return m;
}

LabelMask PropositionAtlas::strengthened_label(const Box& box, double margin) const {
  if (!(margin >= 0)) throw Error(ErrorKind::InvalidArgument, "label margin must be nonnegative");
  const Box probe = intersect(inflate(box, margin), X_);
  if (probe.is_empty()) return 0;
  LabelMask m = 0;
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (covered_by_union(probe, regions_[i])) m |= LabelMask{1} << i;
  return m;
}

// ---------------------------------------------------------------------------

namespace {

struct Chunk {
  std::vector<std::uint32_t> counts;  // per (q, a)
  std::vector<StateId> succ;
  std::vector<LabelMask> labels;
  std::size_t leaves = 0;
  std::exception_ptr error;
};

}  // namespace

Abstraction build_abstraction(const SystemModel& model, const PropositionAtlas& atlas, const AbstractionParams& params,
                              const BuildOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  if (atlas.X() != model.X()) throw Error(ErrorKind::InvalidArgument, "atlas domain differs from the model domain");
  if (!(params.eps > 0) || !std::isfinite(params.eps)) throw Error(ErrorKind::Parameter, "reach slack eps must be positive");
  if (!(params.L >= 0) || !std::isfinite(params.L)) throw Error(ErrorKind::Parameter, "Lipschitz bound must be finite and nonnegative");
  if (!(params.delta1 >= 0) || !(params.eps1 >= 0) || !(params.eps2 >= 0))
    throw Error(ErrorKind::Parameter, "radii must be nonnegative");
  ParamReport report = validate_params(params);
  if (!params.sound_only && !report.ok) throw Error(ErrorKind::Parameter, report.message);

  Quantizer qz(model.X(), model.U(), params.eta, params.mu, model.periodic);
  AbstractionParams resolved = params;
  resolved.eta.assign(qz.eta().begin(), qz.eta().end());
  resolved.mu.assign(qz.mu().begin(), qz.mu().end());

  const std::size_t cells = qz.num_cells(), na = qz.num_actions();
  std::vector<std::vector<double>> inputs(na);
  for (ActionId a = 0; a < na; ++a) inputs[a] = qz.decode(a);
  const double margin = (params.eps1 + params.eps2) / 2;
  const ReachOptions ropt{params.inclusion, false};

  const std::size_t chunk_cells = 16;
  const std::size_t nchunks = (cells + chunk_cells - 1) / chunk_cells;
  std::vector<Chunk> chunks(nchunks);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    std::vector<StateId> tmp;
    for (std::size_t c; (c = next.fetch_add(1)) < nchunks;) {
      Chunk& ch = chunks[c];
      const std::size_t q0 = c * chunk_cells, q1 = std::min(cells, q0 + chunk_cells);
      StateId q = 0;
      ActionId a = 0;
      try {
        for (q = static_cast<StateId>(q0); q < q1; ++q) {
          const Box cell = intersect(qz.cell(q), model.X());
          ch.labels.push_back(atlas.strengthened_label(cell, margin));
          for (a = 0; a < na; ++a) {
            const Paving p = over_reach(model, cell, inputs[a], params.delta1, params.eps, params.L, ropt);
            ch.leaves += p.leaves;
            tmp.clear();
            bool escapes = false;
            for (const auto& b : p.boxes) qz.cover(b, tmp, escapes);
            if (escapes) tmp.push_back(qz.sink());
            std::sort(tmp.begin(), tmp.end());
            tmp.erase(std::unique(tmp.begin(), tmp.end()), tmp.end());
            ch.counts.push_back(static_cast<std::uint32_t>(tmp.size()));
            ch.succ.insert(ch.succ.end(), tmp.begin(), tmp.end());
          }
        }
      } catch (const Error& e) {
        ch.error = std::make_exception_ptr(Error(
            e.kind(), std::string(e.what()) + " (cell " + to_string(qz.cell(q)) + ", action " + std::to_string(a) + ")"));
      } catch (...) {
        ch.error = std::current_exception();
      }
    }
  };

  unsigned workers = options.workers ? options.workers : std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, nchunks)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& ch : chunks)
    if (ch.error) std::rethrow_exception(ch.error);

  const std::size_t ns = cells + 1;
  std::vector<std::uint64_t> offsets;
  offsets.reserve(ns * na + 1);
  offsets.push_back(0);
  std::size_t total = na;
  std::size_t leaves = 0;
  for (const auto& ch : chunks) total += ch.succ.size();
  std::vector<StateId> succ;
  succ.reserve(total);
  std::vector<LabelMask> labels;
  labels.reserve(ns);
  for (auto& ch : chunks) {
    for (auto n : ch.counts) offsets.push_back(offsets.back() + n);
    succ.insert(succ.end(), ch.succ.begin(), ch.succ.end());
    labels.insert(labels.end(), ch.labels.begin(), ch.labels.end());
    leaves += ch.leaves;
    ch = Chunk{};
  }
  for (ActionId a = 0; a < na; ++a) {
    succ.push_back(qz.sink());
    offsets.push_back(offsets.back() + 1);
  }
  labels.push_back(0);

  Abstraction out{TransitionSystem::from_csr(ns, na, std::move(offsets), std::move(succ), atlas.names(), std::move(labels)),
                  qz, resolved, report, 0.0, leaves};
  out.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

// ---------------------------------------------------------------------------

SandwichReport sandwich_spot_check(const SystemModel& model, const PropositionAtlas& atlas, const Abstraction& abs,
                                   std::size_t samples, std::uint64_t seed) {
  const Quantizer& qz = abs.quantizer;
  const TransitionSystem& ts = abs.ts;
  const auto& p = abs.params;
  const std::size_t n = qz.state_dim(), m = qz.input_dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto in = [&](const Interval& iv) { return iv.lo() + unit(rng) * iv.width(); };
  auto pick = [&](std::size_t k) { return static_cast<std::size_t>(rng() % k); };
  SandwichReport rep;
  rep.samples = samples;
  auto fail = [&](bool& flag, const std::string& what) {
    if (flag && rep.witness.empty()) rep.witness = what;
    flag = false;
  };
  auto vec = [](std::span<const double> v) {
    std::ostringstream os;
    os.precision(17);
    os << "(";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    return os.str() + ")";
  };

  std::vector<double> x(n), w(n), u(m);
  for (std::size_t s = 0; s < samples; ++s) {
    // concrete move with |w| <= delta1 must be matched by the abstract action of the same lattice input
    for (std::size_t i = 0; i < n; ++i) x[i] = in(model.X()[i]);
    const ActionId a = static_cast<ActionId>(pick(qz.num_actions()));
    const auto ua = qz.decode(a);
    auto y = model.eval(x, ua);
    for (std::size_t i = 0; i < n; ++i) y[i] += in(Interval(-p.delta1, p.delta1));
    const StateId q = qz.quantize_state(x), q2 = qz.quantize_state(y);
    if (!ts.has_transition(q, a, q2))
      fail(rep.lower_ok, "concrete step " + vec(x) + " -> " + vec(y) + " under input " + vec(ua) +
                             " is not matched by an abstract transition");

    // labels at sampled concrete states
    const LabelMask lt = ts.labels(q);
    const Box px = Box::point(x);
    for (std::size_t k = 0; k < atlas.size(); ++k) {
      const bool in_t = (lt >> k) & 1U;
      const bool s1 = atlas.strengthened_label(px, p.eps1) >> k & 1U;
      const bool s2 = atlas.strengthened_label(px, p.eps2) >> k & 1U;
      if (in_t && !s1) fail(rep.labels_lower_ok, "label '" + atlas.names()[k] + "' of the cell is not held near " + vec(x));
      if (s2 && !in_t) fail(rep.labels_upper_ok, "label '" + atlas.names()[k] + "' held robustly at " + vec(x) + " is missing on the cell");
    }

    // abstract transitions must be realizable by the more disturbed system
    const StateId qa = static_cast<StateId>(pick(qz.num_cells()));
    const ActionId aa = static_cast<ActionId>(pick(qz.num_actions()));
    const auto post = ts.post(qa, aa);
    const StateId qb = post[pick(post.size())];
    const Box ca = intersect(qz.cell(qa), model.X());
    for (std::size_t i = 0; i < n; ++i) x[i] = in(ca[i]);
    const auto ulat = qz.decode(aa);
    for (std::size_t i = 0; i < m; ++i) {
      const std::int64_t j = std::llround(ulat[i] / qz.mu()[i]);
      const double lo = j == qz.input_lo()[i] ? model.U()[i].lo() : ulat[i];
      const double hi = j == qz.input_hi()[i] ? model.U()[i].hi() : static_cast<double>(j + 1) * qz.mu()[i];
      u[i] = in(Interval(lo, std::max(lo, hi)));
    }
    if (qz.quantize_input(u) != aa) u = ulat;
    const Box fx = model.enclose(Box::point(x), Box::point(u));
    bool ok = true;
    if (qb == qz.sink()) {
      ok = false;
      for (std::size_t i = 0; i < n; ++i)
        if (!qz.periodic()[i] && (fx[i].lo() - p.delta2 < model.X()[i].lo() || fx[i].hi() + p.delta2 > model.X()[i].hi()))
          ok = true;
    } else {
      const Box cb = intersect(qz.cell(qb), model.X());
      for (std::size_t i = 0; i < n && ok; ++i) {
        if (qz.periodic()[i]) {
          const double P = model.X()[i].width();
          bool any = false;
          for (double sh : {-P, 0.0, P})
            any |= cb[i].hi() + sh <= fx[i].lo() + p.delta2 && cb[i].lo() + sh >= fx[i].hi() - p.delta2;
          ok = any;
        } else {
          ok = cb[i].hi() <= fx[i].lo() + p.delta2 && cb[i].lo() >= fx[i].hi() - p.delta2;
        }
      }
    }
    if (!ok)
      fail(rep.upper_ok, "abstract transition (" + std::to_string(qa) + ", " + std::to_string(aa) + ", " +
                             std::to_string(qb) + ") is not covered by the delta2 ball around f" + vec(x) + " with input " + vec(u));
  }
  return rep;
}

// ---------------------------------------------------------------------------

std::string abstraction_manifest(const Abstraction& abs) {
  const auto& p = abs.params;
  const auto& qz = abs.quantizer;
  std::ostringstream os;
  os << "states = " << abs.ts.num_states() << "\n"
     << "cells = " << qz.num_cells() << "\n"
     << "actions = " << abs.ts.num_actions() << "\n"
     << "transitions = " << abs.ts.num_transitions() << "\n"
     << "sink = " << qz.sink() << "\n"
     << "delta1 = " << fmt(p.delta1) << "\n"
     << "delta2 = " << fmt(p.delta2) << "\n"
     << "eps1 = " << fmt(p.eps1) << "\n"
     << "eps2 = " << fmt(p.eps2) << "\n"
     << "eta = " << join<double>(p.eta) << "\n"
     << "mu = " << join<double>(p.mu) << "\n"
     << "eps = " << fmt(p.eps) << "\n"
     << "lipschitz = " << fmt(p.L) << "\n"
     << "sound_only = " << (p.sound_only ? "true" : "false") << "\n"
     << "params_ok = " << (abs.report.ok ? "true" : "false") << "\n"
     << "growth_slack = " << fmt(abs.report.growth_slack) << "\n"
     << "label_slack = " << fmt(abs.report.label_slack) << "\n"
     << "max_eta = " << fmt(abs.report.max_eta) << "\n"
     << "max_mu = " << fmt(abs.report.max_mu) << "\n"
     << "lattice_lo = " << join<std::int64_t>(qz.lattice_lo()) << "\n"
     << "lattice_hi = " << join<std::int64_t>(qz.lattice_hi()) << "\n"
     << "input_lo = " << join<std::int64_t>(qz.input_lo()) << "\n"
     << "input_hi = " << join<std::int64_t>(qz.input_hi()) << "\n"
     << "propositions = ";
  const auto& props = abs.ts.propositions();
  for (std::size_t i = 0; i < props.size(); ++i) os << (i ? " " : "") << props[i];
  os << "\n"
     << "reach_leaves = " << abs.reach_leaves << "\n"
     << "build_seconds = " << fmt(abs.build_seconds) << "\n";
  return os.str();
}

void write_abstraction(const Abstraction& abs, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create directory " + dir + ": " + ec.message());
  std::ofstream bin(dir + "/abstraction.bin", std::ios::binary);
  if (!bin) throw Error(ErrorKind::Io, "cannot write " + dir + "/abstraction.bin");
  write_binary(bin, abs.ts);
  std::ofstream man(dir + "/abstraction.manifest");
  if (!man) throw Error(ErrorKind::Io, "cannot write " + dir + "/abstraction.manifest");
  man << abstraction_manifest(abs);
  if (!bin || !man) throw Error(ErrorKind::Io, "write to " + dir + " failed");
}

}  // namespace symctl

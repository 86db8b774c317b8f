#include "interval.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <sstream>

namespace symctl {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Dimension: return "dimension error";
    case ErrorKind::EmptyInput: return "empty input";
    case ErrorKind::CannotBisect: return "cannot bisect";
    case ErrorKind::Syntax: return "syntax error";
    case ErrorKind::UnknownIdentifier: return "unknown identifier";
    case ErrorKind::NonIntegerExponent: return "non-integer exponent";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::InvalidOverlay: return "invalid overlay";
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::Parameter: return "parameter error";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::UndefinedController: return "undefined controller";
    case ErrorKind::Io: return "i/o error";
    case ErrorKind::Internal: return "internal error";
  }
  return "error";
}

namespace rounding {

namespace {
constexpr double kTiny = 0x1p-960;  // below this fma residuals may be inexact
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMax = std::numeric_limits<double>::max();
}  // namespace

double next_up(double x) noexcept {
  if (std::isnan(x) || x == kInf) return x;
  if (x == 0.0) return std::numeric_limits<double>::denorm_min();
  auto bits = std::bit_cast<std::uint64_t>(x);
  bits = x > 0 ? bits + 1 : bits - 1;
  return std::bit_cast<double>(bits);
}

double next_down(double x) noexcept { return -next_up(-x); }

std::pair<double, double> add_bounds(double a, double b) noexcept {
  const double s = a + b;
  if (std::isinf(a) || std::isinf(b) || std::isnan(s)) return {s, s};
  if (std::isinf(s)) return s > 0 ? std::pair{kMax, kInf} : std::pair{-kInf, -kMax};
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  if (err > 0) return {s, next_up(s)};
  if (err < 0) return {next_down(s), s};
  return {s, s};
}

std::pair<double, double> mul_bounds(double a, double b) noexcept {
  if (a == 0.0 || b == 0.0) return {0.0, 0.0};
  const double p = a * b;
  if (std::isinf(a) || std::isinf(b) || std::isnan(p)) return {p, p};
  if (std::isinf(p)) return p > 0 ? std::pair{kMax, kInf} : std::pair{-kInf, -kMax};
  if (std::fabs(p) < kTiny) return {next_down(p), next_up(p)};
  const double err = std::fma(a, b, -p);
  if (err > 0) return {p, next_up(p)};
  if (err < 0) return {next_down(p), p};
  return {p, p};
}

std::pair<double, double> div_bounds(double a, double b) noexcept {
  if (a == 0.0) return {0.0, 0.0};
  const double q = a / b;
  if (std::isinf(a) || std::isinf(b) || std::isnan(q)) return {q, q};
  if (std::isinf(q)) return q > 0 ? std::pair{kMax, kInf} : std::pair{-kInf, -kMax};
  if (std::fabs(q) < kTiny || std::fabs(a) < kTiny) return {next_down(q), next_up(q)};
  // a = q*b + r exactly, so a/b - q has the sign of r/b.
  const double r = std::fma(-q, b, a);
  const double sign = (r > 0) == (b > 0) ? 1.0 : -1.0;
  if (r == 0.0) return {q, q};
  return sign > 0 ? std::pair{q, next_up(q)} : std::pair{next_down(q), q};
}

}  // namespace rounding

using rounding::add_bounds;
using rounding::div_bounds;
using rounding::mul_bounds;
using rounding::next_down;
using rounding::next_up;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kLibmUlps = 2;

double down_ulps(double x, int n) {
  for (int i = 0; i < n; ++i) x = next_down(x);
  return x;
}
double up_ulps(double x, int n) {
  for (int i = 0; i < n; ++i) x = next_up(x);
  return x;
}

Interval make_unchecked(double lo, double hi) { return Interval(lo, hi); }

// Bounds of x^k for x >= 0.
std::pair<double, double> pow_nonneg(double x, int k) {
  double lo = x, hi = x;
  for (int i = 1; i < k; ++i) {
    lo = mul_bounds(lo, x).first;
    hi = mul_bounds(hi, x).second;
  }
  return {std::max(lo, 0.0), hi};
}

// True if c + 2*pi*k lies in [lo, hi] (slightly widened) for some integer k.
bool contains_periodic(double lo, double hi, double c) {
  const double tol = 1e-12 * (1.0 + std::fabs(lo) + std::fabs(hi));
  const double k = std::ceil((lo - tol - c) / (2 * kPi));
  return c + 2 * kPi * k <= hi + tol;
}

}  // namespace

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (std::isnan(lo) || std::isnan(hi) || lo > hi)
    throw Error(ErrorKind::InvalidArgument, "interval bounds out of order or NaN");
}

Interval hull(const Interval& a, const Interval& b) {
  if (a.is_empty()) return b;
  if (b.is_empty()) return a;
  return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

Interval intersect(const Interval& a, const Interval& b) {
  if (!a.intersects(b)) return Interval::empty();
  return {std::max(a.lo(), b.lo()), std::min(a.hi(), b.hi())};
}

Interval operator+(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  return make_unchecked(add_bounds(a.lo(), b.lo()).first, add_bounds(a.hi(), b.hi()).second);
}

Interval operator-(const Interval& a) {
  if (a.is_empty()) return a;
  return make_unchecked(-a.hi(), -a.lo());
}

Interval operator-(const Interval& a, const Interval& b) { return a + (-b); }

Interval operator*(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  if (a.is_point() && b.is_point()) {
    auto [l, h] = mul_bounds(a.lo(), b.lo());
    return make_unchecked(l, h);
  }
  const double xs[2] = {a.lo(), a.hi()};
  const double ys[2] = {b.lo(), b.hi()};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double x : xs) {
    for (double y : ys) {
      auto [l, h] = mul_bounds(x, y);
      lo = std::min(lo, l);
      hi = std::max(hi, h);
    }
  }
  return make_unchecked(lo, hi);
}

Interval operator/(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  if (b.contains(0.0)) throw Error(ErrorKind::Domain, "division by an interval containing zero");
  const double xs[2] = {a.lo(), a.hi()};
  const double ys[2] = {b.lo(), b.hi()};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double x : xs) {
    for (double y : ys) {
      auto [l, h] = div_bounds(x, y);
      lo = std::min(lo, l);
      hi = std::max(hi, h);
    }
  }
  return make_unchecked(lo, hi);
}

Interval inflate(const Interval& a, double r) {
  if (a.is_empty()) return a;
  if (!(r >= 0.0) || std::isinf(r))
    throw Error(ErrorKind::InvalidArgument, "inflation radius must be finite and nonnegative");
  if (r == 0.0) return a;
  return make_unchecked(add_bounds(a.lo(), -r).first, add_bounds(a.hi(), r).second);
}

Interval sqr(const Interval& a) { return pow(a, 2); }

Interval pow(const Interval& a, int k) {
  if (a.is_empty()) return a;
  if (k == 0) return Interval(1.0);
  if (k < 0) return Interval(1.0) / pow(a, -k);
  if (k == 1) return a;
  const bool even = (k % 2) == 0;
  if (a.lo() >= 0) {
    auto l = pow_nonneg(a.lo(), k), h = pow_nonneg(a.hi(), k);
    return make_unchecked(l.first, h.second);
  }
  if (a.hi() <= 0) {
    auto l = pow_nonneg(-a.hi(), k), h = pow_nonneg(-a.lo(), k);
    if (even) return make_unchecked(l.first, h.second);
    return make_unchecked(-h.second, -l.first);
  }
  auto neg = pow_nonneg(-a.lo(), k), pos = pow_nonneg(a.hi(), k);
  if (even) return make_unchecked(0.0, std::max(neg.second, pos.second));
  return make_unchecked(-neg.second, pos.second);
}

Interval sqrt(const Interval& a) {
  if (a.is_empty()) return a;
  if (a.lo() < 0) throw Error(ErrorKind::Domain, "sqrt of an interval reaching below zero");
  auto bound = [](double x, bool upper) {
    const double s = std::sqrt(x);
    if (s == 0.0 || std::isinf(s)) return s;
    const double r = std::fma(-s, s, x);
    if (upper) return r > 0 ? next_up(s) : s;
    return r < 0 ? next_down(s) : s;
  };
  return make_unchecked(bound(a.lo(), false), bound(a.hi(), true));
}

Interval abs(const Interval& a) {
  if (a.is_empty()) return a;
  if (a.lo() >= 0) return a;
  if (a.hi() <= 0) return -a;
  return make_unchecked(0.0, std::max(-a.lo(), a.hi()));
}

Interval exp(const Interval& a) {
  if (a.is_empty()) return a;
  auto lo_b = [](double x) { return x == 0.0 ? 1.0 : std::max(0.0, down_ulps(std::exp(x), kLibmUlps)); };
  auto hi_b = [](double x) { return x == 0.0 ? 1.0 : up_ulps(std::exp(x), kLibmUlps); };
  return make_unchecked(lo_b(a.lo()), hi_b(a.hi()));
}

Interval atan(const Interval& a) {
  if (a.is_empty()) return a;
  const double cap = up_ulps(kPi / 2, 1);
  auto lo_b = [&](double x) { return x == 0.0 ? 0.0 : std::max(-cap, down_ulps(std::atan(x), kLibmUlps)); };
  auto hi_b = [&](double x) { return x == 0.0 ? 0.0 : std::min(cap, up_ulps(std::atan(x), kLibmUlps)); };
  return make_unchecked(lo_b(a.lo()), hi_b(a.hi()));
}

namespace {

// Range of a 2*pi-periodic unit-amplitude function with maxima at cmax and minima at cmin.
Interval periodic_range(const Interval& a, double (*fn)(double), double exact_at_zero, double cmax,
                        double cmin) {
  if (a.is_empty()) return a;
  if (!std::isfinite(a.lo()) || !std::isfinite(a.hi()) || a.width() >= 2 * kPi)
    return make_unchecked(-1.0, 1.0);
  auto lo_b = [&](double x) { return x == 0.0 ? exact_at_zero : down_ulps(fn(x), kLibmUlps); };
  auto hi_b = [&](double x) { return x == 0.0 ? exact_at_zero : up_ulps(fn(x), kLibmUlps); };
  double lo = std::min(lo_b(a.lo()), lo_b(a.hi()));
  double hi = std::max(hi_b(a.lo()), hi_b(a.hi()));
  if (contains_periodic(a.lo(), a.hi(), cmax)) hi = 1.0;
  if (contains_periodic(a.lo(), a.hi(), cmin)) lo = -1.0;
  return make_unchecked(std::max(lo, -1.0), std::min(hi, 1.0));
}

}  // namespace

Interval sin(const Interval& a) {
  return periodic_range(a, static_cast<double (*)(double)>(std::sin), 0.0, kPi / 2, -kPi / 2);
}

Interval cos(const Interval& a) {
  return periodic_range(a, static_cast<double (*)(double)>(std::cos), 1.0, 0.0, kPi);
}

Interval tan(const Interval& a) {
  if (a.is_empty()) return a;
  if (!std::isfinite(a.lo()) || !std::isfinite(a.hi()) || a.width() >= kPi)
    throw Error(ErrorKind::Domain, "tan over an interval containing a pole");
  // Poles at pi/2 + k*pi, i.e. pi/2 + 2k*pi and -pi/2 + 2k*pi.
  if (contains_periodic(a.lo(), a.hi(), kPi / 2) || contains_periodic(a.lo(), a.hi(), -kPi / 2))
    throw Error(ErrorKind::Domain, "tan over an interval containing a pole");
  auto lo_b = [](double x) { return x == 0.0 ? 0.0 : down_ulps(std::tan(x), kLibmUlps); };
  auto hi_b = [](double x) { return x == 0.0 ? 0.0 : up_ulps(std::tan(x), kLibmUlps); };
  return make_unchecked(lo_b(a.lo()), hi_b(a.hi()));
}

std::ostream& operator<<(std::ostream& os, const Interval& a) {
  if (a.is_empty()) return os << "[empty]";
  std::ostringstream s;
  s.precision(17);
  s << '[' << a.lo() << ',' << a.hi() << ']';
  return os << s.str();
}

// ---------------------------------------------------------------------------
// Box

Box::Box(std::vector<Interval> ivs) : ivs_(std::move(ivs)) {
  const bool any_empty = std::any_of(ivs_.begin(), ivs_.end(), [](const Interval& i) { return i.is_empty(); });
  if (any_empty)
    for (auto& i : ivs_) i = Interval::empty();
}

Box Box::point(std::span<const double> x) {
  std::vector<Interval> ivs;
  ivs.reserve(x.size());
  for (double v : x) ivs.emplace_back(v);
  return Box(std::move(ivs));
}

Box Box::empty(std::size_t dims) { return Box(std::vector<Interval>(dims, Interval::empty())); }

bool Box::is_empty() const noexcept { return !ivs_.empty() && ivs_.front().is_empty(); }

std::vector<double> Box::lower() const {
  std::vector<double> v;
  for (const auto& i : ivs_) v.push_back(i.lo());
  return v;
}
std::vector<double> Box::upper() const {
  std::vector<double> v;
  for (const auto& i : ivs_) v.push_back(i.hi());
  return v;
}
std::vector<double> Box::center() const {
  std::vector<double> v;
  for (const auto& i : ivs_) v.push_back(i.mid());
  return v;
}

namespace {
void require_same_dims(std::size_t a, std::size_t b) {
  if (a != b)
    throw Error(ErrorKind::Dimension,
                "dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}
}  // namespace

Box inflate(const Box& b, std::span<const double> radii) {
  require_same_dims(b.dims(), radii.size());
  if (b.is_empty()) return b;
  std::vector<Interval> out;
  out.reserve(b.dims());
  for (std::size_t i = 0; i < b.dims(); ++i) out.push_back(inflate(b[i], radii[i]));
  return Box(std::move(out));
}

Box inflate(const Box& b, double radius) {
  std::vector<double> r(b.dims(), radius);
  return inflate(b, r);
}

double width(const Box& b) {
  if (b.is_empty()) throw Error(ErrorKind::EmptyInput, "width of an empty box");
  double w = 0.0;
  for (const auto& i : b.intervals()) w = std::max(w, i.width());
  return w;
}

std::pair<Box, Box> bisect(const Box& b) {
  if (b.is_empty()) throw Error(ErrorKind::EmptyInput, "bisect of an empty box");
  std::size_t dim = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < b.dims(); ++i) {
    if (b[i].width() > best) {
      best = b[i].width();
      dim = i;
    }
  }
  if (!(best > 0.0)) throw Error(ErrorKind::CannotBisect, "cannot bisect a point box");
  const double m = b[dim].mid();
  if (m <= b[dim].lo() || m >= b[dim].hi())
    throw Error(ErrorKind::CannotBisect, "box too narrow to bisect in floating point");
  Box left = b, right = b;
  left[dim] = Interval(b[dim].lo(), m);
  right[dim] = Interval(m, b[dim].hi());
  return {std::move(left), std::move(right)};
}

bool contains(const Box& outer, const Box& inner) {
  require_same_dims(outer.dims(), inner.dims());
  if (inner.is_empty()) return true;
  if (outer.is_empty()) return false;
  for (std::size_t i = 0; i < outer.dims(); ++i)
    if (!outer[i].contains(inner[i])) return false;
  return true;
}

bool contains(const Box& outer, std::span<const double> x) {
  require_same_dims(outer.dims(), x.size());
  for (std::size_t i = 0; i < outer.dims(); ++i)
    if (!outer[i].contains(x[i])) return false;
  return true;
}

bool intersects(const Box& a, const Box& b) {
  require_same_dims(a.dims(), b.dims());
  if (a.is_empty() || b.is_empty()) return false;
  for (std::size_t i = 0; i < a.dims(); ++i)
    if (!a[i].intersects(b[i])) return false;
  return true;
}

Box intersect(const Box& a, const Box& b) {
  if (!intersects(a, b)) return Box::empty(a.dims());
  std::vector<Interval> out;
  for (std::size_t i = 0; i < a.dims(); ++i) out.push_back(intersect(a[i], b[i]));
  return Box(std::move(out));
}

Box hull(const Box& a, const Box& b) {
  require_same_dims(a.dims(), b.dims());
  if (a.is_empty()) return b;
  if (b.is_empty()) return a;
  std::vector<Interval> out;
  for (std::size_t i = 0; i < a.dims(); ++i) out.push_back(hull(a[i], b[i]));
  return Box(std::move(out));
}

std::vector<Box> subtract(const Box& a, const Box& b) {
  if (!intersects(a, b)) {
    if (a.is_empty()) return {};
    return {a};
  }
  std::vector<Box> pieces;
  Box cur = a;
  for (std::size_t i = 0; i < a.dims(); ++i) {
    if (cur[i].lo() < b[i].lo()) {
      Box p = cur;
      p[i] = Interval(cur[i].lo(), b[i].lo());
      pieces.push_back(std::move(p));
    }
    if (cur[i].hi() > b[i].hi()) {
      Box p = cur;
      p[i] = Interval(b[i].hi(), cur[i].hi());
      pieces.push_back(std::move(p));
    }
    cur[i] = intersect(cur[i], b[i]);
  }
  return pieces;
}

bool covered_by_union(const Box& b, std::span<const Box> regions) {
  std::vector<Box> rest{b};
  if (b.is_empty()) return true;
  for (const auto& r : regions) {
    std::vector<Box> next;
    for (const auto& p : rest) {
      auto pieces = subtract(p, r);
      next.insert(next.end(), std::make_move_iterator(pieces.begin()), std::make_move_iterator(pieces.end()));
    }
    rest = std::move(next);
    if (rest.empty()) return true;
  }
  return rest.empty();
}

std::string to_string(const Box& b) {
  std::ostringstream os;
  os << b;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Box& b) {
  for (std::size_t i = 0; i < b.dims(); ++i) {
    if (i) os << 'x';
    os << b[i];
  }
  return os;
}

}  // namespace symctl

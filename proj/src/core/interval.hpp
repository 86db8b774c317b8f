#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace symctl {

/*
 * Closed real interval [lo, hi] with outward-rounded arithmetic.
 *
 * Each elementary operation is rounded outward only when the floating-point
 * result is inexact (detected with error-free transformations), so exact
 * results such as x + 0 or 0 * y stay exact. Library transcendentals are
 * widened by a fixed number of ulps unless the result is a known exact value.
 */
class Interval {
 public:
  Interval() : lo_(0.0), hi_(0.0) {}
  explicit Interval(double v) : lo_(v), hi_(v) {}
  Interval(double lo, double hi);

  static Interval empty() {
    Interval r;
    r.empty_ = true;
    r.lo_ = r.hi_ = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  static Interval entire() {
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }

  bool is_empty() const noexcept { return empty_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  double width() const noexcept { return empty_ ? 0.0 : hi_ - lo_; }
  double mid() const noexcept { return lo_ + 0.5 * (hi_ - lo_); }
  /* Largest absolute value in the interval. */
  double mag() const noexcept { return std::max(std::fabs(lo_), std::fabs(hi_)); }
  bool is_point() const noexcept { return !empty_ && lo_ == hi_; }

  bool contains(double v) const noexcept { return !empty_ && lo_ <= v && v <= hi_; }
  bool contains(const Interval& o) const noexcept {
    return o.empty_ || (!empty_ && lo_ <= o.lo_ && o.hi_ <= hi_);
  }
  bool intersects(const Interval& o) const noexcept {
    return !empty_ && !o.empty_ && lo_ <= o.hi_ && o.lo_ <= hi_;
  }

  friend bool operator==(const Interval& a, const Interval& b) noexcept {
    if (a.empty_ || b.empty_) return a.empty_ == b.empty_;
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

 private:
  double lo_;
  double hi_;
  bool empty_ = false;
};

Interval hull(const Interval& a, const Interval& b);
Interval intersect(const Interval& a, const Interval& b);

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
Interval operator*(const Interval& a, const Interval& b);
Interval operator/(const Interval& a, const Interval& b);

/* Outward-rounded widening by r >= 0 on both sides. */
Interval inflate(const Interval& a, double r);

Interval sqr(const Interval& a);
Interval pow(const Interval& a, int k);
Interval sqrt(const Interval& a);
Interval abs(const Interval& a);
Interval exp(const Interval& a);
Interval sin(const Interval& a);
Interval cos(const Interval& a);
Interval tan(const Interval& a);
Interval atan(const Interval& a);

std::ostream& operator<<(std::ostream& os, const Interval& a);

namespace rounding {
double next_up(double x) noexcept;
double next_down(double x) noexcept;
/* Round-to-nearest sum/product with guaranteed lower/upper bounds of the exact result. */
std::pair<double, double> add_bounds(double a, double b) noexcept;
std::pair<double, double> mul_bounds(double a, double b) noexcept;
std::pair<double, double> div_bounds(double a, double b) noexcept;
}  // namespace rounding

/* Axis-aligned box, a product of closed intervals. */
class Box {
 public:
  Box() = default;
  explicit Box(std::vector<Interval> ivs);
  Box(std::initializer_list<Interval> ivs) : Box(std::vector<Interval>(ivs)) {}
  static Box point(std::span<const double> x);
  static Box empty(std::size_t dims);

  std::size_t dims() const noexcept { return ivs_.size(); }
  bool is_empty() const noexcept;
  const Interval& operator[](std::size_t i) const { return ivs_[i]; }
  Interval& operator[](std::size_t i) { return ivs_[i]; }
  std::span<const Interval> intervals() const noexcept { return ivs_; }

  std::vector<double> lower() const;
  std::vector<double> upper() const;
  std::vector<double> center() const;

  friend bool operator==(const Box& a, const Box& b) = default;

 private:
  std::vector<Interval> ivs_;
};

Box inflate(const Box& b, std::span<const double> radii);
Box inflate(const Box& b, double radius);
double width(const Box& b);
/* Splits along the widest dimension (lowest index among ties) at its midpoint. */
std::pair<Box, Box> bisect(const Box& b);
bool contains(const Box& outer, const Box& inner);
bool contains(const Box& outer, std::span<const double> x);
bool intersects(const Box& a, const Box& b);
Box intersect(const Box& a, const Box& b);
Box hull(const Box& a, const Box& b);

/* Closed-box difference a \ b as at most 2n closed boxes (closure of the set difference). */
std::vector<Box> subtract(const Box& a, const Box& b);
/* Exact test of b ⊆ (r_1 ∪ ... ∪ r_k) by recursive box subtraction. */
bool covered_by_union(const Box& b, std::span<const Box> regions);

std::string to_string(const Box& b);
std::ostream& operator<<(std::ostream& os, const Box& b);

}  // namespace symctl

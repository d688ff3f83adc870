#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>

namespace qprob {

// Absolute tolerance used when comparing bounds against thresholds.
inline constexpr double kTol = 1e-9;

// A subinterval of [0,1] holding a (conditional) probability.
//
// Bounds are closed by default. The open flags exist so that the semantics
// of labels such as "almost none" = (0, a] survive interval arithmetic: a
// product of two such values can approach 0 without ever reaching it.
struct ProbInterval {
  double lo = 0.0;
  double hi = 1.0;
  bool lo_open = false;
  bool hi_open = false;

  static constexpr ProbInterval unit() { return {0.0, 1.0, false, false}; }
  static constexpr ProbInterval point(double v) { return {v, v, false, false}; }
  static constexpr ProbInterval closed(double lo, double hi) { return {lo, hi, false, false}; }

  bool valid() const {
    return std::isfinite(lo) && std::isfinite(hi) && lo >= -kTol && hi <= 1.0 + kTol && lo <= hi + kTol;
  }

  bool is_point(double tol = kTol) const { return hi - lo <= tol; }
  double width() const { return hi - lo; }

  bool contains(double x, double tol = kTol) const { return x >= lo - tol && x <= hi + tol; }

  // Inclusion test on the closures.
  bool contains(const ProbInterval& other, double tol = kTol) const {
    return other.lo >= lo - tol && other.hi <= hi + tol;
  }

  ProbInterval closure() const { return {lo, hi, false, false}; }

  friend bool operator==(const ProbInterval&, const ProbInterval&) = default;
};

// Intersection of closures; nullopt when disjoint beyond `tol`.
inline std::optional<ProbInterval> intersect(const ProbInterval& a, const ProbInterval& b,
                                             double tol = kTol) {
  ProbInterval r;
  const bool lo_from_a = a.lo >= b.lo;
  if (a.lo > b.lo) {
    r.lo = a.lo;
    r.lo_open = a.lo_open;
  } else if (b.lo > a.lo) {
    r.lo = b.lo;
    r.lo_open = b.lo_open;
  } else {
    r.lo = a.lo;
    r.lo_open = a.lo_open || b.lo_open;
  }
  if (a.hi < b.hi) {
    r.hi = a.hi;
    r.hi_open = a.hi_open;
  } else if (b.hi < a.hi) {
    r.hi = b.hi;
    r.hi_open = b.hi_open;
  } else {
    r.hi = a.hi;
    r.hi_open = a.hi_open || b.hi_open;
  }
  if (r.lo > r.hi + tol) return std::nullopt;
  // a near-miss collapses to a point inside `a`
  if (r.lo > r.hi) {
    if (lo_from_a) r.hi = r.lo;
    else r.lo = r.hi;
  }
  return r;
}

// {x * y : x in a, y in b}. Operands are nonnegative.
inline ProbInterval multiply(const ProbInterval& a, const ProbInterval& b) {
  ProbInterval r;
  r.lo = a.lo * b.lo;
  r.hi = a.hi * b.hi;
  const bool zero_in_a = a.lo <= 0.0 && !a.lo_open;
  const bool zero_in_b = b.lo <= 0.0 && !b.lo_open;
  if (r.lo <= 0.0) {
    r.lo = 0.0;
    r.lo_open = !(zero_in_a || zero_in_b);
  } else {
    r.lo_open = a.lo_open || b.lo_open;
  }
  r.hi_open = r.hi > 0.0 && (a.hi_open || b.hi_open);
  return r;
}

// {min(1, x / y) : x in n, y in d, y > 0}. A 0/0 pair makes the result
// unconstrained; x/0 with x > 0 saturates at 1.
inline ProbInterval divide_truncated(const ProbInterval& n, const ProbInterval& d) {
  const bool n_has_zero = n.lo <= 0.0 && !n.lo_open;
  const bool d_has_zero = d.lo <= 0.0 && !d.lo_open;
  if (d.hi <= 0.0) {
    // denominator is {0}
    return n_has_zero ? ProbInterval::unit() : ProbInterval::point(1.0);
  }
  if (n_has_zero && d_has_zero) return ProbInterval::unit();
  if (n.hi <= 0.0) return ProbInterval::point(0.0);

  ProbInterval r;
  r.lo = n.lo / d.hi;
  r.lo_open = r.lo > 0.0 ? (n.lo_open || d.hi_open) : !n_has_zero;

  if (d.lo <= 0.0) {
    // y can be arbitrarily small, so some ratio exceeds 1
    r.hi = 1.0;
    r.hi_open = false;
  } else {
    const double q = n.hi / d.lo;
    if (q > 1.0) {
      r.hi = 1.0;
      r.hi_open = false;
    } else {
      r.hi = q;
      r.hi_open = n.hi_open || d.lo_open;
    }
  }
  if (r.lo >= 1.0) return ProbInterval::point(1.0);
  return r;
}

inline std::string format_interval(const ProbInterval& i, int decimals = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%c%.*f,%.*f%c", i.lo_open ? '(' : '[', decimals, i.lo, decimals,
                i.hi, i.hi_open ? ')' : ']');
  return buf;
}

inline std::ostream& operator<<(std::ostream& os, const ProbInterval& i) {
  return os << format_interval(i, 6);
}

}  // namespace qprob

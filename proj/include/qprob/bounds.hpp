#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>

#include "qprob/errors.hpp"
#include "qprob/interval.hpp"

namespace qprob {

// Interval knowledge about the four conditionals linking A, B and C.
struct SyllogismInput {
  ProbInterval b_given_a = ProbInterval::unit();  // P(B|A)
  ProbInterval a_given_b = ProbInterval::unit();  // P(A|B)
  ProbInterval c_given_b = ProbInterval::unit();  // P(C|B)
  ProbInterval b_given_c = ProbInterval::unit();  // P(B|C)
};

// The same pattern read from C's side: bounds on P(A|C).
constexpr SyllogismInput swap_roles(const SyllogismInput& in) {
  return {in.b_given_c, in.c_given_b, in.a_given_b, in.b_given_a};
}

// Which denominators the third and fourth upper-bound terms use.
//
// `sound` divides by P_*(B|C): both terms decrease in P(B|C), so the
// maximum over an interval sits at its lower end. `upper_denominator` divides by
// P^*(B|C); it coincides with `sound` for precise inputs but is not a valid
// bound once P(B|C) is an interval. It is kept only for comparison runs.
enum class UpperForm { sound, upper_denominator };

// Whether endpoints of 0 and 1 count as reached when they are only
// approached through an open label end.
enum class EndpointPolicy { closed, attained };

inline constexpr double kConditionTol = 1e-12;

// Tightest lower bound on P(C|A). A zero P_*(B|A) or P_*(A|B) gives 0.
inline double syllogism_lower(const SyllogismInput& in) {
  const double x = in.b_given_a.lo;
  const double y = in.a_given_b.lo;
  const double z = in.c_given_b.lo;
  if (x <= 0.0 || y <= 0.0) return 0.0;
  return x * std::max(0.0, 1.0 - (1.0 - z) / y);
}

// Upper bound on P(C|A): the minimum of 1, the three ratio terms, and the
// fifth term when its applicability condition holds. Terms with a zero
// denominator are skipped.
inline double syllogism_upper(const SyllogismInput& in, UpperForm form = UpperForm::sound) {
  const double x_lo = in.b_given_a.lo;
  const double x_hi = in.b_given_a.hi;
  const double y_lo = in.a_given_b.lo;
  const double z_hi = in.c_given_b.hi;
  const double w_lo = in.b_given_c.lo;
  const double w_den = form == UpperForm::sound ? w_lo : in.b_given_c.hi;

  double best = 1.0;
  if (y_lo > 0.0) {
    best = std::min(best, 1.0 - x_lo + x_lo * z_hi / y_lo);
    if (w_den > 0.0) {
      const double ratio = x_hi * z_hi / (y_lo * w_den);
      best = std::min({best, ratio, ratio * (1.0 - w_lo) + x_hi});
    }
  }

  // Fifth term: the value of the second and third terms where they cross.
  if (y_lo > z_hi + kConditionTol) {
    const double den = w_lo * y_lo + z_hi * (1.0 - w_lo);
    if (den > 0.0) {
      const double crossing = w_lo * y_lo / den;
      if (crossing >= x_lo - kConditionTol && crossing <= x_hi + kConditionTol) {
        const double d = z_hi + w_lo * (y_lo - z_hi);
        if (d > 0.0) best = std::min(best, z_hi / d);
      }
    }
  }
  return std::clamp(best, 0.0, 1.0);
}

namespace detail {

inline ProbInterval shrink_open_ends(const ProbInterval& i, double step) {
  ProbInterval r = i.closure();
  if (i.lo_open) r.lo = std::min(i.lo + step, i.hi);
  if (i.hi_open) r.hi = std::max(i.hi - step, r.lo);
  return r;
}

}  // namespace detail

// [lower, upper] on P(C|A) as a closed interval, or under
// EndpointPolicy::attained with 0 and 1 marked open when no admissible
// input reaches them. Attainment is probed by pulling every open input end
// inward by 1e-7.
inline ProbInterval syllogism_interval(const SyllogismInput& in, UpperForm form = UpperForm::sound,
                                       EndpointPolicy policy = EndpointPolicy::closed) {
  const SyllogismInput closed{in.b_given_a.closure(), in.a_given_b.closure(), in.c_given_b.closure(),
                              in.b_given_c.closure()};
  ProbInterval r = ProbInterval::closed(syllogism_lower(closed), syllogism_upper(closed, form));
  if (policy == EndpointPolicy::attained) {
    constexpr double kProbe = 1e-7;
    const SyllogismInput inner{detail::shrink_open_ends(in.b_given_a, kProbe),
                               detail::shrink_open_ends(in.a_given_b, kProbe),
                               detail::shrink_open_ends(in.c_given_b, kProbe),
                               detail::shrink_open_ends(in.b_given_c, kProbe)};
    if (r.lo <= kTol) r.lo_open = syllogism_lower(inner) > kConditionTol;
    if (r.hi >= 1.0 - kTol) r.hi_open = syllogism_upper(inner, form) < 1.0 - kConditionTol;
  }
  return r;
}

struct SyllogismResult {
  ProbInterval c_given_a;
  ProbInterval a_given_c;
};

// Both conclusions of the pattern. Throws Contradiction when the inputs
// force a lower bound above the upper bound.
inline SyllogismResult syllogism(const SyllogismInput& in, UpperForm form = UpperForm::sound,
                                 EndpointPolicy policy = EndpointPolicy::closed) {
  SyllogismResult r{syllogism_interval(in, form, policy), syllogism_interval(swap_roles(in), form, policy)};
  for (ProbInterval* i : {&r.c_given_a, &r.a_given_c}) {
    if (i->lo > i->hi + kTol)
      throw Contradiction("syllogism: lower bound " + std::to_string(i->lo) + " exceeds upper bound " +
                          std::to_string(i->hi));
    i->lo = std::min(i->lo, i->hi);
  }
  return r;
}

// Refines P(A_1|A_k) along the cycle A_1 .. A_k using
//   P(A_1|A_k) = P(A_k|A_1) * prod_i P(A_i|A_{i+1}) / P(A_{i+1}|A_i).
// `forward[i]` bounds P(A_i|A_{i+1}), `backward[i]` bounds P(A_{i+1}|A_i),
// `reverse` bounds P(A_k|A_1) and `current` is the interval being refined.
// A zero in a denominator drops that side of the refinement.
inline ProbInterval bayes_cycle(std::span<const ProbInterval> forward, std::span<const ProbInterval> backward,
                                const ProbInterval& reverse, const ProbInterval& current) {
  if (forward.size() != backward.size()) throw Error("bayes_cycle: chains differ in length");
  double f_lo = 1.0, f_hi = 1.0, b_lo = 1.0, b_hi = 1.0;
  for (std::size_t i = 0; i < forward.size(); ++i) {
    f_lo *= forward[i].lo;
    f_hi *= forward[i].hi;
    b_lo *= backward[i].lo;
    b_hi *= backward[i].hi;
  }
  ProbInterval candidate = ProbInterval::unit();
  if (b_lo > 0.0) candidate.hi = std::min(1.0, reverse.hi * f_hi / b_lo);
  if (b_hi > 0.0) candidate.lo = std::min(1.0, reverse.lo * f_lo / b_hi);
  auto r = intersect(current, candidate);
  if (!r)
    throw Contradiction("bayes_cycle: refinement " + format_interval(candidate) + " misses " +
                        format_interval(current));
  return *r;
}

// Bounds on P(C|A) when A is a subclass of B with typicality t = P(A|B),
// alpha = P(C|B), and C is inside B.
inline ProbInterval typicality_bounds(double t, double alpha) {
  if (!(t > 0.0)) throw Error("typicality index must be positive (undefined reference class)");
  if (t > 1.0 || alpha < 0.0 || alpha > 1.0) throw Error("typicality inputs must lie in [0,1]");
  return ProbInterval::closed(std::max(0.0, 1.0 - (1.0 - alpha) / t), std::min(1.0, alpha / t));
}

}  // namespace qprob

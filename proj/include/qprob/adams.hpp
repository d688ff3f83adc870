#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "qprob/bounds.hpp"
#include "qprob/errors.hpp"
#include "qprob/network.hpp"

namespace qprob {

// A ->alpha B reads P(B|A) >= 1 - alpha.
struct AdamsParams {
  double alpha = 0.1;
  double alpha_prime = 0.1;

  bool valid() const { return alpha > 0.0 && alpha < 0.5 && alpha_prime > 0.0 && alpha_prime < 0.5; }
};

// Above this the three bounds can drop below alpha: (3 - sqrt 5) / 2.
inline const double kGoldenThreshold = (3.0 - std::sqrt(5.0)) / 2.0;

// From A -> B and A -> C: lower bound on P(C|A and B).
inline double triangularity_bound(double alpha) { return (1.0 - 2.0 * alpha) / (1.0 - alpha); }

// From A -> B and (A and B) -> C: lower bound on P(C|A).
inline double bayes_rule_bound(double alpha) { return (1.0 - alpha) * (1.0 - alpha); }

// From A -> C and B -> C: lower bound on P(C|A or B).
inline double disjunction_bound(double alpha, double alpha_prime) {
  return std::max(0.0, 1.0 - alpha - alpha_prime);
}

// P(C|A or B) from the conditionals between A, B and C.
inline double disjunction_identity(double p_c_a, double p_b_a, double p_c_b, double p_a_b, double p_c_ab) {
  if (!(p_b_a > 0.0) || !(p_a_b > 0.0)) throw Error("disjunction identity needs P(B|A) > 0 and P(A|B) > 0");
  const double den = p_a_b + p_b_a - p_a_b * p_b_a;
  if (!(den > 0.0)) throw Error("disjunction identity: zero denominator");
  return (p_a_b * p_c_a + p_b_a * p_c_b - p_a_b * p_b_a * p_c_ab) / den;
}

// The first two rules as syllogism instances, with X = A and B a node
// satisfying P(A|X) = 1.
inline double triangularity_via_syllogism(double alpha) {
  const auto v = ProbInterval::closed(1.0 - alpha, 1.0);
  // A' = A and B, B' = A, C' = C
  return syllogism_lower({ProbInterval::point(1.0), v, v, ProbInterval::unit()});
}

inline double bayes_rule_via_syllogism(double alpha) {
  const auto v = ProbInterval::closed(1.0 - alpha, 1.0);
  // A' = A, B' = A and B, C' = C
  return syllogism_lower({v, ProbInterval::point(1.0), v, ProbInterval::unit()});
}

// Adds the node `name` standing for `a` and `b`: P(a|name) = P(b|name) = 1,
// P(name|a) = P(b|a) and P(name|b) = P(a|b).
inline std::size_t add_intersection_node(KnowledgeBase& kb, const std::string& a, const std::string& b,
                                         const std::string& name) {
  const std::size_t ia = kb.node(a);
  const std::size_t ib = kb.node(b);
  const ProbInterval b_given_a = kb.edge(ia, ib).interval;
  const ProbInterval a_given_b = kb.edge(ib, ia).interval;
  kb.ingest({name, a, ProbInterval::point(1.0)});
  kb.ingest({name, b, ProbInterval::point(1.0)});
  kb.ingest({a, name, b_given_a});
  kb.ingest({b, name, a_given_b});
  return kb.node(name);
}

// Adds the node `name` standing for `a` or `b`: P(name|a) = P(name|b) = 1.
inline std::size_t add_union_node(KnowledgeBase& kb, const std::string& a, const std::string& b,
                                  const std::string& name) {
  kb.node(a);
  kb.node(b);
  kb.ingest({a, name, ProbInterval::point(1.0)});
  kb.ingest({b, name, ProbInterval::point(1.0)});
  return kb.node(name);
}

}  // namespace qprob

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qprob/adams.hpp"
#include "qprob/bounds.hpp"
#include "qprob/oracle.hpp"

// Randomised comparisons of the closed-form bounds against the oracle.
namespace qprob {

// Classes A = 0, B = 1, C = 2; target P(C|A).
inline oracle::OracleProblem syllogism_problem(const SyllogismInput& in) {
  oracle::OracleProblem pb;
  pb.class_count = 3;
  pb.constrain_classes(0, 1, in.b_given_a.closure());
  pb.constrain_classes(1, 0, in.a_given_b.closure());
  pb.constrain_classes(1, 2, in.c_given_b.closure());
  pb.constrain_classes(2, 1, in.b_given_c.closure());
  pb.target_classes(0, 2);
  return pb;
}

struct TightnessReport {
  int count = 0;
  int skipped = 0;  // oracle found the inputs inconsistent
  double max_gap = 0.0;
};

struct SoundnessReport {
  int count = 0;
  int skipped = 0;
  int violations = 0;
  double max_violation = 0.0;  // > 0 means the closed form excluded an attainable value
};

struct AdamsCheck {
  std::string rule;
  double bound = 0.0;
  double oracle_min = 0.0;  // exact, from the simplex
  double search_min = 0.0;  // independent randomised search
  bool sound = false;       // bound <= oracle_min
  bool attained = false;    // oracle_min - bound <= 0.02
};

struct CertifyReport {
  std::uint64_t seed = 0;
  int n = 0;
  TightnessReport precise;
  SoundnessReport interval;
  std::vector<AdamsCheck> adams;

  bool sound() const {
    return interval.violations == 0 &&
           std::all_of(adams.begin(), adams.end(), [](const AdamsCheck& a) { return a.sound; });
  }
};

inline constexpr double kAttainmentTol = 0.02;
inline constexpr double kSoundnessTol = 1e-7;

// Precise inputs drawn from (0.05, 0.95); the closed form should equal the
// oracle range.
inline TightnessReport precise_tightness(std::uint64_t seed, int n, UpperForm form = UpperForm::sound) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  TightnessReport r;
  for (int i = 0; i < n; ++i) {
    const SyllogismInput in{ProbInterval::point(u(rng)), ProbInterval::point(u(rng)), ProbInterval::point(u(rng)),
                            ProbInterval::point(u(rng))};
    const auto o = oracle::solve(syllogism_problem(in));
    if (o.inconsistent()) {
      ++r.skipped;
      continue;
    }
    ++r.count;
    const ProbInterval b = syllogism_interval(in, form);
    r.max_gap = std::max({r.max_gap, std::abs(b.lo - o.range.lo), std::abs(b.hi - o.range.hi)});
  }
  return r;
}

// Random sub-intervals of [0,1]; the closed form must contain the oracle
// range.
inline SoundnessReport interval_soundness(std::uint64_t seed, int n, UpperForm form = UpperForm::sound) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&] {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    return ProbInterval::closed(a, b);
  };
  SoundnessReport r;
  for (int i = 0; i < n; ++i) {
    const SyllogismInput in{draw(), draw(), draw(), draw()};
    const auto o = oracle::solve(syllogism_problem(in));
    if (o.inconsistent()) {
      ++r.skipped;
      continue;
    }
    ++r.count;
    const ProbInterval b = syllogism_interval(in, form);
    const double v = std::max(b.lo - o.range.lo, o.range.hi - b.hi);
    r.max_violation = std::max(r.max_violation, v);
    if (v > kSoundnessTol) ++r.violations;
  }
  return r;
}

// The three rules over classes A = 0, B = 1, C = 2 with every premise at
// least 1 - alpha.
inline std::vector<AdamsCheck> adams_checks(double alpha, std::uint64_t seed = 1) {
  using oracle::OracleProblem;
  const auto v = ProbInterval::closed(1.0 - alpha, 1.0);
  std::vector<std::pair<AdamsCheck, OracleProblem>> cases;
  {
    OracleProblem pb;
    pb.class_count = 3;
    pb.constrain_classes(0, 1, v).constrain_classes(0, 2, v);
    pb.target(pb.cls(0) & pb.cls(1), pb.cls(2));
    cases.push_back({{"triangularity", triangularity_bound(alpha)}, pb});
  }
  {
    OracleProblem pb;
    pb.class_count = 3;
    pb.constrain_classes(0, 1, v).constrain(pb.cls(0) & pb.cls(1), pb.cls(2), v);
    pb.target_classes(0, 2);
    cases.push_back({{"bayes", bayes_rule_bound(alpha)}, pb});
  }
  {
    OracleProblem pb;
    pb.class_count = 3;
    pb.constrain_classes(0, 2, v).constrain_classes(1, 2, v);
    pb.target(pb.cls(0) | pb.cls(1), pb.cls(2));
    cases.push_back({{"disjunction", disjunction_bound(alpha, alpha)}, pb});
  }
  std::vector<AdamsCheck> out;
  for (auto& [check, pb] : cases) {
    check.oracle_min = oracle::solve(pb).range.lo;
    check.search_min = oracle::solve_randomized(pb, seed).range.lo;
    check.sound = check.bound <= check.oracle_min + kSoundnessTol;
    check.attained = check.oracle_min - check.bound <= kAttainmentTol;
    out.push_back(check);
  }
  return out;
}

inline CertifyReport certify(std::uint64_t seed, int n, double alpha = 0.3) {
  CertifyReport r;
  r.seed = seed;
  r.n = n;
  if (n <= 0) return r;
  r.precise = precise_tightness(seed, n);
  r.interval = interval_soundness(seed + 1, n);
  r.adams = adams_checks(alpha, seed);
  return r;
}

}  // namespace qprob

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "qprob/errors.hpp"
#include "qprob/interval.hpp"

// Exact attainable ranges of a conditional probability over all joint
// distributions on the atoms of up to four classes. Test-side ground truth.
namespace qprob::oracle {

// A set of atoms. Atom i belongs to class c iff bit c of i is set.
using Event = std::uint16_t;

inline constexpr int kMaxClasses = 4;

constexpr Event all_atoms(int class_count) {
  return static_cast<Event>((1u << (1u << class_count)) - 1u);
}

constexpr Event class_event(int class_count, int c) {
  Event e = 0;
  for (unsigned i = 0; i < (1u << class_count); ++i)
    if (i & (1u << c)) e = static_cast<Event>(e | (1u << i));
  return e;
}

// P(to|from) in value; vacuous when `from` has no mass.
struct Conditional {
  Event from = 0;
  Event to = 0;
  ProbInterval value = ProbInterval::unit();
};

struct OracleProblem {
  int class_count = 2;
  std::vector<Conditional> constraints;
  Event target_from = 0;
  Event target_to = 0;

  Event cls(int c) const { return class_event(class_count, c); }

  OracleProblem& constrain(Event from, Event to, ProbInterval v) {
    constraints.push_back({from, to, v});
    return *this;
  }
  OracleProblem& constrain_classes(int from, int to, ProbInterval v) { return constrain(cls(from), cls(to), v); }
  OracleProblem& target(Event from, Event to) {
    target_from = from;
    target_to = to;
    return *this;
  }
  OracleProblem& target_classes(int from, int to) { return target(cls(from), cls(to)); }
};

enum class Outcome { ok, inconsistent };

struct OracleResult {
  Outcome outcome = Outcome::ok;
  ProbInterval range = ProbInterval::unit();

  bool inconsistent() const { return outcome == Outcome::inconsistent; }
};

namespace detail {

inline void validate(const OracleProblem& pb) {
  if (pb.class_count < 2 || pb.class_count > kMaxClasses) throw Error("oracle supports 2 to 4 classes");
  const Event universe = all_atoms(pb.class_count);
  auto inside = [&](Event e) { return (e & ~universe) == 0; };
  for (std::size_t i = 0; i < pb.constraints.size(); ++i) {
    const auto& c = pb.constraints[i];
    if (!inside(c.from) || !inside(c.to)) throw Error("oracle constraint refers to atoms outside the universe");
    if (!c.value.valid()) throw Error("oracle constraint interval is invalid");
    for (std::size_t j = 0; j < i; ++j)
      if (pb.constraints[j].from == c.from && pb.constraints[j].to == c.to)
        throw Error("oracle constraint pairs must be distinct");
  }
  if (!inside(pb.target_from) || !inside(pb.target_to)) throw Error("oracle target refers to atoms outside the universe");
}

inline double mass_coeff(Event e, std::size_t atom) { return (e >> atom) & 1u ? 1.0 : 0.0; }

enum class LpStatus { optimal, infeasible, unbounded };

struct LpRow {
  std::vector<double> a;
  char sense = '<';  // '<', '>' or '='
  double b = 0.0;
};

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  double value = 0.0;
  std::vector<double> x;
};

// Dense two-phase simplex with Bland's rule: minimise c.x over the rows
// with x >= 0.
inline LpSolution simplex(std::vector<LpRow> rows, const std::vector<double>& c) {
  constexpr double eps = 1e-11;
  const std::size_t n = c.size();
  for (auto& r : rows) {
    if (r.b < 0.0) {
      for (double& v : r.a) v = -v;
      r.b = -r.b;
      if (r.sense == '<') r.sense = '>';
      else if (r.sense == '>') r.sense = '<';
    }
  }
  std::size_t n_slack = 0, n_art = 0;
  for (const auto& r : rows) {
    if (r.sense != '=') ++n_slack;
    if (r.sense != '<') ++n_art;
  }
  const std::size_t m = rows.size();
  const std::size_t art0 = n + n_slack;
  const std::size_t cols = art0 + n_art;
  const std::size_t rhs = cols;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(cols + 1, 0.0));
  std::vector<std::size_t> basis(m);
  std::vector<bool> alive(m, true);
  for (std::size_t i = 0, s = n, a = art0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = rows[i].a[j];
    t[i][rhs] = rows[i].b;
    if (rows[i].sense == '<') {
      t[i][s] = 1.0;
      basis[i] = s++;
    } else {
      if (rows[i].sense == '>') t[i][s++] = -1.0;
      t[i][a] = 1.0;
      basis[i] = a++;
    }
  }

  auto pivot = [&](std::size_t r, std::size_t col) {
    const double pv = t[r][col];
    for (double& v : t[r]) v /= pv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == r || t[i][col] == 0.0) continue;
      const double f = t[i][col];
      for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[r][j];
    }
    basis[r] = col;
  };

  auto run = [&](std::size_t allowed) -> LpStatus {
    for (;;) {
      std::size_t enter = allowed;
      for (std::size_t j = 0; j < allowed; ++j)
        if (t[m][j] < -eps) {
          enter = j;
          break;
        }
      if (enter == allowed) return LpStatus::optimal;
      std::size_t leave = m;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        if (!alive[i] || t[i][enter] <= eps) continue;
        const double ratio = t[i][rhs] / t[i][enter];
        if (ratio < best - eps || (ratio <= best + eps && leave < m && basis[i] < basis[leave])) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
      if (leave == m) return LpStatus::unbounded;
      pivot(leave, enter);
    }
  };

  // phase 1: minimise the sum of artificials
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < art0) continue;
    for (std::size_t j = 0; j <= cols; ++j)
      if (j < art0 || j == rhs) t[m][j] -= t[i][j];
  }
  run(cols);
  if (-t[m][rhs] > 1e-9) return {LpStatus::infeasible, 0.0, {}};
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < art0) continue;
    std::size_t col = art0;
    for (std::size_t j = 0; j < art0; ++j)
      if (std::abs(t[i][j]) > 1e-9) {
        col = j;
        break;
      }
    if (col < art0) pivot(i, col);
    else alive[i] = false;  // redundant row
  }

  // phase 2
  std::fill(t[m].begin(), t[m].end(), 0.0);
  for (std::size_t j = 0; j < n; ++j) t[m][j] = c[j];
  for (std::size_t i = 0; i < m; ++i) {
    if (!alive[i] || basis[i] >= n) continue;
    const double cb = c[basis[i]];
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j <= cols; ++j) t[m][j] -= cb * t[i][j];
  }
  for (std::size_t i = 0; i < m; ++i)
    if (!alive[i]) std::fill(t[i].begin(), t[i].end(), 0.0);
  if (run(art0) == LpStatus::unbounded) return {LpStatus::unbounded, 0.0, {}};

  LpSolution sol{LpStatus::optimal, -t[m][rhs], std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < m; ++i)
    if (alive[i] && basis[i] < n) sol.x[basis[i]] = t[i][rhs];
  return sol;
}

// lo * m(F) <= m(F and T) <= hi * m(F), one row per finite side.
inline std::vector<LpRow> constraint_rows(const OracleProblem& pb) {
  const std::size_t atoms = std::size_t{1} << pb.class_count;
  std::vector<LpRow> rows;
  for (const auto& c : pb.constraints) {
    const Event both = c.from & c.to;
    if (c.value.lo > 0.0) {
      LpRow r{std::vector<double>(atoms), '>', 0.0};
      for (std::size_t i = 0; i < atoms; ++i) r.a[i] = mass_coeff(both, i) - c.value.lo * mass_coeff(c.from, i);
      rows.push_back(std::move(r));
    }
    if (c.value.hi < 1.0) {
      LpRow r{std::vector<double>(atoms), '<', 0.0};
      for (std::size_t i = 0; i < atoms; ++i) r.a[i] = mass_coeff(both, i) - c.value.hi * mass_coeff(c.from, i);
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

inline LpRow mass_row(Event e, std::size_t atoms) {
  LpRow r{std::vector<double>(atoms), '=', 1.0};
  for (std::size_t i = 0; i < atoms; ++i) r.a[i] = mass_coeff(e, i);
  return r;
}

}  // namespace detail

// Linear-fractional optimisation by normalising the conditioning mass:
// min/max m(F and T) subject to the homogeneous constraints and m(F) = 1.
// Exact up to pivoting round-off (~1e-9); `resolution` is not needed here.
inline OracleResult solve(const OracleProblem& pb, double resolution = 1e-6) {
  (void)resolution;
  detail::validate(pb);
  const std::size_t atoms = std::size_t{1} << pb.class_count;
  const auto base = detail::constraint_rows(pb);

  auto feasible = base;
  feasible.push_back(detail::mass_row(all_atoms(pb.class_count), atoms));
  if (detail::simplex(feasible, std::vector<double>(atoms, 0.0)).status != detail::LpStatus::optimal)
    return {Outcome::inconsistent, ProbInterval::unit()};

  auto rows = base;
  rows.push_back(detail::mass_row(pb.target_from, atoms));
  std::vector<double> c(atoms);
  for (std::size_t i = 0; i < atoms; ++i) c[i] = detail::mass_coeff(pb.target_from & pb.target_to, i);
  const auto lo = detail::simplex(rows, c);
  if (lo.status != detail::LpStatus::optimal) return {Outcome::ok, ProbInterval::unit()};  // target class is null
  for (double& v : c) v = -v;
  const auto hi = detail::simplex(rows, c);
  const double a = std::clamp(lo.value, 0.0, 1.0) + 0.0;  // no -0
  const double b = std::clamp(-hi.value, 0.0, 1.0);
  return {Outcome::ok, ProbInterval::closed(std::min(a, b), b)};
}

namespace detail {

// The cone { m >= 0, g.m >= 0, e.m = 0 } cut by one normalising
// hyperplane w.m = 1, explored by projected random line searches.
class RandomSearch {
 public:
  RandomSearch(const OracleProblem& pb, std::uint64_t seed) : n_(std::size_t{1} << pb.class_count), rng_(seed) {
    for (const auto& c : pb.constraints) {
      const Event both = c.from & c.to;
      auto row = [&](double p) {
        std::vector<double> g(n_);
        for (std::size_t i = 0; i < n_; ++i) g[i] = mass_coeff(both, i) - p * mass_coeff(c.from, i);
        return g;
      };
      if (c.value.hi - c.value.lo <= 1e-12) {
        eq_.push_back(row(c.value.lo));
      } else {
        if (c.value.lo > 0.0) ge_.push_back(row(c.value.lo));
        if (c.value.hi < 1.0) {
          auto g = row(c.value.hi);
          for (double& v : g) v = -v;
          ge_.push_back(std::move(g));
        }
      }
    }
    num_.resize(n_);
    den_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      num_[i] = mass_coeff(pb.target_from & pb.target_to, i);
      den_[i] = mass_coeff(pb.target_from, i);
    }
  }

  const std::vector<double>& target_mass() const { return den_; }
  std::vector<double> total_mass() const { return std::vector<double>(n_, 1.0); }

  // A point within 1e-12 of the region with w.m = 1, by alternating
  // projections from a random start.
  std::optional<std::vector<double>> feasible_point(const std::vector<double>& w, int tries = 4) {
    std::exponential_distribution<double> ex(1.0);
    for (int t = 0; t < tries; ++t) {
      std::vector<double> m(n_);
      for (std::size_t i = 0; i < n_; ++i) m[i] = ex(rng_);
      for (int sweep = 0; sweep < 20000; ++sweep) {
        for (const auto& g : ge_) {
          const double v = dot(g, m);
          if (v < 0.0) axpy(-v / dot(g, g), g, m);
        }
        for (const auto& g : eq_) axpy(-dot(g, m) / dot(g, g), g, m);
        axpy((1.0 - dot(w, m)) / dot(w, w), w, m);
        for (double& v : m) v = std::max(v, 0.0);
        if (violation(m, w) < 1e-12) return m;
      }
    }
    return std::nullopt;
  }

  // Extreme of m(F and T) with m(F) = 1 reached from m; `sign` +1 maximises.
  double optimise(std::vector<double> m, int sign, double resolution) {
    std::vector<double> c = num_;
    for (double& v : c) v *= sign;
    double best = dot(c, m);
    int stale = 0;
    for (int it = 0; it < 40000 && stale < 600; ++it) {
      std::vector<double> d(n_);
      if (it % 2 == 0) {
        for (std::size_t i = 0; i < n_; ++i) d[i] = c[i] + 0.3 * normal_(rng_);
      } else {
        for (double& v : d) v = normal_(rng_);
      }
      project_direction(m, d);
      if (norm(d) > 1e-12) line_move(m, d, c);
      const double v = dot(c, m);
      if (v > best + resolution * 1e-3) stale = 0;
      else ++stale;
      best = std::max(best, v);
    }
    return sign * best;
  }

 private:
  static double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
  }
  static double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }
  static void axpy(double s, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += s * x[i];
  }

  double violation(const std::vector<double>& m, const std::vector<double>& w) const {
    double v = std::abs(dot(w, m) - 1.0);
    for (double x : m) v = std::max(v, -x);
    for (const auto& g : ge_) v = std::max(v, -dot(g, m));
    for (const auto& g : eq_) v = std::max(v, std::abs(dot(g, m)));
    return v;
  }

  // Removes from d the components along the equality rows, the target
  // mass, and a random subset of the active inequality rows.
  void project_direction(const std::vector<double>& m, std::vector<double>& d) {
    std::vector<std::vector<double>> span{den_};
    for (const auto& g : eq_) span.push_back(g);
    std::bernoulli_distribution keep(0.7);
    for (std::size_t i = 0; i < n_; ++i) {
      if (m[i] < 1e-12 && keep(rng_)) {
        std::vector<double> e(n_, 0.0);
        e[i] = 1.0;
        span.push_back(std::move(e));
      }
    }
    for (const auto& g : ge_)
      if (dot(g, m) < 1e-12 && keep(rng_)) span.push_back(g);
    std::vector<std::vector<double>> basis;
    for (auto v : span) {
      for (const auto& q : basis) axpy(-dot(q, v), q, v);
      const double len = norm(v);
      if (len > 1e-10) {
        for (double& x : v) x /= len;
        basis.push_back(std::move(v));
      }
    }
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) axpy(-dot(q, d), q, d);
  }

  // Moves m along d as far as feasibility allows in the direction that
  // increases c.m. No constraint value is allowed to get worse than it is.
  void line_move(std::vector<double>& m, std::vector<double> d, const std::vector<double>& c) {
    const double slope = dot(c, d);
    if (std::abs(slope) < 1e-12) return;
    if (slope < 0.0)
      for (double& v : d) v = -v;
    for (const auto& g : eq_)
      if (std::abs(dot(g, d)) > 1e-10) return;
    double t_max = std::numeric_limits<double>::infinity();
    auto limit = [&](double value, double rate) {
      if (rate >= -1e-15) return;
      t_max = std::min(t_max, std::max(value, 0.0) / -rate);
    };
    for (std::size_t i = 0; i < n_; ++i) limit(m[i], d[i]);
    for (const auto& g : ge_) limit(dot(g, m), dot(g, d));
    if (!std::isfinite(t_max) || t_max <= 0.0) return;
    axpy(t_max, d, m);
    for (double& v : m) v = std::max(v, 0.0);
  }

  std::size_t n_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::vector<std::vector<double>> ge_;
  std::vector<std::vector<double>> eq_;
  std::vector<double> num_, den_;
};

}  // namespace detail

// Randomised fallback independent of the simplex. Alternating projections
// find a distribution (consistency) and then a point with m(F) = 1; seeded
// restarts of projected line searches push m(F and T) to each extreme.
// Every value returned is attained, so the range lies inside the exact one
// up to the feasibility tolerance.
inline OracleResult solve_randomized(const OracleProblem& pb, std::uint64_t seed = 1, double resolution = 1e-2,
                                     int restarts = 6) {
  detail::validate(pb);
  detail::RandomSearch search(pb, seed);
  if (!search.feasible_point(search.total_mass())) return {Outcome::inconsistent, ProbInterval::unit()};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    auto m = search.feasible_point(search.target_mass(), 1);
    if (!m) continue;
    lo = std::min(lo, search.optimise(*m, -1, resolution));
    hi = std::max(hi, search.optimise(*m, +1, resolution));
  }
  if (!(lo <= hi)) return {Outcome::ok, ProbInterval::unit()};  // target class never gets mass
  return {Outcome::ok, ProbInterval::closed(std::clamp(lo, 0.0, 1.0), std::clamp(hi, 0.0, 1.0))};
}

}  // namespace qprob::oracle

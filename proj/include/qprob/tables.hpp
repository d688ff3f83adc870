#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "qprob/algebra.hpp"
#include "qprob/bounds.hpp"
#include "qprob/errors.hpp"
#include "qprob/partition.hpp"

namespace qprob {

// Q1..Q4 in the order P(B|A), P(A|B), P(B|C), P(C|B).
using LabelTuple = std::array<QLabel, 4>;
using RangeTuple = std::array<QRange, 4>;

struct TableOptions {
  UpperForm form = UpperForm::sound;
  EndpointPolicy policy = EndpointPolicy::closed;
  unsigned workers = 1;
};

inline SyllogismInput tuple_input(const Partition& p, const RangeTuple& t) {
  return {p.semantics(t[0]), p.semantics(t[1]), p.semantics(t[3]), p.semantics(t[2])};
}

// The qualitative syllogism Q5 over every elementary 4-tuple.
class SyllogismTable {
 public:
  SyllogismTable(Partition partition, std::vector<QRange> entries)
      : partition_(std::move(partition)), entries_(std::move(entries)) {
    const std::size_t n = partition_.size();
    if (entries_.size() != n * n * n * n) throw Error("syllogism table has wrong number of entries");
  }

  const Partition& partition() const { return partition_; }
  std::size_t size() const { return entries_.size(); }
  std::span<const QRange> entries() const { return entries_; }

  std::size_t index(const LabelTuple& t) const {
    const std::size_t n = partition_.size();
    return ((t[0].index * n + t[1].index) * n + t[2].index) * n + t[3].index;
  }

  LabelTuple tuple(std::size_t i) const {
    const std::size_t n = partition_.size();
    LabelTuple t;
    for (int k = 3; k >= 0; --k) {
      t[k] = QLabel(i % n);
      i /= n;
    }
    return t;
  }

  // P(C|A).
  QRange q5(const LabelTuple& t) const { return entries_.at(index(t)); }

  // P(A|C): the same pattern with A and C exchanged.
  QRange q6(const LabelTuple& t) const { return q5({t[2], t[3], t[0], t[1]}); }

  friend bool operator==(const SyllogismTable&, const SyllogismTable&) = default;

 private:
  Partition partition_;
  std::vector<QRange> entries_;
};

// Numeric bounds on the hull semantics of each tuple, approximated once at
// the end. Work is split into contiguous index blocks, so the result does
// not depend on the worker count.
inline SyllogismTable gen_table(const Partition& p, const TableOptions& opt = {}) {
  const std::size_t n = p.size();
  const std::size_t total = n * n * n * n;
  std::vector<QRange> entries(total);
  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      std::size_t rest = i;
      RangeTuple t;
      for (int k = 3; k >= 0; --k) {
        t[k] = QRange(QLabel(rest % n));
        rest /= n;
      }
      entries[i] = p.approximate(syllogism_interval(tuple_input(p, t), opt.form, opt.policy));
    }
  };
  const unsigned workers = std::max(1u, opt.workers);
  if (workers == 1) {
    fill(0, total);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t block = (total + workers - 1) / workers;
    for (std::size_t begin = 0; begin < total; begin += block)
      pool.emplace_back(fill, begin, std::min(total, begin + block));
  }
  return SyllogismTable(p, std::move(entries));
}

// Q5 extended to U x U x U x U: hull of the table over every elementary
// tuple inside the argument ranges.
inline QRange eval_extended(const SyllogismTable& table, const RangeTuple& r) {
  std::optional<QRange> out;
  LabelTuple t;
  for (std::size_t a = r[0].low.index; a <= r[0].high.index; ++a) {
    t[0] = QLabel(a);
    for (std::size_t b = r[1].low.index; b <= r[1].high.index; ++b) {
      t[1] = QLabel(b);
      for (std::size_t c = r[2].low.index; c <= r[2].high.index; ++c) {
        t[2] = QLabel(c);
        for (std::size_t d = r[3].low.index; d <= r[3].high.index; ++d) {
          t[3] = QLabel(d);
          const QRange q = table.q5(t);
          out = out ? hull(*out, q) : q;
        }
      }
    }
  }
  return out.value_or(table.partition().whole());
}

// Rows of the compacted table: every tuple mapping to `output`, merged into
// boxes of adjacent labels.
struct CompactGroup {
  QRange output;
  std::vector<RangeTuple> patterns;
};

namespace detail {

// One merge pass along coordinate `d`: boxes equal elsewhere and adjacent
// along d are fused.
inline bool merge_along(std::vector<RangeTuple>& boxes, int d) {
  auto key = [d](const RangeTuple& b) {
    std::array<int, 8> k{};
    int j = 0;
    for (int c = 0; c < 4; ++c) {
      if (c == d) continue;
      k[j++] = b[c].low.index;
      k[j++] = b[c].high.index;
    }
    k[6] = b[d].low.index;
    k[7] = b[d].high.index;
    return k;
  };
  std::sort(boxes.begin(), boxes.end(), [&](const RangeTuple& a, const RangeTuple& b) { return key(a) < key(b); });
  std::vector<RangeTuple> out;
  bool merged = false;
  for (const auto& b : boxes) {
    if (!out.empty()) {
      RangeTuple& last = out.back();
      bool same = true;
      for (int c = 0; c < 4 && same; ++c)
        if (c != d && !(last[c] == b[c])) same = false;
      if (same && last[d].high.index + 1 == b[d].low.index) {
        last[d].high = b[d].high;
        merged = true;
        continue;
      }
    }
    out.push_back(b);
  }
  boxes = std::move(out);
  return merged;
}

}  // namespace detail

// Groups ordered by output: lower label ascending, then upper descending.
inline std::vector<CompactGroup> compact(const SyllogismTable& table) {
  auto cmp = [](QRange a, QRange b) {
    return std::make_tuple(a.low, b.high) < std::make_tuple(b.low, a.high);
  };
  std::map<QRange, std::vector<RangeTuple>, decltype(cmp)> groups(cmp);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const LabelTuple t = table.tuple(i);
    groups[table.entries()[i]].push_back({QRange(t[0]), QRange(t[1]), QRange(t[2]), QRange(t[3])});
  }
  std::vector<CompactGroup> out;
  for (auto& [output, boxes] : groups) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int d = 3; d >= 0; --d) changed = detail::merge_along(boxes, d) || changed;
    }
    std::sort(boxes.begin(), boxes.end(), [](const RangeTuple& a, const RangeTuple& b) {
      for (int c = 0; c < 4; ++c) {
        if (a[c].low != b[c].low) return a[c].low < b[c].low;
        if (a[c].high != b[c].high) return a[c].high < b[c].high;
      }
      return false;
    });
    out.push_back({output, std::move(boxes)});
  }
  return out;
}

// q1,q2,q3,q4,q5_low,q5_high in lexicographic tuple order.
inline void write_table_csv(std::ostream& os, const SyllogismTable& table) {
  const Partition& p = table.partition();
  os << "q1,q2,q3,q4,q5_low,q5_high\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    const LabelTuple t = table.tuple(i);
    const QRange q = table.entries()[i];
    os << p.name(t[0]) << ',' << p.name(t[1]) << ',' << p.name(t[2]) << ',' << p.name(t[3]) << ','
       << p.name(q.low) << ',' << p.name(q.high) << '\n';
  }
}

inline void write_compact_markdown(std::ostream& os, const Partition& p, std::span<const CompactGroup> groups) {
  os << "| P(B|A) | P(A|B) | P(B|C) | P(C|B) | P(C|A) |\n";
  os << "|---|---|---|---|---|\n";
  for (const auto& g : groups) {
    bool first = true;
    for (const auto& box : g.patterns) {
      os << "| " << p.format(box[0]) << " | " << p.format(box[1]) << " | " << p.format(box[2]) << " | "
         << p.format(box[3]) << " | " << (first ? p.format(g.output) : std::string()) << " |\n";
      first = false;
    }
  }
}

// Result of regenerating the 5-label table over a range of thresholds.
struct RobustnessReport {
  double reference_alpha = 0.0;
  std::vector<double> alpha_values;
  std::vector<std::vector<LabelTuple>> changed_cells;  // per alpha, vs. the reference table
  std::vector<LabelTuple> distinct_changed;            // union over the sweep, sorted
  std::vector<QRange> half_times_half;                 // qmul(half, half) per alpha
  QRange reference_half_times_half;

  std::size_t changed_count(std::size_t i) const { return changed_cells.at(i).size(); }
  bool product_flip(std::size_t i) const { return !(half_times_half.at(i) == reference_half_times_half); }
};

// Inclusive grid from, from+step, ..., to.
inline std::vector<double> alpha_grid(double from, double to, double step) {
  if (!(step > 0.0)) throw Error("alpha step must be positive");
  if (!(from > 0.0 && from <= to && to < 0.5)) throw Error("alpha range must satisfy 0 < from <= to < 0.5");
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) out.push_back(std::round((from + i * step) * 1e12) / 1e12);
  return out;
}

inline RobustnessReport robustness_sweep(const std::vector<std::string>& label_names, double from, double to,
                                         double step, double reference_alpha, const TableOptions& opt = {}) {
  if (label_names.size() != 5) throw Error("robustness sweep expects a 5-label scale");
  auto make = [&](double a) { return Partition::build({a, 1.0 - a}, label_names); };
  const Partition ref_p = make(reference_alpha);
  const SyllogismTable ref = gen_table(ref_p, opt);
  const QLabel half(2);

  RobustnessReport rep;
  rep.reference_alpha = reference_alpha;
  rep.reference_half_times_half = qmul(ref_p, half, half);
  std::set<std::size_t> distinct;
  for (double a : alpha_grid(from, to, step)) {
    const Partition p = make(a);
    const SyllogismTable t = gen_table(p, opt);
    std::vector<LabelTuple> changed;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!(t.entries()[i] == ref.entries()[i])) {
        changed.push_back(t.tuple(i));
        distinct.insert(i);
      }
    }
    rep.alpha_values.push_back(a);
    rep.changed_cells.push_back(std::move(changed));
    rep.half_times_half.push_back(qmul(p, half, half));
  }
  for (std::size_t i : distinct) rep.distinct_changed.push_back(ref.tuple(i));
  return rep;
}

// Analytic check of the extreme few/most rows whose output depends on alpha.
struct CoreRowCheck {
  std::string name;                 // e.g. "V1 V1 V0 V0"
  std::array<ProbInterval, 4> inputs;  // P(B|A), P(A|B), P(B|C), P(C|B)
  bool checks_upper = true;         // V_0 rows bound from above, V_1 rows from below
  double computed = 0.0;
  double expected = 0.0;
  bool ok = false;
};

struct InequalityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

struct CoreCheckReport {
  double alpha = 0.0;
  std::vector<CoreRowCheck> rows;
  std::vector<InequalityCheck> inequalities;

  bool ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.ok; }) &&
           std::all_of(inequalities.begin(), inequalities.end(), [](const auto& r) { return r.ok; });
  }
};

// The five inequalities that keep the unstable rows inside their labels.
inline std::vector<InequalityCheck> core_inequalities(double a, double tol = 1e-12) {
  const double r = a * a / ((1 - a) * (1 - a));
  const double q = a / ((1 - a) * (1 - a) + a * a);
  std::vector<InequalityCheck> out = {
      {"a^2/(1-a)^2 <= a", r, a},
      {"a + a^2/(1-a)^2 <= 1-a", a + r, 1 - a},
      {"2a <= 1-a", 2 * a, 1 - a},
      {"a <= 1-2a", a, 1 - 2 * a},
      {"a/((1-a)^2+a^2) <= 1-a", q, 1 - a},
  };
  for (auto& c : out) c.ok = c.lhs <= c.rhs + tol;
  return out;
}

inline CoreCheckReport robust_core_check(double alpha, double tol = 1e-9) {
  if (!(alpha > 0.0 && alpha <= 1.0 / 3.0 + 1e-12)) throw Error("robust core check needs 0 < alpha <= 1/3");
  const ProbInterval v0 = ProbInterval::closed(0.0, alpha);
  const ProbInterval v1 = ProbInterval::closed(1.0 - alpha, 1.0);
  const double a = alpha;
  struct Row {
    const char* name;
    ProbInterval q1, q2, q3, q4;
    bool upper;
    double expected;
  };
  const Row rows[] = {
      {"V0 V1 V1 V0", v0, v1, v1, v0, true, a * a / ((1 - a) * (1 - a))},
      {"V0 V1 V1 V1", v0, v1, v1, v1, true, a * a / ((1 - a) * (1 - a)) + a},
      {"V1 V1 V0 V0", v1, v1, v0, v0, true, 2 * a},
      {"V1 V1 V0 V1", v1, v1, v0, v1, false, 1 - 2 * a},
      {"V1 V1 V1 V0", v1, v1, v1, v0, true, a / ((1 - a) * (1 - a) + a * a)},
      {"V1 V1 V1 V1", v1, v1, v1, v1, false, 1 - 2 * a},
  };
  CoreCheckReport rep;
  rep.alpha = alpha;
  for (const Row& r : rows) {
    const SyllogismInput in{r.q1, r.q2, r.q4, r.q3};
    CoreRowCheck c;
    c.name = r.name;
    c.inputs = {r.q1, r.q2, r.q3, r.q4};
    c.checks_upper = r.upper;
    c.computed = r.upper ? syllogism_upper(in) : syllogism_lower(in);
    c.expected = r.expected;
    c.ok = std::abs(c.computed - c.expected) <= tol;
    rep.rows.push_back(std::move(c));
  }
  rep.inequalities = core_inequalities(alpha);
  return rep;
}

}  // namespace qprob

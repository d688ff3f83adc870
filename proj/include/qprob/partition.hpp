#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qprob/errors.hpp"
#include "qprob/interval.hpp"

namespace qprob {

// An elementary label, identified by its position in the certainty order
// (0 = none, size()-1 = all).
struct QLabel {
  std::uint8_t index = 0;

  constexpr QLabel() = default;
  constexpr explicit QLabel(std::size_t i) : index(static_cast<std::uint8_t>(i)) {}

  friend constexpr auto operator<=>(QLabel, QLabel) = default;
};

// An element of the universe of description: the contiguous run of
// elementary labels from `low` to `high` inclusive.
struct QRange {
  QLabel low;
  QLabel high;

  constexpr QRange() = default;
  constexpr QRange(QLabel l) : low(l), high(l) {}  // NOLINT: a label is a singleton range
  constexpr QRange(QLabel l, QLabel h) : low(l), high(h) {}

  constexpr bool valid() const { return low <= high; }
  constexpr bool elementary() const { return low == high; }
  constexpr bool contains(QLabel l) const { return low <= l && l <= high; }
  constexpr bool contains(QRange r) const { return low <= r.low && r.high <= high; }

  friend constexpr bool operator==(QRange, QRange) = default;
};

// Certainty ordering extended componentwise to U.
constexpr bool certainty_leq(QRange a, QRange b) { return a.low <= b.low && a.high <= b.high; }

// Least element of U containing both runs.
constexpr QRange hull(QRange a, QRange b) {
  return {std::min(a.low, b.low), std::max(a.high, b.high)};
}

// Intersection of the two runs; nullopt when they share no label.
constexpr std::optional<QRange> meet(QRange a, QRange b) {
  QRange r{std::max(a.low, b.low), std::min(a.high, b.high)};
  if (!r.valid()) return std::nullopt;
  return r;
}

// Number of elementary labels spanned; 1 is most specific.
constexpr int specificity_level(QRange q) { return q.high.index - q.low.index + 1; }

// A symmetric linguistic scale over [0,1].
//
// n thresholds t_1 < ... < t_n give n+3 labels covering
// {0}, (0,t_1], [t_1,t_2], ..., [t_n,1), {1}.
class Partition {
 public:
  static Partition build(std::vector<double> thresholds, std::vector<std::string> labels) {
    if (thresholds.empty())
      throw PartitionError(PartitionError::Kind::label_count, "partition needs at least one threshold");
    for (double t : thresholds) {
      if (!(t > 0.0 && t < 1.0))
        throw PartitionError(PartitionError::Kind::out_of_range,
                             "threshold " + std::to_string(t) + " is outside (0,1)");
    }
    for (std::size_t i = 1; i < thresholds.size(); ++i) {
      if (!(thresholds[i] > thresholds[i - 1]))
        throw PartitionError(PartitionError::Kind::non_increasing,
                             "thresholds must be strictly increasing");
    }
    for (double t : thresholds) {
      const double mirror = 1.0 - t;
      const bool found = std::any_of(thresholds.begin(), thresholds.end(),
                                     [&](double u) { return std::abs(u - mirror) <= kTol; });
      if (!found)
        throw PartitionError(PartitionError::Kind::asymmetric,
                             "threshold " + std::to_string(t) + " has no mirror " + std::to_string(mirror));
    }
    if (labels.size() != thresholds.size() + 3)
      throw PartitionError(PartitionError::Kind::label_count,
                           "expected " + std::to_string(thresholds.size() + 3) + " labels, got " +
                               std::to_string(labels.size()));
    std::set<std::string> seen;
    for (const auto& l : labels) {
      if (l.empty() || !seen.insert(l).second)
        throw PartitionError(PartitionError::Kind::duplicate_label, "duplicate or empty label '" + l + "'");
    }
    // mirror pairs are compared with kTol; snap them so 1 - t is exact
    for (std::size_t i = 0, j = thresholds.size() - 1; i < j; ++i, --j) thresholds[j] = 1.0 - thresholds[i];
    if (thresholds.size() % 2 == 1) thresholds[thresholds.size() / 2] = 0.5;
    return Partition(std::move(thresholds), std::move(labels));
  }

  // none, al-none, few, half, most, al-all, all with thresholds 0.2/0.4/0.6/0.8.
  static Partition seven_label() {
    return build({0.2, 0.4, 0.6, 0.8}, {"none", "al-none", "few", "half", "most", "al-all", "all"});
  }

  // none, al-none, v-few, few, half, most, v-many, al-all, all.
  static Partition nine_label() {
    return build({0.1, 0.2, 0.4, 0.6, 0.8, 0.9},
                 {"none", "al-none", "v-few", "few", "half", "most", "v-many", "al-all", "all"});
  }

  // none, few, half, most, all with few = (0, alpha].
  static Partition five_label(double alpha) {
    return build({alpha, 1.0 - alpha}, {"none", "few", "half", "most", "all"});
  }

  std::size_t size() const { return labels_.size(); }
  std::span<const double> thresholds() const { return thresholds_; }
  std::span<const std::string> labels() const { return labels_; }

  QLabel none() const { return QLabel(0); }
  QLabel all() const { return QLabel(size() - 1); }
  QRange whole() const { return {none(), all()}; }

  bool valid(QRange q) const { return q.valid() && q.high.index < size(); }

  const std::string& name(QLabel l) const { return labels_.at(l.index); }

  std::optional<QLabel> find(std::string_view name) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == name) return QLabel(i);
    return std::nullopt;
  }

  QLabel label(std::string_view name) const {
    if (auto l = find(name)) return *l;
    throw Error("unknown label '" + std::string(name) + "'");
  }

  QRange range(std::string_view low, std::string_view high) const { return {label(low), label(high)}; }

  // "few" or "[few, all]".
  std::string format(QRange q) const {
    if (q.elementary()) return name(q.low);
    return "[" + name(q.low) + ", " + name(q.high) + "]";
  }

  ProbInterval semantics(QLabel l) const {
    const std::size_t n = thresholds_.size();
    const std::size_t k = l.index;
    if (k == 0) return ProbInterval::point(0.0);
    if (k == n + 2) return ProbInterval::point(1.0);
    ProbInterval r;
    r.lo = k == 1 ? 0.0 : thresholds_[k - 2];
    r.hi = k == n + 1 ? 1.0 : thresholds_[k - 1];
    r.lo_open = k == 1;
    r.hi_open = k == n + 1;
    return r;
  }

  // Convex hull of the member labels' intervals.
  ProbInterval semantics(QRange q) const {
    const ProbInterval a = semantics(q.low);
    const ProbInterval b = semantics(q.high);
    return {a.lo, b.hi, a.lo_open, b.hi_open};
  }

  // Most specific element of U whose semantics contains `i`.
  //
  // A closed bound at 0 (1) pulls in none (all); an open one does not. A
  // bound sitting on a shared threshold goes to the inner adjacent label.
  QRange approximate(const ProbInterval& i) const {
    QLabel low = lower_label(i.lo, i.lo_open);
    QLabel high = upper_label(i.hi, i.hi_open);
    if (low > high) low = high;  // a point exactly on a threshold
    return {low, high};
  }

  QRange antonym(QRange q) const {
    const std::size_t top = size() - 1;
    return {QLabel(top - q.high.index), QLabel(top - q.low.index)};
  }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  Partition(std::vector<double> thresholds, std::vector<std::string> labels)
      : thresholds_(std::move(thresholds)), labels_(std::move(labels)) {}

  // Interior label k (1..n+1) covers [t_{k-1}, t_k] with t_0 = 0, t_{n+1} = 1.
  double edge(std::size_t k) const {
    if (k == 0) return 0.0;
    if (k > thresholds_.size()) return 1.0;
    return thresholds_[k - 1];
  }

  QLabel lower_label(double v, bool open) const {
    const std::size_t n = thresholds_.size();
    if (v <= kTol) return QLabel(open ? 1 : 0);
    if (v >= 1.0 - kTol) return QLabel(n + 2);
    for (std::size_t k = 1; k <= n; ++k) {
      if (v < edge(k) - kTol) return QLabel(k);
      if (std::abs(v - edge(k)) <= kTol) return QLabel(k + 1);
    }
    return QLabel(n + 1);
  }

  QLabel upper_label(double v, bool open) const {
    const std::size_t n = thresholds_.size();
    if (v <= kTol) return QLabel(0);
    if (v >= 1.0 - kTol) return QLabel(open ? n + 1 : n + 2);
    for (std::size_t k = 1; k <= n; ++k) {
      if (v <= edge(k) + kTol) return QLabel(k);
    }
    return QLabel(n + 1);
  }

  std::vector<double> thresholds_;
  std::vector<std::string> labels_;
};

}  // namespace qprob

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qprob/algebra.hpp"
#include "qprob/partition.hpp"

using namespace qprob;

namespace {

const Partition p7 = Partition::seven_label();
const Partition p5 = Partition::five_label(0.3);

std::vector<QRange> universe(const Partition& p) {
  std::vector<QRange> u;
  for (std::size_t a = 0; a < p.size(); ++a)
    for (std::size_t b = a; b < p.size(); ++b) u.push_back({QLabel(a), QLabel(b)});
  return u;
}

// Set inclusion honouring open ends.
bool subset(const ProbInterval& inner, const ProbInterval& outer) {
  const bool lo_ok = inner.lo > outer.lo + 1e-12 ||
                     (std::abs(inner.lo - outer.lo) <= 1e-12 && (!outer.lo_open || inner.lo_open));
  const bool hi_ok = inner.hi < outer.hi - 1e-12 ||
                     (std::abs(inner.hi - outer.hi) <= 1e-12 && (!outer.hi_open || inner.hi_open));
  return lo_ok && hi_ok;
}

}  // namespace

TEST(Partition, BuildsTheStandardScales) {
  EXPECT_EQ(p7.size(), 7u);
  EXPECT_EQ(p5.size(), 5u);
  EXPECT_EQ(Partition::nine_label().size(), 9u);
  EXPECT_EQ(p7.name(p7.none()), "none");
  EXPECT_EQ(p7.name(p7.all()), "all");
}

TEST(Partition, RejectsBadInputWithDistinctKinds) {
  auto kind = [](std::vector<double> t, std::vector<std::string> l) {
    try {
      Partition::build(std::move(t), std::move(l));
    } catch (const PartitionError& e) {
      return e.kind();
    }
    ADD_FAILURE() << "no error";
    return PartitionError::Kind::label_count;
  };
  using K = PartitionError::Kind;
  EXPECT_EQ(kind({0.4, 0.3}, {"a", "b", "c", "d", "e"}), K::non_increasing);
  EXPECT_EQ(kind({0.3, 0.6}, {"a", "b", "c", "d", "e"}), K::asymmetric);
  EXPECT_EQ(kind({0.3, 0.7}, {"a", "b", "c", "d", "a"}), K::duplicate_label);
  EXPECT_EQ(kind({0.3, 0.7}, {"a", "b", "c", "d"}), K::label_count);
  EXPECT_EQ(kind({0.0, 1.0}, {"a", "b", "c", "d", "e"}), K::out_of_range);
}

TEST(Partition, Semantics) {
  const auto fm = p7.semantics(p7.range("few", "most"));
  EXPECT_DOUBLE_EQ(fm.lo, 0.2);
  EXPECT_DOUBLE_EQ(fm.hi, 0.8);
  EXPECT_EQ(p7.semantics(p7.all()), ProbInterval::point(1.0));
  const auto ha = p7.semantics(p7.range("half", "all"));
  EXPECT_DOUBLE_EQ(ha.lo, 0.4);
  EXPECT_DOUBLE_EQ(ha.hi, 1.0);
  const auto aa = p7.semantics(p7.label("al-all"));
  EXPECT_TRUE(aa.hi_open);
  EXPECT_DOUBLE_EQ(aa.closure().hi, 1.0);
}

TEST(Partition, Approximate) {
  EXPECT_EQ(p7.approximate(ProbInterval::closed(0.45, 1.0)), p7.range("half", "all"));
  EXPECT_EQ(p7.approximate(ProbInterval::point(0.3)), QRange(p7.label("few")));
  EXPECT_EQ(p7.approximate(ProbInterval::closed(0.0, 0.19)), p7.range("none", "al-none"));
  // bounds on a threshold go inward
  EXPECT_EQ(p7.approximate(ProbInterval::closed(0.4, 0.6)), QRange(p7.label("half")));
  EXPECT_EQ(p7.approximate(ProbInterval::closed(0.3, 1.0)), p7.range("few", "all"));
}

TEST(Partition, Antonym) {
  EXPECT_EQ(p7.antonym(p7.label("al-none")), QRange(p7.label("al-all")));
  EXPECT_EQ(p7.antonym(p7.label("half")), QRange(p7.label("half")));
  EXPECT_EQ(p7.antonym(p7.range("none", "few")), p7.range("most", "all"));
  for (const auto& p : {p5, p7, Partition::nine_label()})
    for (QRange q : universe(p)) {
      EXPECT_EQ(p.antonym(p.antonym(q)), q);
      const auto s = p.semantics(q);
      const auto a = p.semantics(p.antonym(q));
      EXPECT_NEAR(a.lo, 1.0 - s.hi, 1e-12);
      EXPECT_NEAR(a.hi, 1.0 - s.lo, 1e-12);
    }
}

TEST(Orderings, CertaintyAndSpecificity) {
  EXPECT_TRUE(certainty_leq(p7.label("few"), p7.label("half")));
  EXPECT_TRUE(certainty_leq(p7.range("few", "half"), p7.label("most")));
  EXPECT_FALSE(certainty_leq(p7.range("few", "all"), p7.label("most")));
  EXPECT_FALSE(certainty_leq(p7.range("few", "all"), p7.range("most", "al-all")));
  EXPECT_EQ(specificity_level(p7.label("few")), 1);
  EXPECT_EQ(specificity_level(p7.whole()), 7);
  EXPECT_EQ(specificity_level(p7.range("few", "most")), 3);
  EXPECT_EQ(specificity_level(p5.range("few", "most")), 3);
}

TEST(Orderings, CertaintyIsAPartialOrderAndFollowsMidpoints) {
  const auto u = universe(p7);
  for (QRange a : u) {
    EXPECT_TRUE(certainty_leq(a, a));
    for (QRange b : u) {
      if (certainty_leq(a, b) && certainty_leq(b, a)) {
        EXPECT_EQ(a, b);
      }
      for (QRange c : u)
        if (certainty_leq(a, b) && certainty_leq(b, c)) {
          EXPECT_TRUE(certainty_leq(a, c));
        }
    }
  }
  for (std::size_t i = 0; i + 1 < p7.size(); ++i) {
    const auto s = p7.semantics(QLabel(i));
    const auto t = p7.semantics(QLabel(i + 1));
    EXPECT_LT(s.lo + s.hi, t.lo + t.hi);
  }
}

TEST(Lattice, HullAndMeet) {
  EXPECT_EQ(hull(p7.label("al-all"), p7.range("half", "most")), p7.range("half", "al-all"));
  EXPECT_FALSE(meet(p7.label("few"), p7.label("most")).has_value());
  const auto u = universe(p5);
  for (QRange a : u)
    for (QRange b : u) {
      EXPECT_EQ(hull(a, a), a);
      EXPECT_EQ(hull(a, b), hull(b, a));
      EXPECT_EQ(meet(a, b), meet(b, a));
      EXPECT_EQ(meet(a, hull(a, b)), a);  // absorption
      if (auto m = meet(a, b)) {
        EXPECT_EQ(hull(a, *m), a);
      }
      for (QRange c : u) {
        EXPECT_EQ(hull(hull(a, b), c), hull(a, hull(b, c)));
        auto ab = meet(a, b);
        auto bc = meet(b, c);
        auto left = ab ? meet(*ab, c) : std::nullopt;
        auto right = bc ? meet(a, *bc) : std::nullopt;
        EXPECT_EQ(left, right);
      }
    }
}

TEST(Galois, ApproximationIsTheLeastContainingRange) {
  for (const auto& p : {p5, p7, Partition::nine_label()}) {
    const auto u = universe(p);
    for (QRange q : u) EXPECT_EQ(p.approximate(p.semantics(q)), q);

    std::vector<double> points{0.0, 1.0, 0.05, 0.5, 0.95, 0.33};
    for (double t : p.thresholds()) points.insert(points.end(), {t, t - 0.01, t + 0.01});
    for (double a : points)
      for (double b : points) {
        if (a > b) continue;
        for (int flags = 0; flags < 4; ++flags) {
          ProbInterval i{a, b, (flags & 1) != 0, (flags & 2) != 0};
          if (a == b && flags) continue;
          const QRange ap = p.approximate(i);
          EXPECT_TRUE(subset(i, p.semantics(ap))) << a << " " << b << " flags " << flags;
          for (QRange q : u)
            if (ap.contains(q) && !(q == ap)) {
              EXPECT_FALSE(subset(i, p.semantics(q)));
            }
        }
      }
  }
}

TEST(Algebra, ProductTableAtPointThree) {
  const auto few = p5.label("few"), half = p5.label("half"), most = p5.label("most");
  EXPECT_EQ(qmul(p5, few, few), QRange(few));
  EXPECT_EQ(qmul(p5, half, half), QRange(few, half));
  EXPECT_EQ(qmul(p5, most, most), QRange(half, most));
  for (QRange q : universe(p5)) {
    EXPECT_EQ(qmul(p5, p5.all(), q), q);
    EXPECT_EQ(qmul(p5, q, p5.none()), QRange(p5.none()));
    for (QRange r : universe(p5)) EXPECT_EQ(qmul(p5, q, r), qmul(p5, r, q));
  }
}

TEST(Algebra, QuotientTableAtPointThree) {
  const auto few = p5.label("few"), half = p5.label("half"), most = p5.label("most");
  EXPECT_EQ(qdiv(p5, few, most), QRange(few, half));
  EXPECT_EQ(qdiv(p5, half, half), QRange(half, p5.all()));
  EXPECT_EQ(qdiv(p5, few, p5.none()), QRange(p5.all()));
}

TEST(Algebra, ProductContainsEveryPointProduct) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& p : {p5, p7}) {
    const auto all = universe(p);
    for (QRange a : all)
      for (QRange b : all) {
        const auto sa = p.semantics(a), sb = p.semantics(b), prod = p.semantics(qmul(p, a, b));
        for (int k = 0; k < 20; ++k) {
          const double x = sa.lo + (sa.hi - sa.lo) * u(rng);
          const double y = sb.lo + (sb.hi - sb.lo) * u(rng);
          EXPECT_TRUE(prod.contains(x * y)) << p.format(a) << " * " << p.format(b);
        }
      }
  }
}

TEST(Algebra, HalfSquaredFlipsAtTheGoldenThreshold) {
  const double d = (3.0 - std::sqrt(5.0)) / 2.0;
  auto half_sq = [](double a) {
    const auto p = Partition::five_label(a);
    return qmul(p, p.label("half"), p.label("half"));
  };
  auto most_sq = [](double a) {
    const auto p = Partition::five_label(a);
    return qmul(p, p.label("most"), p.label("most"));
  };
  const Partition any = Partition::five_label(0.3);
  const QRange few(any.label("few")), few_half(any.label("few"), any.label("half"));
  for (double a : {0.3, 0.35, d - 1e-6}) {
    EXPECT_EQ(half_sq(a), few_half) << a;
    EXPECT_EQ(most_sq(a), QRange(any.label("half"), any.label("most"))) << a;
  }
  for (double a : {d + 1e-6, 0.385, 0.39}) EXPECT_EQ(half_sq(a), few) << a;
}

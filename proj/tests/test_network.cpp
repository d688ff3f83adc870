#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <vector>

#include "qprob/io.hpp"
#include "qprob/network.hpp"
#include "qprob/oracle.hpp"

using namespace qprob;

namespace {

ProbInterval iv(double lo, double hi) { return ProbInterval::closed(lo, hi); }

KnowledgeBase load(const std::string& name, Mode mode) {
  std::ifstream in(std::string(QPROB_DATA) + "/" + name);
  if (!in) throw std::runtime_error("missing data file " + name);
  return build_kb(parse_kb(in), mode);
}

bool same_trace(const std::vector<TraceEntry>& a, const std::vector<TraceEntry>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].rule != b[i].rule || a[i].nodes != b[i].nodes || a[i].from != b[i].from || a[i].to != b[i].to ||
        !(a[i].after == b[i].after) || !(a[i].before == b[i].before))
      return false;
  }
  return true;
}

bool inside(const ProbInterval& inner, const ProbInterval& outer, double tol = 1e-9) {
  return inner.lo >= outer.lo - tol && inner.hi <= outer.hi + tol;
}

// A random distribution over the atoms of four classes, some atoms empty.
struct World {
  static constexpr int k = 4;
  double m[16];

  explicit World(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0, 1);
    double total = 0;
    for (double& x : m) total += (x = u(rng) < 0.3 ? 0.0 : u(rng));
    m[15] += 0.05;
    total += 0.05;
    for (double& x : m) x /= total;
  }
  double mass(unsigned need) const {
    double s = 0;
    for (unsigned a = 0; a < 16; ++a)
      if ((a & need) == need) s += m[a];
    return s;
  }
  double cond(int to, int from) const { return mass((1u << to) | (1u << from)) / mass(1u << from); }
};

const char* kNames[] = {"a", "b", "c", "d"};

}  // namespace

TEST(Ingest, StoresSemanticsAndIntersects) {
  KnowledgeBase kb(Partition::seven_label(), Mode::qualitative);
  const Partition& p = kb.partition();
  kb.ingest({"student", "sport", p.range("most", "al-all")});
  const auto e = kb.edge(kb.node("student"), kb.node("sport"));
  EXPECT_DOUBLE_EQ(e.interval.lo, 0.6);
  EXPECT_DOUBLE_EQ(e.interval.hi, 1.0);
  EXPECT_EQ(*e.qual, p.range("most", "al-all"));

  kb.ingest({"single", "children", iv(0.05, 0.8)});
  EXPECT_EQ(kb.edge(kb.node("single"), kb.node("children")).interval, iv(0.05, 0.8));

  kb.ingest({"x", "y", iv(0, 0.5)});
  kb.ingest({"x", "y", iv(0.3, 1)});
  EXPECT_EQ(query(kb, "x", "y").interval, iv(0.3, 0.5));
  try {
    kb.ingest({"x", "y", iv(0.6, 0.9)});
    ADD_FAILURE() << "expected a contradiction";
  } catch (const Contradiction& c) {
    EXPECT_NE(std::string(c.what()).find("P(y|x)"), std::string::npos);
  }
  EXPECT_THROW(kb.ingest({"student", "sport", QRange(p.label("few"))}), Contradiction);
}

TEST(Ingest, SelfEdges) {
  KnowledgeBase kb(Partition::seven_label());
  EXPECT_NO_THROW(kb.ingest({"a", "a", iv(0.5, 1.0)}));
  EXPECT_EQ(kb.edge(0, 0).interval, ProbInterval::point(1.0));
  EXPECT_THROW(kb.ingest({"a", "a", iv(0.1, 0.9)}), Contradiction);
  EXPECT_THROW(kb.set_edge(0, 0, Edge{}), Error);
}

TEST(Query, DiagonalAbsentAndUnknown) {
  KnowledgeBase kb(Partition::seven_label());
  kb.ingest({"a", "b", iv(0.2, 0.4)});
  EXPECT_EQ(query(kb, "a", "a").interval, ProbInterval::point(1.0));
  EXPECT_EQ(query(kb, "a", "a").qual, QRange(kb.partition().all()));
  EXPECT_EQ(query(kb, "b", "a").interval, ProbInterval::unit());
  EXPECT_EQ(query(kb, "b", "a").qual, kb.partition().whole());
  EXPECT_THROW(query(kb, "a", "zzz"), UnknownNode);
}

TEST(Saturate, DiagonalOnlyIsAFixpoint) {
  for (Mode m : {Mode::numeric, Mode::qualitative}) {
    KnowledgeBase kb(Partition::five_label(0.3), m);
    for (const char* n : kNames) kb.add_node(n);
    const KnowledgeBase before = kb;
    const auto r = saturate(kb);
    EXPECT_TRUE(r.trace.empty());
    EXPECT_EQ(r.alternations, 1u);
    EXPECT_TRUE(kb == before);
  }
}

TEST(Saturate, IdempotentAndDeterministic) {
  struct Case {
    const char* file;
    Mode mode;
  };
  for (const Case& c : {Case{"students_numeric.kb", Mode::numeric}, Case{"students_7.kb", Mode::qualitative},
                        Case{"students_9.kb", Mode::qualitative}}) {
    KnowledgeBase a = load(c.file, c.mode);
    KnowledgeBase b = a;
    const auto ra = saturate(a);
    SaturateOptions parallel;
    parallel.table.workers = 4;
    const auto rb = saturate(b, parallel);
    EXPECT_FALSE(ra.trace.empty()) << c.file;
    EXPECT_TRUE(a == b) << c.file;
    EXPECT_TRUE(same_trace(ra.trace, rb.trace)) << c.file;

    const KnowledgeBase fixed = a;
    EXPECT_TRUE(saturate(a).trace.empty()) << c.file;
    EXPECT_TRUE(a == fixed) << c.file;
  }
}

TEST(Saturate, TraceOnlyNarrowsAndIsBounded) {
  for (const char* file : {"students_7.kb", "students_9.kb"}) {
    KnowledgeBase kb = load(file, Mode::qualitative);
    const auto r = saturate(kb);
    for (const auto& t : r.trace) {
      ASSERT_TRUE(t.after.qual.has_value());
      const QRange before = t.before.qual ? *t.before.qual : kb.partition().approximate(t.before.interval);
      EXPECT_TRUE(before.contains(*t.after.qual));
      EXPECT_FALSE(before == *t.after.qual);
      EXPECT_TRUE(inside(t.after.interval, t.before.interval, 0.0));
    }
    const std::size_t n = kb.node_count(), l = kb.partition().size();
    EXPECT_LE(r.trace.size(), n * (n - 1) * (l * (l - 1) / 2 + l)) << file;
  }
  KnowledgeBase kb = load("students_numeric.kb", Mode::numeric);
  const auto r = saturate(kb);
  for (const auto& t : r.trace) {
    EXPECT_TRUE(inside(t.after.interval, t.before.interval, 0.0));
    EXPECT_FALSE(t.after.interval == t.before.interval);
  }
}

// Saturated intervals on four classes contain the exact attainable range
// implied by the stated constraints.
TEST(Saturate, SoundAgainstOracleOnFourClasses) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0, 1);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const World w(rng);
    KnowledgeBase kb(Partition::seven_label());
    for (const char* n : kNames) kb.add_node(n);
    oracle::OracleProblem pb;
    pb.class_count = 4;
    for (int f = 0; f < 4; ++f)
      for (int t = 0; t < 4; ++t) {
        if (f == t || w.mass(1u << f) <= 0.0 || u(rng) < 0.3) continue;
        const double v = w.cond(t, f);
        const ProbInterval i = iv(std::max(0.0, v - 0.1 * u(rng)), std::min(1.0, v + 0.1 * u(rng)));
        kb.ingest({kNames[f], kNames[t], i});
        pb.constrain_classes(f, t, i);
      }
    ASSERT_NO_THROW(saturate(kb)) << trial;
    for (int f = 0; f < 4; ++f)
      for (int t = 0; t < 4; ++t) {
        if (f == t) continue;
        oracle::OracleProblem q = pb;
        const auto o = oracle::solve(q.target_classes(f, t));
        ASSERT_FALSE(o.inconsistent());
        if (oracle::solve(q.target_classes(f, f)).range.lo < 0.5) continue;  // f can carry no mass
        EXPECT_TRUE(inside(o.range, kb.edge(f, t).interval, 1e-7))
            << "trial " << trial << " P(" << kNames[t] << "|" << kNames[f] << ") " << format_interval(o.range)
            << " vs " << format_interval(kb.edge(f, t).interval);
        ++checked;
      }
  }
  EXPECT_GT(checked, 300);
}

// The qualitative fixpoint covers the numeric fixpoint of the same label
// semantics.
TEST(Saturate, ModeCoherence) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0, 1);
  for (const Partition& p : {Partition::five_label(0.3), Partition::seven_label()}) {
    for (int trial = 0; trial < 25; ++trial) {
      const World w(rng);
      KnowledgeBase qual(p, Mode::qualitative), num(p, Mode::numeric);
      for (const char* n : kNames) {
        qual.add_node(n);
        num.add_node(n);
      }
      for (int f = 0; f < 4; ++f)
        for (int t = 0; t < 4; ++t) {
          if (f == t || w.mass(1u << f) <= 0.0 || u(rng) < 0.4) continue;
          const QRange q = p.approximate(ProbInterval::point(w.cond(t, f)));
          qual.ingest({kNames[f], kNames[t], q});
          num.ingest({kNames[f], kNames[t], p.semantics(q).closure()});
        }
      ASSERT_NO_THROW(saturate(qual));
      ASSERT_NO_THROW(saturate(num));
      for (std::size_t f = 0; f < 4; ++f)
        for (std::size_t t = 0; t < 4; ++t)
          EXPECT_TRUE(inside(num.edge(f, t).interval, p.semantics(qual.qual(f, t)).closure()))
              << p.size() << "-label trial " << trial << " " << f << "->" << t;
    }
  }
}

TEST(Gbt, AllCycleStaysAll) {
  KnowledgeBase kb(Partition::seven_label(), Mode::qualitative);
  const QRange all(kb.partition().all());
  for (auto [f, t] : {std::pair{"a", "b"}, {"b", "a"}, {"b", "c"}, {"c", "b"}, {"a", "c"}, {"c", "a"}})
    kb.ingest({f, t, all});
  const std::vector<std::size_t> cyc{0, 1, 2};
  EXPECT_EQ(gbt_qualitative(kb, cyc), all);
}

// With every cycle edge interior (few, half or most) at five labels the
// update can narrow the target to [few, all] at best.
TEST(Gbt, InteriorFiveLabelCyclesAreWeak) {
  const Partition p = Partition::five_label(0.3);
  const QLabel interior[] = {p.label("few"), p.label("half"), p.label("most")};
  const QRange few_all = p.range("few", "all");
  int cases = 0;
  for (QLabel r : interior)
    for (QLabel f1 : interior)
      for (QLabel f2 : interior)
        for (QLabel b1 : interior)
          for (QLabel b2 : interior) {
            KnowledgeBase kb(p, Mode::qualitative);
            for (const char* n : {"a1", "a2", "a3"}) kb.add_node(n);
            kb.ingest({"a1", "a3", QRange(r)});
            kb.ingest({"a2", "a1", QRange(f1)});
            kb.ingest({"a3", "a2", QRange(f2)});
            kb.ingest({"a1", "a2", QRange(b1)});
            kb.ingest({"a2", "a3", QRange(b2)});
            const std::vector<std::size_t> cyc{0, 1, 2};
            const QRange out = gbt_qualitative(kb, cyc);
            EXPECT_TRUE(out == few_all || !few_all.contains(out))
                << p.format(out) << " from " << p.format(QRange(r)) << p.format(QRange(f1)) << p.format(QRange(f2))
                << "/" << p.format(QRange(b1)) << p.format(QRange(b2));
            EXPECT_GE(specificity_level(out), specificity_level(few_all));
            ++cases;
          }
  EXPECT_EQ(cases, 243);
}

TEST(Gbt, ChangesNothingOnTheStudentNetwork) {
  for (const char* file : {"students_7.kb", "students_9.kb"}) {
    KnowledgeBase with = load(file, Mode::qualitative);
    KnowledgeBase without = with;
    const auto r = saturate(with);
    SaturateOptions no_cycles;
    no_cycles.cycles = false;
    saturate(without, no_cycles);
    EXPECT_TRUE(with == without) << file;
    for (const auto& t : r.trace) EXPECT_NE(t.rule, Rule::gbt) << file;
  }
}

TEST(Saturate, ContradictionCarriesItsDerivation) {
  KnowledgeBase kb(Partition::seven_label());
  const auto one = ProbInterval::point(1.0);
  for (auto [f, t] : {std::pair{"a", "b"}, {"b", "a"}, {"b", "c"}, {"c", "b"}, {"c", "d"}, {"d", "c"}})
    kb.ingest({f, t, one});
  kb.ingest({"a", "d", iv(0.0, 0.5)});
  try {
    saturate(kb);
    ADD_FAILURE() << "expected a contradiction";
  } catch (const SaturationContradiction& e) {
    EXPECT_FALSE(e.chain().empty());
    EXPECT_NE(std::string(e.what()).find("P("), std::string::npos);
    for (const auto& t : e.chain()) EXPECT_TRUE(inside(t.after.interval, t.before.interval, 0.0));
  }
}

TEST(Cycles, CanonicalEnumeration) {
  const std::vector<std::size_t> order{0, 1, 2, 3};
  const auto c3 = enumerate_cycles(order, 3);
  EXPECT_EQ(c3.size(), 4u);  // C(4,3) triangles, one orientation each
  const auto c4 = enumerate_cycles(order, 4);
  EXPECT_EQ(c4.size(), 7u);  // plus three Hamiltonian 4-cycles
  for (const auto& c : c4) {
    EXPECT_EQ(c.front(), *std::min_element(c.begin(), c.end()));
    EXPECT_LT(c[1], c.back());
    EXPECT_EQ(directed_sequences(c).size(), 2 * c.size());
  }
}

#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "qprob/algebra.hpp"
#include "qprob/bounds.hpp"
#include "qprob/errors.hpp"
#include "qprob/interval.hpp"
#include "qprob/partition.hpp"
#include "qprob/tables.hpp"

namespace qprob {

enum class Mode { numeric, qualitative };

// Knowledge about P(to|from). `qual` is set once a label range has been
// stated or derived; semantics(*qual) then contains `interval`.
struct Edge {
  ProbInterval interval = ProbInterval::unit();
  std::optional<QRange> qual;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// One input line: P(to|from) is in `value`.
struct Statement {
  std::string from;
  std::string to;
  std::variant<ProbInterval, QRange> value;
};

class KnowledgeBase {
 public:
  explicit KnowledgeBase(Partition p, Mode mode = Mode::numeric) : partition_(std::move(p)), mode_(mode) {}

  const Partition& partition() const { return partition_; }
  Mode mode() const { return mode_; }
  void set_mode(Mode m) { mode_ = m; }

  std::size_t node_count() const { return names_.size(); }
  const std::string& node_name(std::size_t i) const { return names_.at(i); }
  std::span<const std::string> node_names() const { return names_; }

  std::optional<std::size_t> find_node(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return i;
    return std::nullopt;
  }

  std::size_t node(std::string_view name) const {
    if (auto i = find_node(name)) return *i;
    throw UnknownNode(std::string(name));
  }

  // Idempotent.
  std::size_t add_node(std::string_view name) {
    if (auto i = find_node(name)) return *i;
    if (name.empty()) throw Error("node name must not be empty");
    const std::size_t old = names_.size();
    std::vector<Edge> grown((old + 1) * (old + 1));
    for (std::size_t r = 0; r < old; ++r)
      for (std::size_t c = 0; c < old; ++c) grown[r * (old + 1) + c] = edges_[r * old + c];
    grown[old * (old + 1) + old] = Edge{ProbInterval::point(1.0), partition_.all()};
    edges_ = std::move(grown);
    names_.emplace_back(name);
    return old;
  }

  const Edge& edge(std::size_t from, std::size_t to) const { return edges_.at(from * names_.size() + to); }

  // Overwrites an off-diagonal edge without intersecting.
  void set_edge(std::size_t from, std::size_t to, Edge e) {
    if (from == to) throw Error("diagonal edges are fixed to [1,1]");
    edges_.at(from * names_.size() + to) = e;
  }

  // Label view of an edge: the stored range, or the approximation of the
  // interval when none was stated.
  QRange qual(std::size_t from, std::size_t to) const {
    const Edge& e = edge(from, to);
    return e.qual ? *e.qual : partition_.approximate(e.interval);
  }

  void ingest(const Statement& s) {
    const std::size_t f = add_node(s.from);
    const std::size_t t = add_node(s.to);
    Edge& e = edges_[f * names_.size() + t];
    const auto where = "P(" + s.to + "|" + s.from + ")";

    ProbInterval incoming;
    std::optional<QRange> incoming_qual;
    if (const auto* q = std::get_if<QRange>(&s.value)) {
      if (!partition_.valid(*q)) throw Error("invalid label range for " + where);
      incoming = partition_.semantics(*q);
      incoming_qual = *q;
    } else {
      incoming = std::get<ProbInterval>(s.value);
      if (!incoming.valid()) throw Error("invalid interval " + format_interval(incoming) + " for " + where);
      incoming.lo = std::clamp(incoming.lo, 0.0, 1.0);
      incoming.hi = std::clamp(incoming.hi, 0.0, 1.0);
    }

    if (f == t) {
      if (!incoming.contains(1.0)) throw Contradiction(where + " must be 1, got " + format_interval(incoming));
      return;
    }
    auto merged = intersect(e.interval, incoming);
    if (!merged)
      throw Contradiction("contradictory constraints on " + where + ": " + format_interval(e.interval) + " and " +
                          format_interval(incoming));
    e.interval = *merged;
    if (incoming_qual) {
      const auto m = e.qual ? meet(*e.qual, *incoming_qual) : incoming_qual;
      if (!m)
        throw Contradiction("contradictory labels on " + where + ": " + partition_.format(*e.qual) + " and " +
                            partition_.format(*incoming_qual));
      e.qual = *m;
    }
  }

  friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;

 private:
  Partition partition_;
  Mode mode_;
  std::vector<std::string> names_;
  std::vector<Edge> edges_;  // row-major, from * n + to
};

enum class Rule { syllogism, bayes, gbt };

inline const char* rule_name(Rule r) {
  switch (r) {
    case Rule::syllogism: return "syllogism";
    case Rule::bayes: return "bayes";
    case Rule::gbt: return "gbt";
  }
  return "?";
}

// One strict refinement of P(to|from). `nodes` is the (A,B,C) triple for a
// syllogism step and the cycle A_1..A_k for Bayes/GBT steps.
struct TraceEntry {
  Rule rule = Rule::syllogism;
  std::vector<std::size_t> nodes;
  std::size_t from = 0;
  std::size_t to = 0;
  Edge before;
  Edge after;
};

// Contradiction found during saturation, with the trace entries that last
// touched each edge the failing step read.
class SaturationContradiction : public Contradiction {
 public:
  SaturationContradiction(const std::string& what, std::vector<TraceEntry> chain)
      : Contradiction(what), chain_(std::move(chain)) {}
  const std::vector<TraceEntry>& chain() const { return chain_; }

 private:
  std::vector<TraceEntry> chain_;
};

struct SaturateOptions {
  std::size_t max_cycle_len = 4;
  double eps = 1e-9;
  bool cycles = true;  // run the Bayes (numeric) / GBT (qualitative) phase
  TableOptions table;  // qualitative mode only
};

struct SaturationResult {
  std::vector<TraceEntry> trace;
  std::size_t alternations = 0;
  std::size_t syllogism_sweeps = 0;
  std::size_t cycle_sweeps = 0;
};

// Simple cycles of length 3..max_len in canonical form: the first node has
// the smallest rank and, of the two orientations, the one whose second node
// ranks lower is kept. Shortest first, then lexicographic by rank.
inline std::vector<std::vector<std::size_t>> enumerate_cycles(std::span<const std::size_t> order,
                                                              std::size_t max_len) {
  std::vector<std::vector<std::size_t>> out;
  const std::size_t n = order.size();
  std::vector<std::size_t> path;
  std::vector<bool> used(n, false);
  for (std::size_t len = 3; len <= std::min(max_len, n); ++len) {
    auto rec = [&](auto&& self) -> void {
      if (path.size() == len) {
        if (path[1] < path.back()) {
          std::vector<std::size_t> c;
          for (std::size_t r : path) c.push_back(order[r]);
          out.push_back(std::move(c));
        }
        return;
      }
      for (std::size_t r = path[0] + 1; r < n; ++r) {
        if (used[r]) continue;
        used[r] = true;
        path.push_back(r);
        self(self);
        path.pop_back();
        used[r] = false;
      }
    };
    for (std::size_t first = 0; first < n; ++first) {
      path = {first};
      used.assign(n, false);
      used[first] = true;
      rec(rec);
    }
  }
  return out;
}

// Every rotation of both orientations of a canonical cycle. The target of
// sequence s is P(s_0 | s_{k-1}).
inline std::vector<std::vector<std::size_t>> directed_sequences(const std::vector<std::size_t>& cycle) {
  std::vector<std::vector<std::size_t>> out;
  const std::size_t k = cycle.size();
  const std::vector<std::size_t> rev(cycle.rbegin(), cycle.rend());
  for (const auto* base : {&cycle, &rev}) {
    for (std::size_t r = 0; r < k; ++r) {
      std::vector<std::size_t> s(k);
      for (std::size_t i = 0; i < k; ++i) s[i] = (*base)[(r + i) % k];
      out.push_back(std::move(s));
    }
  }
  return out;
}

// Qualitative update of P(A_1|A_k) along `cycle` = A_1..A_k: the products
// P(A_k|A_1) * prod P(A_i|A_{i+1}) and prod P(A_{i+1}|A_i) are formed
// label-wise first, then divided once, then merged with the current range.
inline QRange gbt_qualitative(const KnowledgeBase& kb, std::span<const std::size_t> cycle) {
  if (cycle.size() < 2) throw Error("gbt_qualitative: cycle needs at least two nodes");
  const Partition& p = kb.partition();
  const std::size_t k = cycle.size();
  QRange num = kb.qual(cycle[0], cycle[k - 1]);
  QRange den = p.all();
  for (std::size_t i = 0; i + 1 < k; ++i) {
    num = qmul(p, num, kb.qual(cycle[i + 1], cycle[i]));
    den = qmul(p, den, kb.qual(cycle[i], cycle[i + 1]));
  }
  const QRange value = qdiv(p, num, den);
  const QRange old = kb.qual(cycle[k - 1], cycle[0]);
  const auto m = meet(old, value);
  if (!m)
    throw Contradiction("gbt: " + p.format(value) + " misses " + p.format(old) + " on P(" + kb.node_name(cycle[0]) +
                        "|" + kb.node_name(cycle[k - 1]) + ")");
  return *m;
}

namespace detail {

class Saturator {
 public:
  Saturator(KnowledgeBase& kb, const SaturateOptions& opt) : kb_(kb), opt_(opt) {
    order_.resize(kb.node_count());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::sort(order_.begin(), order_.end(),
              [&](std::size_t a, std::size_t b) { return kb.node_name(a) < kb.node_name(b); });
    if (opt.cycles && opt.max_cycle_len >= 3) cycles_ = enumerate_cycles(order_, opt.max_cycle_len);
    if (kb.mode() == Mode::qualitative) table_.emplace(gen_table(kb.partition(), opt.table));
  }

  SaturationResult run() {
    const std::size_t n = order_.size();
    last_touch_.assign(n * n, npos);
    for (;;) {
      ++result_.alternations;
      while (syllogism_sweep()) {
      }
      bool changed = false;
      while (cycle_sweep()) changed = true;
      if (!changed) break;
    }
    return std::move(result_);
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  bool numeric() const { return kb_.mode() == Mode::numeric; }

  bool syllogism_sweep() {
    ++result_.syllogism_sweeps;
    bool changed = false;
    for (std::size_t a : order_)
      for (std::size_t b : order_)
        for (std::size_t c : order_) {
          if (a == b || b == c || a == c) continue;
          changed = syllogism_step(a, b, c) || changed;
        }
    return changed;
  }

  bool syllogism_step(std::size_t a, std::size_t b, std::size_t c) {
    const std::vector<std::size_t> nodes{a, b, c};
    const std::pair<std::size_t, std::size_t> inputs[] = {{a, b}, {b, a}, {c, b}, {b, c}};
    if (numeric()) {
      const SyllogismInput in{kb_.edge(a, b).interval, kb_.edge(b, a).interval, kb_.edge(b, c).interval,
                              kb_.edge(c, b).interval};
      return refine_numeric(Rule::syllogism, nodes, a, c, syllogism_interval(in, opt_.table.form), inputs);
    }
    const QRange r = eval_extended(*table_, {kb_.qual(a, b), kb_.qual(b, a), kb_.qual(c, b), kb_.qual(b, c)});
    return refine_qual(Rule::syllogism, nodes, a, c, r, inputs);
  }

  bool cycle_sweep() {
    if (cycles_.empty()) return false;
    ++result_.cycle_sweeps;
    bool changed = false;
    for (const auto& cyc : cycles_)
      for (const auto& s : directed_sequences(cyc)) changed = cycle_step(s) || changed;
    return changed;
  }

  bool cycle_step(const std::vector<std::size_t>& s) {
    const std::size_t k = s.size();
    std::vector<std::pair<std::size_t, std::size_t>> inputs{{s[0], s[k - 1]}};
    for (std::size_t i = 0; i + 1 < k; ++i) {
      inputs.emplace_back(s[i + 1], s[i]);
      inputs.emplace_back(s[i], s[i + 1]);
    }
    if (numeric()) {
      std::vector<ProbInterval> fwd, bwd;
      for (std::size_t i = 0; i + 1 < k; ++i) {
        fwd.push_back(kb_.edge(s[i + 1], s[i]).interval);
        bwd.push_back(kb_.edge(s[i], s[i + 1]).interval);
      }
      ProbInterval cand;
      try {
        cand = bayes_cycle(fwd, bwd, kb_.edge(s[0], s[k - 1]).interval.closure(), ProbInterval::unit());
      } catch (const Contradiction& e) {
        fail(e.what(), inputs);
      }
      return refine_numeric(Rule::bayes, s, s[k - 1], s[0], cand, inputs);
    }
    QRange r;
    try {
      r = gbt_qualitative(kb_, s);
    } catch (const Contradiction& e) {
      fail(e.what(), inputs);
    }
    return refine_qual(Rule::gbt, s, s[k - 1], s[0], r, inputs);
  }

  template <class Inputs>
  bool refine_numeric(Rule rule, const std::vector<std::size_t>& nodes, std::size_t from, std::size_t to,
                      ProbInterval cand, const Inputs& inputs) {
    const Edge old = kb_.edge(from, to);
    if (cand.lo > cand.hi + kTol || !intersect(old.interval, cand)) {
      fail(std::string(rule_name(rule)) + " derives " + format_interval(cand) + " for " + label(from, to) +
               ", which misses " + format_interval(old.interval),
           inputs, from, to);
    }
    const ProbInterval m = *intersect(old.interval, cand);
    if (m.lo - old.interval.lo <= opt_.eps && old.interval.hi - m.hi <= opt_.eps) return false;
    Edge e = old;
    e.interval = m;
    if (e.qual) {
      const auto q = meet(*e.qual, kb_.partition().approximate(m));
      if (q) e.qual = *q;
    }
    commit(rule, nodes, from, to, old, e);
    return true;
  }

  template <class Inputs>
  bool refine_qual(Rule rule, const std::vector<std::size_t>& nodes, std::size_t from, std::size_t to, QRange cand,
                   const Inputs& inputs) {
    const Edge old = kb_.edge(from, to);
    const QRange cur = kb_.qual(from, to);
    const auto m = meet(cur, cand);
    if (!m) {
      fail(std::string(rule_name(rule)) + " derives " + kb_.partition().format(cand) + " for " + label(from, to) +
               ", which misses " + kb_.partition().format(cur),
           inputs, from, to);
    }
    if (*m == cur) return false;
    Edge e = old;
    e.qual = *m;
    const auto i = intersect(old.interval, kb_.partition().semantics(*m));
    e.interval = i ? *i : kb_.partition().semantics(*m);
    commit(rule, nodes, from, to, old, e);
    return true;
  }

  void commit(Rule rule, const std::vector<std::size_t>& nodes, std::size_t from, std::size_t to, const Edge& before,
              const Edge& after) {
    kb_.set_edge(from, to, after);
    last_touch_[from * order_.size() + to] = result_.trace.size();
    result_.trace.push_back({rule, nodes, from, to, before, after});
  }

  std::string label(std::size_t from, std::size_t to) const {
    return "P(" + kb_.node_name(to) + "|" + kb_.node_name(from) + ")";
  }

  template <class Inputs>
  [[noreturn]] void fail(const std::string& what, const Inputs& inputs, std::size_t from = npos,
                         std::size_t to = npos) {
    std::vector<std::size_t> ids;
    auto add = [&](std::size_t f, std::size_t t) {
      const std::size_t id = last_touch_[f * order_.size() + t];
      if (id != npos && std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
    };
    for (const auto& [f, t] : inputs) add(f, t);
    if (from != npos) add(from, to);
    std::sort(ids.begin(), ids.end());
    std::vector<TraceEntry> chain;
    for (std::size_t id : ids) chain.push_back(result_.trace[id]);
    throw SaturationContradiction(what, std::move(chain));
  }

  KnowledgeBase& kb_;
  SaturateOptions opt_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<std::size_t>> cycles_;
  std::optional<SyllogismTable> table_;
  std::vector<std::size_t> last_touch_;
  SaturationResult result_;
};

}  // namespace detail

// Syllogism sweeps over ordered triples (by node name) until stable, then
// cycle sweeps until stable, alternating until a cycle phase changes
// nothing. Numeric mode uses interval bounds and Bayes cycles; qualitative
// mode uses table lookups and GBT on label ranges.
inline SaturationResult saturate(KnowledgeBase& kb, const SaturateOptions& opt = {}) {
  if (!(opt.eps > 0.0)) throw Error("eps must be positive");
  return detail::Saturator(kb, opt).run();
}

struct QueryResult {
  ProbInterval interval;
  QRange qual;
};

inline QueryResult query(const KnowledgeBase& kb, std::string_view from, std::string_view to) {
  const std::size_t f = kb.node(from);
  const std::size_t t = kb.node(to);
  return {kb.edge(f, t).interval, kb.qual(f, t)};
}

}  // namespace qprob

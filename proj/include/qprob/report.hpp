#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "qprob/certify.hpp"
#include "qprob/io.hpp"
#include "qprob/network.hpp"
#include "qprob/tables.hpp"

// JSON renderings used by the command-line tool. Needs nlohmann/json.
namespace qprob {

inline double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

inline nlohmann::ordered_json edge_json(const KnowledgeBase& kb, std::size_t from, std::size_t to) {
  const Edge& e = kb.edge(from, to);
  const QRange q = kb.qual(from, to);
  return {{"lo", round3(e.interval.lo)},
          {"hi", round3(e.interval.hi)},
          {"qual_low", kb.partition().name(q.low)},
          {"qual_high", kb.partition().name(q.high)}};
}

// {"P(to|from)": {lo, hi, qual_low, qual_high}, ...}
inline nlohmann::ordered_json queries_json(const KnowledgeBase& kb, const std::vector<KbQuery>& queries) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& q : queries)
    out["P(" + q.to + "|" + q.from + ")"] = edge_json(kb, kb.node(q.from), kb.node(q.to));
  return out;
}

inline nlohmann::ordered_json trace_json(const KnowledgeBase& kb, const std::vector<TraceEntry>& trace) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& t : trace) {
    std::vector<std::string> names;
    for (std::size_t n : t.nodes) names.push_back(kb.node_name(n));
    const Partition& p = kb.partition();
    auto q = [&](const Edge& e) { return e.qual ? p.format(*e.qual) : p.format(p.approximate(e.interval)); };
    out.push_back({{"rule", rule_name(t.rule)},
                   {"nodes", names},
                   {"edge", "P(" + kb.node_name(t.to) + "|" + kb.node_name(t.from) + ")"},
                   {"before", format_interval(t.before.interval)},
                   {"after", format_interval(t.after.interval)},
                   {"qual_before", q(t.before)},
                   {"qual_after", q(t.after)}});
  }
  return out;
}

inline nlohmann::ordered_json robustness_json(const RobustnessReport& r, const Partition& reference) {
  nlohmann::ordered_json per_alpha = nlohmann::ordered_json::array();
  bool any_flip = false;
  for (std::size_t i = 0; i < r.alpha_values.size(); ++i) {
    auto cells = nlohmann::ordered_json::array();
    for (const auto& t : r.changed_cells[i]) {
      cells.push_back({reference.name(t[0]), reference.name(t[1]), reference.name(t[2]), reference.name(t[3])});
    }
    any_flip = any_flip || r.product_flip(i);
    per_alpha.push_back({{"alpha", r.alpha_values[i]},
                         {"changed", r.changed_count(i)},
                         {"cells", cells},
                         {"half_times_half", reference.format(r.half_times_half[i])},
                         {"product_flip", r.product_flip(i)}});
  }
  auto distinct = nlohmann::ordered_json::array();
  for (const auto& t : r.distinct_changed)
    distinct.push_back({reference.name(t[0]), reference.name(t[1]), reference.name(t[2]), reference.name(t[3])});
  return {{"reference_alpha", r.reference_alpha},
          {"reference_half_times_half", reference.format(r.reference_half_times_half)},
          {"per_alpha", per_alpha},
          {"distinct_changed_total", r.distinct_changed.size()},
          {"distinct_changed", distinct},
          {"half_times_half_flip", any_flip}};
}

inline nlohmann::ordered_json certify_json(const CertifyReport& r) {
  nlohmann::ordered_json out = {
      {"seed", r.seed},
      {"n", r.n},
      {"precise", {{"count", r.precise.count}, {"skipped", r.precise.skipped}, {"max_gap", r.precise.max_gap}}},
      {"interval",
       {{"count", r.interval.count},
        {"skipped", r.interval.skipped},
        {"violations", r.interval.violations},
        {"max_violation", r.interval.max_violation}}},
  };
  auto adams = nlohmann::ordered_json::array();
  for (const auto& a : r.adams)
    adams.push_back({{"rule", a.rule},
                     {"bound", a.bound},
                     {"oracle_min", a.oracle_min},
                     {"search_min", a.search_min},
                     {"sound", a.sound},
                     {"attained", a.attained}});
  out["adams"] = adams;
  out["sound"] = r.sound();
  return out;
}

}  // namespace qprob

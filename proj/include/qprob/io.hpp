#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qprob/errors.hpp"
#include "qprob/network.hpp"
#include "qprob/partition.hpp"

namespace qprob {

namespace detail {

inline std::vector<std::string> split_words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> words;
  for (std::string w; in >> w;) words.push_back(w);
  return words;
}

inline std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

inline double parse_number(const std::string& s, std::size_t line) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) throw ParseError(line, "'" + s + "' is not a number");
  return v;
}

struct PartitionLines {
  std::optional<std::pair<std::size_t, std::vector<double>>> thresholds;
  std::optional<std::pair<std::size_t, std::vector<std::string>>> labels;

  // True when the line was a partition directive.
  bool take(const std::vector<std::string>& w, std::size_t line) {
    if (w[0] == "@partition") {
      if (thresholds) throw ParseError(line, "second @partition directive");
      std::vector<double> t;
      for (std::size_t i = 1; i < w.size(); ++i) t.push_back(parse_number(w[i], line));
      thresholds.emplace(line, std::move(t));
      return true;
    }
    if (w[0] == "@labels") {
      if (labels) throw ParseError(line, "second @labels directive");
      labels.emplace(line, std::vector<std::string>(w.begin() + 1, w.end()));
      return true;
    }
    return false;
  }

  std::optional<Partition> finish(std::size_t last_line) const {
    if (!thresholds && !labels) return std::nullopt;
    if (!labels) throw ParseError(thresholds->first, "@partition without a matching @labels line");
    if (!thresholds) throw ParseError(labels->first, "@labels without a matching @partition line");
    try {
      return Partition::build(thresholds->second, labels->second);
    } catch (const PartitionError& e) {
      (void)last_line;
      throw ParseError(thresholds->first, e.what());
    }
  }
};

}  // namespace detail

// `@partition t1 .. tn` and `@labels name0 .. name(n+2)`; `#` comments.
inline Partition parse_partition_config(std::istream& in) {
  detail::PartitionLines pl;
  std::size_t line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto w = detail::split_words(detail::strip_comment(raw));
    if (w.empty()) continue;
    if (!pl.take(w, line_no)) throw ParseError(line_no, "unexpected '" + w[0] + "' in partition config");
  }
  auto p = pl.finish(line_no);
  if (!p) throw ParseError(line_no, "no @partition directive");
  return *p;
}

struct KbQuery {
  std::string from;
  std::string to;
};

struct ParsedKb {
  Partition partition = Partition::seven_label();
  std::vector<Statement> statements;
  std::vector<KbQuery> queries;
  std::vector<std::string> nodes;  // first-mention order
};

// KB file: optional partition directives, then
//   q <from> <to> <low> [<high>]   P(to|from) within the label range
//   n <from> <to> <lo> <hi>        P(to|from) within [lo, hi]
//   ? <from> <to>                  query
// The partition defaults to the 7-label scale. Label names are resolved
// after the whole file is read, so directives may come anywhere.
inline ParsedKb parse_kb(std::istream& in) {
  detail::PartitionLines pl;
  struct Pending {
    std::size_t line;
    std::vector<std::string> words;
  };
  std::vector<Pending> pending;
  std::size_t line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    auto w = detail::split_words(detail::strip_comment(raw));
    if (w.empty() || pl.take(w, line_no)) continue;
    pending.push_back({line_no, std::move(w)});
  }
  ParsedKb kb;
  if (auto p = pl.finish(line_no)) kb.partition = *p;

  auto note = [&](const std::string& n) {
    if (std::find(kb.nodes.begin(), kb.nodes.end(), n) == kb.nodes.end()) kb.nodes.push_back(n);
  };
  auto label = [&](const std::string& name, std::size_t line) {
    if (auto l = kb.partition.find(name)) return *l;
    throw ParseError(line, "unknown label '" + name + "'");
  };
  for (const auto& [line, w] : pending) {
    const std::string& kind = w[0];
    if (kind == "q") {
      if (w.size() != 4 && w.size() != 5) throw ParseError(line, "expected: q <from> <to> <low> [<high>]");
      const QLabel low = label(w[3], line);
      const QLabel high = w.size() == 5 ? label(w[4], line) : low;
      if (high < low) throw ParseError(line, "label range '" + w[3] + " " + w[4] + "' is reversed");
      kb.statements.push_back({w[1], w[2], QRange(low, high)});
    } else if (kind == "n") {
      if (w.size() != 5) throw ParseError(line, "expected: n <from> <to> <lo> <hi>");
      const double lo = detail::parse_number(w[3], line);
      const double hi = detail::parse_number(w[4], line);
      if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) throw ParseError(line, "need 0 <= lo <= hi <= 1");
      kb.statements.push_back({w[1], w[2], ProbInterval::closed(lo, hi)});
    } else if (kind == "?") {
      if (w.size() != 3) throw ParseError(line, "expected: ? <from> <to>");
      kb.queries.push_back({w[1], w[2]});
    } else {
      throw ParseError(line, "unknown directive '" + kind + "'");
    }
    note(w[1]);
    note(w[2]);
  }
  return kb;
}

// Nodes are added in first-mention order, so matrix rows follow the file.
inline KnowledgeBase build_kb(const ParsedKb& parsed, Mode mode) {
  KnowledgeBase kb(parsed.partition, mode);
  for (const auto& n : parsed.nodes) kb.add_node(n);
  for (const auto& s : parsed.statements) kb.ingest(s);
  return kb;
}

// Three decimals, rounded outward so the written cell still contains the
// interval.
inline std::string format_cell(const ProbInterval& i) {
  const double lo = std::floor(i.lo * 1000.0 + 1e-6) / 1000.0;
  const double hi = std::ceil(i.hi * 1000.0 - 1e-6) / 1000.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f,%.3f", std::max(0.0, lo), std::min(1.0, hi));
  return buf;
}

// Rows are `from`, columns `to`; each cell is "lo,hi" (quoted).
inline void write_matrix_csv(std::ostream& os, const KnowledgeBase& kb) {
  const std::size_t n = kb.node_count();
  os << "from\\to";
  for (std::size_t j = 0; j < n; ++j) os << ',' << kb.node_name(j);
  os << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    os << kb.node_name(i);
    for (std::size_t j = 0; j < n; ++j) os << ",\"" << format_cell(kb.edge(i, j).interval) << '"';
    os << '\n';
  }
}

namespace detail {

inline std::vector<std::string> split_csv_row(const std::string& line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') quoted = !quoted;
    else if (ch == ',' && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') cur.push_back(ch);
  }
  if (quoted) throw ParseError(line_no, "unterminated quote");
  out.push_back(cur);
  return out;
}

}  // namespace detail

// Inverse of write_matrix_csv: one numeric statement per off-diagonal cell
// narrower than [0,1].
inline std::vector<Statement> read_matrix_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError(1, "empty matrix file");
  const auto cols = detail::split_csv_row(header, 1);
  std::vector<Statement> out;
  std::size_t line_no = 1;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    if (raw.empty()) continue;
    const auto cells = detail::split_csv_row(raw, line_no);
    if (cells.size() != cols.size()) throw ParseError(line_no, "row has " + std::to_string(cells.size()) + " cells");
    for (std::size_t j = 1; j < cells.size(); ++j) {
      const auto comma = cells[j].find(',');
      if (comma == std::string::npos) throw ParseError(line_no, "cell '" + cells[j] + "' is not 'lo,hi'");
      const double lo = detail::parse_number(cells[j].substr(0, comma), line_no);
      const double hi = detail::parse_number(cells[j].substr(comma + 1), line_no);
      if (cells[0] == cols[j] || (lo <= 0.0 && hi >= 1.0)) continue;
      out.push_back({cells[0], cols[j], ProbInterval::closed(lo, hi)});
    }
  }
  return out;
}

// "from → to : [low, high]" for every informative off-diagonal edge.
inline void write_statements(std::ostream& os, const KnowledgeBase& kb) {
  const std::size_t n = kb.node_count();
  const QRange whole = kb.partition().whole();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const QRange q = kb.qual(i, j);
      if (q == whole) continue;
      os << kb.node_name(i) << " → " << kb.node_name(j) << " : " << kb.partition().format(q) << '\n';
    }
}

}  // namespace qprob

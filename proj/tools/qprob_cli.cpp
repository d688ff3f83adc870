// qprob: tables | propagate | query | robustness | check

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qprob/qprob.hpp"
#include "qprob/report.hpp"

namespace fs = std::filesystem;
using namespace qprob;

namespace {

struct RunConfig {
  std::string input;
  std::string mode = "numeric";
  std::size_t max_cycle = 4;
  double eps = 1e-9;
  std::string out;
  std::uint64_t seed = 1;
  std::string alpha = "0.25:0.35:0.01";
  double reference = 0.3;
  int n = 200;
  std::string from, to;
  std::string policy = "closed";
  std::string form = "sound";
  unsigned workers = 1;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
}

// Writes to `out` when given, otherwise to stdout.
void emit(const RunConfig& cfg, const std::string& content) {
  if (cfg.out.empty()) std::cout << content;
  else write_file(cfg.out, content);
}

TableOptions table_options(const RunConfig& cfg) {
  TableOptions opt;
  opt.policy = cfg.policy == "attained" ? EndpointPolicy::attained : EndpointPolicy::closed;
  opt.form = cfg.form == "upper-denominator" ? UpperForm::upper_denominator : UpperForm::sound;
  opt.workers = cfg.workers;
  return opt;
}

Mode parse_mode(const std::string& m) { return m == "qualitative" ? Mode::qualitative : Mode::numeric; }

int cmd_tables(const RunConfig& cfg) {
  auto in = open_input(cfg.input);
  const Partition p = parse_partition_config(in);
  const SyllogismTable table = gen_table(p, table_options(cfg));
  std::ostringstream csv, md;
  write_table_csv(csv, table);
  const auto groups = compact(table);
  write_compact_markdown(md, p, groups);
  if (cfg.out.empty()) {
    std::cout << csv.str();
    return 0;
  }
  write_file(fs::path(cfg.out) / "syllogism_table.csv", csv.str());
  write_file(fs::path(cfg.out) / "syllogism_table.md", md.str());
  std::cerr << table.size() << " tuples, " << groups.size() << " output groups written to " << cfg.out << '\n';
  return 0;
}

SaturateOptions saturate_options(const RunConfig& cfg) {
  SaturateOptions opt;
  opt.max_cycle_len = cfg.max_cycle;
  opt.eps = cfg.eps;
  opt.table = table_options(cfg);
  return opt;
}

void print_chain(const KnowledgeBase& kb, const SaturationContradiction& e) {
  std::cerr << "contradiction: " << e.what() << '\n';
  if (!e.chain().empty()) std::cerr << "derivation:\n" << trace_json(kb, e.chain()).dump(2) << '\n';
}

int cmd_propagate(const RunConfig& cfg) {
  auto in = open_input(cfg.input);
  const ParsedKb parsed = parse_kb(in);
  KnowledgeBase kb = build_kb(parsed, parse_mode(cfg.mode));
  SaturationResult result;
  try {
    result = saturate(kb, saturate_options(cfg));
  } catch (const SaturationContradiction& e) {
    print_chain(kb, e);
    return 3;
  }
  std::ostringstream matrix, statements;
  write_matrix_csv(matrix, kb);
  write_statements(statements, kb);
  const auto answers = queries_json(kb, parsed.queries);
  if (cfg.out.empty()) {
    std::cout << matrix.str() << '\n' << statements.str();
    if (!parsed.queries.empty()) std::cout << '\n' << answers.dump(2) << '\n';
    return 0;
  }
  const fs::path dir(cfg.out);
  write_file(dir / "matrix.csv", matrix.str());
  write_file(dir / "statements.txt", statements.str());
  write_file(dir / "queries.json", answers.dump(2) + "\n");
  write_file(dir / "trace.json", trace_json(kb, result.trace).dump(2) + "\n");
  std::cerr << result.trace.size() << " refinements, " << result.alternations << " alternations\n";
  return 0;
}

int cmd_query(const RunConfig& cfg) {
  auto in = open_input(cfg.input);
  const ParsedKb parsed = parse_kb(in);
  KnowledgeBase kb = build_kb(parsed, parse_mode(cfg.mode));
  try {
    saturate(kb, saturate_options(cfg));
  } catch (const SaturationContradiction& e) {
    print_chain(kb, e);
    return 3;
  }
  emit(cfg, queries_json(kb, {{cfg.from, cfg.to}}).dump(2) + "\n");
  return 0;
}

int cmd_robustness(const RunConfig& cfg) {
  std::vector<std::string> labels{"none", "few", "half", "most", "all"};
  if (!cfg.input.empty()) {
    auto in = open_input(cfg.input);
    const Partition p = parse_partition_config(in);
    labels.assign(p.labels().begin(), p.labels().end());
  }
  double from = 0, to = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream spec(cfg.alpha);
  if (!(spec >> from >> c1 >> to >> c2 >> step) || c1 != ':' || c2 != ':' || !spec.eof())
    throw Error("--alpha expects from:to:step, got '" + cfg.alpha + "'");
  const RobustnessReport r = robustness_sweep(labels, from, to, step, cfg.reference, table_options(cfg));
  const Partition ref = Partition::build({cfg.reference, 1.0 - cfg.reference}, labels);
  emit(cfg, robustness_json(r, ref).dump(2) + "\n");
  return 0;
}

int cmd_check(const RunConfig& cfg) {
  const CertifyReport r = certify(cfg.seed, cfg.n);
  emit(cfg, certify_json(r).dump(2) + "\n");
  return r.sound() ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qualitative and interval reasoning with quantified syllogisms"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_table_flags = [&](CLI::App* s) {
    s->add_option("--policy", cfg.policy, "Endpoint policy for 0/1")->check(CLI::IsMember({"closed", "attained"}));
    s->add_option("--form", cfg.form, "Upper-bound terms")->check(CLI::IsMember({"sound", "upper-denominator"}));
    s->add_option("--workers", cfg.workers, "Table generation threads")->check(CLI::PositiveNumber);
  };
  auto add_saturation_flags = [&](CLI::App* s) {
    s->add_option("--mode", cfg.mode, "Saturation mode")->check(CLI::IsMember({"numeric", "qualitative"}));
    s->add_option("--max-cycle", cfg.max_cycle, "Longest cycle used by Bayes/GBT passes");
    s->add_option("--eps", cfg.eps, "Minimal numeric improvement")->check(CLI::PositiveNumber);
    add_table_flags(s);
  };

  auto* tables = app.add_subcommand("tables", "Write the syllogism table (CSV) and its compacted view (Markdown)");
  tables->add_option("config", cfg.input, "Partition config")->required();
  tables->add_option("--out", cfg.out, "Output directory (CSV to stdout when omitted)");
  add_table_flags(tables);

  auto* propagate = app.add_subcommand("propagate", "Saturate a KB; write matrix, statements and query answers");
  propagate->add_option("kb", cfg.input, "KB file")->required();
  propagate->add_option("--out", cfg.out, "Output directory (stdout when omitted)");
  add_saturation_flags(propagate);

  auto* query = app.add_subcommand("query", "Saturate a KB and answer P(to|from)");
  query->add_option("kb", cfg.input, "KB file")->required();
  query->add_option("from", cfg.from, "Conditioning class")->required();
  query->add_option("to", cfg.to, "Target class")->required();
  query->add_option("--out", cfg.out, "Output file");
  add_saturation_flags(query);

  auto* robustness = app.add_subcommand("robustness", "Diff 5-label tables over a range of thresholds");
  robustness->add_option("config", cfg.input, "5-label partition config (only the labels are used)");
  robustness->add_option("--alpha", cfg.alpha, "from:to:step");
  robustness->add_option("--reference", cfg.reference, "Reference threshold");
  robustness->add_option("--out", cfg.out, "Output file");
  add_table_flags(robustness);

  auto* check = app.add_subcommand("check", "Compare closed-form bounds with the oracle");
  check->add_option("--seed", cfg.seed, "Random seed");
  check->add_option("-n,--count", cfg.n, "Random inputs per suite")->check(CLI::NonNegativeNumber);
  check->add_option("--out", cfg.out, "Output file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*tables) return cmd_tables(cfg);
    if (*propagate) return cmd_propagate(cfg);
    if (*query) return cmd_query(cfg);
    if (*robustness) return cmd_robustness(cfg);
    if (*check) return cmd_check(cfg);
  } catch (const ParseError& e) {
    std::cerr << cfg.input << ":" << e.what() << '\n';
    return 2;
  } catch (const Contradiction& e) {
    std::cerr << "contradiction: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

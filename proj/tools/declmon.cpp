#include "declmon/bench.hpp"
#include "declmon/inference.hpp"
#include "declmon/monitor.hpp"
#include "declmon/tableau.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace declmon;

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitConflict = 70;

struct UsageError : Error {
  using Error::Error;
};

int verdict_exit(TruthValue3 v) {
  switch (v) {
  case TruthValue3::Top:
    return 0;
  case TruthValue3::Bot:
    return 1;
  default:
    return 2;
  }
}

std::string read_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path);
  if (!out)
    throw UsageError("cannot write " + path);
  out << text;
}

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty())
      out.push_back(item);
  return out;
}

int to_int(const std::string &s) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception &) {
    throw UsageError("not a number: " + s);
  }
  if (used != s.size())
    throw UsageError("not a number: " + s);
  return v;
}

/// "1..4" or "1,2,4".
std::vector<int> parse_sizes(const std::string &s) {
  std::vector<int> out;
  if (auto dots = s.find(".."); dots != std::string::npos) {
    int lo = to_int(s.substr(0, dots)), hi = to_int(s.substr(dots + 2));
    if (lo < 1 || hi < lo)
      throw UsageError("bad size range " + s);
    for (int i = lo; i <= hi; ++i)
      out.push_back(i);
  } else {
    for (const auto &p : split(s, ','))
      out.push_back(to_int(p));
  }
  if (out.empty())
    throw UsageError("no sizes given");
  return out;
}

std::vector<PatternKind> parse_patterns(const std::string &s) {
  if (s == "all")
    return all_patterns();
  std::vector<PatternKind> out;
  for (const auto &p : split(s, ',')) {
    auto k = parse_pattern(p);
    if (!k)
      throw UsageError("unknown pattern " + p);
    out.push_back(*k);
  }
  return out;
}

std::vector<Approach> parse_approaches(const std::string &s) {
  std::vector<Approach> out;
  for (const auto &p : split(s, ',')) {
    auto a = parse_approach(p);
    if (!a)
      throw UsageError("unknown approach " + p);
    out.push_back(*a);
  }
  if (out.empty())
    throw UsageError("no approaches given");
  return out;
}

Strategy parse_strategy(const std::string &s) {
  if (s == "dm1")
    return Strategy::DM1;
  if (s == "dm2")
    return Strategy::DM2;
  throw UsageError("unknown strategy " + s);
}

TruthValue3 parse_value(const std::string &s) {
  if (s == "T" || s == "top" || s == "1")
    return TruthValue3::Top;
  if (s == "F" || s == "bot" || s == "0")
    return TruthValue3::Bot;
  if (s == "?" || s == "unknown")
    return TruthValue3::Unknown;
  throw UsageError("bad truth value " + s);
}

std::string payload_string(const Message &m, const FormulaIndex &idx) {
  std::ostringstream os;
  for (std::size_t i = 0; i < m.payload.size(); ++i) {
    const auto &p = m.payload[i];
    os << (i ? ", " : "") << "(" << p.index << ":" << idx.at(p.index) << ", g"
       << p.state << ", " << p.value << ")";
  }
  return os.str();
}

// --- monitor -------------------------------------------------------------

struct MonitorArgs {
  std::string formula, alphabet, trace;
  std::string strategy = "dm1";
  bool quiet = false, dump_tables = false;
};

int cmd_monitor(const MonitorArgs &a) {
  SystemAlphabet alpha = SystemAlphabet::parse(a.alphabet);
  Formula phi = parse(a.formula);
  Trace trace = parse_trace(read_file(a.trace));
  Strategy strategy = parse_strategy(a.strategy);
  check_alphabet(alpha, phi, trace);

  MonitorSetup setup = MonitorSetup::make(alpha, phi, strategy);
  RunObserver obs;
  if (!a.quiet) {
    obs.on_message = [&](const Message &m, const ProcessId &to,
                         const FactSet &) {
      std::cout << "t=" << m.round << " " << m.sender << " -> " << to << ": ["
                << payload_string(m, setup.index) << "] "
                << message_bits(m, setup.index.size()) << " bits\n";
    };
  }
  if (a.dump_tables) {
    obs.on_round = [&](Step t, const std::vector<MonitorState> &ms) {
      for (const auto &s : ms)
        for (const auto &[state, table] : s.store.tables()) {
          std::cout << "t=" << t << " " << s.pid << " table g" << state << ":";
          for (const auto &e : table.entries)
            std::cout << " " << e.index << "=" << e.value;
          std::cout << "\n";
        }
    };
  }
  RunResult r = run(alpha, phi, trace, strategy, obs);

  std::cout << "ring: " << r.ring.to_string() << "\n";
  std::cout << "verdict: " << r.verdict << "\n";
  if (r.decider)
    std::cout << "decided by " << *r.decider << " in round " << *r.round
              << "\n";
  else if (is_definite(r.verdict))
    std::cout << "decided at setup (" << to_string(setup.sat) << ")\n";
  else
    std::cout << "undecided after " << trace.size() << " rounds\n";
  std::cout << "trace_len: " << r.metrics.trace_len << "\n"
            << "num_msgs: " << r.metrics.num_msgs << "\n"
            << "msg_bits: " << r.metrics.msg_bits << "\n"
            << "mem_bits: " << r.metrics.mem_bits << "\n";
  return verdict_exit(r.verdict);
}

// --- tableau -------------------------------------------------------------

int cmd_tableau(const std::string &formula, const std::string &dump) {
  Formula phi = nnf(parse(formula));
  Satisfiability sat = classify(phi);
  std::cout << to_string(sat) << "\n";
  Tableau full = build(phi);
  Tableau refined = refine(full);
  std::cout << "branches: " << refined.ticked_branches().size() << "\n";
  std::cout << "nodes: " << full.node_count() << "\n";
  if (!dump.empty())
    write_file(dump, to_dot(full));
  return 0;
}

// --- deduce --------------------------------------------------------------

int cmd_deduce(const std::string &formula, const std::string &value, Step time,
               const std::string &observed) {
  Formula f = parse(formula);
  TruthValue3 v = parse_value(value);
  std::set<std::string> seen;
  for (const auto &s : split(observed, ','))
    seen.insert(s);
  ObservationSet obs("cli", [seen, time](const Fact &x) {
    return x.step >= 0 && x.step <= time && seen.count(x.atom) != 0;
  });
  if (auto r = match_rule(f, v, obs, time))
    std::cout << "# " << to_string(*r) << "\n";
  for (const auto &d : deduce(EvaluatedFormula{f, v, "cli", time}, obs))
    std::cout << d.to_string() << "\n";
  return 0;
}

// --- oracle --------------------------------------------------------------

int cmd_oracle(const std::string &formula, const std::string &trace_path) {
  Formula f = parse(formula);
  Trace trace = parse_trace(read_file(trace_path));
  TruthValue3 v = ltl3_eval(trace, f);
  std::cout << v << "\n";
  return verdict_exit(v);
}

// --- bench ---------------------------------------------------------------

struct BenchArgs {
  std::string config, sizes, patterns, approaches, csv;
  std::size_t count = 0, processes = 0, atoms = 0, trace_len = 0;
  double p_true = 0;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
};

/// A JSON string or array of strings as one comma-separated list.
std::string joined(const nlohmann::json &val) {
  if (val.is_string())
    return val.get<std::string>();
  std::string s;
  for (const auto &p : val)
    s += p.get<std::string>() + ",";
  return s;
}

void apply_config(BenchConfig &cfg, const nlohmann::json &j) {
  for (const auto &[key, val] : j.items()) {
    if (key == "count")
      cfg.formula_count = val.get<std::size_t>();
    else if (key == "sizes")
      cfg.sizes = val.is_string() ? parse_sizes(val.get<std::string>())
                                  : val.get<std::vector<int>>();
    else if (key == "patterns")
      cfg.patterns = parse_patterns(joined(val));
    else if (key == "approaches")
      cfg.approaches = parse_approaches(joined(val));
    else if (key == "processes")
      cfg.processes = val.get<std::size_t>();
    else if (key == "atoms_per_process")
      cfg.atoms_per_process = val.get<std::size_t>();
    else if (key == "trace_len")
      cfg.trace_len = val.get<std::size_t>();
    else if (key == "p_true")
      cfg.p_true = val.get<double>();
    else if (key == "seed")
      cfg.seed = val.get<std::uint64_t>();
    else if (key == "jobs")
      cfg.jobs = val.get<unsigned>();
    else if (key != "csv")
      throw UsageError("unknown config key " + key);
  }
}

int cmd_bench(const BenchArgs &a, const CLI::App &sub) {
  BenchConfig cfg;
  std::string csv = a.csv;
  bool seed_set = false;
  if (!a.config.empty()) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(a.config));
      apply_config(cfg, j);
    } catch (const nlohmann::json::exception &e) {
      throw UsageError(std::string("bad config: ") + e.what());
    }
    seed_set = j.contains("seed");
    if (csv.empty() && j.contains("csv"))
      csv = j["csv"].get<std::string>();
  }
  auto given = [&](const char *name) { return sub.count(name) > 0; };
  if (given("--count"))
    cfg.formula_count = a.count;
  if (given("--sizes"))
    cfg.sizes = parse_sizes(a.sizes);
  if (given("--patterns"))
    cfg.patterns = parse_patterns(a.patterns);
  if (given("--approaches"))
    cfg.approaches = parse_approaches(a.approaches);
  if (given("--processes"))
    cfg.processes = a.processes;
  if (given("--atoms-per-process"))
    cfg.atoms_per_process = a.atoms;
  if (given("--trace-len"))
    cfg.trace_len = a.trace_len;
  if (given("--p-true"))
    cfg.p_true = a.p_true;
  if (given("--jobs"))
    cfg.jobs = a.jobs;
  if (given("--seed")) {
    cfg.seed = a.seed;
  } else if (!seed_set) {
    if (const char *env = std::getenv("DECLMON_SEED")) {
      try {
        cfg.seed = std::stoull(env);
      } catch (const std::exception &) {
        throw UsageError("DECLMON_SEED is not a number");
      }
    }
  }
  if (cfg.formula_count == 0 || cfg.trace_len == 0 || cfg.processes == 0 ||
      cfg.atoms_per_process == 0 || cfg.p_true < 0 || cfg.p_true > 1)
    throw UsageError("bad bench configuration");

  BenchReport report = bench(cfg);
  if (!csv.empty()) {
    std::ofstream out(csv);
    if (!out)
      throw UsageError("cannot write " + csv);
    report.write_csv(out);
  }
  report.write_table(std::cout);
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Decentralized LTL monitoring"};
  app.require_subcommand(1);

  MonitorArgs ma;
  auto *mon = app.add_subcommand("monitor", "Monitor a trace on a process ring");
  mon->add_option("-f,--formula", ma.formula, "LTL formula")->required();
  mon->add_option("-a,--alphabet", ma.alphabet, "Processes, e.g. A:a1,a2;B:b")
      ->required();
  mon->add_option("-t,--trace", ma.trace, "Trace file")->required();
  mon->add_option("-s,--strategy", ma.strategy, "dm1 or dm2");
  mon->add_flag("-q,--quiet", ma.quiet, "Omit the round log");
  mon->add_flag("--dump-tables", ma.dump_tables, "Print truth tables per round");

  std::string tab_formula, dump;
  auto *tab = app.add_subcommand("tableau", "Satisfiability via the tableau");
  tab->add_option("formula", tab_formula, "LTL formula")->required();
  tab->add_option("--dump-tableau", dump, "Write the tableau as DOT");

  std::string ded_formula, ded_value = "?", observed;
  Step ded_time = 0;
  auto *ded = app.add_subcommand("deduce", "Deductions from an evaluated formula");
  ded->add_option("formula", ded_formula, "Rule-shaped formula")->required();
  ded->add_option("-v,--value", ded_value, "T, F or ?");
  ded->add_option("-n,--time", ded_time, "Evaluation step")
      ->check(CLI::NonNegativeNumber);
  ded->add_option("-o,--observed", observed,
                  "Atoms the evaluator observed at every step, comma separated");

  std::string or_formula, or_trace;
  auto *orc = app.add_subcommand("oracle", "Centralized three-valued verdict");
  orc->add_option("formula", or_formula, "LTL formula")->required();
  orc->add_option("-t,--trace", or_trace, "Trace file")->required();

  BenchArgs ba;
  auto *ben = app.add_subcommand("bench", "Random or pattern benchmark");
  ben->add_option("--config", ba.config, "JSON config; flags override it");
  ben->add_option("--sizes", ba.sizes, "Formula sizes, e.g. 1..3 or 1,2,4");
  ben->add_option("--patterns", ba.patterns, "all or a list of pattern names");
  ben->add_option("--count", ba.count, "Samples per size or pattern");
  ben->add_option("--approaches", ba.approaches, "Subset of dm1,dm2,bf");
  ben->add_option("--seed", ba.seed, "Seed (fallback: DECLMON_SEED)");
  ben->add_option("--processes", ba.processes, "Number of processes");
  ben->add_option("--atoms-per-process", ba.atoms, "Atoms per process");
  ben->add_option("--trace-len", ba.trace_len, "Trace length");
  ben->add_option("--p-true", ba.p_true, "Probability an atom holds");
  ben->add_option("--jobs", ba.jobs, "Worker threads");
  ben->add_option("--csv", ba.csv, "Write per-run rows as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*mon)
      return cmd_monitor(ma);
    if (*tab)
      return cmd_tableau(tab_formula, dump);
    if (*ded)
      return cmd_deduce(ded_formula, ded_value, ded_time, observed);
    if (*orc)
      return cmd_oracle(or_formula, or_trace);
    return cmd_bench(ba, *ben);
  } catch (const ConflictError &e) {
    std::cerr << "conflict: " << e.what() << "\n";
    return kExitConflict;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

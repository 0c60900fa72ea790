#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "declmon/bench.hpp"
#include "declmon/inference.hpp"
#include "declmon/monitor.hpp"
#include "declmon/tableau.hpp"

namespace py = pybind11;
using namespace declmon;

namespace {

TruthValue3 value_of(const std::string &s) {
  if (s == "T")
    return TruthValue3::Top;
  if (s == "F")
    return TruthValue3::Bot;
  if (s == "?")
    return TruthValue3::Unknown;
  throw py::value_error("truth value must be T, F or ?");
}

py::dict metrics_dict(const Metrics &m) {
  py::dict d;
  d["num_msgs"] = m.num_msgs;
  d["msg_bits"] = m.msg_bits;
  d["trace_len"] = m.trace_len;
  d["mem_bits"] = m.mem_bits;
  return d;
}

Strategy strategy_of(const std::string &s) {
  if (s == "dm1" || s == "DM1")
    return Strategy::DM1;
  if (s == "dm2" || s == "DM2")
    return Strategy::DM2;
  throw py::value_error("strategy must be dm1 or dm2");
}

py::dict monitor(const std::string &alphabet, const std::string &formula,
                 const std::string &trace, const std::string &strategy) {
  SystemAlphabet al = SystemAlphabet::parse(alphabet);
  RunResult r = run(al, parse(formula), parse_trace(trace),
                    strategy_of(strategy));
  py::dict d;
  d["verdict"] = to_string(r.verdict);
  d["decider"] = r.decider;
  d["round"] = r.round;
  d["ring"] = r.ring.ring();
  d["metrics"] = metrics_dict(r.metrics);
  return d;
}

py::dict monitor_bf(const std::string &alphabet, const std::string &formula,
                    const std::string &trace) {
  SystemAlphabet al = SystemAlphabet::parse(alphabet);
  BfResult r = run_bf(al, parse(formula), parse_trace(trace));
  py::dict d;
  d["verdict"] = to_string(r.verdict);
  d["decider"] = r.decider;
  d["round"] = r.round;
  d["metrics"] = metrics_dict(r.metrics);
  return d;
}

std::vector<std::tuple<std::string, Step, std::string>>
deduce_facts(const std::string &formula, const std::string &value,
             const std::vector<std::string> &observed, Step time) {
  EvaluatedFormula ev{parse(formula), value_of(value), "P", time};
  std::vector<std::tuple<std::string, Step, std::string>> out;
  for (const auto &d : deduce(ev, ObservationSet::at_step("P", observed, time)))
    out.emplace_back(d.atom, d.time, to_string(d.value));
  return out;
}

py::dict run_bench(py::dict config) {
  BenchConfig cfg;
  if (config.contains("count"))
    cfg.formula_count = config["count"].cast<std::size_t>();
  if (config.contains("sizes"))
    cfg.sizes = config["sizes"].cast<std::vector<int>>();
  if (config.contains("patterns")) {
    for (const auto &name : config["patterns"].cast<std::vector<std::string>>()) {
      auto k = parse_pattern(name);
      if (!k)
        throw py::value_error("unknown pattern " + name);
      cfg.patterns.push_back(*k);
    }
  }
  if (config.contains("approaches")) {
    cfg.approaches.clear();
    for (const auto &name :
         config["approaches"].cast<std::vector<std::string>>()) {
      auto a = parse_approach(name);
      if (!a)
        throw py::value_error("unknown approach " + name);
      cfg.approaches.push_back(*a);
    }
  }
  if (config.contains("processes"))
    cfg.processes = config["processes"].cast<std::size_t>();
  if (config.contains("atoms_per_process"))
    cfg.atoms_per_process = config["atoms_per_process"].cast<std::size_t>();
  if (config.contains("trace_len"))
    cfg.trace_len = config["trace_len"].cast<std::size_t>();
  if (config.contains("p_true"))
    cfg.p_true = config["p_true"].cast<double>();
  if (config.contains("seed"))
    cfg.seed = config["seed"].cast<std::uint64_t>();
  if (config.contains("jobs"))
    cfg.jobs = config["jobs"].cast<unsigned>();

  BenchReport rep;
  {
    py::gil_scoped_release release;
    rep = bench(cfg);
  }
  py::list rows;
  for (const auto &r : rep.rows) {
    py::dict d = metrics_dict(r.metrics);
    d["approach"] = to_string(r.approach);
    d["group"] = r.group;
    d["formula"] = r.formula;
    d["verdict"] = to_string(r.verdict);
    d["seed"] = r.seed;
    rows.append(d);
  }
  std::ostringstream csv;
  rep.write_csv(csv);
  py::dict out;
  out["rows"] = rows;
  out["csv"] = csv.str();
  return out;
}

} // namespace

PYBIND11_MODULE(_declmon, m) {
  m.doc() = "Decentralized LTL runtime monitoring";

  // Translators run newest first, so the subclass goes last.
  py::register_exception<Error>(m, "DeclmonError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  m.def("normalize", [](const std::string &f) {
    return simplify(nnf(parse(f))).to_string();
  }, "Parse, convert to negation normal form and simplify.");
  m.def("size", [](const std::string &f) { return size(parse(f)); },
        "Number of temporal operators.");
  m.def("atoms", [](const std::string &f) { return atoms(parse(f)); });
  m.def("classify", [](const std::string &f) {
    return std::string(to_string(classify(parse(f))));
  }, "UNSAT, SAT or VALID.");
  m.def("progress", [](const std::string &f, const std::set<std::string> &e) {
    return simplify(progress(parse(f), Event{e})).to_string();
  }, py::arg("formula"), py::arg("event"));
  m.def("ltl3", [](const std::string &f, const std::string &trace) {
    return std::string(to_string(ltl3_eval(parse_trace(trace), parse(f))));
  }, py::arg("formula"), py::arg("trace"),
        "Three-valued verdict of a finite trace prefix.");
  m.def("deduce", &deduce_facts, py::arg("formula"), py::arg("value"),
        py::arg("observed") = std::vector<std::string>{},
        py::arg("time") = 0,
        "Facts forced by a formula having a truth value at a time.");
  m.def("monitor", &monitor, py::arg("alphabet"), py::arg("formula"),
        py::arg("trace"), py::arg("strategy") = "dm1");
  m.def("monitor_bf", &monitor_bf, py::arg("alphabet"), py::arg("formula"),
        py::arg("trace"));
  m.def("bench", &run_bench, py::arg("config") = py::dict());
}

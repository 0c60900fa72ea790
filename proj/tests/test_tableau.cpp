#include "declmon/tableau.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace declmon;
using TV = TruthValue3;

namespace {

std::size_t ticked(const Formula &f) {
  return refine(build(nnf(f))).ticked_branches().size();
}

} // namespace

TEST_CASE("conjunction with a disjunction splits into two branches") {
  Tableau t = build(nnf(parse("p & (q | r)")));
  CHECK(is_satisfiable(t));
  CHECK(t.ticked_branches().size() == 2);
  std::vector<std::set<std::string>> lits;
  for (const auto &b : branch_profiles(t, SystemAlphabet::parse("P:p;Q:q,r")))
    lits.push_back(b.literal_atoms);
  CHECK(lits == std::vector<std::set<std::string>>{{"p", "q"}, {"p", "r"}});
}

TEST_CASE("G p closes with a successful loop") {
  Tableau t = build(nnf(parse("G p")));
  CHECK(is_satisfiable(t));
  CHECK(t.ticked_branches().size() == 1);
  bool loop = false;
  for (const auto &n : t.nodes())
    loop = loop || n.loop_closure;
  CHECK(loop);
  CHECK(ticked(parse("G p")) == 1);
}

TEST_CASE("unfulfilled eventualities are crossed") {
  CHECK_FALSE(satisfiable(parse("G p & F !p")));
  CHECK_FALSE(satisfiable(parse("G !p & F p")));
  CHECK_FALSE(satisfiable(parse("(p U q) & G !q")));
  CHECK(satisfiable(parse("G F p & G F !p")));
  CHECK(satisfiable(parse("p U q")));
}

TEST_CASE("classification") {
  CHECK(classify(parse("p & !p")) == Satisfiability::Unsatisfiable);
  CHECK(classify(parse("p | !p")) == Satisfiability::Valid);
  CHECK(classify(parse("F p")) == Satisfiability::Satisfiable);
  CHECK(classify(parse("G p -> F p")) == Satisfiability::Valid);
  CHECK(std::string(to_string(Satisfiability::Valid)) == "VALID");
}

TEST_CASE("refine keeps only ticked paths and is idempotent") {
  Formula f = nnf(parse("(p & !p) | (q & X r) | G s"));
  Tableau r1 = refine(build(f));
  Tableau r2 = refine(r1);
  CHECK(r1.node_count() == r2.node_count());
  for (const auto &n : r1.nodes())
    if (n.children.empty())
      CHECK(n.status == NodeStatus::Ticked);
  CHECK(r1.ticked_branches().size() == build(f).ticked_branches().size());
}

TEST_CASE("branch profiles for the two-subformula example") {
  // G(a1 & !a2 & b1) | F(b2 & c): three successful branches, A on one,
  // B on three, C on two.
  auto alpha = SystemAlphabet::parse("A:a1,a2;B:b1,b2;C:c");
  Tableau t = refine(build(nnf(parse("G(a1 & !a2 & b1) | F(b2 & c)"))));
  auto profiles = branch_profiles(t, alpha);
  CHECK(profiles.size() == 3);
  std::map<ProcessId, std::size_t> on;
  for (const auto &b : profiles)
    for (const auto &[p, n] : b.per_process_count)
      on[p] += n > 0;
  CHECK(on["A"] == 1);
  CHECK(on["B"] == 3);
  CHECK(on["C"] == 2);
}

TEST_CASE("dot output") {
  std::string dot = to_dot(build(nnf(parse("p & (q | r)"))));
  CHECK(dot.rfind("digraph", 0) == 0);
  CHECK(dot.find("q | r") != std::string::npos);
}

TEST_CASE("node budget") {
  CHECK_THROWS_AS(build(nnf(parse("G(a | F b) & G(c | F d)")), 5),
                  TableauLimitError);
}

TEST_CASE("satisfiable agrees with the lasso search on a small corpus") {
  auto corpus = oracle::enumerate_formulas({"p", "q"}, 4, 2);
  std::size_t bad = 0;
  for (const auto &f : corpus) {
    bool a = satisfiable(f), b = oracle::lasso_sat(f);
    bool c = is_satisfiable(build(nnf(f)));
    if (a != b || a != c) {
      ++bad;
      MESSAGE(f.to_string() << " dfs=" << a << " full=" << c << " lasso=" << b);
    }
  }
  CHECK(bad == 0);
}

TEST_CASE("ltl3 verdicts of small prefixes") {
  CHECK(ltl3_eval({}, parse("F p")) == TV::Unknown);
  CHECK(ltl3_eval({Event{{"p"}}}, parse("F p")) == TV::Top);
  CHECK(ltl3_eval({Event{}}, parse("G p")) == TV::Bot);
  CHECK(ltl3_eval({}, parse("p & !p")) == TV::Bot);
  CHECK(ltl3_eval({}, parse("G p | F !p")) == TV::Top);

  auto corpus = oracle::enumerate_formulas({"p", "q"}, 4, 2);
  std::vector<Trace> prefixes{{}, {Event{{"p"}}}, {Event{}, Event{{"q"}}}};
  std::size_t bad = 0;
  for (const auto &f : corpus)
    for (const auto &u : prefixes)
      if (ltl3_eval(u, f) != oracle::lasso_ltl3(u, f)) {
        ++bad;
        MESSAGE(f.to_string() << " on " << format_trace(u));
      }
  CHECK(bad == 0);
}

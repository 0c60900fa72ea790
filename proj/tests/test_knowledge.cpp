#include "declmon/knowledge.hpp"

#include <doctest.h>

using namespace declmon;
using TV = TruthValue3;

namespace {

ObsPowerModel abc() {
  return ObsPowerModel(CommScheme({"A", "B", "C"}),
                       SystemAlphabet::parse("A:a1,a2;B:b;C:c"));
}

FactSet facts(const SystemAlphabet &al, const ProcessId &p, Step from,
              Step to) {
  FactSet out;
  for (const auto &a : al.atoms_of(p))
    for (Step s = from; s <= to; ++s)
      out.insert(Fact{a, s});
  return out;
}

FactSet unite(std::initializer_list<FactSet> parts) {
  FactSet out;
  for (const auto &p : parts)
    out.insert(p.begin(), p.end());
  return out;
}

} // namespace

TEST_CASE("ring distances") {
  CommScheme r({"A", "B", "C"});
  CHECK(r.successor("C") == "A");
  CHECK(r.predecessor("A") == "C");
  CHECK(r.distance("A", "B") == 1);
  CHECK(r.distance("B", "A") == 2);
  CHECK(r.distance("A", "A") == 0);
  CHECK(r.to_string() == "A -> B -> C -> A");
  CHECK_THROWS_AS(CommScheme({"A", "A"}), Error);
}

TEST_CASE("observation power on the three-process ring") {
  auto m = abc();
  const auto &al = m.alphabet();
  CHECK(obs_power(m, "A", 2) == unite({facts(al, "A", 0, 2),
                                       facts(al, "C", 0, 1),
                                       facts(al, "B", 0, 0)}));
  CHECK(obs_power(m, "B", 2) == unite({facts(al, "A", 0, 1),
                                       facts(al, "B", 0, 2),
                                       facts(al, "C", 0, 0)}));
  CHECK(obs_power(m, "C", 0) == facts(al, "C", 0, 0));
  CHECK(obs_diff(m, "A", "B", 0) == facts(al, "A", 0, 0));
  CHECK(obs_diff(m, "A", "B", 2) ==
        unite({facts(al, "A", 2, 2), facts(al, "C", 1, 1)}));
  CHECK(earliest_new_step(m, "A", "B", 2) == 1);
}

TEST_CASE("observation power invariants") {
  auto m = abc();
  for (const auto &p : m.alphabet().processes())
    for (Step t = 0; t < 6; ++t) {
      auto now = obs_power(m, p, t);
      auto later = obs_power(m, p, t + 1);
      for (const auto &f : now)
        CHECK(later.count(f) == 1);
      for (const auto &f : facts(m.alphabet(), p, 0, t))
        CHECK(now.count(f) == 1);
      if (t >= 2)
        for (const auto &q : m.alphabet().processes())
          for (const auto &f : facts(m.alphabet(), q, 0, 0))
            CHECK(now.count(f) == 1);
      const auto &succ = m.scheme().successor(p);
      auto diff = obs_diff(m, p, succ, t);
      for (const auto &f : diff)
        CHECK(obs_power(m, succ, t).count(f) == 0);
      // The successor's next view is its own step plus what it knew plus
      // what the sender could add.
      FactSet next = obs_power(m, succ, t);
      next.insert(diff.begin(), diff.end());
      auto own = facts(m.alphabet(), succ, t + 1, t + 1);
      next.insert(own.begin(), own.end());
      CHECK(next == obs_power(m, succ, t + 1));
    }
}

TEST_CASE("truth table indexing") {
  auto idx_of = [](const char *phi) {
    Formula f = nnf(parse(phi));
    return FormulaIndex::build(f, refine(build(f)));
  };
  auto single = idx_of("p");
  REQUIRE(single.size() == 1);
  CHECK(single.at(0) == parse("p"));
  CHECK(single.index_bits() == 0);

  auto fig1 = idx_of("p & (q | r)");
  std::vector<std::string> got;
  for (const auto &f : fig1.formulas())
    got.push_back(f.to_string());
  CHECK(got == std::vector<std::string>{"p & (q | r)", "q | r", "p", "q", "r"});
  CHECK(fig1.index_bits() == 3);

  auto ev = idx_of("F(a1 & !a2 & b & !c)");
  CHECK(ev.find(parse("F(a1 & !a2 & b & !c)")));
  CHECK(ev.find(parse("a1 & !a2 & b & !c")));
  for (const char *a : {"a1", "a2", "b", "c"})
    CHECK(ev.find(parse(a)));

  // Independent constructions agree.
  auto again = idx_of("F(a1 & !a2 & b & !c)");
  CHECK(again.formulas() == ev.formulas());

  auto t = build_truth_table(parse("p & (q | r)"),
                             refine(build(parse("p & (q | r)"))), 3);
  CHECK(t.state == 3);
  for (const auto &e : t.entries)
    CHECK(e.value == TV::Unknown);
}

TEST_CASE("table entries evaluate with bounded scope") {
  PartialValuation v;
  v.set("a", 0, true);
  v.set("a", 1, false);
  FactView view = [&](const Fact &f) { return v.get(f); };
  CHECK(evaluate_entry(parse("G a"), 0, view) == TV::Top);
  CHECK(evaluate_entry(parse("G a"), 1, view) == TV::Bot);
  CHECK(evaluate_entry(parse("F !a"), 0, view) == TV::Bot);
  CHECK(evaluate_entry(parse("F b"), 1, view) == TV::Unknown);
  CHECK(evaluate_entry(parse("F !a"), 1, view) == TV::Top);
  CHECK(evaluate_entry(parse("a | b"), 0, view) == TV::Top);
  CHECK(evaluate_entry(parse("a U b"), 0, view) == TV::Unknown);
}

TEST_CASE("knowledge store updates") {
  Formula phi = parse("a | b");
  KnowledgeStore s("P", FormulaIndex::build(phi, refine(build(phi))));
  CHECK(s.table(0).entries[0].value == TV::Unknown);
  auto fresh = s.update({Deduction{"a", 0, TV::Top}});
  CHECK(fresh == FactSet{Fact{"a", 0}});
  CHECK(s.table(0).entries[0].value == TV::Top);
  CHECK(s.update({Deduction{"a", 0, TV::Top}}).empty());
  CHECK_THROWS_AS(s.update({Deduction{"a", 0, TV::Bot}}), ConflictError);

  s.set_visibility([](const Fact &f) { return f.atom != "a"; });
  CHECK(s.table(0).entries[0].value == TV::Unknown);

  s.table(1);
  s.table(2);
  CHECK(s.table_bits() == 3 * s.index().size() * 2);
  s.collect_before(2);
  CHECK(s.tables().size() == 1);

  KnowledgeStore s2 = update(s, {Deduction{"b", 4, TV::Bot}});
  CHECK(s2.known(Fact{"b", 4}) == TV::Bot);
  CHECK(s.known(Fact{"b", 4}) == TV::Unknown);
}

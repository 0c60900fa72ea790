#include "declmon/monitor.hpp"

#include <doctest.h>

using namespace declmon;
using TV = TruthValue3;

namespace {

const SystemAlphabet &abc() {
  static const SystemAlphabet a = SystemAlphabet::parse("A:a1,a2;B:b;C:c");
  return a;
}

} // namespace

TEST_CASE("ring ranking by atoms") {
  CHECK(rank_dm1(abc(), parse("F(a1 & !a2 & b & !c)")).ring() ==
        std::vector<ProcessId>{"A", "B", "C"});
  CHECK(rank_dm1(SystemAlphabet::parse("X:x;Y:y;Z:z"), parse("x | y | z"))
            .ring() == std::vector<ProcessId>{"X", "Y", "Z"});
  CHECK(rank_dm1(SystemAlphabet::parse("X:x;Y:y1,y2"), parse("x | y1 | y2"))
            .ring() == std::vector<ProcessId>{"Y", "X"});
}

TEST_CASE("ring ranking by branches") {
  auto al = SystemAlphabet::parse("A:a1,a2;B:b1,b2;C:c");
  Formula phi = nnf(parse("G(a1 & !a2 & b1) | F(b2 & c)"));
  CHECK(rank_dm1(al, phi).ring() == std::vector<ProcessId>{"A", "B", "C"});
  CHECK(rank_dm2(refine(build(phi)), al).ring() ==
        std::vector<ProcessId>{"B", "C", "A"});
  Formula fig1 = parse("p & (q | r)");
  CHECK(rank_dm2(refine(build(fig1)), SystemAlphabet::parse("P:p;Q:q,r"))
            .ring() == std::vector<ProcessId>{"P", "Q"});
  CHECK(rank_dm2(refine(build(parse("F p"))), SystemAlphabet::parse("P:p"))
            .ring() == std::vector<ProcessId>{"P"});
}

TEST_CASE("message size") {
  Message m{"A", 0, {PayloadPair{3, 0, TV::Unknown}, PayloadPair{1, 0, TV::Top}}};
  CHECK(message_bits(m, 7) == 16 + 2 * (3 + 8 + 2));
  CHECK(message_bits(Message{"A", 0, {}}, 7) == 16);
  CHECK(message_bits(Message{"A", 0, {PayloadPair{}}}, 1) == 16 + 10);
}

TEST_CASE("setup verdicts cost nothing") {
  auto r = run(abc(), parse("b & !b"), {Event{}}, Strategy::DM1);
  CHECK(r.verdict == TV::Bot);
  CHECK(r.metrics.num_msgs == 0);
  CHECK_FALSE(r.round);
  auto v = run(abc(), parse("b | !b"), {Event{}}, Strategy::DM2);
  CHECK(v.verdict == TV::Top);
  CHECK(v.metrics.num_msgs == 0);
}

TEST_CASE("local verdicts") {
  auto r = run(abc(), parse("F b"), {Event{{"b"}}}, Strategy::DM1);
  CHECK(r.verdict == TV::Top);
  CHECK(r.decider == "B");
  CHECK(r.round == 0);
  auto g = run(abc(), parse("G b"), {Event{{"b"}}, Event{}}, Strategy::DM1);
  CHECK(g.verdict == TV::Bot);
  CHECK(g.round == 1);
  CHECK(g.decider == "B");
}

TEST_CASE("the one-state scenario on the three-process ring") {
  Formula phi = parse("F(a1 & !a2 & b & !c)");
  Trace tr{Event{{"a1", "b"}}, Event{{"a1", "b"}}, Event{{"a1", "b"}}};
  RunObserver obs;
  std::vector<Message> from_a;
  std::map<Step, PartialValuation> b_knows;
  obs.on_message = [&](const Message &m, const ProcessId &, const FactSet &) {
    if (m.sender == "A")
      from_a.push_back(m);
  };
  obs.on_round = [&](Step t, const std::vector<MonitorState> &ms) {
    for (const auto &s : ms)
      if (s.pid == "B")
        b_knows[t] = s.store.valuation();
  };
  auto r = run(abc(), phi, tr, Strategy::DM1, obs);
  CHECK(r.ring.ring() == std::vector<ProcessId>{"A", "B", "C"});
  REQUIRE(!from_a.empty());
  MonitorSetup setup = MonitorSetup::make(abc(), phi, Strategy::DM1);
  REQUIRE(from_a[0].payload.size() == 1);
  CHECK(setup.index.at(from_a[0].payload[0].index) ==
        parse("a1 & !a2 & b & !c"));
  CHECK(from_a[0].payload[0].value == TV::Unknown);
  // B learns a1 and a2 in the round after A's first message, and c one
  // round later.
  REQUIRE(b_knows.count(1));
  CHECK(b_knows[1].get("a1", 0) == TV::Top);
  CHECK(b_knows[1].get("a2", 0) == TV::Bot);
  CHECK(b_knows[1].get("c", 0) == TV::Unknown);
  REQUIRE(b_knows.count(2));
  CHECK(b_knows[2].get("c", 0) == TV::Bot);
  CHECK(r.verdict == TV::Top);
  CHECK(ltl3_eval({tr[0]}, phi) == TV::Top);
}

TEST_CASE("min list picks one compound pair or falls back to atoms") {
  Formula phi = nnf(parse("(a & b) | (c & (d | e))"));
  auto al = SystemAlphabet::parse("P:a,d,e;Q:b,c");
  Tableau tab = refine(build(phi));
  FormulaIndex idx = FormulaIndex::build(phi, tab);
  KnowledgeStore s("P", idx);
  s.observe(Event{}, al.atoms_of("P"), 0);
  ObservationSet obs("P", [&](const Fact &f) {
    return f.step == 0 && al.atoms_of("P").count(f.atom);
  });
  s.set_visibility([&](const Fact &f) {
    return f.step == 0 && al.atoms_of("P").count(f.atom) != 0;
  });
  std::map<Step, TruthTable> tables{{0, s.table(0)}};
  FactSet M{Fact{"a", 0}, Fact{"d", 0}, Fact{"e", 0}};
  auto pl = min_list(M, tables, idx, obs);
  REQUIRE(pl.size() == 1);
  CHECK(idx.at(pl[0].index) == phi);
  CHECK(pl[0].value == TV::Bot);
  CHECK(pair_deductions(phi, pl[0], obs) == M);

  auto single = min_list(FactSet{Fact{"a", 0}}, tables, idx, obs);
  REQUIRE(single.size() == 1);
  CHECK(idx.at(single[0].index) == parse("a"));
  CHECK(single[0].value == TV::Bot);
}

TEST_CASE("alphabet mismatches are rejected") {
  CHECK_THROWS_AS(run(abc(), parse("F zz"), {Event{}}, Strategy::DM1), Error);
  CHECK_THROWS_AS(run(abc(), parse("F b"), {Event{{"zz"}}}, Strategy::DM1),
                  Error);
}

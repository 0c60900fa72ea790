#include "declmon/inference.hpp"
#include "rule_gen.hpp"

#include <doctest.h>

using namespace declmon;
using TV = TruthValue3;

namespace {

ObservationSet seen(std::vector<std::string> atoms, Step step = 0) {
  return ObservationSet::at_step("P", atoms, step);
}

std::set<std::string> show(const std::vector<Deduction> &ds) {
  std::set<std::string> out;
  for (const auto &d : ds)
    out.insert(d.to_string());
  return out;
}

std::vector<Deduction> run(const char *f, TV v, const ObservationSet &obs,
                           Step t = 0) {
  return deduce(EvaluatedFormula{parse(f), v, "P", t}, obs);
}

} // namespace

TEST_CASE("true conjunction pins every conjunct") {
  CHECK(show(run("a & b & c", TV::Top, seen({"a", "b", "c"}))) ==
        std::set<std::string>{"a@0=T", "b@0=T", "c@0=T"});
  CHECK(show(run("a & !b", TV::Top, seen({}))) ==
        std::set<std::string>{"a@0=T", "b@0=F"});
}

TEST_CASE("false disjunction of conjunctions with one observed atom each") {
  CHECK(show(run("(a & b) | (!c & d)", TV::Bot, seen({"a", "c"}))) ==
        std::set<std::string>{"a@0=F", "c@0=T"});
}

TEST_CASE("nested decomposition") {
  CHECK(show(run("(a & b) | (c & (d | e))", TV::Bot, seen({"a", "d", "e"}))) ==
        std::set<std::string>{"a@0=F", "d@0=F", "e@0=F"});
}

TEST_CASE("unknown conjunction pins its observed conjuncts") {
  CHECK(show(run("a1 & !a2 & b & !c", TV::Unknown, seen({"a1", "a2"}))) ==
        std::set<std::string>{"a1@0=T", "a2@0=F"});
  CHECK(deduction_set(parse("a1 & !a2 & b & !c"), TV::Unknown,
                      seen({"a1", "a2"})) ==
        FactSet{Fact{"a1", 0}, Fact{"a2", 0}});
  CHECK(deduction_set(parse("a | b"), TV::Unknown, seen({})).empty());
  CHECK(deduction_set(parse("a | (b & c)"), TV::Bot, seen({"a", "b"})) ==
        FactSet{Fact{"a", 0}, Fact{"b", 0}});
}

TEST_CASE("temporal scope unfolding") {
  ObservationSet all("P", [](const Fact &) { return true; });
  auto ds = deduce_temporal(EvaluatedFormula{parse("F(a | b | c)"), TV::Bot,
                                             "P", 2},
                            all, 2);
  CHECK(ds.size() == 9);
  for (const auto &d : ds)
    CHECK(d.value == TV::Bot);
  CHECK(show(deduce_temporal(
            EvaluatedFormula{parse("G a"), TV::Top, "P", 0}, all, 0)) ==
        std::set<std::string>{"a@0=T"});
  // A true disjunction pins nothing when nothing was observed.
  CHECK(deduce_temporal(EvaluatedFormula{parse("G(a | b)"), TV::Top, "P", 2},
                        seen({}), 2)
            .empty());
  // With `a` observed at every step, a true `a | b` with `b` unseen can
  // only have come from `a`.
  ObservationSet only_a("P", [](const Fact &f) { return f.atom == "a"; });
  CHECK(show(deduce_temporal(EvaluatedFormula{parse("G(a | b)"), TV::Top,
                                              "P", 2},
                             only_a, 2)) ==
        std::set<std::string>{"a@0=T", "a@1=T", "a@2=T"});
  CHECK_THROWS_AS(deduce_temporal(EvaluatedFormula{parse("G F a"), TV::Top,
                                                   "P", 1},
                                  all, 1),
                  Error);
  CHECK(run("a U b", TV::Top, seen({"a", "b"})).empty());
}

TEST_CASE("rule matching") {
  ObservationSet any("P", [](const Fact &) { return true; });
  CHECK(match_rule(parse("a & b & c"), TV::Top, any) == RuleId::R1);
  CHECK(match_rule(parse("a | (b & c)"), TV::Unknown, seen({"a", "b"})) ==
        RuleId::R6);
  CHECK_FALSE(match_rule(parse("p"), TV::Top, any));
  CHECK(match_rule(parse("(a & b) | (!c & d)"), TV::Bot, seen({"a", "c"})) ==
        RuleId::R9);
  CHECK(match_rule(parse("G(a | b)"), TV::Top, any) == RuleId::R11);
  CHECK(match_rule(parse("F(a & b)"), TV::Bot, any) == RuleId::R12);
  CHECK(matches_rule_shape(parse("a & (b | c)")));
  CHECK(matches_rule_shape(parse("F(a & b)")));
  CHECK_FALSE(matches_rule_shape(parse("a")));
  CHECK_FALSE(matches_rule_shape(parse("a U b")));
  CHECK_FALSE(matches_rule_shape(parse("X(a & b)")));
}

TEST_CASE("de morgan duality of the distributed rules") {
  // R10 on f = T mirrors R9 on the and/or dual with F, values flipped.
  ObservationSet obs = seen({"a", "c"});
  auto r9 = run("(a & b) | (!c & d)", TV::Bot, obs);
  auto r10 = run("(a | b) & (!c | d)", TV::Top, obs);
  REQUIRE(r9.size() == r10.size());
  for (std::size_t i = 0; i < r9.size(); ++i) {
    CHECK(r9[i].fact() == r10[i].fact());
    CHECK(r9[i].value == kleene_not(r10[i].value));
  }
}

TEST_CASE("random premises per rule agree with enumeration") {
  rulegen::Rng rng(2024);
  for (int r = 1; r <= 12; ++r) {
    RuleId id = static_cast<RuleId>(r);
    for (int i = 0; i < 60; ++i) {
      rulegen::Case c = rulegen::random_case(id, rng);
      rulegen::Verdict v = rulegen::check(c);
      CAPTURE(to_string(id));
      CAPTURE(c.f.to_string());
      CHECK(v.unsound == 0);
      CHECK(v.missed == 0);
    }
  }
}

TEST_CASE("more observation never removes deductions from unknown premises") {
  // A ? premise under a larger view implies ? under the smaller one, so the
  // consistent assignments only shrink and forced values survive.
  rulegen::Rng rng(99);
  std::size_t checked = 0;
  for (int r = 1; r <= 12; ++r)
    for (int i = 0; i < 40; ++i) {
      rulegen::Case c = rulegen::random_case(static_cast<RuleId>(r), rng);
      if (c.v != TV::Unknown)
        continue;
      auto small = deduction_set(c.f, c.v, rulegen::observation(c), c.time);
      for (const auto &a : atoms(c.f)) {
        if (c.observed.count(a))
          continue;
        rulegen::Case big = c;
        big.observed.insert(a);
        if (!rulegen::reachable(big))
          continue;
        auto large =
            deduction_set(big.f, big.v, rulegen::observation(big), big.time);
        ++checked;
        for (const auto &f : small)
          CHECK(large.count(f) == 1);
      }
    }
  CHECK(checked > 50);
}

TEST_CASE("definite premises are not monotone in the observation set") {
  CHECK(deduction_set(parse("a | b"), TV::Top, seen({"a"})) ==
        FactSet{Fact{"a", 0}});
  CHECK(deduction_set(parse("a | b"), TV::Top, seen({"a", "b"})).empty());
}

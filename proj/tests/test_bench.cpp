#include "declmon/bench.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace declmon;
using TV = TruthValue3;

TEST_CASE("random formulas have the requested size") {
  std::vector<std::string> atoms{"a1", "a2", "b1", "b2", "c1", "c2"};
  Rng rng(5);
  for (int s = 1; s <= 6; ++s)
    for (int i = 0; i < 200; ++i)
      CHECK(size(random_formula(s, atoms, rng)) == static_cast<std::size_t>(s));
  CHECK(random_formula(3, atoms, std::uint64_t{42}) ==
        random_formula(3, atoms, std::uint64_t{42}));
  CHECK_THROWS_AS(random_formula(0, atoms, rng), Error);
}

TEST_CASE("pattern templates") {
  CHECK(pattern_template(PatternKind::Absence, {"a"}) == parse("G !a"));
  CHECK(pattern_template(PatternKind::Existence, {"a"}) == parse("F a"));
  CHECK(pattern_template(PatternKind::Universal, {"a"}) == parse("G a"));
  CHECK(pattern_template(PatternKind::Response, {"a", "b"}) ==
        parse("G(!a | F b)"));
  CHECK(pattern_template(PatternKind::Precedence, {"p", "s"}) ==
        parse("(!p U s) | G !p"));
  CHECK(pattern_template(PatternKind::ConstrainedChain, {"p", "s", "t", "z"}) ==
        parse("G(!p | F(s & !z & X(!z U t)))"));
  CHECK(all_patterns().size() == 9);
  for (auto k : all_patterns()) {
    CHECK(parse_pattern(to_string(k)) == k);
    Rng rng(1);
    Formula f = pattern_formula(k, {"a1", "a2", "b1", "b2", "c1", "c2"}, rng);
    CHECK(atoms(f).size() == pattern_arity(k));
    CHECK(classify(f) == Satisfiability::Satisfiable);
  }
  CHECK_FALSE(parse_pattern("nope"));
  Rng rng(1);
  CHECK_THROWS_AS(pattern_formula(PatternKind::ConstrainedChain, {"a"}, rng),
                  Error);
}

TEST_CASE("random traces") {
  auto al = bench_alphabet(3, 2);
  CHECK(al.all_atoms().size() == 6);
  for (const auto &e : random_trace(al, 5, 1.0, std::uint64_t{3}))
    CHECK(e.true_atoms.size() == 6);
  for (const auto &e : random_trace(al, 5, 0.0, std::uint64_t{3}))
    CHECK(e.true_atoms.empty());
  CHECK(random_trace(al, 20, 0.5, std::uint64_t{9}) ==
        random_trace(al, 20, 0.5, std::uint64_t{9}));
  CHECK_THROWS_AS(random_trace(al, 1, 1.5, std::uint64_t{0}), Error);
}

TEST_CASE("progression baseline") {
  auto al = SystemAlphabet::parse("A:a;B:b");
  auto r = run_bf(al, parse("F a"), {Event{{"a"}}});
  CHECK(r.verdict == TV::Top);
  CHECK(r.round == 0);
  CHECK(r.decider == "A");

  // An obligation waiting on remote facts travels every round but stays
  // bounded once the owner resolves its references.
  std::vector<std::size_t> sizes;
  Trace tr(8, Event{});
  auto w = run_bf(al, parse("G(a | F b)"), tr,
                  [&](Step, const ProcessId &, const Formula &o) {
                    sizes.push_back(o.symbol_count());
                  });
  CHECK(w.verdict == TV::Unknown);
  CHECK(w.metrics.num_msgs >= tr.size());
  REQUIRE(!sizes.empty());
  CHECK(*std::max_element(sizes.begin(), sizes.end()) <= 16);

  auto g = run_bf(al, parse("G(a & b)"), {Event{{"a", "b"}}, Event{{"a"}},
                                          Event{{"a"}}});
  CHECK(g.verdict == TV::Bot);
  CHECK(g.metrics.msg_bits >= 16 * g.metrics.num_msgs);
  CHECK(ltl3_eval(Trace{Event{{"a", "b"}}, Event{{"a"}}}, parse("G(a & b)")) ==
        TV::Bot);
}

TEST_CASE("bench report is deterministic and shaped like the tables") {
  BenchConfig cfg;
  cfg.formula_count = 4;
  cfg.sizes = {1, 2};
  cfg.trace_len = 30;
  cfg.seed = 11;
  auto a = bench(cfg);
  cfg.jobs = 3;
  auto b = bench(cfg);
  std::ostringstream ca, cb, tab;
  a.write_csv(ca);
  b.write_csv(cb);
  CHECK(ca.str() == cb.str());
  CHECK(ca.str().rfind("approach,formula_size_or_pattern,formula,verdict,"
                       "trace_len,num_msgs,msg_bits,mem_bits,seed\n",
                       0) == 0);
  CHECK(a.rows.size() == 4 * 2 * 3);
  a.write_table(tab);
  CHECK(tab.str().find("dm2:|mem|") != std::string::npos);

  BenchConfig only;
  only.formula_count = 2;
  only.sizes = {1};
  only.trace_len = 10;
  only.approaches = {Approach::DM1};
  std::ostringstream t2;
  bench(only).write_table(t2);
  CHECK(t2.str().find("bf:") == std::string::npos);
  for (const auto &row : a.rows)
    CHECK(row.metrics.msg_bits >= 16 * row.metrics.num_msgs);
}

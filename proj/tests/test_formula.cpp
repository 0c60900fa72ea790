#include "declmon/formula.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace declmon;

TEST_CASE("parse and print round trip") {
  for (const char *s : {"G p", "G(p & q)", "!p", "a U b", "false", "true",
                        "F(a1 & !a2 & b & !c)", "X X p", "a U b U c",
                        "p | q & r", "(p | q) & r", "G(!p | F s)"}) {
    Formula f = parse(s);
    CHECK(parse(f.to_string()) == f);
  }
  CHECK(parse("G p").to_string() == "G p");
  CHECK(parse("G (p & q)").to_string() == "G(p & q)");
  CHECK(parse("a U b").to_string() == "a U b");
  CHECK(parse("false").is_false());
}

TEST_CASE("precedence and associativity") {
  CHECK(parse("p | q & r") ==
        Formula::disj({Formula::atom("p"),
                       Formula::conj({Formula::atom("q"), Formula::atom("r")})}));
  CHECK(parse("a U b U c") ==
        Formula::until(Formula::atom("a"),
                       Formula::until(Formula::atom("b"), Formula::atom("c"))));
  // -> is sugar for !a | b and associates to the right
  CHECK(parse("a -> b -> c") == parse("!a | (!b | c)"));
  CHECK(parse("F a U b") ==
        Formula::until(Formula::finally(Formula::atom("a")),
                       Formula::atom("b")));
}

TEST_CASE("parse errors carry a position") {
  for (const char *s : {"", "p &", "(p", "p q", "G", "p U", "&p", "p @ q"}) {
    CAPTURE(s);
    CHECK_THROWS_AS(parse(s), ParseError);
  }
  try {
    parse("p & & q");
    FAIL("no throw");
  } catch (const ParseError &e) {
    CHECK(e.position() == 4);
  }
}

TEST_CASE("n-ary flattening and structural equality") {
  CHECK(parse("a & (b & c)") == parse("(a & b) & c"));
  CHECK(parse("a & (b & c)").children().size() == 3);
  CHECK(parse("a & b") != parse("b & a"));
  CHECK(parse("a & b").hash() == parse("a & b").hash());
}

TEST_CASE("atoms, lop, top") {
  Formula f = parse("G(a1 & !a2 & b1) | F(b2 & c)");
  CHECK(atoms(f) == std::set<std::string>{"a1", "a2", "b1", "b2", "c"});
  CHECK(atoms_ordered(f) ==
        std::vector<std::string>{"a1", "a2", "b1", "b2", "c"});
  CHECK(lop(f) == std::set<LogicalOp>{LogicalOp::And, LogicalOp::Or,
                                       LogicalOp::Not});
  CHECK(top(f) == std::set<TemporalOp>{TemporalOp::Globally,
                                        TemporalOp::Finally});
  CHECK(atoms(parse("true")).empty());
}

TEST_CASE("size counts temporal operators") {
  CHECK(size(parse("G(a & b) | G(c & d) | F e")) == 3);
  CHECK(size(parse("a & b")) == 0);
  CHECK(size(parse("G(p -> F q)")) == 2);
  CHECK(size(parse("a U (X b)")) == 2);
}

TEST_CASE("symbol count") {
  CHECK(parse("p").symbol_count() == 1);
  CHECK(parse("!p").symbol_count() == 2);
  CHECK(parse("a & b & c").symbol_count() == 5);
  CHECK(parse("G(a | F b)").symbol_count() == 5);
  CHECK(parse("a U b").symbol_count() == 3);
}

TEST_CASE("nnf pushes negation to atoms") {
  CHECK(nnf(parse("!G p")) == parse("F !p"));
  CHECK(nnf(parse("!F p")) == parse("G !p"));
  CHECK(nnf(parse("!X p")) == parse("X !p"));
  CHECK(nnf(parse("!(p & q)")) == parse("!p | !q"));
  CHECK(nnf(parse("!(a U b)")) == parse("(!b U (!a & !b)) | G !b"));
  CHECK(nnf(parse("!!p")) == parse("p"));

  std::function<bool(const Formula &)> nnf_shape = [&](const Formula &g) {
    if (g.op() == Op::Not)
      return g.child().op() == Op::Atom || g.child().op() == Op::True;
    for (const auto &k : g.children())
      if (!nnf_shape(k))
        return false;
    return true;
  };
  auto corpus = oracle::enumerate_formulas({"p", "q"}, 4, 2);
  for (const auto &g : corpus)
    CHECK(nnf_shape(nnf(g)));
}

TEST_CASE("nnf and simplify preserve lasso semantics") {
  // Exhaustive over small formulas: compare truth at position 0 on every
  // small lasso.
  auto corpus = oracle::enumerate_formulas({"p", "q"}, 4, 2);
  std::size_t disagreements = 0;
  for (const auto &g : corpus) {
    Formula n = nnf(g), s = simplify(g);
    bool bad = oracle::any_lasso({"p", "q"}, 2, 2, [&](oracle::LassoEval &ev) {
      bool v = ev.holds(g);
      return ev.holds(n) != v || ev.holds(s) != v;
    });
    if (bad) {
      ++disagreements;
      MESSAGE("disagreement on " << g.to_string());
    }
  }
  CHECK(disagreements == 0);
}

TEST_CASE("simplify rules") {
  CHECK(simplify(parse("p & true")) == parse("p"));
  CHECK(simplify(parse("p & false")).is_false());
  CHECK(simplify(parse("p | !p")).is_true());
  CHECK(simplify(parse("p & !p & q")).is_false());
  CHECK(simplify(parse("p & p")) == parse("p"));
  CHECK(simplify(parse("F F p")) == parse("F p"));
  CHECK(simplify(parse("G G p")) == parse("G p"));
  CHECK(simplify(parse("G true")).is_true());
  CHECK(simplify(parse("X false")).is_false());
  CHECK(simplify(parse("false U p")) == parse("p"));
  CHECK(simplify(parse("true U p")) == parse("F p"));
  CHECK(simplify(parse("p U true")).is_true());
  CHECK(simplify(parse("!!p")) == parse("p"));
  Formula f = parse("G(p | F q) & X(r U s)");
  CHECK(simplify(simplify(f)) == simplify(f));
}

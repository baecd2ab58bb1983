#include "bitbranch/ast.hpp"
#include "bitbranch/parser.hpp"
#include "doctest.h"
#include "gen.hpp"

using namespace bitbranch;

TEST_CASE("substitute replaces metavariables") {
  Substitution d;
  d.bind("e1", var("x"));
  d.bind("e2", lit(1));
  CHECK(struct_eq(substitute(band(meta("e1"), meta("e2")), d), band(var("x"), lit(1))));
  CHECK(struct_eq(substitute(land(ge(meta("e1"), lit(0)), eq(meta("e2"), lit(1))), d),
                  land(ge(var("x"), lit(0)), eq(lit(1), lit(1)))));
}

TEST_CASE("substitute binds whole subtrees") {
  Substitution d;
  d.bind("e1", bor(var("a"), var("b")));
  Expr out = substitute(mod(meta("e1"), lit(2)), d);
  CHECK(print_expr(out) == "(a | b) % 2");
}

TEST_CASE("unbound metavariable throws") {
  Substitution d;
  d.bind("e1", var("x"));
  CHECK_THROWS_AS(substitute(band(meta("e1"), meta("e2")), d), UnboundMetavariable);
  try {
    substitute(meta("r"), d);
  } catch (const UnboundMetavariable& e) {
    CHECK(e.name() == "r");
  }
}

TEST_CASE("struct_eq is reflexive and distinguishes operators") {
  gen::Gen g(1);
  for (int i = 0; i < 200; ++i) {
    Expr e = g.expr({"a", "b"}, 4);
    CHECK(struct_eq(e, e));
  }
  CHECK_FALSE(struct_eq(band(var("a"), var("b")), bor(var("a"), var("b"))));
  CHECK_FALSE(struct_eq(band(var("a"), var("b")), band(var("b"), var("a"))));
  CHECK_FALSE(struct_eq(lit(1), lit(2)));
}

TEST_CASE("struct_eq ignores generated marks and rule tags") {
  Expr t1 = ternary(var("c"), lit(0), var("x"), RuleId{"R-And-0", 0});
  Expr t2 = ternary(var("c"), lit(0), var("x"));
  CHECK(struct_eq(t1, t2));
  CHECK(struct_eq(havoc("x", var("y")), assign("x", nondet())));
  CHECK(struct_eq(assume(var("x"), true), assume(var("x"))));
}

TEST_CASE("canonical orders commutative operands") {
  Expr a = canonical(band(var("y"), var("x")));
  Expr b = canonical(band(var("x"), var("y")));
  CHECK(struct_eq(a, b));
  CHECK_FALSE(struct_eq(canonical(binary(BinOp::Sub, var("y"), var("x"))),
                        canonical(binary(BinOp::Sub, var("x"), var("y")))));
}

TEST_CASE("rename_var and mentions") {
  Expr e = band(var("x"), bor(var("x"), var("a")));
  Expr r = rename_var(e, "x", "s");
  CHECK_FALSE(mentions_var(r, "x"));
  CHECK(mentions_var(r, "s"));
  CHECK(mentions_var(r, "a"));
  CHECK(contains_catalog_bitwise(e));
  CHECK_FALSE(contains_catalog_bitwise(binary(BinOp::Add, var("x"), lit(1))));
  CHECK(metavariables(land(meta("e2"), meta("e1"))).size() == 2);
}

TEST_CASE("RuleId spelling") {
  CHECK(RuleId{"W-And-Pos", 0}.str() == "W-And-Pos");
  CHECK(RuleId{"W-And-Mix", 3}.str() == "W-And-Mix/3");
  CHECK(RuleId{"A", 0} < RuleId{"A", 1});
}

#include "bitbranch/interp.hpp"
#include "bitbranch/parser.hpp"
#include "bitbranch/transform.hpp"
#include "doctest.h"
#include "gen.hpp"

using namespace bitbranch;

namespace {

const std::vector<std::string> kVars{"x", "y", "z", "a", "b", "c", "r"};

Expr P(const char* text, int width = 32) { return parse_expr(text, kVars, width); }

Program prog(const char* text, int width = 32) {
  ParseOptions o;
  o.width = width;
  return parse(text, o);
}

TransformConfig cfg(int width = 32, Strategy s = Strategy::WeakenFirst) {
  TransformConfig c;
  c.width = width;
  c.strategy = s;
  return c;
}

}  // namespace

TEST_CASE("rewrite chain for x & 1 follows catalog order") {
  Catalog cat = catalog(8);
  Expr out = rewrite_expr(P("x & 1", 8), cat, cfg(8));
  CHECK(print_expr(out) ==
        "x == 0 ? 0 : (1 == 0 ? 0 : ((x == 0 || x == 1) && 1 == 1 ? x : "
        "((1 == 0 || 1 == 1) && x == 1 ? 1 : ((x == 0 || x == 1) && (1 == 0 || 1 == 1) ? "
        "x && 1 : (x >= 0 && 1 == 1 ? x % 2 : (1 >= 0 && x == 1 ? 1 % 2 : x & 1))))))");

  // Every branch agrees with `x & 1` wherever its guard selects it.
  for (Value x = -128; x <= 127; ++x) {
    Env env;
    env.set("x", x);
    CHECK(eval_expr(out, env, 8) == eval_expr(P("x & 1", 8), env, 8));
    for (const Expr* e = &out; auto* t = e->as<Ternary>(); e = &t->else_expr)
      if (eval_expr(t->cond, env, 8)) CHECK(eval_expr(t->then_expr, env, 8) == (x & 1));
  }
}

TEST_CASE("rewrite leaves non-bitwise expressions alone") {
  Expr e = P("x + y");
  CHECK(rewrite_expr(e, catalog(32), cfg()).get() == e.get());
}

TEST_CASE("right shift by W-1") {
  Expr out = rewrite_expr(P("y >> 31"), catalog(32), cfg());
  CHECK(print_expr(out) == "y >= 0 ? 0 : (y < 0 ? -1 : y >> 31)");
  Expr other = P("y >> 30");
  CHECK(rewrite_expr(other, catalog(32), cfg()).get() == other.get());
}

TEST_CASE("weaken x = x & a snapshots the pre-state") {
  Stmt s = weaken_assign(assign("x", P("x & a")), catalog(32), cfg());
  const If* g = s.as<If>();
  REQUIRE(g);
  CHECK(g->rule == RuleId{"W-And-Pos", 0});
  CHECK(print_expr(g->cond) == "x >= 0 && a >= 0");
  REQUIRE(g->then_body.size() == 3);
  CHECK(struct_eq(g->then_body[0], assign("__bwb_s0", var("x"))));
  CHECK(struct_eq(g->then_body[1], assign("x", nondet())));
  CHECK(print_expr(g->then_body[2].as<Assume>()->cond) == "x <= __bwb_s0 && x <= a");

  // Innermost else is the untouched statement.
  const If* last = g;
  while (last->else_body.size() == 1 && last->else_body[0].as<If>())
    last = last->else_body[0].as<If>();
  REQUIRE(last->else_body.size() == 1);
  CHECK(struct_eq(last->else_body[0], assign("x", P("x & a"))));
  CHECK_FALSE(last->else_body[0].generated());
}

TEST_CASE("weaken x = y | z") {
  Stmt s = weaken_assign(assign("x", P("y | z")), catalog(32), cfg());
  const If* g = s.as<If>();
  REQUIRE(g);
  CHECK(g->rule == RuleId{"W-Or-Pos", 0});
  CHECK(print_expr(g->cond) == "y >= 0 && z >= 0");
  REQUIRE(g->then_body.size() == 2);
  CHECK(struct_eq(g->then_body[0], assign("x", nondet())));
  CHECK(print_expr(g->then_body[1].as<Assume>()->cond) == "x >= y && x >= z");
  const Havoc* h = g->then_body[0].as<Havoc>();
  REQUIRE(h);
  CHECK(struct_eq(*h->origin, P("y | z")));
}

TEST_CASE("non-bitwise assignment is unchanged") {
  Stmt s = assign("x", P("y + z"));
  CHECK(weaken_assign(s, catalog(32), cfg()).get() == s.get());
}

TEST_CASE("weaken assume") {
  Stmt s = weaken_assume(assume(P("r <= (x & y)")), catalog(32), cfg());
  const If* g = s.as<If>();
  REQUIRE(g);
  CHECK(g->rule == RuleId{"W-And-Pos", 0});
  CHECK(print_expr(g->cond) == "x >= 0 && y >= 0");
  CHECK(print_expr(g->then_body[0].as<Assume>()->cond) == "r <= x && r <= y");

  Stmt o = weaken_assume(assume(P("(x | y) == 0")), catalog(32), cfg());
  const If* og = o.as<If>();
  REQUIRE(og);
  CHECK(og->rule == RuleId{"R-Or-LOG", 0});
  CHECK(print_expr(og->cond) == "(x == 0 || x == 1) && (y == 0 || y == 1)");
  CHECK(print_expr(og->then_body[0].as<Assume>()->cond) == "x == 0 && y == 0");

  Stmt plain = assume(P("x > 0"));
  CHECK(weaken_assume(plain, catalog(32), cfg()).get() == plain.get());
}

TEST_CASE("normalization hoists nested bitwise operators") {
  Program p = prog("int x; int y; int z; if ((x & y) < z) { x = 1; }");
  Program n = normalize_three_address(p);
  CHECK(print(n).find("__bwb_t0 = x & y;\n  if (__bwb_t0 < z) {") != std::string::npos);

  Program loop = prog("int x; int a; while (x > 0) { x = x & a; }");
  CHECK(struct_eq(normalize_three_address(loop).body, loop.body));

  Program nested = prog("int x; int a; int b; int c; x = (a & b) | c;");
  TransformReport rep;
  Program nn = normalize_three_address(nested, &rep);
  CHECK(rep.temps_introduced == 1);
  REQUIRE(nn.body.size() == 2);
  CHECK(struct_eq(nn.body[0], assign("__bwb_t0", band(var("a"), var("b")))));
  CHECK(struct_eq(nn.body[1], assign("x", bor(var("__bwb_t0"), var("c")))));

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<Value> v(-128, 127);
  for (int i = 0; i < 1000; ++i) {
    Env env;
    Value a = v(rng), b = v(rng), c = v(rng);
    env.set("a", a);
    env.set("b", b);
    env.set("c", c);
    Value expect = eval_expr(P("(a & b) | c", 8), env, 8);
    env.set("__bwb_t0", eval_expr(band(var("a"), var("b")), env, 8));
    CHECK(eval_expr(bor(var("__bwb_t0"), var("c")), env, 8) == expect);
  }
}

TEST_CASE("normalized loop conditions are recomputed") {
  Program p = prog("int x; while ((x & 3) != 0) { x = x - 1; }");
  Program n = normalize_three_address(p);
  REQUIRE(n.body.size() == 2);
  const While* w = n.body[1].as<While>();
  REQUIRE(w);
  CHECK(struct_eq(w->body.back(), assign("__bwb_t0", band(var("x"), lit(3)))));
}

TEST_CASE("normalization preserves semantics") {
  gen::Gen g(11);
  int compared = 0;
  for (int i = 0; i < 200; ++i) {
    Program p = g.straight_line(8, 6);
    Program n = normalize_three_address(p);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      NondetStream s1(seed), s2(seed);
      Trace t1 = run(p, s1), t2 = run(n, s2);
      REQUIRE(t1.status == t2.status);
      std::vector<std::string> user{"a", "b", "c"};
      CHECK(projected_states(t1, user) == projected_states(t2, user));
      ++compared;
    }
  }
  CHECK(compared == 1000);
}

TEST_CASE("strategies") {
  Program p = prog("int x; int a; x = x & a;");
  auto [rw, rep] = transform_program(p, cfg(32, Strategy::RewriteOnly));
  REQUIRE(rw.body.size() == 1);
  const Assign* a = rw.body[0].as<Assign>();
  REQUIRE(a);
  CHECK(struct_eq(a->rhs, rewrite_expr(P("x & a"), catalog(32), cfg())));
  CHECK(rep.fired.count(RuleId{"R-And-LBS", 0}) == 1);

  auto [wk, wrep] = transform_program(p, cfg(32, Strategy::WeakenOnly));
  CHECK(wk.body[0].as<If>());
  CHECK(wrep.fired.count(RuleId{"R-And-0", 0}) == 0);

  auto [rf, rfrep] = transform_program(p, cfg(32, Strategy::RewriteFirst));
  CHECK(rf.body[0].as<Assign>());

  Program sh = prog("int x; int y; x = y >> 31;");
  auto [wf, wfrep] = transform_program(sh, cfg());
  CHECK(wfrep.fired.count(RuleId{"R-RightShift-Pos", 0}) == 1);
}

TEST_CASE("program without bitwise operators") {
  Program p = prog("int x; int y = 3; x = y + 1; assume(x > 0); while (x < 10) { x = x * 2; }");
  auto [q, rep] = transform_program(p, cfg());
  CHECK(struct_eq(q, p));
  CHECK(rep.total_fired() == 0);
  CHECK(rep.temps_introduced == 0);
}

TEST_CASE("configuration mismatches are rejected") {
  Program p = prog("int x;", 8);
  CHECK_THROWS_AS(transform_program(p, cfg(32)), std::invalid_argument);
  CHECK_THROWS_AS(Transformer(catalog(8), cfg(32)), std::invalid_argument);
}

TEST_CASE("transform reaches a fixed point") {
  gen::Gen g(5);
  for (int i = 0; i < 500; ++i) {
    Program p = g.program();
    auto [once, r1] = transform_program(p, cfg());
    auto [twice, r2] = transform_program(once, cfg());
    INFO(print(p));
    CHECK(r2.total_fired() == 0);
    CHECK(r2.temps_introduced == 0);
    CHECK(struct_eq(once, twice));
  }
}

TEST_CASE("transformed random programs over-approximate") {
  gen::Gen g(9);
  for (int width : {4, 8}) {
    for (int i = 0; i < 150; ++i) {
      Program p = g.straight_line(width, 6);
      auto [q, rep] = transform_program(p, cfg(width));
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        ReplayResult r = shadow_replay(p, q, seed, 1000);
        INFO(print(q));
        REQUIRE_MESSAGE(r.ok, r.detail);
      }
    }
  }
}

TEST_CASE("generated names continue after existing ones") {
  ParseOptions o;
  o.allow_reserved = true;
  Program p = parse("int __bwb_s0; int __bwb_t3; int x; int a; x = (x & a) | 1; x = x & a;", o);
  auto [q, rep] = transform_program(p, cfg());
  bool t4 = false, s1 = false;
  for (const Decl& d : q.decls) {
    t4 = t4 || d.name == "__bwb_t4";
    s1 = s1 || d.name == "__bwb_s1";
  }
  CHECK(t4);
  CHECK(s1);
}

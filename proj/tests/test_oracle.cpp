#include <cstdint>

#include "bitbranch/interp.hpp"
#include "bitbranch/oracle.hpp"
#include "bitbranch/parser.hpp"
#include "doctest.h"
#include "gen.hpp"

using namespace bitbranch;

namespace {

const RewriteRule& rewrite_rule(const Catalog& cat, const std::string& name, int variant = 0) {
  for (const auto& r : cat.rewrite)
    if (r.id == RuleId{name, variant}) return r;
  FAIL("no rule " << name);
  return cat.rewrite.front();
}

const WeakenRule& weaken_rule(const Catalog& cat, const std::string& name, int variant = 0) {
  for (const auto& w : cat.weaken)
    if (w.id == RuleId{name, variant}) return w;
  FAIL("no rule " << name);
  return cat.weaken.front();
}

// Program variables e1/e2/r become the matching metavariables.
Expr to_pattern(const Expr& e) {
  return std::visit(
      [&](const auto& n) -> Expr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Var>) {
          return meta(n.name);
        } else if constexpr (std::is_same_v<T, Unary>) {
          return unary(n.op, to_pattern(n.operand));
        } else if constexpr (std::is_same_v<T, Binary>) {
          return binary(n.op, to_pattern(n.lhs), to_pattern(n.rhs));
        } else if constexpr (std::is_same_v<T, Ternary>) {
          return ternary(to_pattern(n.cond), to_pattern(n.then_expr), to_pattern(n.else_expr));
        } else {
          return e;
        }
      },
      e.node().kind);
}

}  // namespace

TEST_CASE("R-And-0 at width 8") {
  Verdict v = check_rewrite_rule(rewrite_rule(catalog(8), "R-And-0"), 8);
  CHECK(v.pass);
  CHECK(v.valuations_checked == 65536);
  CHECK(v.guard_hits == 256);
  CHECK_FALSE(v.counterexample);
  CHECK(v.line() == "RULE=R-And-0 VARIANT=0 RELOP=none W=8 STATUS=pass N=65536");
}

TEST_CASE("R-And-LBS without its sign guard fails") {
  // First pair in enumeration order where `x & 1 != x % 2`, by native int8 math.
  std::optional<std::pair<int, int>> expected;
  for (int a = -128; a <= 127 && !expected; ++a)
    for (int b = -128; b <= 127 && !expected; ++b) {
      auto x = static_cast<std::int8_t>(a), y = static_cast<std::int8_t>(b);
      if (y == 1 && static_cast<std::int8_t>(x & y) != static_cast<std::int8_t>(x % 2))
        expected = std::pair{a, b};
    }
  REQUIRE(expected);

  Catalog m = mutated_catalog(8, "R-And-LBS:drop-guard");
  Verdict v = check_rewrite_rule(rewrite_rule(m, "R-And-LBS"), 8);
  CHECK_FALSE(v.pass);
  REQUIRE(v.counterexample);
  CHECK(*v.counterexample->e1 == expected->first);
  CHECK(*v.counterexample->e2 == expected->second);
  CHECK(*v.counterexample->e1 == -127);
  CHECK(v.line().find("STATUS=fail CEX e1=-127 e2=1 ") != std::string::npos);

  // -1 is a counterexample as well, just not the first one.
  Valuation minus1{-1, 1, std::nullopt};
  const RewriteRule& rule = rewrite_rule(m, "R-And-LBS");
  CHECK(eval_pattern(rule.source, minus1, 8) == 1);
  CHECK(eval_pattern(rule.replacement, minus1, 8) == -1);
}

TEST_CASE("right-shift rows") {
  Catalog cat = catalog(8);
  Verdict neg = check_rewrite_rule(rewrite_rule(cat, "R-RightShift-Neg"), 8);
  CHECK(neg.pass);
  CHECK(neg.valuations_checked == 256);
  CHECK(neg.guard_hits == 128);
  CHECK(check_rewrite_rule(rewrite_rule(cat, "R-RightShift-Pos"), 8).pass);
  // Instantiated for width 4 the row shifts by 3, which is wrong at width 8.
  Verdict narrow = check_rewrite_rule(rewrite_rule(catalog(4), "R-RightShift-Neg"), 8);
  CHECK_FALSE(narrow.pass);
  CHECK(*narrow.counterexample->e1 == -128);
}

TEST_CASE("weakening rows at width 6") {
  Catalog cat = catalog(6);
  Verdict and_pos = check_weaken_rule(weaken_rule(cat, "W-And-Pos"), RelOp::Assign, 6);
  CHECK(and_pos.pass);
  CHECK(and_pos.valuations_checked == 4096);
  CHECK(and_pos.guard_hits == 32 * 32);
  CHECK(and_pos.relop == ":=");

  Verdict and_neg = check_weaken_rule(weaken_rule(cat, "W-And-Neg"), 6);
  CHECK(and_neg.pass);
  CHECK(and_neg.guard_hits > 0);

  Verdict xor_mix = check_weaken_rule(weaken_rule(cat, "W-XOr-Mix"), RelOp::Eq, 6);
  CHECK(xor_mix.pass);
  CHECK(xor_mix.valuations_checked == 64 * 64 * 64);
  CHECK(xor_mix.guard_hits == 32 * 32);
}

TEST_CASE("pass verdicts agree with native brute force") {
  // Independent restatement of three rows over int8.
  bool and_pos = true, or_neg = true, cpl_pos = true;
  for (int a = -128; a <= 127; ++a) {
    for (int b = -128; b <= 127; ++b) {
      auto x = static_cast<std::int8_t>(a), y = static_cast<std::int8_t>(b);
      if (x >= 0 && y >= 0) {
        int r = static_cast<std::int8_t>(x & y);
        and_pos = and_pos && r <= x && r <= y;
      }
      if (x < 0 && y < 0) {
        int r = static_cast<std::int8_t>(x | y);
        or_neg = or_neg && r >= x && r >= y && r < 0;
      }
    }
    auto x = static_cast<std::int8_t>(a);
    if (x >= 0) cpl_pos = cpl_pos && static_cast<std::int8_t>(~x) < 0;
  }
  Catalog cat = catalog(8);
  CHECK(check_weaken_rule(weaken_rule(cat, "W-And-Pos"), RelOp::Assign, 8).pass == and_pos);
  CHECK(check_weaken_rule(weaken_rule(cat, "W-Or-Neg"), RelOp::Assign, 8).pass == or_neg);
  CHECK(check_weaken_rule(weaken_rule(cat, "W-Cpl-Pos"), RelOp::Assign, 8).pass == cpl_pos);
}

TEST_CASE("strict mutation of W-And-Pos") {
  Catalog m = mutated_catalog(6, "W-And-Pos:strict");
  Verdict v = check_weaken_rule(weaken_rule(m, "W-And-Pos"), RelOp::Assign, 6);
  CHECK_FALSE(v.pass);
  REQUIRE(v.counterexample);
  // 0 & 0 = 0 is not < 0.
  CHECK(*v.counterexample->e1 == 0);
  CHECK(*v.counterexample->e2 == 0);
  CHECK(*v.counterexample->r == 0);
}

TEST_CASE("every reference mutation is refuted") {
  for (const auto& name : reference_mutations()) {
    std::vector<Verdict> vs =
        check_all([&](int w) { return mutated_catalog(w, name); }, {4, 6});
    int failed = 0;
    for (const auto& v : vs) {
      if (v.pass) continue;
      ++failed;
      REQUIRE(v.counterexample);
    }
    INFO(name);
    CHECK(failed > 0);
  }
}

TEST_CASE("check_all") {
  CHECK_THROWS_AS(check_all({}), std::invalid_argument);

  std::vector<Verdict> vs = check_all({4});
  CHECK(vs.size() == 111);
  for (const auto& v : vs) {
    INFO(v.line());
    CHECK(v.pass);
    CHECK(v.guard_hits > 0);
  }
  // Deterministic order regardless of thread count.
  CheckOptions one;
  one.threads = 1;
  CheckOptions four;
  four.threads = 4;
  auto a = check_all({4}, one), b = check_all({4}, four);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].line() == b[i].line());

  auto mutated = check_all([](int w) { return mutated_catalog(w, "R-RightShift-Neg:zero-result"); },
                           {8});
  int failed = 0;
  for (const auto& v : mutated) failed += v.pass ? 0 : 1;
  CHECK(failed == 1);

  CheckOptions small;
  small.max_valuations = 256;
  for (const auto& v : check_all({4}, small)) CHECK(v.valuations_checked <= 256);
}

TEST_CASE("compiled patterns agree with the interpreter") {
  const std::vector<std::string> names{"e1", "e2", "r"};
  for (int width : {2, 4, 6, 8, 16, 32, 64}) {
    gen::Gen g(static_cast<std::uint64_t>(width) * 977);
    int faults = 0;
    for (int i = 0; i < 100000; ++i) {
      Expr e = g.expr(names, 4, width);
      Expr pat = to_pattern(e);
      CompiledPattern cp(pat, width);
      Valuation v{g.literal(width), g.literal(width), g.literal(width)};
      Env env;
      env.set("e1", *v.e1);
      env.set("e2", *v.e2);
      env.set("r", *v.r);
      std::optional<Value> expect;
      try {
        expect = eval_expr(e, env, width);
      } catch (const RuntimeFault&) {
        ++faults;
      }
      auto got = cp.eval({*v.e1, *v.e2, *v.r});
      auto rec = eval_pattern(pat, v, width);
      if (got != expect || rec != expect) {
        INFO("width " << width << ": " << print_expr(e));
        REQUIRE(got == expect);
        REQUIRE(rec == expect);
      }
    }
    CHECK(faults > 0);
  }
}

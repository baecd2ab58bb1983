#pragma once

// Random mini-C ASTs for property tests. Everything generated is something
// the parser can produce: negative literals are IntLit, Nondet appears only
// as a whole right-hand side.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "bitbranch/ast.hpp"

namespace gen {

using namespace bitbranch;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool coin(int percent) { return pick(100) < percent; }

  Value literal(int width = 32) {
    switch (pick(6)) {
      case 0: return 0;
      case 1: return 1;
      case 2: return -1;
      case 3: {
        Value m = std::min<Value>(1000, (Value{1} << (width - 1)) - 1);
        return std::uniform_int_distribution<Value>(-m, m)(rng_);
      }
      case 4: return width - 1;
      default: {
        Value lo = -(Value{1} << (width - 1));
        Value hi = (Value{1} << (width - 1)) - 1;
        return std::uniform_int_distribution<Value>(lo, hi)(rng_);
      }
    }
  }

  Expr expr(const std::vector<std::string>& vars, int depth, int width = 32) {
    if (depth <= 0 || coin(25)) {
      if (!vars.empty() && coin(60)) return var(vars[static_cast<std::size_t>(pick(static_cast<int>(vars.size())))]);
      return lit(literal(width));
    }
    int k = pick(20);
    if (k < 3) {
      static const UnOp ops[] = {UnOp::Neg, UnOp::BitNot, UnOp::LogNot};
      Expr operand = expr(vars, depth - 1, width);
      UnOp op = ops[pick(3)];
      // `-<literal>` reads back as a negative literal.
      if (op == UnOp::Neg && operand.as<IntLit>()) op = UnOp::BitNot;
      return unary(op, operand);
    }
    if (k < 4) {
      return ternary(expr(vars, depth - 1, width), expr(vars, depth - 1, width),
                     expr(vars, depth - 1, width));
    }
    static const BinOp ops[] = {
        BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Mod, BinOp::BitAnd,
        BinOp::BitOr, BinOp::BitXor, BinOp::Shl, BinOp::Shr, BinOp::Lt, BinOp::Le,
        BinOp::Gt, BinOp::Ge, BinOp::Eq, BinOp::Ne, BinOp::LogAnd, BinOp::LogOr,
    };
    return binary(ops[pick(18)], expr(vars, depth - 1, width), expr(vars, depth - 1, width));
  }

  // Expressions over the catalog operators only; fault-free at any width.
  Expr bit_expr(const std::vector<std::string>& vars, int depth, int width = 32) {
    if (depth <= 0 || coin(30)) {
      if (!vars.empty() && coin(70)) return var(vars[static_cast<std::size_t>(pick(static_cast<int>(vars.size())))]);
      return lit(literal(width));
    }
    switch (pick(8)) {
      case 0: return band(bit_expr(vars, depth - 1, width), bit_expr(vars, depth - 1, width));
      case 1: return bor(bit_expr(vars, depth - 1, width), bit_expr(vars, depth - 1, width));
      case 2: return bxor(bit_expr(vars, depth - 1, width), bit_expr(vars, depth - 1, width));
      case 3: return shr(bit_expr(vars, depth - 1, width), lit(width - 1));
      case 4: return bnot(bit_expr(vars, depth - 1, width));
      case 5: return binary(BinOp::Add, bit_expr(vars, depth - 1, width), bit_expr(vars, depth - 1, width));
      case 6: return binary(BinOp::Lt, bit_expr(vars, depth - 1, width), bit_expr(vars, depth - 1, width));
      default: return binary(BinOp::Sub, bit_expr(vars, depth - 1, width), bit_expr(vars, depth - 1, width));
    }
  }

  StmtList stmts(const std::vector<std::string>& vars, int depth, int count) {
    StmtList out;
    for (int i = 0; i < count; ++i) out.push_back(stmt(vars, depth));
    return out;
  }

  Stmt stmt(const std::vector<std::string>& vars, int depth) {
    const std::string& target = vars[static_cast<std::size_t>(pick(static_cast<int>(vars.size())))];
    int k = depth <= 0 ? pick(4) : pick(8);
    switch (k) {
      case 0: return assign(target, expr(vars, 3));
      case 1: return assign(target, coin(50) ? nondet() : bit_expr(vars, 2));
      case 2: return assume(expr(vars, 2));
      case 3: return assert_stmt(expr(vars, 2));
      case 4: return if_stmt(expr(vars, 2), stmts(vars, depth - 1, 1 + pick(2)),
                             coin(50) ? stmts(vars, depth - 1, 1 + pick(2)) : StmtList{});
      case 5: return while_stmt(expr(vars, 2), stmts(vars, depth - 1, 1 + pick(2)));
      case 6: return block(stmts(vars, depth - 1, 1 + pick(2)));
      default: return assign(target, bit_expr(vars, 3));
    }
  }

  Program program(int width = 32) {
    Program p;
    p.width = width;
    std::vector<std::string> vars;
    int n = 1 + pick(4);
    for (int i = 0; i < n; ++i) {
      std::string name = std::string(1, static_cast<char>('a' + i));
      Decl d{name, std::nullopt};
      if (coin(40)) d.init = coin(30) ? nondet() : expr(vars, 2);
      vars.push_back(name);
      p.decls.push_back(d);
    }
    p.body = stmts(vars, 2, 1 + pick(5));
    return p;
  }

  // Loop-free programs over the catalog operators, for semantic checks.
  Program straight_line(int width, int count) {
    Program p;
    p.width = width;
    std::vector<std::string> vars{"a", "b", "c"};
    for (const auto& v : vars) p.decls.push_back(Decl{v, nondet()});
    for (int i = 0; i < count; ++i) {
      const std::string& target = vars[static_cast<std::size_t>(pick(3))];
      if (coin(20)) {
        p.body.push_back(assume(binary(coin(50) ? BinOp::Le : BinOp::Ge, bit_expr(vars, 2, width),
                                       bit_expr(vars, 2, width))));
      } else {
        p.body.push_back(assign(target, bit_expr(vars, 3, width)));
      }
    }
    return p;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace gen

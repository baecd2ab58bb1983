#include <algorithm>
#include <charconv>

#include "bitbranch/transform.hpp"

namespace bitbranch {

namespace {

bool is_hoistable(const Expr& e) {
  if (auto* b = e.as<Binary>()) return is_catalog_bitwise(b->op);
  if (auto* u = e.as<Unary>()) return u->op == UnOp::BitNot;
  return false;
}

class Normalizer {
 public:
  explicit Normalizer(const Program& p) {
    const std::string prefix = std::string(kReservedPrefix) + "t";
    for (const Decl& d : p.decls) {
      if (!d.name.starts_with(prefix)) continue;
      int n = 0;
      auto tail = std::string_view(d.name).substr(prefix.size());
      auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), n);
      if (ec == std::errc() && ptr == tail.data() + tail.size()) next_ = std::max(next_, n + 1);
    }
  }

  StmtList list(const StmtList& body) {
    StmtList out;
    for (const Stmt& s : body) stmt(s, out);
    return out;
  }

  std::vector<std::string> temps;

 private:
  // `root`: the node is in statement position and stays in place.
  Expr hoist(const Expr& e, bool root, StmtList& pre) {
    Expr rebuilt = std::visit(
        [&](const auto& n) -> Expr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Unary>) {
            Expr o = hoist(n.operand, false, pre);
            return o.get() == n.operand.get() ? e : unary(n.op, o);
          } else if constexpr (std::is_same_v<T, Binary>) {
            Expr l = hoist(n.lhs, false, pre);
            Expr r = n.op == BinOp::LogAnd || n.op == BinOp::LogOr ? n.rhs
                                                                   : hoist(n.rhs, false, pre);
            return l.get() == n.lhs.get() && r.get() == n.rhs.get() ? e : binary(n.op, l, r);
          } else if constexpr (std::is_same_v<T, Ternary>) {
            if (n.rule) return e;
            Expr c = hoist(n.cond, false, pre);
            return c.get() == n.cond.get() ? e : ternary(c, n.then_expr, n.else_expr);
          } else {
            return e;
          }
        },
        e.node().kind);
    if (root || !is_hoistable(rebuilt)) return rebuilt;
    std::string t = std::string(kReservedPrefix) + "t" + std::to_string(next_++);
    temps.push_back(t);
    pre.push_back(assign(t, rebuilt));
    return var(t);
  }

  // Assume conditions keep the operands of a top-level comparison in place
  // so relational weakening can still see them.
  Expr hoist_assume_cond(const Expr& c, StmtList& pre) {
    auto* b = c.as<Binary>();
    if (!b || !is_relational(b->op)) return hoist(c, true, pre);
    Expr l = hoist(b->lhs, true, pre);
    Expr r = hoist(b->rhs, true, pre);
    return l.get() == b->lhs.get() && r.get() == b->rhs.get() ? c : binary(b->op, l, r);
  }

  static StmtList fresh_copies(const StmtList& stmts) {
    StmtList out;
    for (const Stmt& s : stmts) {
      auto* a = s.as<Assign>();
      out.push_back(assign(a->target, a->rhs));
    }
    return out;
  }

  void stmt(const Stmt& s, StmtList& out) {
    if (s.generated()) {
      out.push_back(s);
      return;
    }
    StmtList pre;
    Stmt result = std::visit(
        [&](const auto& n) -> Stmt {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Assign>) {
            if (n.rhs.template as<Nondet>()) return s;
            Expr r = hoist(n.rhs, true, pre);
            return r.get() == n.rhs.get() ? s : assign(n.target, r);
          } else if constexpr (std::is_same_v<T, Assume>) {
            Expr c = hoist_assume_cond(n.cond, pre);
            return c.get() == n.cond.get() ? s : assume(c);
          } else if constexpr (std::is_same_v<T, Assert>) {
            Expr c = hoist(n.cond, true, pre);
            return c.get() == n.cond.get() ? s : assert_stmt(c);
          } else if constexpr (std::is_same_v<T, If>) {
            Expr c = hoist(n.cond, true, pre);
            return if_stmt(c, list(n.then_body), list(n.else_body));
          } else if constexpr (std::is_same_v<T, While>) {
            Expr c = hoist(n.cond, true, pre);
            StmtList body = list(n.body);
            // Re-evaluate the hoisted condition operands before each test.
            for (Stmt& copy : fresh_copies(pre)) body.push_back(copy);
            return while_stmt(c, std::move(body));
          } else if constexpr (std::is_same_v<T, Block>) {
            return block(list(n.body));
          } else {
            return s;
          }
        },
        s.node().kind);
    for (Stmt& p : pre) out.push_back(std::move(p));
    out.push_back(std::move(result));
  }

  int next_ = 0;
};

}  // namespace

Program normalize_three_address(const Program& p, TransformReport* report) {
  Normalizer n(p);
  Program out;
  out.width = p.width;
  out.decls = p.decls;
  out.body = n.list(p.body);
  for (const auto& t : n.temps) out.decls.push_back(Decl{t, std::nullopt});
  if (report) report->temps_introduced += static_cast<int>(n.temps.size());
  return out;
}

}  // namespace bitbranch

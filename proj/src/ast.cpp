#include "bitbranch/ast.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace bitbranch {

const char* spelling(UnOp op) {
  switch (op) {
    case UnOp::Neg: return "-";
    case UnOp::BitNot: return "~";
    case UnOp::LogNot: return "!";
  }
  return "?";
}

const char* spelling(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::BitAnd: return "&";
    case BinOp::BitOr: return "|";
    case BinOp::BitXor: return "^";
    case BinOp::Shl: return "<<";
    case BinOp::Shr: return ">>";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::LogAnd: return "&&";
    case BinOp::LogOr: return "||";
  }
  return "?";
}

bool is_relational(BinOp op) {
  switch (op) {
    case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge:
    case BinOp::Eq: case BinOp::Ne:
      return true;
    default:
      return false;
  }
}

bool is_commutative(BinOp op) {
  switch (op) {
    case BinOp::Add: case BinOp::Mul: case BinOp::BitAnd: case BinOp::BitOr:
    case BinOp::BitXor: case BinOp::Eq: case BinOp::Ne: case BinOp::LogAnd:
    case BinOp::LogOr:
      return true;
    default:
      return false;
  }
}

bool is_catalog_bitwise(BinOp op) {
  return op == BinOp::BitAnd || op == BinOp::BitOr || op == BinOp::BitXor ||
         op == BinOp::Shr;
}

std::string RuleId::str() const {
  return variant == 0 ? name : name + "/" + std::to_string(variant);
}

namespace {

Expr make(decltype(ExprNode::kind) kind) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{std::move(kind)}));
}

}  // namespace

Expr var(std::string name) { return make(Var{std::move(name)}); }
Expr meta(std::string name) { return make(MetaVar{std::move(name)}); }
Expr lit(Value v) { return make(IntLit{v}); }
Expr nondet() { return make(Nondet{}); }
Expr unary(UnOp op, Expr operand) { return make(Unary{op, std::move(operand)}); }
Expr binary(BinOp op, Expr lhs, Expr rhs) {
  return make(Binary{op, std::move(lhs), std::move(rhs)});
}
Expr ternary(Expr cond, Expr then_expr, Expr else_expr, std::optional<RuleId> rule) {
  return make(Ternary{std::move(cond), std::move(then_expr), std::move(else_expr),
                      std::move(rule)});
}

bool Stmt::generated() const { return node_ && node_->generated; }

Stmt make_stmt(decltype(StmtNode::kind) kind, bool generated) {
  return Stmt(std::make_shared<const StmtNode>(StmtNode{std::move(kind), generated}));
}
Stmt assign(std::string target, Expr rhs, bool generated) {
  return make_stmt(Assign{std::move(target), std::move(rhs)}, generated);
}
Stmt havoc(std::string target, std::optional<Expr> origin, bool generated) {
  return make_stmt(Havoc{std::move(target), std::move(origin)}, generated);
}
Stmt assume(Expr cond, bool generated, std::optional<Expr> origin) {
  return make_stmt(Assume{std::move(cond), std::move(origin)}, generated);
}
Stmt assert_stmt(Expr cond) { return make_stmt(Assert{std::move(cond)}); }
Stmt if_stmt(Expr cond, StmtList then_body, StmtList else_body,
             std::optional<RuleId> rule, bool generated) {
  return make_stmt(If{std::move(cond), std::move(then_body), std::move(else_body),
                      std::move(rule)},
                   generated);
}
Stmt while_stmt(Expr cond, StmtList body) {
  return make_stmt(While{std::move(cond), std::move(body)});
}
Stmt block(StmtList body) { return make_stmt(Block{std::move(body)}); }

const Expr* Substitution::find(const std::string& metavar) const {
  auto it = bindings_.find(metavar);
  return it == bindings_.end() ? nullptr : &it->second;
}

namespace {

/// Rebuilds `e` bottom-up, calling `leaf` on Var/MetaVar nodes. Returns the
/// original handle when nothing changed so sharing is preserved.
template <class Leaf>
Expr rebuild(const Expr& e, Leaf&& leaf) {
  return std::visit(
      [&](const auto& n) -> Expr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Var> || std::is_same_v<T, MetaVar>) {
          return leaf(e, n);
        } else if constexpr (std::is_same_v<T, Unary>) {
          Expr o = rebuild(n.operand, leaf);
          return o.get() == n.operand.get() ? e : unary(n.op, o);
        } else if constexpr (std::is_same_v<T, Binary>) {
          Expr l = rebuild(n.lhs, leaf);
          Expr r = rebuild(n.rhs, leaf);
          return l.get() == n.lhs.get() && r.get() == n.rhs.get() ? e
                                                                  : binary(n.op, l, r);
        } else if constexpr (std::is_same_v<T, Ternary>) {
          Expr c = rebuild(n.cond, leaf);
          Expr t = rebuild(n.then_expr, leaf);
          Expr f = rebuild(n.else_expr, leaf);
          if (c.get() == n.cond.get() && t.get() == n.then_expr.get() &&
              f.get() == n.else_expr.get())
            return e;
          return ternary(c, t, f, n.rule);
        } else {
          return e;
        }
      },
      e.node().kind);
}

}  // namespace

Expr substitute(const Expr& pattern, const Substitution& delta) {
  return rebuild(pattern, [&](const Expr& e, const auto& n) -> Expr {
    if constexpr (std::is_same_v<std::decay_t<decltype(n)>, MetaVar>) {
      const Expr* bound = delta.find(n.name);
      if (!bound) throw UnboundMetavariable(n.name);
      return *bound;
    } else {
      return e;
    }
  });
}

Expr rename_var(const Expr& e, const std::string& from, const std::string& to) {
  return rebuild(e, [&](const Expr& self, const auto& n) -> Expr {
    if constexpr (std::is_same_v<std::decay_t<decltype(n)>, Var>) {
      if (n.name == from) return var(to);
    }
    return self;
  });
}

bool struct_eq(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a.node().kind.index() != b.node().kind.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = *b.as<T>();
        if constexpr (std::is_same_v<T, Var> || std::is_same_v<T, MetaVar>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, IntLit>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, Nondet>) {
          return true;
        } else if constexpr (std::is_same_v<T, Unary>) {
          return x.op == y.op && struct_eq(x.operand, y.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return x.op == y.op && struct_eq(x.lhs, y.lhs) && struct_eq(x.rhs, y.rhs);
        } else {
          return struct_eq(x.cond, y.cond) && struct_eq(x.then_expr, y.then_expr) &&
                 struct_eq(x.else_expr, y.else_expr);
        }
      },
      a.node().kind);
}

namespace {

// Havoc(x) and x = Nondet are the same statement up to marks.
std::optional<std::string> nondet_target(const Stmt& s) {
  if (auto* h = s.as<Havoc>()) return h->target;
  if (auto* a = s.as<Assign>(); a && a->rhs.as<Nondet>()) return a->target;
  return std::nullopt;
}

}  // namespace

bool struct_eq(const StmtList& a, const StmtList& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!struct_eq(a[i], b[i])) return false;
  return true;
}

bool struct_eq(const Stmt& a, const Stmt& b) {
  if (a.get() == b.get()) return true;
  if (!a.get() || !b.get()) return false;
  auto ha = nondet_target(a);
  auto hb = nondet_target(b);
  if (ha || hb) return ha && hb && *ha == *hb;
  if (a.node().kind.index() != b.node().kind.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = *b.as<T>();
        if constexpr (std::is_same_v<T, Assign>) {
          return x.target == y.target && struct_eq(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, Havoc>) {
          return x.target == y.target;
        } else if constexpr (std::is_same_v<T, Assume> || std::is_same_v<T, Assert>) {
          return struct_eq(x.cond, y.cond);
        } else if constexpr (std::is_same_v<T, If>) {
          return struct_eq(x.cond, y.cond) && struct_eq(x.then_body, y.then_body) &&
                 struct_eq(x.else_body, y.else_body);
        } else if constexpr (std::is_same_v<T, While>) {
          return struct_eq(x.cond, y.cond) && struct_eq(x.body, y.body);
        } else {
          return struct_eq(x.body, y.body);
        }
      },
      a.node().kind);
}

bool struct_eq(const Program& a, const Program& b) {
  if (a.width != b.width || a.decls.size() != b.decls.size()) return false;
  for (std::size_t i = 0; i < a.decls.size(); ++i) {
    const Decl& x = a.decls[i];
    const Decl& y = b.decls[i];
    if (x.name != y.name || x.init.has_value() != y.init.has_value()) return false;
    if (x.init && !struct_eq(*x.init, *y.init)) return false;
  }
  return struct_eq(a.body, b.body);
}

namespace {

// Total order on trees, used only to pick a canonical operand order.
int compare(const Expr& a, const Expr& b) {
  auto ia = a.node().kind.index();
  auto ib = b.node().kind.index();
  if (ia != ib) return ia < ib ? -1 : 1;
  return std::visit(
      [&](const auto& x) -> int {
        using T = std::decay_t<decltype(x)>;
        const T& y = *b.as<T>();
        if constexpr (std::is_same_v<T, Var> || std::is_same_v<T, MetaVar>) {
          return x.name.compare(y.name);
        } else if constexpr (std::is_same_v<T, IntLit>) {
          return x.value == y.value ? 0 : (x.value < y.value ? -1 : 1);
        } else if constexpr (std::is_same_v<T, Nondet>) {
          return 0;
        } else if constexpr (std::is_same_v<T, Unary>) {
          if (x.op != y.op) return x.op < y.op ? -1 : 1;
          return compare(x.operand, y.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          if (x.op != y.op) return x.op < y.op ? -1 : 1;
          if (int c = compare(x.lhs, y.lhs)) return c;
          return compare(x.rhs, y.rhs);
        } else {
          if (int c = compare(x.cond, y.cond)) return c;
          if (int c = compare(x.then_expr, y.then_expr)) return c;
          return compare(x.else_expr, y.else_expr);
        }
      },
      a.node().kind);
}

}  // namespace

Expr canonical(const Expr& e) {
  if (auto* u = e.as<Unary>()) return unary(u->op, canonical(u->operand));
  if (auto* t = e.as<Ternary>())
    return ternary(canonical(t->cond), canonical(t->then_expr), canonical(t->else_expr),
                   t->rule);
  auto* b = e.as<Binary>();
  if (!b) return e;
  Expr l = canonical(b->lhs);
  Expr r = canonical(b->rhs);
  if (is_commutative(b->op) && compare(r, l) < 0) std::swap(l, r);
  return binary(b->op, l, r);
}

namespace {

template <class Pred>
bool any_node(const Expr& e, Pred&& pred) {
  if (pred(e)) return true;
  if (auto* u = e.as<Unary>()) return any_node(u->operand, pred);
  if (auto* b = e.as<Binary>()) return any_node(b->lhs, pred) || any_node(b->rhs, pred);
  if (auto* t = e.as<Ternary>())
    return any_node(t->cond, pred) || any_node(t->then_expr, pred) ||
           any_node(t->else_expr, pred);
  return false;
}

}  // namespace

bool mentions_var(const Expr& e, const std::string& name) {
  return any_node(e, [&](const Expr& n) {
    auto* v = n.as<Var>();
    return v && v->name == name;
  });
}

bool mentions_any_var(const Expr& e) {
  return any_node(e, [](const Expr& n) { return n.as<Var>() != nullptr; });
}

bool contains_catalog_bitwise(const Expr& e) {
  return any_node(e, [](const Expr& n) {
    if (auto* b = n.as<Binary>()) return is_catalog_bitwise(b->op);
    if (auto* u = n.as<Unary>()) return u->op == UnOp::BitNot;
    return false;
  });
}

std::vector<std::string> metavariables(const Expr& e) {
  std::set<std::string> seen;
  any_node(e, [&](const Expr& n) {
    if (auto* m = n.as<MetaVar>()) seen.insert(m->name);
    return false;
  });
  return {seen.begin(), seen.end()};
}

namespace {

class NameCanonicalizer {
 public:
  std::string map(const std::string& name) {
    if (!name.starts_with(kReservedPrefix) || name.size() < 8) return name;
    char kind = name[6];
    auto it = names_.find(name);
    if (it != names_.end()) return it->second;
    int& counter = kind == 's' ? snapshots_ : temps_;
    std::string fresh = std::string(kReservedPrefix) + kind + std::to_string(counter++);
    names_.emplace(name, fresh);
    return fresh;
  }

  Expr expr(const Expr& e) {
    return rebuild(e, [&](const Expr& self, const auto& n) -> Expr {
      if constexpr (std::is_same_v<std::decay_t<decltype(n)>, Var>) {
        std::string m = map(n.name);
        if (m != n.name) return var(m);
      }
      return self;
    });
  }

  StmtList list(const StmtList& body) {
    StmtList out;
    out.reserve(body.size());
    for (const Stmt& s : body) out.push_back(stmt(s));
    return out;
  }

  Stmt stmt(const Stmt& s) {
    bool g = s.generated();
    return std::visit(
        [&](const auto& n) -> Stmt {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Assign>) {
            return make_stmt(Assign{map(n.target), expr(n.rhs)}, g);
          } else if constexpr (std::is_same_v<T, Havoc>) {
            std::optional<Expr> o;
            if (n.origin) o = expr(*n.origin);
            return make_stmt(Havoc{map(n.target), o}, g);
          } else if constexpr (std::is_same_v<T, Assume>) {
            std::optional<Expr> o;
            if (n.origin) o = expr(*n.origin);
            return make_stmt(Assume{expr(n.cond), o}, g);
          } else if constexpr (std::is_same_v<T, Assert>) {
            return make_stmt(Assert{expr(n.cond)}, g);
          } else if constexpr (std::is_same_v<T, If>) {
            Expr c = expr(n.cond);
            StmtList t = list(n.then_body);
            StmtList f = list(n.else_body);
            return make_stmt(If{c, std::move(t), std::move(f), n.rule}, g);
          } else if constexpr (std::is_same_v<T, While>) {
            Expr c = expr(n.cond);
            return make_stmt(While{c, list(n.body)}, g);
          } else {
            return make_stmt(Block{list(n.body)}, g);
          }
        },
        s.node().kind);
  }

 private:
  std::unordered_map<std::string, std::string> names_;
  int temps_ = 0;
  int snapshots_ = 0;
};

}  // namespace

Program canonicalize_generated_names(const Program& p) {
  NameCanonicalizer c;
  Program out;
  out.width = p.width;
  // Body first: numbering follows first use, declarations follow suit.
  out.body = c.list(p.body);
  for (const Decl& d : p.decls) {
    Decl nd{c.map(d.name), std::nullopt};
    if (d.init) nd.init = c.expr(*d.init);
    out.decls.push_back(std::move(nd));
  }
  return out;
}

}  // namespace bitbranch

#include "bitbranch/rules.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "bitbranch/interp.hpp"
#include "bitbranch/parser.hpp"

namespace bitbranch {

const char* spelling(RelOp op) {
  switch (op) {
    case RelOp::Lt: return "<";
    case RelOp::Le: return "<=";
    case RelOp::Eq: return "==";
    case RelOp::Gt: return ">";
    case RelOp::Ge: return ">=";
    case RelOp::Assign: return ":=";
  }
  return "?";
}

RelOp flip(RelOp op) {
  switch (op) {
    case RelOp::Lt: return RelOp::Gt;
    case RelOp::Le: return RelOp::Ge;
    case RelOp::Gt: return RelOp::Lt;
    case RelOp::Ge: return RelOp::Le;
    default: return op;
  }
}

std::optional<RelOp> relop_of(BinOp op) {
  switch (op) {
    case BinOp::Lt: return RelOp::Lt;
    case BinOp::Le: return RelOp::Le;
    case BinOp::Eq: return RelOp::Eq;
    case BinOp::Gt: return RelOp::Gt;
    case BinOp::Ge: return RelOp::Ge;
    default: return std::nullopt;
  }
}

BinOp binop_of(RelOp op) {
  switch (op) {
    case RelOp::Lt: return BinOp::Lt;
    case RelOp::Le: return BinOp::Le;
    case RelOp::Gt: return BinOp::Gt;
    case RelOp::Ge: return BinOp::Ge;
    case RelOp::Eq: return BinOp::Eq;
    case RelOp::Assign: break;
  }
  throw std::logic_error("':=' has no comparison operator");
}

bool WeakenRule::admits(RelOp op) const {
  return std::find(relops.begin(), relops.end(), op) != relops.end();
}

Expr WeakenRule::condition(RelOp op) const {
  if (shape == Shape::Bare) return source;
  return mirrored ? binary(binop_of(op), source, meta("r"))
                  : binary(binop_of(op), meta("r"), source);
}

namespace {

const Expr e1 = meta("e1");
const Expr e2 = meta("e2");
const Expr r = meta("r");
const Expr zero = lit(0);
const Expr one = lit(1);

Expr is01(const Expr& e) { return lor(eq(e, zero), eq(e, one)); }

const std::vector<RelOp> op_le = {RelOp::Lt, RelOp::Le, RelOp::Eq, RelOp::Assign};
const std::vector<RelOp> op_ge = {RelOp::Gt, RelOp::Ge, RelOp::Eq, RelOp::Assign};
const std::vector<RelOp> op_eq = {RelOp::Eq, RelOp::Assign};

RewriteRule rw(const char* name, Expr guard, Expr source, Expr replacement) {
  return {RuleId{name, 0}, std::move(guard), std::move(source), std::move(replacement)};
}

WeakenRule wk(const char* name, Expr guard, std::vector<RelOp> ops, Expr source,
              Expr replacement, std::vector<std::string> consts = {}) {
  WeakenRule w;
  w.id = RuleId{name, 0};
  w.guard = std::move(guard);
  w.const_metavars = std::move(consts);
  w.relops = std::move(ops);
  w.source = std::move(source);
  w.replacement = std::move(replacement);
  return w;
}

}  // namespace

std::vector<RewriteRule> rewrite_rows(int width) {
  if (width < 2 || width > 64) throw std::invalid_argument("width must be in [2, 64]");
  const Expr msb = lit(width - 1);
  return {
      rw("R-And-0", eq(e1, zero), band(e1, e2), zero),
      rw("R-And-1", land(is01(e1), eq(e2, one)), band(e1, e2), e1),
      rw("R-And-LOG", land(is01(e1), is01(e2)), band(e1, e2), land(e1, e2)),
      rw("R-And-LBS", land(ge(e1, zero), eq(e2, one)), band(e1, e2), mod(e1, lit(2))),
      rw("R-Or-0", eq(e2, zero), bor(e1, e2), e1),
      rw("R-Or-1", land(is01(e1), eq(e2, one)), bor(e1, e2), one),
      rw("R-Xor-0", eq(e2, zero), bxor(e1, e2), e1),
      rw("R-Xor-Eq", lor(land(eq(e1, zero), eq(e2, zero)), land(eq(e1, one), eq(e2, one))),
         bxor(e1, e2), zero),
      rw("R-Xor-Neq", lor(land(eq(e1, one), eq(e2, zero)), land(eq(e1, zero), eq(e2, one))),
         bxor(e1, e2), one),
      rw("R-RightShift-Pos", ge(e1, zero), shr(e1, msb), zero),
      rw("R-RightShift-Neg", lt(e1, zero), shr(e1, msb), lit(-1)),
  };
}

std::vector<WeakenRule> weaken_rows() {
  WeakenRule or_log = wk("R-Or-LOG", land(is01(e1), is01(e2)), {}, eq(bor(e1, e2), zero),
                         land(eq(e1, zero), eq(e2, zero)));
  or_log.shape = WeakenRule::Shape::Bare;
  return {
      wk("W-And-Pos", land(ge(e1, zero), ge(e2, zero)), op_le, band(e1, e2),
         land(le(r, e1), le(r, e2))),
      wk("W-And-Neg", land(lt(e1, zero), lt(e2, zero)), op_le, band(e1, e2),
         land(land(le(r, e1), le(r, e2)), lt(r, zero))),
      wk("W-And-Mix", land(ge(e1, zero), lt(e2, zero)), op_eq, band(e1, e2),
         land(le(zero, r), le(r, e1))),
      or_log,
      wk("W-Or-Const", ge(e1, zero), op_ge, bor(e1, e2), ge(r, e2), {"e2"}),
      wk("W-Or-Pos", land(ge(e1, zero), ge(e2, zero)), op_ge, bor(e1, e2),
         land(ge(r, e1), ge(r, e2))),
      wk("W-Or-Neg", land(lt(e1, zero), lt(e2, zero)), op_eq, bor(e1, e2),
         land(land(ge(r, e1), ge(r, e2)), lt(r, zero))),
      wk("W-Or-Mix", land(ge(e1, zero), lt(e2, zero)), op_eq, bor(e1, e2),
         land(le(e2, r), lt(r, zero))),
      wk("W-XOr-Pos", land(ge(e1, zero), ge(e2, zero)), op_ge, bxor(e1, e2), ge(r, zero)),
      wk("W-XOr-Neg", land(lt(e1, zero), lt(e2, zero)), op_ge, bxor(e1, e2), ge(r, zero)),
      wk("W-XOr-Mix", land(ge(e1, zero), lt(e2, zero)), op_le, bxor(e1, e2), lt(r, zero)),
      wk("W-Cpl-Pos", ge(e1, zero), op_le, bnot(e1), lt(r, zero)),
      wk("W-Cpl-Neg", lt(e1, zero), op_ge, bnot(e1), ge(r, zero)),
  };
}

namespace {

Expr swap_operands(const Expr& pattern) {
  Substitution s;
  s.bind("e1", e2);
  s.bind("e2", e1);
  s.bind("r", r);
  return substitute(pattern, s);
}

bool same_modulo_commutation(const Expr& a, const Expr& b) {
  return struct_eq(canonical(a), canonical(b));
}

bool commutative_source(const Expr& source) {
  auto* b = source.as<Binary>();
  if (b && is_relational(b->op)) b = b->lhs.as<Binary>();  // bare `(e1 | e2) == 0`
  return b && is_commutative(b->op) && b->lhs.as<MetaVar>() && b->rhs.as<MetaVar>();
}

std::vector<std::string> swap_names(std::vector<std::string> names) {
  for (auto& n : names) n = n == "e1" ? "e2" : (n == "e2" ? "e1" : n);
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace

std::vector<RewriteRule> expand_commutative(const RewriteRule& rule) {
  std::vector<RewriteRule> out{rule};
  if (!commutative_source(rule.source)) return out;
  RewriteRule swapped = rule;
  swapped.guard = swap_operands(rule.guard);
  swapped.replacement = swap_operands(rule.replacement);
  if (same_modulo_commutation(swapped.guard, rule.guard) &&
      same_modulo_commutation(swapped.replacement, rule.replacement))
    return out;
  swapped.id.variant = 1;
  out.push_back(std::move(swapped));
  return out;
}

std::vector<WeakenRule> expand_commutative(const WeakenRule& rule) {
  std::vector<WeakenRule> base{rule};
  if (commutative_source(rule.source)) {
    WeakenRule swapped = rule;
    swapped.guard = swap_operands(rule.guard);
    swapped.replacement = swap_operands(rule.replacement);
    swapped.const_metavars = swap_names(rule.const_metavars);
    auto sorted_consts = rule.const_metavars;
    std::sort(sorted_consts.begin(), sorted_consts.end());
    bool duplicate = same_modulo_commutation(swapped.guard, rule.guard) &&
                     same_modulo_commutation(swapped.replacement, rule.replacement) &&
                     swapped.const_metavars == sorted_consts;
    if (!duplicate) base.push_back(std::move(swapped));
  }

  std::vector<WeakenRule> out = base;
  for (const WeakenRule& w : base) {
    WeakenRule m = w;
    m.mirrored = true;
    if (w.shape == WeakenRule::Shape::Bare) {
      auto* b = w.source.as<Binary>();
      if (!b || !relop_of(b->op)) continue;
      m.source = binary(binop_of(flip(*relop_of(b->op))), b->rhs, b->lhs);
    } else {
      m.relops.clear();
      for (RelOp op : w.relops)
        if (op != RelOp::Assign) m.relops.push_back(flip(op));
      if (m.relops.empty()) continue;
    }
    out.push_back(std::move(m));
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id.variant = static_cast<int>(i);
  return out;
}

Catalog build_catalog(int width, const std::vector<RewriteRule>& rewrite,
                      const std::vector<WeakenRule>& weaken) {
  Catalog cat;
  cat.width = width;
  for (const auto& row : rewrite)
    for (auto& v : expand_commutative(row)) cat.rewrite.push_back(std::move(v));
  for (const auto& row : weaken)
    for (auto& v : expand_commutative(row)) cat.weaken.push_back(std::move(v));
  return cat;
}

Catalog catalog(int width) { return build_catalog(width, rewrite_rows(width), weaken_rows()); }

namespace {

std::string guard_text(const Expr& guard, const std::vector<std::string>& consts) {
  std::string s = print_expr(guard);
  for (const auto& c : consts) s += " && is_const($" + c + ")";
  return s;
}

std::string source_text(const WeakenRule& w) {
  if (w.shape == WeakenRule::Shape::Bare) return print_expr(w.source);
  std::string ops = "{";
  for (std::size_t i = 0; i < w.relops.size(); ++i)
    ops += (i ? "," : "") + std::string(spelling(w.relops[i]));
  ops += "}";
  std::string src = print_expr(w.source);
  return w.mirrored ? src + " " + ops + " $r" : "$r " + ops + " " + src;
}

}  // namespace

std::string dump(const Catalog& cat) {
  std::ostringstream os;
  for (const auto& rule : cat.rewrite)
    os << rule.id.str() << "\trewrite\t" << print_expr(rule.guard) << '\t'
       << print_expr(rule.source) << '\t' << print_expr(rule.replacement) << '\n';
  for (const auto& rule : cat.weaken)
    os << rule.id.str() << "\tweaken\t" << guard_text(rule.guard, rule.const_metavars) << '\t'
       << source_text(rule) << '\t' << print_expr(rule.replacement) << '\n';
  return os.str();
}

namespace {

bool match_into(const Expr& pattern, const Expr& subject, Substitution& delta) {
  if (auto* m = pattern.as<MetaVar>()) {
    if (const Expr* bound = delta.find(m->name)) return struct_eq(*bound, subject);
    delta.bind(m->name, subject);
    return true;
  }
  if (pattern.node().kind.index() != subject.node().kind.index()) return false;
  if (auto* l = pattern.as<IntLit>()) return l->value == subject.as<IntLit>()->value;
  if (auto* v = pattern.as<Var>()) return v->name == subject.as<Var>()->name;
  if (pattern.as<Nondet>()) return true;
  if (auto* u = pattern.as<Unary>()) {
    auto* s = subject.as<Unary>();
    return u->op == s->op && match_into(u->operand, s->operand, delta);
  }
  if (auto* b = pattern.as<Binary>()) {
    auto* s = subject.as<Binary>();
    return b->op == s->op && match_into(b->lhs, s->lhs, delta) &&
           match_into(b->rhs, s->rhs, delta);
  }
  auto* t = pattern.as<Ternary>();
  auto* s = subject.as<Ternary>();
  return match_into(t->cond, s->cond, delta) && match_into(t->then_expr, s->then_expr, delta) &&
         match_into(t->else_expr, s->else_expr, delta);
}

bool consts_hold(const WeakenRule& rule, const Substitution& delta, int width) {
  for (const auto& c : rule.const_metavars) {
    const Expr* e = delta.find(c);
    if (!e || !fold_constant(*e, width)) return false;
  }
  return true;
}

}  // namespace

std::optional<Substitution> match_expr(const Expr& pattern, const Expr& subject) {
  Substitution delta;
  if (!match_into(pattern, subject, delta)) return std::nullopt;
  return delta;
}

std::optional<Value> fold_constant(const Expr& e, int width) {
  if (mentions_any_var(e)) return std::nullopt;
  try {
    return eval_expr(e, Env{}, width);
  } catch (const RuntimeFault&) {
    return std::nullopt;
  }
}

std::optional<Substitution> match_condition(const WeakenRule& rule, const Expr& cond,
                                            int width) {
  std::optional<Substitution> delta;
  if (rule.shape == WeakenRule::Shape::Bare) {
    delta = match_expr(rule.source, cond);
  } else {
    auto* b = cond.as<Binary>();
    if (!b) return std::nullopt;
    auto op = relop_of(b->op);
    if (!op || !rule.admits(*op)) return std::nullopt;
    delta = match_expr(rule.condition(*op), cond);
  }
  if (!delta || !consts_hold(rule, *delta, width)) return std::nullopt;
  return delta;
}

std::optional<Substitution> match_assignment(const WeakenRule& rule, const std::string& target,
                                             const Expr& rhs, int width) {
  if (rule.shape != WeakenRule::Shape::Relational || rule.mirrored ||
      !rule.admits(RelOp::Assign))
    return std::nullopt;
  auto delta = match_expr(rule.source, rhs);
  if (!delta || !consts_hold(rule, *delta, width)) return std::nullopt;
  delta->bind("r", var(target));
  return delta;
}

namespace {

Expr drop_first_conjunct(const Expr& guard) {
  std::vector<Expr> conjuncts;
  auto flatten = [&](auto&& self, const Expr& e) -> void {
    auto* b = e.as<Binary>();
    if (b && b->op == BinOp::LogAnd) {
      self(self, b->lhs);
      self(self, b->rhs);
    } else {
      conjuncts.push_back(e);
    }
  };
  flatten(flatten, guard);
  if (conjuncts.size() <= 1) return lit(1);
  Expr out = conjuncts[1];
  for (std::size_t i = 2; i < conjuncts.size(); ++i) out = land(out, conjuncts[i]);
  return out;
}

Expr make_first_strict(const Expr& e, bool& done) {
  if (done) return e;
  if (auto* b = e.as<Binary>()) {
    if (b->op == BinOp::Le || b->op == BinOp::Ge) {
      done = true;
      return binary(b->op == BinOp::Le ? BinOp::Lt : BinOp::Gt, b->lhs, b->rhs);
    }
    Expr l = make_first_strict(b->lhs, done);
    Expr r = make_first_strict(b->rhs, done);
    return binary(b->op, l, r);
  }
  return e;
}

template <class Rule>
void mutate(Rule& rule, const std::string& kind, const std::string& spec) {
  if (kind == "drop-guard") {
    rule.guard = drop_first_conjunct(rule.guard);
    if constexpr (std::is_same_v<Rule, WeakenRule>) {
      if (rule.guard.template as<IntLit>()) rule.const_metavars.clear();
    }
  } else if (kind == "strict") {
    bool done = false;
    rule.replacement = make_first_strict(rule.replacement, done);
    if (!done) throw std::invalid_argument("mutation '" + spec + "' changes nothing");
  } else if (kind == "zero-result") {
    rule.replacement = lit(0);
  } else {
    throw std::invalid_argument("unknown mutation kind in '" + spec + "'");
  }
}

}  // namespace

Catalog mutated_catalog(int width, const std::string& mutation) {
  auto colon = mutation.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("mutation must be <rule>:<kind>, got '" + mutation + "'");
  std::string name = mutation.substr(0, colon);
  std::string kind = mutation.substr(colon + 1);
  auto rewrite = rewrite_rows(width);
  auto weaken = weaken_rows();
  bool found = false;
  for (auto& row : rewrite)
    if (row.id.name == name) {
      mutate(row, kind, mutation);
      found = true;
    }
  for (auto& row : weaken)
    if (row.id.name == name) {
      mutate(row, kind, mutation);
      found = true;
    }
  if (!found) throw std::invalid_argument("no rule named '" + name + "'");
  return build_catalog(width, rewrite, weaken);
}

const std::vector<std::string>& reference_mutations() {
  static const std::vector<std::string> kMutations = {
      "R-And-LBS:drop-guard",
      "W-And-Pos:strict",
      "W-Cpl-Pos:drop-guard",
      "R-RightShift-Neg:zero-result",
      "W-Or-Pos:strict",
  };
  return kMutations;
}

}  // namespace bitbranch

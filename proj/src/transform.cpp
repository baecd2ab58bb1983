#include "bitbranch/transform.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace bitbranch {

const char* spelling(Strategy s) {
  switch (s) {
    case Strategy::WeakenFirst: return "weaken-first";
    case Strategy::RewriteFirst: return "rewrite-first";
    case Strategy::RewriteOnly: return "rewrite-only";
    case Strategy::WeakenOnly: return "weaken-only";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
  for (Strategy s : {Strategy::WeakenFirst, Strategy::RewriteFirst, Strategy::RewriteOnly,
                     Strategy::WeakenOnly})
    if (text == spelling(s)) return s;
  return std::nullopt;
}

int TransformReport::total_fired() const {
  int n = 0;
  for (const auto& [_, count] : fired) n += count;
  return n;
}

void TransformReport::merge(const TransformReport& other) {
  for (const auto& [rule, count] : other.fired) fired[rule] += count;
  guards_inserted += other.guards_inserted;
  temps_introduced += other.temps_introduced;
}

Transformer::Transformer(const Catalog& cat, const TransformConfig& cfg)
    : cat_(cat), cfg_(cfg) {
  if (cfg.width < 2) throw std::invalid_argument("width must be at least 2");
  if (cat.width != cfg.width)
    throw std::invalid_argument("catalog width " + std::to_string(cat.width) +
                                " differs from configured width " + std::to_string(cfg.width));
}

void Transformer::reserve_names(const Program& p) {
  const std::string prefix = std::string(kReservedPrefix) + "s";
  for (const Decl& d : p.decls) {
    if (!d.name.starts_with(prefix)) continue;
    int n = 0;
    auto tail = std::string_view(d.name).substr(prefix.size());
    auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), n);
    if (ec == std::errc() && ptr == tail.data() + tail.size())
      snapshots_ = std::max(snapshots_, n + 1);
  }
}

Expr Transformer::rewrite_expr(const Expr& e) {
  Expr node = std::visit(
      [&](const auto& n) -> Expr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Unary>) {
          Expr o = rewrite_expr(n.operand);
          return o.get() == n.operand.get() ? e : unary(n.op, o);
        } else if constexpr (std::is_same_v<T, Binary>) {
          Expr l = rewrite_expr(n.lhs);
          Expr r = rewrite_expr(n.rhs);
          return l.get() == n.lhs.get() && r.get() == n.rhs.get() ? e : binary(n.op, l, r);
        } else if constexpr (std::is_same_v<T, Ternary>) {
          if (n.rule) return e;
          Expr c = rewrite_expr(n.cond);
          Expr t = rewrite_expr(n.then_expr);
          Expr f = rewrite_expr(n.else_expr);
          if (c.get() == n.cond.get() && t.get() == n.then_expr.get() &&
              f.get() == n.else_expr.get())
            return e;
          return ternary(c, t, f);
        } else {
          return e;
        }
      },
      e.node().kind);

  if (!node.as<Binary>() && !node.as<Unary>()) return node;
  std::vector<std::pair<const RewriteRule*, Substitution>> hits;
  for (const RewriteRule& rule : cat_.rewrite)
    if (auto delta = match_expr(rule.source, node)) hits.emplace_back(&rule, std::move(*delta));

  Expr chain = node;
  for (auto it = hits.rbegin(); it != hits.rend(); ++it) {
    const auto& [rule, delta] = *it;
    chain = ternary(substitute(rule->guard, delta), substitute(rule->replacement, delta), chain,
                    rule->id);
    ++report_.fired[rule->id];
    ++report_.guards_inserted;
  }
  return chain;
}

std::optional<Stmt> Transformer::weaken_assign(const Stmt& s) {
  const Assign* a = s.as<Assign>();
  if (!a || s.generated()) return std::nullopt;

  std::vector<std::pair<const WeakenRule*, Substitution>> hits;
  for (const WeakenRule& rule : cat_.weaken)
    if (auto delta = match_assignment(rule, a->target, a->rhs, cat_.width))
      hits.emplace_back(&rule, std::move(*delta));
  if (hits.empty()) return std::nullopt;

  // The weakened constraint reads the target's pre-state.
  auto reads_target = [&](const WeakenRule& rule, const Substitution& delta) {
    for (const auto& name : metavariables(rule.replacement)) {
      if (name == "r") continue;
      auto bound = delta.find(name);
      if (bound && mentions_var(*bound, a->target)) return true;
    }
    return false;
  };
  std::string snapshot;
  for (const auto& [rule, delta] : hits) {
    if (reads_target(*rule, delta)) {
      snapshot = std::string(kReservedPrefix) + "s" + std::to_string(snapshots_++);
      new_decls_.push_back(snapshot);
      ++report_.temps_introduced;
      break;
    }
  }

  StmtList else_body{s};
  for (auto it = hits.rbegin(); it != hits.rend(); ++it) {
    const auto& [rule, delta] = *it;
    StmtList then_body;
    Substitution post;
    if (reads_target(*rule, delta)) {
      then_body.push_back(assign(snapshot, var(a->target), true));
      for (const auto& [name, bound] : delta.bindings())
        post.bind(name, name == "r" ? bound : rename_var(bound, a->target, snapshot));
    } else {
      post = delta;
    }
    then_body.push_back(havoc(a->target, a->rhs, true));
    then_body.push_back(assume(substitute(rule->replacement, post), true));
    Stmt guard = if_stmt(substitute(rule->guard, delta), std::move(then_body),
                         std::move(else_body), rule->id, true);
    else_body = StmtList{guard};
    ++report_.fired[rule->id];
    ++report_.guards_inserted;
  }
  return else_body.front();
}

std::optional<Stmt> Transformer::weaken_assume(const Stmt& s) {
  const Assume* a = s.as<Assume>();
  if (!a || s.generated()) return std::nullopt;

  std::vector<std::pair<const WeakenRule*, Substitution>> hits;
  for (const WeakenRule& rule : cat_.weaken)
    if (auto delta = match_condition(rule, a->cond, cat_.width))
      hits.emplace_back(&rule, std::move(*delta));
  if (hits.empty()) return std::nullopt;

  StmtList else_body{s};
  for (auto it = hits.rbegin(); it != hits.rend(); ++it) {
    const auto& [rule, delta] = *it;
    StmtList then_body{assume(substitute(rule->replacement, delta), true, a->cond)};
    Stmt guard = if_stmt(substitute(rule->guard, delta), std::move(then_body),
                         std::move(else_body), rule->id, true);
    else_body = StmtList{guard};
    ++report_.fired[rule->id];
    ++report_.guards_inserted;
  }
  return else_body.front();
}

Stmt Transformer::transform_assign(const Stmt& s, const Assign& a) {
  if (a.rhs.as<Nondet>()) return s;
  auto rewritten = [&]() -> Stmt {
    Expr r = rewrite_expr(a.rhs);
    return r.get() == a.rhs.get() ? s : assign(a.target, r);
  };
  switch (cfg_.strategy) {
    case Strategy::WeakenFirst:
      if (auto w = weaken_assign(s)) return *w;
      return rewritten();
    case Strategy::RewriteFirst: {
      Stmt r = rewritten();
      if (r.get() != s.get()) return r;
      if (auto w = weaken_assign(s)) return *w;
      return s;
    }
    case Strategy::RewriteOnly:
      return rewritten();
    case Strategy::WeakenOnly:
      if (auto w = weaken_assign(s)) return *w;
      return s;
  }
  return s;
}

Stmt Transformer::transform_assume(const Stmt& s, const Assume& a) {
  auto rewritten = [&]() -> Stmt {
    Expr c = rewrite_expr(a.cond);
    return c.get() == a.cond.get() ? s : assume(c);
  };
  switch (cfg_.strategy) {
    case Strategy::WeakenFirst:
      if (auto w = weaken_assume(s)) return *w;
      return rewritten();
    case Strategy::RewriteFirst: {
      Stmt r = rewritten();
      if (r.get() != s.get()) return r;
      if (auto w = weaken_assume(s)) return *w;
      return s;
    }
    case Strategy::RewriteOnly:
      return rewritten();
    case Strategy::WeakenOnly:
      if (auto w = weaken_assume(s)) return *w;
      return s;
  }
  return s;
}

Stmt Transformer::transform(const Stmt& s) {
  if (s.generated()) return s;
  auto cond = [&](const Expr& c) { return may_rewrite() ? rewrite_expr(c) : c; };
  return std::visit(
      [&](const auto& n) -> Stmt {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Assign>) {
          return transform_assign(s, n);
        } else if constexpr (std::is_same_v<T, Assume>) {
          return transform_assume(s, n);
        } else if constexpr (std::is_same_v<T, Assert>) {
          Expr c = cond(n.cond);
          return c.get() == n.cond.get() ? s : assert_stmt(c);
        } else if constexpr (std::is_same_v<T, If>) {
          Expr c = cond(n.cond);
          return if_stmt(c, transform(n.then_body), transform(n.else_body));
        } else if constexpr (std::is_same_v<T, While>) {
          Expr c = cond(n.cond);
          return while_stmt(c, transform(n.body));
        } else if constexpr (std::is_same_v<T, Block>) {
          return block(transform(n.body));
        } else {
          return s;
        }
      },
      s.node().kind);
}

StmtList Transformer::transform(const StmtList& body) {
  StmtList out;
  out.reserve(body.size());
  for (const Stmt& s : body) out.push_back(transform(s));
  return out;
}

Expr rewrite_expr(const Expr& e, const Catalog& cat, const TransformConfig& cfg) {
  Transformer t(cat, cfg);
  return t.rewrite_expr(e);
}

Stmt weaken_assign(const Stmt& s, const Catalog& cat, const TransformConfig& cfg) {
  Transformer t(cat, cfg);
  if (auto w = t.weaken_assign(s)) return *w;
  auto* a = s.as<Assign>();
  if (!a || a->rhs.as<Nondet>()) return s;
  Expr r = t.rewrite_expr(a->rhs);
  return r.get() == a->rhs.get() ? s : assign(a->target, r);
}

Stmt weaken_assume(const Stmt& s, const Catalog& cat, const TransformConfig& cfg) {
  Transformer t(cat, cfg);
  if (auto w = t.weaken_assume(s)) return *w;
  auto* a = s.as<Assume>();
  if (!a) return s;
  Expr c = t.rewrite_expr(a->cond);
  return c.get() == a->cond.get() ? s : assume(c);
}

std::pair<Program, TransformReport> transform_program(const Program& p,
                                                      const TransformConfig& cfg) {
  return transform_program(p, cfg, catalog(cfg.width));
}

std::pair<Program, TransformReport> transform_program(const Program& p,
                                                      const TransformConfig& cfg,
                                                      const Catalog& cat) {
  if (p.width != cfg.width)
    throw std::invalid_argument("program width " + std::to_string(p.width) +
                                " differs from configured width " + std::to_string(cfg.width));
  TransformReport report;
  Program src = cfg.normalize ? normalize_three_address(p, &report) : p;

  Transformer t(cat, cfg);
  t.reserve_names(src);
  Program out;
  out.width = src.width;
  for (const Decl& d : src.decls) {
    Decl nd = d;
    if (d.init && !d.init->as<Nondet>() && cfg.strategy != Strategy::WeakenOnly)
      nd.init = t.rewrite_expr(*d.init);
    out.decls.push_back(std::move(nd));
  }
  out.body = t.transform(src.body);
  for (const auto& name : t.new_decls()) out.decls.push_back(Decl{name, std::nullopt});
  report.merge(t.report());
  return {std::move(out), std::move(report)};
}

}  // namespace bitbranch

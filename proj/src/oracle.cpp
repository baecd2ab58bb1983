#include "bitbranch/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "bitbranch/parser.hpp"

namespace bitbranch {

namespace {

// Two's-complement arithmetic at an arbitrary width, via masking.
struct Arith {
  int w;
  std::uint64_t mask;

  explicit Arith(int width)
      : w(width), mask(width == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1) {}

  Value norm(std::uint64_t bits) const {
    bits &= mask;
    if (w < 64 && (bits >> (w - 1)) & 1) bits |= ~mask;
    return static_cast<Value>(bits);
  }

  std::optional<Value> binary(BinOp op, Value x, Value y) const {
    const auto ux = static_cast<std::uint64_t>(x);
    const auto uy = static_cast<std::uint64_t>(y);
    switch (op) {
      case BinOp::Add: return norm(ux + uy);
      case BinOp::Sub: return norm(ux - uy);
      case BinOp::Mul: return norm(ux * uy);
      case BinOp::Div:
        if (y == 0) return std::nullopt;
        if (y == -1) return norm(0 - ux);
        return norm(static_cast<std::uint64_t>(x / y));
      case BinOp::Mod:
        if (y == 0) return std::nullopt;
        if (y == -1) return 0;
        return norm(static_cast<std::uint64_t>(x % y));
      case BinOp::BitAnd: return norm(ux & uy);
      case BinOp::BitOr: return norm(ux | uy);
      case BinOp::BitXor: return norm(ux ^ uy);
      case BinOp::Shl:
        if (y < 0 || y >= w) return std::nullopt;
        return norm(ux << y);
      case BinOp::Shr: {
        if (y < 0 || y >= w) return std::nullopt;
        // Arithmetic shift spelled out: shift the magnitude bits and refill
        // the vacated high bits with the sign.
        std::uint64_t shifted = (ux & mask) >> y;
        if (x < 0) shifted |= ~(mask >> y);
        return norm(shifted);
      }
      case BinOp::Lt: return x < y;
      case BinOp::Le: return x <= y;
      case BinOp::Gt: return x > y;
      case BinOp::Ge: return x >= y;
      case BinOp::Eq: return x == y;
      case BinOp::Ne: return x != y;
      case BinOp::LogAnd: return x != 0 && y != 0;
      case BinOp::LogOr: return x != 0 || y != 0;
    }
    return std::nullopt;
  }
};

int slot_of(const std::string& meta) {
  if (meta == "e1") return 0;
  if (meta == "e2") return 1;
  if (meta == "r") return 2;
  throw std::invalid_argument("unknown metavariable $" + meta);
}

std::optional<Value> slot_value(const Valuation& v, const std::string& meta) {
  switch (slot_of(meta)) {
    case 0: return v.e1;
    case 1: return v.e2;
    default: return v.r;
  }
}

}  // namespace

CompiledPattern::CompiledPattern(const Expr& pattern, int width) : width_(width) {
  if (width < 2 || width > 64) throw std::invalid_argument("width must be in [2, 64]");
  compile(pattern);
}

void CompiledPattern::compile(const Expr& e) {
  using Code = Instr::Code;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          code_.push_back({Code::Const, BinOp::Add, Arith(width_).norm(n.value)});
        } else if constexpr (std::is_same_v<T, MetaVar>) {
          code_.push_back({Code::Slot, BinOp::Add, slot_of(n.name)});
        } else if constexpr (std::is_same_v<T, Unary>) {
          compile(n.operand);
          Code c = n.op == UnOp::Neg ? Code::Neg
                                     : (n.op == UnOp::BitNot ? Code::BitNot : Code::LogNot);
          code_.push_back({c});
        } else if constexpr (std::is_same_v<T, Binary>) {
          if (n.op == BinOp::LogAnd || n.op == BinOp::LogOr) {
            compile(n.lhs);
            std::size_t jump = code_.size();
            code_.push_back({n.op == BinOp::LogAnd ? Code::AndJump : Code::OrJump});
            compile(n.rhs);
            code_.push_back({Code::ToBool});
            code_[jump].arg = static_cast<Value>(code_.size());
          } else {
            compile(n.lhs);
            compile(n.rhs);
            code_.push_back({Code::Binary, n.op});
          }
        } else if constexpr (std::is_same_v<T, Ternary>) {
          compile(n.cond);
          std::size_t to_else = code_.size();
          code_.push_back({Code::JumpIfZero});
          compile(n.then_expr);
          std::size_t to_end = code_.size();
          code_.push_back({Code::Jump});
          code_[to_else].arg = static_cast<Value>(code_.size());
          compile(n.else_expr);
          code_[to_end].arg = static_cast<Value>(code_.size());
        } else {
          throw std::invalid_argument("pattern contains a program variable or nondet: " +
                                      print_expr(e));
        }
      },
      e.node().kind);
}

std::optional<Value> CompiledPattern::eval(const Slots& slots) const {
  using Code = Instr::Code;
  const Arith a(width_);
  Value stack[64];
  int sp = 0;
  std::size_t pc = 0;
  const std::size_t n = code_.size();
  while (pc < n) {
    const Instr& in = code_[pc++];
    switch (in.code) {
      case Code::Const: stack[sp++] = in.arg; break;
      case Code::Slot: stack[sp++] = slots[static_cast<std::size_t>(in.arg)]; break;
      case Code::Neg: stack[sp - 1] = a.norm(0 - static_cast<std::uint64_t>(stack[sp - 1])); break;
      case Code::BitNot: stack[sp - 1] = a.norm(~static_cast<std::uint64_t>(stack[sp - 1])); break;
      case Code::LogNot: stack[sp - 1] = stack[sp - 1] == 0; break;
      case Code::ToBool: stack[sp - 1] = stack[sp - 1] != 0; break;
      case Code::Binary: {
        auto r = a.binary(in.op, stack[sp - 2], stack[sp - 1]);
        if (!r) return std::nullopt;
        --sp;
        stack[sp - 1] = *r;
        break;
      }
      case Code::AndJump:
        if (stack[sp - 1] == 0) {
          pc = static_cast<std::size_t>(in.arg);
        } else {
          --sp;
        }
        break;
      case Code::OrJump:
        if (stack[sp - 1] != 0) {
          stack[sp - 1] = 1;
          pc = static_cast<std::size_t>(in.arg);
        } else {
          --sp;
        }
        break;
      case Code::JumpIfZero:
        if (stack[--sp] == 0) pc = static_cast<std::size_t>(in.arg);
        break;
      case Code::Jump: pc = static_cast<std::size_t>(in.arg); break;
    }
  }
  return stack[0];
}

std::optional<Value> eval_pattern(const Expr& e, const Valuation& v, int width) {
  const Arith a(width);
  return std::visit(
      [&](const auto& n) -> std::optional<Value> {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          return a.norm(static_cast<std::uint64_t>(n.value));
        } else if constexpr (std::is_same_v<T, MetaVar>) {
          return slot_value(v, n.name);
        } else if constexpr (std::is_same_v<T, Unary>) {
          auto x = eval_pattern(n.operand, v, width);
          if (!x) return std::nullopt;
          if (n.op == UnOp::Neg) return a.norm(0 - static_cast<std::uint64_t>(*x));
          if (n.op == UnOp::BitNot) return a.norm(~static_cast<std::uint64_t>(*x));
          return *x == 0;
        } else if constexpr (std::is_same_v<T, Binary>) {
          auto x = eval_pattern(n.lhs, v, width);
          if (!x) return std::nullopt;
          if (n.op == BinOp::LogAnd && *x == 0) return 0;
          if (n.op == BinOp::LogOr && *x != 0) return 1;
          auto y = eval_pattern(n.rhs, v, width);
          if (!y) return std::nullopt;
          return a.binary(n.op, *x, *y);
        } else if constexpr (std::is_same_v<T, Ternary>) {
          auto c = eval_pattern(n.cond, v, width);
          if (!c) return std::nullopt;
          return eval_pattern(*c != 0 ? n.then_expr : n.else_expr, v, width);
        } else {
          return std::nullopt;
        }
      },
      e.node().kind);
}

Obligation obligation_for(const RewriteRule& rule) {
  return {Obligation::Kind::RewriteExact, rule.guard, rule.source, rule.replacement};
}

Obligation obligation_for(const WeakenRule& rule, RelOp op) {
  if (rule.shape == WeakenRule::Shape::Relational && op == RelOp::Assign)
    return {Obligation::Kind::WeakenAssign, rule.guard, rule.source, rule.replacement};
  return {Obligation::Kind::WeakenImplies, rule.guard, rule.condition(op), rule.replacement};
}

std::string Verdict::line() const {
  std::ostringstream os;
  os << "RULE=" << rule.name << " VARIANT=" << rule.variant
     << " RELOP=" << (relop.empty() ? "none" : relop) << " W=" << width
     << " STATUS=" << (pass ? "pass" : "fail");
  if (counterexample) {
    os << " CEX";
    if (counterexample->e1) os << " e1=" << *counterexample->e1;
    if (counterexample->e2) os << " e2=" << *counterexample->e2;
    if (counterexample->r) os << " r=" << *counterexample->r;
  }
  os << " N=" << valuations_checked;
  return os.str();
}

namespace {

// True when the obligation is violated at `v`; nullopt when `v` is outside
// the domain. Uses the recursive evaluator.
std::optional<bool> violated_at(const Obligation& ob, const Valuation& v, int width) {
  auto g = eval_pattern(ob.guard, v, width);
  if (!g) return std::nullopt;
  if (*g == 0) return false;
  auto lhs = eval_pattern(ob.lhs, v, width);
  if (!lhs) return std::nullopt;
  switch (ob.kind) {
    case Obligation::Kind::RewriteExact: {
      auto rhs = eval_pattern(ob.rhs, v, width);
      if (!rhs) return std::nullopt;
      return *lhs != *rhs;
    }
    case Obligation::Kind::WeakenImplies: {
      if (*lhs == 0) return false;
      auto rhs = eval_pattern(ob.rhs, v, width);
      if (!rhs) return std::nullopt;
      return *rhs == 0;
    }
    case Obligation::Kind::WeakenAssign: {
      Valuation post = v;
      post.r = *lhs;
      auto rhs = eval_pattern(ob.rhs, post, width);
      if (!rhs) return std::nullopt;
      return *rhs == 0;
    }
  }
  return std::nullopt;
}

std::vector<std::string> enumerated_vars(const Obligation& ob) {
  std::vector<std::string> vars;
  auto add = [&](const Expr& e) {
    for (auto& m : metavariables(e)) vars.push_back(m);
  };
  add(ob.guard);
  add(ob.lhs);
  if (ob.kind == Obligation::Kind::WeakenAssign) {
    // $r is bound to the exact value, not enumerated.
    for (auto& m : metavariables(ob.rhs))
      if (m != "r") vars.push_back(m);
  } else {
    add(ob.rhs);
  }
  std::sort(vars.begin(), vars.end(), [](const std::string& a, const std::string& b) {
    return slot_of(a) < slot_of(b);
  });
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

}  // namespace

Verdict check_obligation(const Obligation& ob, int width) {
  if (width < 2 || width > 32) throw std::invalid_argument("oracle width must be in [2, 32]");
  const std::vector<std::string> vars = enumerated_vars(ob);
  const CompiledPattern guard(ob.guard, width);
  const CompiledPattern lhs(ob.lhs, width);
  const CompiledPattern rhs(ob.rhs, width);
  const Value lo = -(Value{1} << (width - 1));
  const Value hi = (Value{1} << (width - 1)) - 1;
  const std::uint64_t span = std::uint64_t{1} << width;

  Verdict v;
  v.width = width;

  std::vector<int> slots;
  for (const auto& name : vars) slots.push_back(slot_of(name));
  const bool inner_r = !slots.empty() && slots.back() == 2;
  // Enumerate the outer (guard) variables; $r, when enumerated, is always
  // last and never read by the guard.
  const std::size_t outer = inner_r ? slots.size() - 1 : slots.size();

  CompiledPattern::Slots s{0, 0, 0};
  std::optional<Valuation> cex;

  auto to_valuation = [&]() {
    Valuation val;
    for (int slot : slots) {
      if (slot == 0) val.e1 = s[0];
      if (slot == 1) val.e2 = s[1];
      if (slot == 2) val.r = s[2];
    }
    if (ob.kind == Obligation::Kind::WeakenAssign) val.r = lhs.eval(s);
    return val;
  };

  // Checks the innermost level; returns false to stop on a violation.
  auto check_point = [&]() -> bool {
    auto g = guard.eval(s);
    if (!g || *g == 0) {
      v.valuations_checked += inner_r ? span : 1;
      return true;
    }
    if (ob.kind == Obligation::Kind::RewriteExact) {
      ++v.valuations_checked;
      auto a = lhs.eval(s);
      auto b = rhs.eval(s);
      if (!a || !b) return true;
      ++v.guard_hits;
      if (*a != *b) {
        cex = to_valuation();
        return false;
      }
      return true;
    }
    if (ob.kind == Obligation::Kind::WeakenAssign) {
      ++v.valuations_checked;
      auto exact = lhs.eval(s);
      if (!exact) return true;
      CompiledPattern::Slots post = s;
      post[2] = *exact;
      auto ok = rhs.eval(post);
      if (!ok) return true;
      ++v.guard_hits;
      if (*ok == 0) {
        cex = to_valuation();
        return false;
      }
      return true;
    }
    // WeakenImplies
    const Value r_lo = inner_r ? lo : 0;
    const Value r_hi = inner_r ? hi : 0;
    for (Value r = r_lo;; ++r) {
      s[2] = r;
      ++v.valuations_checked;
      auto cond = lhs.eval(s);
      if (cond && *cond != 0) {
        auto ok = rhs.eval(s);
        if (ok) {
          ++v.guard_hits;
          if (*ok == 0) {
            cex = to_valuation();
            return false;
          }
        }
      }
      if (r == r_hi) break;
    }
    return true;
  };

  auto recurse = [&](auto&& self, std::size_t level) -> bool {
    if (level == outer) return check_point();
    const int slot = slots[level];
    for (Value x = lo;; ++x) {
      s[static_cast<std::size_t>(slot)] = x;
      if (!self(self, level + 1)) return false;
      if (x == hi) break;
    }
    return true;
  };
  recurse(recurse, 0);

  if (cex) {
    auto again = violated_at(ob, *cex, width);
    if (!again || !*again)
      throw std::logic_error("oracle counterexample did not reproduce");
    v.pass = false;
    v.counterexample = cex;
  }
  return v;
}

Verdict check_rewrite_rule(const RewriteRule& rule, int width) {
  Verdict v = check_obligation(obligation_for(rule), width);
  v.rule = rule.id;
  return v;
}

namespace {

std::vector<RelOp> checked_relops(const WeakenRule& rule) {
  if (rule.shape == WeakenRule::Shape::Bare) return {RelOp::Eq};
  return rule.relops;
}

std::string relop_label(const WeakenRule& rule, RelOp op) {
  return rule.shape == WeakenRule::Shape::Bare ? "cond" : spelling(op);
}

}  // namespace

Verdict check_weaken_rule(const WeakenRule& rule, RelOp op, int width) {
  Verdict v = check_obligation(obligation_for(rule, op), width);
  v.rule = rule.id;
  v.relop = relop_label(rule, op);
  return v;
}

Verdict check_weaken_rule(const WeakenRule& rule, int width) {
  Verdict total;
  total.rule = rule.id;
  total.width = width;
  for (RelOp op : checked_relops(rule)) {
    Verdict v = check_weaken_rule(rule, op, width);
    if (!v.pass) return v;
    total.valuations_checked += v.valuations_checked;
    total.guard_hits += v.guard_hits;
  }
  return total;
}

namespace {

std::uint64_t space_size(const Obligation& ob, int width) {
  return std::uint64_t{1} << (width * static_cast<int>(enumerated_vars(ob).size()));
}

}  // namespace

std::vector<Verdict> check_all(const std::function<Catalog(int)>& make_catalog,
                               const std::vector<int>& widths, const CheckOptions& opts) {
  if (widths.empty()) throw std::invalid_argument("check_all needs at least one width");

  struct Task {
    RuleId id;
    std::string relop;
    Obligation ob;
    int width;
  };
  std::vector<Task> tasks;
  for (int w : widths) {
    Catalog cat = make_catalog(w);
    for (const RewriteRule& rule : cat.rewrite) {
      Obligation ob = obligation_for(rule);
      if (space_size(ob, w) <= opts.max_valuations) tasks.push_back({rule.id, "", ob, w});
    }
    for (const WeakenRule& rule : cat.weaken)
      for (RelOp op : checked_relops(rule)) {
        Obligation ob = obligation_for(rule, op);
        if (space_size(ob, w) <= opts.max_valuations)
          tasks.push_back({rule.id, relop_label(rule, op), ob, w});
      }
  }

  std::vector<Verdict> out(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      out[i] = check_obligation(tasks[i].ob, tasks[i].width);
      out[i].rule = tasks[i].id;
      out[i].relop = tasks[i].relop;
    }
  };
  unsigned n = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, static_cast<unsigned>(std::max<std::size_t>(tasks.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

std::vector<Verdict> check_all(const std::vector<int>& widths, const CheckOptions& opts) {
  return check_all([](int w) { return catalog(w); }, widths, opts);
}

}  // namespace bitbranch

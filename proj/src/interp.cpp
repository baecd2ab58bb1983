#include "bitbranch/interp.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "bitbranch/parser.hpp"

namespace bitbranch {

void Env::set(const std::string& name, Value v) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) {
      values_[i] = v;
      return;
    }
  }
  names_.push_back(name);
  values_.push_back(v);
}

std::optional<Value> Env::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return values_[i];
  return std::nullopt;
}

Value Env::get(std::string_view name) const {
  auto v = find(name);
  if (!v) throw RuntimeFault("unbound variable '" + std::string(name) + "'");
  return *v;
}

namespace {

// Sign-extend the low `width` bits.
Value wrap(std::uint64_t bits, int width) {
  const int unused = 64 - width;
  return static_cast<Value>(bits << unused) >> unused;
}

std::uint64_t u(Value v) { return static_cast<std::uint64_t>(v); }

Value eval(const Expr& e, const Env& env, int w);

Value eval_binary(const Binary& b, const Env& env, int w) {
  if (b.op == BinOp::LogAnd) return eval(b.lhs, env, w) != 0 && eval(b.rhs, env, w) != 0;
  if (b.op == BinOp::LogOr) return eval(b.lhs, env, w) != 0 || eval(b.rhs, env, w) != 0;
  const Value x = eval(b.lhs, env, w);
  const Value y = eval(b.rhs, env, w);
  switch (b.op) {
    case BinOp::Add: return wrap(u(x) + u(y), w);
    case BinOp::Sub: return wrap(u(x) - u(y), w);
    case BinOp::Mul: return wrap(u(x) * u(y), w);
    case BinOp::Div:
    case BinOp::Mod: {
      if (y == 0) throw RuntimeFault("division by zero");
      // Only INT64_MIN / -1 overflows int64; at narrower widths the wrap
      // below handles INT_MIN / -1.
      if (y == -1) return b.op == BinOp::Div ? wrap(0 - u(x), w) : 0;
      return wrap(u(b.op == BinOp::Div ? x / y : x % y), w);
    }
    case BinOp::BitAnd: return x & y;
    case BinOp::BitOr: return x | y;
    case BinOp::BitXor: return x ^ y;
    case BinOp::Shl:
    case BinOp::Shr:
      if (y < 0 || y >= w) throw RuntimeFault("shift amount " + std::to_string(y) +
                                              " outside [0, " + std::to_string(w - 1) + "]");
      return b.op == BinOp::Shl ? wrap(u(x) << y, w) : x >> y;
    case BinOp::Lt: return x < y;
    case BinOp::Le: return x <= y;
    case BinOp::Gt: return x > y;
    case BinOp::Ge: return x >= y;
    case BinOp::Eq: return x == y;
    case BinOp::Ne: return x != y;
    default: break;
  }
  throw RuntimeFault("unknown operator");
}

Value eval(const Expr& e, const Env& env, int w) {
  return std::visit(
      [&](const auto& n) -> Value {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Var>) {
          return env.get(n.name);
        } else if constexpr (std::is_same_v<T, IntLit>) {
          return wrap(u(n.value), w);
        } else if constexpr (std::is_same_v<T, Unary>) {
          Value v = eval(n.operand, env, w);
          switch (n.op) {
            case UnOp::Neg: return wrap(0 - u(v), w);
            case UnOp::BitNot: return ~v;
            case UnOp::LogNot: return v == 0;
          }
          return 0;
        } else if constexpr (std::is_same_v<T, Binary>) {
          return eval_binary(n, env, w);
        } else if constexpr (std::is_same_v<T, Ternary>) {
          return eval(n.cond, env, w) != 0 ? eval(n.then_expr, env, w)
                                           : eval(n.else_expr, env, w);
        } else if constexpr (std::is_same_v<T, MetaVar>) {
          throw RuntimeFault("cannot evaluate metavariable $" + n.name);
        } else {
          throw RuntimeFault("cannot evaluate a nondeterministic value");
        }
      },
      e.node().kind);
}

}  // namespace

Value eval_expr(const Expr& e, const Env& env, int width) {
  if (width < 2 || width > 64) throw std::invalid_argument("width must be in [2, 64]");
  return eval(e, env, width);
}

NondetStream::NondetStream(std::uint64_t seed) : seed_(seed), rng_(seed) {}

NondetStream NondetStream::from_values(std::vector<Value> values) {
  NondetStream s;
  s.fixed_ = std::move(values);
  return s;
}

Value NondetStream::next(int width) {
  if (fixed_) return pos_ < fixed_->size() ? (*fixed_)[pos_++] : 0;
  // Half the draws come from a small window around zero, where loop
  // guards and the 0/1 rule guards live.
  const std::uint64_t raw = rng_();
  if (raw & 1) {
    std::uniform_int_distribution<Value> small(-64, 64);
    return wrap(u(small(rng_)), width);
  }
  return wrap(rng_(), width);
}

const char* spelling(TraceStatus s) {
  switch (s) {
    case TraceStatus::Terminated: return "terminated";
    case TraceStatus::BudgetExhausted: return "budget-exhausted";
    case TraceStatus::AssumeStuck: return "assume-stuck";
    case TraceStatus::AssertFailed: return "assert-failed";
    case TraceStatus::Fault: return "fault";
  }
  return "?";
}

std::string Trace::dump() const {
  std::ostringstream os;
  for (const TraceStep& step : steps) {
    os << step.stmt;
    for (std::size_t i = 0; i < names.size(); ++i) os << ' ' << names[i] << '=' << step.env[i];
    os << '\n';
  }
  return os.str();
}

namespace {

struct Halt {
  TraceStatus status;
  std::string detail;
};

struct Violation {
  std::string detail;
};

/// Executes one program. In shadow mode generated havocs take their
/// recorded exact value and generated assumes are checked against it.
class Machine {
 public:
  Machine(const Program& p, NondetStream& stream, std::size_t budget, bool shadow)
      : p_(p), stream_(stream), budget_(budget), shadow_(shadow) {
    std::size_t next = 0;
    number(p.body, next);
  }

  Trace execute() {
    for (const Decl& d : p_.decls) env_.set(d.name, 0);
    trace_.names = env_.names();
    try {
      try {
        for (const Decl& d : p_.decls)
          if (d.init) env_.set(d.name, value_of(*d.init));
      } catch (const RuntimeFault& f) {
        throw Halt{TraceStatus::Fault, f.what()};
      }
      trace_.initial = env_.values();
      exec(p_.body);
      trace_.status = TraceStatus::Terminated;
    } catch (const Halt& h) {
      if (trace_.initial.empty()) trace_.initial = env_.values();
      trace_.status = h.status;
      trace_.detail = h.detail;
    }
    trace_.iterations = iterations_;
    return std::move(trace_);
  }

 private:
  void number(const StmtList& body, std::size_t& next) {
    for (const Stmt& s : body) {
      index_[s.get()] = next++;
      if (auto* i = s.as<If>()) {
        number(i->then_body, next);
        number(i->else_body, next);
      } else if (auto* w = s.as<While>()) {
        number(w->body, next);
      } else if (auto* b = s.as<Block>()) {
        number(b->body, next);
      }
    }
  }

  Value value_of(const Expr& e) {
    if (e.as<Nondet>()) return stream_.next(p_.width);
    return eval(e, env_, p_.width);
  }

  Value checked(const Expr& e, const Stmt& s) {
    try {
      return value_of(e);
    } catch (const RuntimeFault& f) {
      throw Halt{TraceStatus::Fault,
                 "statement #" + std::to_string(index_.at(s.get())) + ": " + f.what()};
    }
  }

  void record(const Stmt& s) { trace_.steps.push_back({index_.at(s.get()), env_.values()}); }

  std::string where(const Stmt& s) const {
    std::string w = "statement #" + std::to_string(index_.at(s.get()));
    if (!rules_.empty()) w += " (rule " + rules_.back().str() + ")";
    return w;
  }

  std::string state() const {
    std::string out;
    for (std::size_t i = 0; i < env_.names().size(); ++i)
      out += (i ? " " : "") + env_.names()[i] + "=" + std::to_string(env_.values()[i]);
    return out;
  }

  void exec(const StmtList& body) {
    for (const Stmt& s : body) exec(s);
  }

  void exec(const Stmt& s) {
    std::visit([&](const auto& n) { step(s, n); }, s.node().kind);
  }

  void step(const Stmt& s, const Assign& a) {
    env_.set(a.target, checked(a.rhs, s));
    record(s);
  }

  void step(const Stmt& s, const Havoc& h) {
    Value v;
    if (shadow_ && s.generated()) {
      if (!h.origin)
        throw ReplayError("generated havoc of '" + h.target + "' at " + where(s) +
                          " carries no original expression");
      v = checked(*h.origin, s);
    } else {
      v = stream_.next(p_.width);
    }
    env_.set(h.target, v);
    record(s);
  }

  void step(const Stmt& s, const Assume& a) {
    const bool holds = checked(a.cond, s) != 0;
    record(s);
    if (shadow_ && s.generated()) {
      // The original condition decides whether the original run continues;
      // the weakened one must then admit it.
      const bool original_holds = a.origin ? checked(*a.origin, s) != 0 : true;
      if (!original_holds)
        throw Halt{TraceStatus::AssumeStuck, "assume at " + where(s)};
      if (!holds)
        throw Violation{"generated assume(" + print_expr(a.cond) + ") at " + where(s) +
                        " rejects the exact execution; state: " + state()};
      return;
    }
    if (!holds) throw Halt{TraceStatus::AssumeStuck, "assume at " + where(s)};
  }

  void step(const Stmt& s, const Assert& a) {
    const bool holds = checked(a.cond, s) != 0;
    record(s);
    if (!holds) throw Halt{TraceStatus::AssertFailed, "assert at " + where(s)};
  }

  void step(const Stmt& s, const If& i) {
    const bool taken = checked(i.cond, s) != 0;
    if (taken) {
      if (i.rule) rules_.push_back(*i.rule);
      exec(i.then_body);
      if (i.rule) rules_.pop_back();
    } else {
      exec(i.else_body);
    }
  }

  void step(const Stmt& s, const While& w) {
    while (checked(w.cond, s) != 0) {
      if (iterations_ >= budget_)
        throw Halt{TraceStatus::BudgetExhausted,
                   "loop budget of " + std::to_string(budget_) + " iterations exhausted"};
      ++iterations_;
      exec(w.body);
    }
  }

  void step(const Stmt&, const Block& b) { exec(b.body); }

  const Program& p_;
  NondetStream& stream_;
  std::size_t budget_;
  bool shadow_;
  Env env_;
  Trace trace_;
  std::size_t iterations_ = 0;
  std::vector<RuleId> rules_;
  std::unordered_map<const StmtNode*, std::size_t> index_;

  friend ReplayResult bitbranch::shadow_replay(const Program&, const Program&,
                                               std::uint64_t, std::size_t);
};

}  // namespace

Trace run(const Program& p, NondetStream& stream, std::size_t budget) {
  if (budget < 1) throw std::invalid_argument("budget must be at least 1");
  return Machine(p, stream, budget, false).execute();
}

std::vector<std::vector<Value>> projected_states(const Trace& t,
                                                 const std::vector<std::string>& names) {
  std::vector<std::size_t> cols;
  for (const auto& n : names) {
    auto it = std::find(t.names.begin(), t.names.end(), n);
    if (it == t.names.end()) throw std::invalid_argument("trace lacks variable '" + n + "'");
    cols.push_back(static_cast<std::size_t>(it - t.names.begin()));
  }
  std::vector<std::vector<Value>> out;
  auto push = [&](const std::vector<Value>& env) {
    std::vector<Value> row;
    row.reserve(cols.size());
    for (std::size_t c : cols) row.push_back(env[c]);
    if (out.empty() || out.back() != row) out.push_back(std::move(row));
  };
  if (!t.initial.empty()) push(t.initial);
  for (const TraceStep& s : t.steps) push(s.env);
  return out;
}

ReplayResult shadow_replay(const Program& original, const Program& transformed,
                           std::uint64_t seed, std::size_t budget) {
  if (budget < 1) throw std::invalid_argument("budget must be at least 1");
  ReplayResult result;
  NondetStream s1(seed);
  result.original = Machine(original, s1, budget, false).execute();

  NondetStream s2(seed);
  Machine shadow(transformed, s2, budget, true);
  try {
    result.shadow = shadow.execute();
  } catch (const Violation& v) {
    result.ok = false;
    result.detail = "seed " + std::to_string(seed) + ": " + v.detail;
    result.shadow = std::move(shadow.trace_);
    return result;
  }

  if (result.original.status != result.shadow.status) {
    result.ok = false;
    result.detail = "seed " + std::to_string(seed) + ": original ended " +
                    spelling(result.original.status) + " but transformed ended " +
                    spelling(result.shadow.status) + " (" + result.shadow.detail + ")";
    return result;
  }
  std::vector<std::string> user;
  for (const Decl& d : original.decls) user.push_back(d.name);
  auto a = projected_states(result.original, user);
  auto b = projected_states(result.shadow, user);
  if (a != b) {
    std::size_t k = 0;
    while (k < a.size() && k < b.size() && a[k] == b[k]) ++k;
    result.ok = false;
    result.detail = "seed " + std::to_string(seed) +
                    ": projected traces diverge at state " + std::to_string(k);
  }
  return result;
}

}  // namespace bitbranch

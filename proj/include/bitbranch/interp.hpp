#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bitbranch/ast.hpp"

namespace bitbranch {

/// Division/modulo by zero, out-of-range shift, or an expression the
/// interpreter cannot evaluate (Nondet, metavariable, unknown variable).
class RuntimeFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Variable valuation. Keeps insertion (declaration) order.
class Env {
 public:
  void set(const std::string& name, Value v);
  std::optional<Value> find(std::string_view name) const;
  Value get(std::string_view name) const;

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Value>& values() const { return values_; }

 private:
  std::vector<std::string> names_;
  std::vector<Value> values_;
};

/// Evaluates `e` with `width`-bit two's-complement semantics: wrapping
/// add/sub/mul/neg, truncating division and modulo, arithmetic right shift,
/// 0/1 results for comparisons and logical operators, short-circuit && || ?:.
Value eval_expr(const Expr& e, const Env& env, int width);

/// Deterministic source of nondeterministic values.
class NondetStream {
 public:
  explicit NondetStream(std::uint64_t seed);
  /// Yields `values` in order, then zeros. For tests.
  static NondetStream from_values(std::vector<Value> values);

  Value next(int width);
  std::uint64_t seed() const { return seed_; }

 private:
  NondetStream() = default;

  std::uint64_t seed_ = 0;
  std::mt19937_64 rng_;
  std::optional<std::vector<Value>> fixed_;
  std::size_t pos_ = 0;
};

enum class TraceStatus {
  Terminated,
  BudgetExhausted,
  AssumeStuck,
  AssertFailed,
  Fault,
};

const char* spelling(TraceStatus s);

struct TraceStep {
  /// Pre-order index of the executed statement.
  std::size_t stmt;
  std::vector<Value> env;
};

struct Trace {
  std::vector<std::string> names;
  std::vector<Value> initial;
  std::vector<TraceStep> steps;
  TraceStatus status = TraceStatus::Terminated;
  std::string detail;
  std::size_t iterations = 0;

  /// One line per step: `<idx> <var>=<val> ...`.
  std::string dump() const;
};

inline constexpr std::size_t kDefaultBudget = 100000;

/// Executes `p` from a zero-initialised environment (declared initializers
/// applied in order). Nondet reads consume `stream`; `budget` bounds the
/// number of loop iterations.
Trace run(const Program& p, NondetStream& stream, std::size_t budget = kDefaultBudget);

/// The transformed program lacks the replay metadata this tool attaches.
class ReplayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReplayResult {
  bool ok = true;
  std::string detail;
  Trace original;
  Trace shadow;
};

/// Runs `original` and, along the same path, `transformed`: ordinary
/// nondet reads consume the same stream, generated havocs take the exact
/// value of the expression they replaced, and every generated assume must
/// admit that value. Fails (ok = false) when a generated assume rejects an
/// execution the original takes, or when the traces projected onto the
/// original's variables differ.
ReplayResult shadow_replay(const Program& original, const Program& transformed,
                           std::uint64_t seed, std::size_t budget = kDefaultBudget);

/// User-variable states of `t`, projected onto `names` with consecutive
/// duplicates collapsed, initial state first.
std::vector<std::vector<Value>> projected_states(const Trace& t,
                                                 const std::vector<std::string>& names);

}  // namespace bitbranch

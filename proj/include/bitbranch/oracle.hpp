#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bitbranch/ast.hpp"
#include "bitbranch/rules.hpp"

namespace bitbranch {

/// Values for the pattern metavariables; unset ones do not occur.
struct Valuation {
  std::optional<Value> e1;
  std::optional<Value> e2;
  std::optional<Value> r;
};

/// What a rule must satisfy at every valuation in its domain.
struct Obligation {
  enum class Kind {
    /// guard ⟹ lhs == rhs
    RewriteExact,
    /// guard ∧ lhs ⟹ rhs, with lhs the matched condition
    WeakenImplies,
    /// guard ⟹ rhs[$r := lhs], with lhs the exact right-hand side
    WeakenAssign,
  };

  Kind kind;
  Expr guard;
  Expr lhs;
  Expr rhs;
};

Obligation obligation_for(const RewriteRule& rule);
/// `op` is ignored for bare rules.
Obligation obligation_for(const WeakenRule& rule, RelOp op);

struct Verdict {
  RuleId rule;
  /// Empty for rewrite rules; "cond" for bare conditions; otherwise the
  /// relational operator.
  std::string relop;
  int width = 0;
  bool pass = true;
  std::optional<Valuation> counterexample;
  std::uint64_t valuations_checked = 0;
  /// Valuations where the guard held and every side evaluated.
  std::uint64_t guard_hits = 0;

  /// `RULE=<id> VARIANT=<n> RELOP=<op> W=<w> STATUS=<pass|fail> [CEX ...] N=<count>`
  std::string line() const;
};

/// Exhaustively checks `ob` over all `width`-bit values of its
/// metavariables (e1 outermost, then e2, then r; each ascending from
/// -2^(width-1)). Valuations where any side faults are outside the domain.
/// A failing verdict carries the first violating valuation, re-checked
/// with an independent evaluator before it is returned.
Verdict check_obligation(const Obligation& ob, int width);

Verdict check_rewrite_rule(const RewriteRule& rule, int width);
Verdict check_weaken_rule(const WeakenRule& rule, RelOp op, int width);
/// Every admissible relational operator; the first failure, or a pass whose
/// count sums all operators.
Verdict check_weaken_rule(const WeakenRule& rule, int width);

inline constexpr std::uint64_t kMaxValuations = std::uint64_t{1} << 24;

struct CheckOptions {
  /// Checks whose valuation space exceeds this are not run.
  std::uint64_t max_valuations = kMaxValuations;
  /// 0 = hardware concurrency.
  unsigned threads = 0;
};

/// Every rule of `make_catalog(w)` × every width × every admissible
/// operator, in deterministic order (width, then catalog order, then
/// operator order). Throws std::invalid_argument on an empty width list.
std::vector<Verdict> check_all(const std::function<Catalog(int)>& make_catalog,
                               const std::vector<int>& widths, const CheckOptions& opts = {});
std::vector<Verdict> check_all(const std::vector<int>& widths, const CheckOptions& opts = {});

/// A pattern compiled to straight-line stack code over the slots
/// ($e1, $e2, $r). This is the enumeration engine's evaluator.
class CompiledPattern {
 public:
  using Slots = std::array<Value, 3>;

  CompiledPattern(const Expr& pattern, int width);

  /// nullopt when evaluation faults (division by zero, shift out of range).
  std::optional<Value> eval(const Slots& slots) const;

 private:
  struct Instr {
    enum class Code : std::uint8_t {
      Const, Slot, Neg, BitNot, LogNot, Binary, AndJump, OrJump, ToBool, JumpIfZero, Jump,
    };
    Code code;
    BinOp op = BinOp::Add;
    Value arg = 0;
  };

  void compile(const Expr& e);

  std::vector<Instr> code_;
  int width_;
};

/// Evaluates a pattern expression at `width` bits by direct recursion.
/// nullopt when evaluation faults. Independent of the enumeration engine.
std::optional<Value> eval_pattern(const Expr& e, const Valuation& v, int width);

}  // namespace bitbranch

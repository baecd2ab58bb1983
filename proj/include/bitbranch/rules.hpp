#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bitbranch/ast.hpp"

namespace bitbranch {

/// Relational position a weakening rule admits. `Assign` stands for `:=`.
enum class RelOp { Lt, Le, Eq, Gt, Ge, Assign };

const char* spelling(RelOp op);
RelOp flip(RelOp op);
std::optional<RelOp> relop_of(BinOp op);
BinOp binop_of(RelOp op);

/// ⟨guard⟩ source ⇝ replacement: under the guard, source equals replacement.
struct RewriteRule {
  RuleId id;
  Expr guard;
  Expr source;
  Expr replacement;
};

/// ⟨guard⟩ s_bv ⤳ s_int: under the guard, the exact relation implies the
/// replacement constraint.
struct WeakenRule {
  enum class Shape {
    /// `$r OP source`, or `source OP $r` when mirrored.
    Relational,
    /// `source` is a whole condition, e.g. `($e1 | $e2) == 0`.
    Bare,
  };

  RuleId id;
  Shape shape = Shape::Relational;
  Expr guard;
  /// Metavariables that must constant-fold to a literal (is_const).
  std::vector<std::string> const_metavars;
  std::vector<RelOp> relops;
  bool mirrored = false;
  Expr source;
  Expr replacement;

  bool admits(RelOp op) const;

  /// The condition this rule matches for `op` (not valid for Assign).
  Expr condition(RelOp op) const;
};

struct Catalog {
  int width = kDefaultWidth;
  std::vector<RewriteRule> rewrite;
  std::vector<WeakenRule> weaken;
};

/// The unexpanded table rows, in table order. Shift rows are instantiated
/// at `width` (the shift amount is the literal width - 1).
std::vector<RewriteRule> rewrite_rows(int width);
std::vector<WeakenRule> weaken_rows();

/// The rule plus its commutative variants: operand swap for &, |, ^ (unless
/// the swap is a duplicate modulo commutative reordering) and, for
/// relational rules, the mirrored comparison.
std::vector<RewriteRule> expand_commutative(const RewriteRule& rule);
std::vector<WeakenRule> expand_commutative(const WeakenRule& rule);

/// Builds a catalog from (possibly modified) rows.
Catalog build_catalog(int width, const std::vector<RewriteRule>& rewrite,
                      const std::vector<WeakenRule>& weaken);

/// The full expanded catalog at `width`.
Catalog catalog(int width = kDefaultWidth);

/// One rule per line: id, guard, source, replacement.
std::string dump(const Catalog& cat);

/// Structural match. Metavariables match any expression (consistently when
/// repeated); literals match equal literals.
std::optional<Substitution> match_expr(const Expr& pattern, const Expr& subject);

/// Constant-folds `e` at `width`; nullopt if it mentions a variable or
/// faults.
std::optional<Value> fold_constant(const Expr& e, int width);

/// Matches `rule` against a condition expression. Binds $r for relational
/// shapes.
std::optional<Substitution> match_condition(const WeakenRule& rule, const Expr& cond,
                                            int width);

/// Matches `rule` against `target := rhs` (binds $r to the target).
std::optional<Substitution> match_assignment(const WeakenRule& rule,
                                             const std::string& target, const Expr& rhs,
                                             int width);

/// Named catalog mutations used to test the checker and replay harness.
/// Spelled `<row name>:<kind>` with kind one of
///   drop-guard   remove the guard's first conjunct (or the whole guard)
///   strict       first `<=` / `>=` of the replacement becomes `<` / `>`
///   zero-result  replacement becomes 0
/// The mutation is applied to the base row before closure expansion.
Catalog mutated_catalog(int width, const std::string& mutation);

/// The mutations checked in for acceptance testing.
const std::vector<std::string>& reference_mutations();

}  // namespace bitbranch

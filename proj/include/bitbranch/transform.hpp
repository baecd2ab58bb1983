#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bitbranch/ast.hpp"
#include "bitbranch/rules.hpp"

namespace bitbranch {

enum class Strategy { WeakenFirst, RewriteFirst, RewriteOnly, WeakenOnly };

const char* spelling(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view text);

struct TransformConfig {
  int width = kDefaultWidth;
  /// Hoist nested bitwise sub-expressions into temporaries first.
  bool normalize = true;
  Strategy strategy = Strategy::WeakenFirst;
};

struct TransformReport {
  std::map<RuleId, int> fired;
  int guards_inserted = 0;
  int temps_introduced = 0;

  int total_fired() const;
  void merge(const TransformReport& other);
};

/// Applies one catalog. Owns the fresh-name counters and the report for a
/// single program.
class Transformer {
 public:
  Transformer(const Catalog& cat, const TransformConfig& cfg);

  /// Continue `__bwb_` numbering after the names already declared in `p`.
  void reserve_names(const Program& p);

  /// Bottom-up: a node matching rewrite rules becomes
  /// `g1 ? r1 : (g2 ? r2 : ... node)` in catalog order. Inserted ternaries
  /// are not revisited. Returns the same handle when nothing fired.
  Expr rewrite_expr(const Expr& e);

  /// Guard chain for `target = rhs`, or nullopt when no weakening rule
  /// matches. Each branch havocs the target and assumes the weakened
  /// constraint; the final else is the original statement. When the target
  /// occurs in a matched operand its pre-state is snapshotted first.
  std::optional<Stmt> weaken_assign(const Stmt& s);

  /// Guard chain for `assume(c)`, or nullopt when no rule matches.
  std::optional<Stmt> weaken_assume(const Stmt& s);

  Stmt transform(const Stmt& s);
  StmtList transform(const StmtList& body);

  const TransformReport& report() const { return report_; }
  TransformReport& report() { return report_; }
  /// Snapshot variables introduced so far.
  const std::vector<std::string>& new_decls() const { return new_decls_; }

 private:
  bool may_rewrite() const { return cfg_.strategy != Strategy::WeakenOnly; }
  bool may_weaken() const { return cfg_.strategy != Strategy::RewriteOnly; }
  Stmt transform_assign(const Stmt& s, const Assign& a);
  Stmt transform_assume(const Stmt& s, const Assume& a);

  const Catalog& cat_;
  TransformConfig cfg_;
  TransformReport report_;
  std::vector<std::string> new_decls_;
  int snapshots_ = 0;
};

// Single-shot forms of the Transformer operations.
Expr rewrite_expr(const Expr& e, const Catalog& cat, const TransformConfig& cfg);
Stmt weaken_assign(const Stmt& s, const Catalog& cat, const TransformConfig& cfg);
Stmt weaken_assume(const Stmt& s, const Catalog& cat, const TransformConfig& cfg);

/// Hoists every catalog-bitwise operator that sits strictly inside a larger
/// expression into a fresh `__bwb_t<n>` assigned just before the statement
/// (for loop conditions: before the loop and at the end of the body).
/// Statement-level operators stay put, as do the operands of a top-level
/// comparison inside assume. Operands evaluated only conditionally (right
/// of && and ||, ternary branches) are left in place.
Program normalize_three_address(const Program& p, TransformReport* report = nullptr);

/// Optionally normalizes, then applies the catalog to every non-generated
/// statement. The input is not modified.
std::pair<Program, TransformReport> transform_program(const Program& p,
                                                      const TransformConfig& cfg);
std::pair<Program, TransformReport> transform_program(const Program& p,
                                                      const TransformConfig& cfg,
                                                      const Catalog& cat);

}  // namespace bitbranch

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace bitbranch {

/// Machine integer as seen by the tool. Every value of a W-bit program fits
/// in an int64 after sign extension, for 2 <= W <= 64.
using Value = std::int64_t;

inline constexpr int kDefaultWidth = 32;

enum class UnOp { Neg, BitNot, LogNot };

enum class BinOp {
  Add, Sub, Mul, Div, Mod,
  BitAnd, BitOr, BitXor, Shl, Shr,
  Lt, Le, Gt, Ge, Eq, Ne,
  LogAnd, LogOr,
};

const char* spelling(UnOp op);
const char* spelling(BinOp op);

bool is_relational(BinOp op);
bool is_commutative(BinOp op);

/// Operators the rule catalog has rows for.
bool is_catalog_bitwise(BinOp op);

/// A rule identity: the row label plus a closure-variant index (0 = as
/// printed in the rule table).
struct RuleId {
  std::string name;
  int variant = 0;

  std::string str() const;
  friend auto operator<=>(const RuleId&, const RuleId&) = default;
};

struct ExprNode;

/// Immutable, cheaply copyable handle to an expression tree.
class Expr {
 public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

  const ExprNode& node() const { return *node_; }
  const ExprNode* get() const { return node_.get(); }
  explicit operator bool() const { return node_ != nullptr; }

  template <class T>
  const T* as() const;

 private:
  std::shared_ptr<const ExprNode> node_;
};

struct Var { std::string name; };
/// Pattern metavariable ($e1, $e2, $r). Never produced by the parser.
struct MetaVar { std::string name; };
struct IntLit { Value value; };
struct Nondet {};
struct Unary { UnOp op; Expr operand; };
struct Binary { BinOp op; Expr lhs; Expr rhs; };
/// `rule` is set when the transformer inserted this node; such nodes are
/// never revisited.
struct Ternary {
  Expr cond;
  Expr then_expr;
  Expr else_expr;
  std::optional<RuleId> rule;
};

struct ExprNode {
  std::variant<Var, MetaVar, IntLit, Nondet, Unary, Binary, Ternary> kind;
};

template <class T>
const T* Expr::as() const {
  return node_ ? std::get_if<T>(&node_->kind) : nullptr;
}

// Builders.
Expr var(std::string name);
Expr meta(std::string name);
Expr lit(Value v);
Expr nondet();
Expr unary(UnOp op, Expr operand);
Expr binary(BinOp op, Expr lhs, Expr rhs);
Expr ternary(Expr cond, Expr then_expr, Expr else_expr,
             std::optional<RuleId> rule = std::nullopt);

inline Expr band(Expr a, Expr b) { return binary(BinOp::BitAnd, std::move(a), std::move(b)); }
inline Expr bor(Expr a, Expr b) { return binary(BinOp::BitOr, std::move(a), std::move(b)); }
inline Expr bxor(Expr a, Expr b) { return binary(BinOp::BitXor, std::move(a), std::move(b)); }
inline Expr shr(Expr a, Expr b) { return binary(BinOp::Shr, std::move(a), std::move(b)); }
inline Expr bnot(Expr a) { return unary(UnOp::BitNot, std::move(a)); }
inline Expr mod(Expr a, Expr b) { return binary(BinOp::Mod, std::move(a), std::move(b)); }
inline Expr lt(Expr a, Expr b) { return binary(BinOp::Lt, std::move(a), std::move(b)); }
inline Expr le(Expr a, Expr b) { return binary(BinOp::Le, std::move(a), std::move(b)); }
inline Expr gt(Expr a, Expr b) { return binary(BinOp::Gt, std::move(a), std::move(b)); }
inline Expr ge(Expr a, Expr b) { return binary(BinOp::Ge, std::move(a), std::move(b)); }
inline Expr eq(Expr a, Expr b) { return binary(BinOp::Eq, std::move(a), std::move(b)); }
inline Expr land(Expr a, Expr b) { return binary(BinOp::LogAnd, std::move(a), std::move(b)); }
inline Expr lor(Expr a, Expr b) { return binary(BinOp::LogOr, std::move(a), std::move(b)); }

struct StmtNode;

class Stmt {
 public:
  Stmt() = default;
  explicit Stmt(std::shared_ptr<const StmtNode> node) : node_(std::move(node)) {}

  const StmtNode& node() const { return *node_; }
  const StmtNode* get() const { return node_.get(); }
  bool generated() const;

  template <class T>
  const T* as() const;

 private:
  std::shared_ptr<const StmtNode> node_;
};

using StmtList = std::vector<Stmt>;

struct Assign { std::string target; Expr rhs; };
/// Unconstrained assignment inserted by weakening. `origin` is the exact
/// right-hand side it stands in for (used by shadow replay).
struct Havoc { std::string target; std::optional<Expr> origin; };
/// `origin` is set on generated assumes that weaken an existing condition.
struct Assume { Expr cond; std::optional<Expr> origin; };
struct Assert { Expr cond; };
/// `rule` is set on guards inserted by weakening.
struct If {
  Expr cond;
  StmtList then_body;
  StmtList else_body;
  std::optional<RuleId> rule;
};
struct While { Expr cond; StmtList body; };
struct Block { StmtList body; };

struct StmtNode {
  std::variant<Assign, Havoc, Assume, Assert, If, While, Block> kind;
  bool generated = false;
};

template <class T>
const T* Stmt::as() const {
  return node_ ? std::get_if<T>(&node_->kind) : nullptr;
}

Stmt make_stmt(decltype(StmtNode::kind) kind, bool generated = false);
Stmt assign(std::string target, Expr rhs, bool generated = false);
Stmt havoc(std::string target, std::optional<Expr> origin, bool generated = true);
Stmt assume(Expr cond, bool generated = false, std::optional<Expr> origin = std::nullopt);
Stmt assert_stmt(Expr cond);
Stmt if_stmt(Expr cond, StmtList then_body, StmtList else_body,
             std::optional<RuleId> rule = std::nullopt, bool generated = false);
Stmt while_stmt(Expr cond, StmtList body);
Stmt block(StmtList body);

struct Decl {
  std::string name;
  std::optional<Expr> init;
};

struct Program {
  std::vector<Decl> decls;
  StmtList body;
  int width = kDefaultWidth;
};

/// Metavariable bindings used to instantiate rule patterns.
class Substitution {
 public:
  void bind(const std::string& metavar, Expr e) { bindings_[metavar] = std::move(e); }
  const Expr* find(const std::string& metavar) const;
  const std::map<std::string, Expr>& bindings() const { return bindings_; }
  bool empty() const { return bindings_.empty(); }

 private:
  std::map<std::string, Expr> bindings_;
};

class UnboundMetavariable : public std::runtime_error {
 public:
  explicit UnboundMetavariable(const std::string& name)
      : std::runtime_error("unbound metavariable $" + name), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Replaces every metavariable of `pattern` by its binding.
/// Throws UnboundMetavariable when `delta` lacks one.
Expr substitute(const Expr& pattern, const Substitution& delta);

/// Replaces occurrences of program variable `from` by `to`.
Expr rename_var(const Expr& e, const std::string& from, const std::string& to);

/// Exact structural equality. Generated marks and rule annotations are
/// ignored; a Havoc equals an assignment of Nondet to the same target.
bool struct_eq(const Expr& a, const Expr& b);
bool struct_eq(const Stmt& a, const Stmt& b);
bool struct_eq(const StmtList& a, const StmtList& b);
bool struct_eq(const Program& a, const Program& b);

/// Sorts operands of commutative operators into a canonical order.
/// Semantics-preserving for side-effect-free expressions.
Expr canonical(const Expr& e);

bool mentions_var(const Expr& e, const std::string& name);
bool mentions_any_var(const Expr& e);
bool contains_catalog_bitwise(const Expr& e);
std::vector<std::string> metavariables(const Expr& e);

/// Renames `__bwb_t<n>` / `__bwb_s<n>` in order of first occurrence so two
/// transformer outputs can be compared independent of counter values.
Program canonicalize_generated_names(const Program& p);

inline constexpr const char* kReservedPrefix = "__bwb_";

}  // namespace bitbranch

#include <map>
#include <set>
#include <sstream>

#include "bitbranch/parser.hpp"

namespace bitbranch {

namespace {

int precedence(BinOp op) {
  switch (op) {
    case BinOp::LogOr: return 1;
    case BinOp::LogAnd: return 2;
    case BinOp::BitOr: return 3;
    case BinOp::BitXor: return 4;
    case BinOp::BitAnd: return 5;
    case BinOp::Eq: case BinOp::Ne: return 6;
    case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge: return 7;
    case BinOp::Shl: case BinOp::Shr: return 8;
    case BinOp::Add: case BinOp::Sub: return 9;
    case BinOp::Mul: case BinOp::Div: case BinOp::Mod: return 10;
  }
  return 0;
}

constexpr int kTernaryPrec = 0;
constexpr int kUnaryPrec = 11;
constexpr int kAtomPrec = 12;

int precedence(const Expr& e) {
  if (auto* b = e.as<Binary>()) return precedence(b->op);
  if (e.as<Ternary>()) return kTernaryPrec;
  if (e.as<Unary>()) return kUnaryPrec;
  // A negative literal behaves like a unary minus.
  if (auto* l = e.as<IntLit>(); l && l->value < 0) return kUnaryPrec;
  return kAtomPrec;
}

void emit(std::ostream& os, const Expr& e);

void emit_paren(std::ostream& os, const Expr& e, bool paren) {
  if (paren) os << '(';
  emit(os, e);
  if (paren) os << ')';
}

void emit(std::ostream& os, const Expr& e) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Var>) {
          os << n.name;
        } else if constexpr (std::is_same_v<T, MetaVar>) {
          os << '$' << n.name;
        } else if constexpr (std::is_same_v<T, IntLit>) {
          os << n.value;
        } else if constexpr (std::is_same_v<T, Nondet>) {
          os << "__VERIFIER_nondet_int()";
        } else if constexpr (std::is_same_v<T, Unary>) {
          os << spelling(n.op);
          // `-1` would re-parse as a literal and `- -x` would lex as `--`.
          bool paren = precedence(n.operand) < kUnaryPrec;
          if (n.op == UnOp::Neg &&
              (n.operand.template as<IntLit>() ||
               (n.operand.template as<Unary>() &&
                n.operand.template as<Unary>()->op == UnOp::Neg)))
            paren = true;
          emit_paren(os, n.operand, paren);
        } else if constexpr (std::is_same_v<T, Binary>) {
          int p = precedence(n.op);
          emit_paren(os, n.lhs, precedence(n.lhs) < p);
          os << ' ' << spelling(n.op) << ' ';
          emit_paren(os, n.rhs, precedence(n.rhs) <= p);
        } else {
          emit_paren(os, n.cond, n.cond.template as<Ternary>() != nullptr);
          os << " ? ";
          emit_paren(os, n.then_expr, n.then_expr.template as<Ternary>() != nullptr);
          os << " : ";
          emit_paren(os, n.else_expr, n.else_expr.template as<Ternary>() != nullptr);
        }
      },
      e.node().kind);
}

// Rule annotations of inserted ternaries, each node counted once even when a
// substitution shares it between a guard and a replacement.
void collect_ternary_rules(const Expr& e, std::set<const ExprNode*>& seen,
                           std::vector<RuleId>& out) {
  if (!seen.insert(e.get()).second) return;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Unary>) {
          collect_ternary_rules(n.operand, seen, out);
        } else if constexpr (std::is_same_v<T, Binary>) {
          collect_ternary_rules(n.lhs, seen, out);
          collect_ternary_rules(n.rhs, seen, out);
        } else if constexpr (std::is_same_v<T, Ternary>) {
          if (n.rule) out.push_back(*n.rule);
          collect_ternary_rules(n.cond, seen, out);
          collect_ternary_rules(n.then_expr, seen, out);
          collect_ternary_rules(n.else_expr, seen, out);
        }
      },
      e.node().kind);
}

class ProgramPrinter {
 public:
  explicit ProgramPrinter(std::ostream& os) : os_(os) {}

  void list(const StmtList& body, int depth) {
    for (const Stmt& s : body) stmt(s, depth);
  }

  void annotate(const Expr& e, int depth) {
    std::vector<RuleId> rules;
    collect_ternary_rules(e, seen_, rules);
    for (const RuleId& r : rules) {
      indent(depth);
      os_ << "// bwb: " << r.str() << '\n';
      ++fired[r];
    }
  }

  std::map<RuleId, int> fired;

 private:
  void indent(int depth) {
    for (int i = 0; i < depth; ++i) os_ << "  ";
  }

  void stmt(const Stmt& s, int depth) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Assign>) {
            annotate(n.rhs, depth);
            indent(depth);
            os_ << n.target << " = ";
            emit(os_, n.rhs);
            os_ << ";\n";
          } else if constexpr (std::is_same_v<T, Havoc>) {
            indent(depth);
            os_ << n.target << " = __VERIFIER_nondet_int();\n";
          } else if constexpr (std::is_same_v<T, Assume> || std::is_same_v<T, Assert>) {
            annotate(n.cond, depth);
            indent(depth);
            os_ << (std::is_same_v<T, Assume> ? "assume(" : "assert(");
            emit(os_, n.cond);
            os_ << ");\n";
          } else if constexpr (std::is_same_v<T, If>) {
            annotate(n.cond, depth);
            if (n.rule) {
              indent(depth);
              os_ << "// bwb: " << n.rule->str() << '\n';
              ++fired[*n.rule];
            }
            indent(depth);
            os_ << "if (";
            emit(os_, n.cond);
            os_ << ") {\n";
            list(n.then_body, depth + 1);
            indent(depth);
            if (!n.else_body.empty()) {
              os_ << "} else {\n";
              list(n.else_body, depth + 1);
              indent(depth);
            }
            os_ << "}\n";
          } else if constexpr (std::is_same_v<T, While>) {
            annotate(n.cond, depth);
            indent(depth);
            os_ << "while (";
            emit(os_, n.cond);
            os_ << ") {\n";
            list(n.body, depth + 1);
            indent(depth);
            os_ << "}\n";
          } else {
            indent(depth);
            os_ << "{\n";
            list(n.body, depth + 1);
            indent(depth);
            os_ << "}\n";
          }
        },
        s.node().kind);
  }

  std::ostream& os_;
  std::set<const ExprNode*> seen_;
};

}  // namespace

std::string print_expr(const Expr& e) {
  std::ostringstream os;
  emit(os, e);
  return os.str();
}

std::string print(const Program& p) {
  std::ostringstream body;
  ProgramPrinter printer(body);
  for (const Decl& d : p.decls) {
    if (d.init) printer.annotate(*d.init, 1);
    body << "  int " << d.name;
    if (d.init) {
      body << " = ";
      emit(body, *d.init);
    }
    body << ";\n";
  }
  printer.list(p.body, 1);

  std::ostringstream os;
  os << "// bitbranch: bitwise-branching output, width " << p.width << '\n';
  os << "// rules fired:";
  if (printer.fired.empty()) os << " none";
  for (const auto& [rule, count] : printer.fired) os << ' ' << rule.str() << '=' << count;
  os << "\nint main(void) {\n" << body.str() << "  return 0;\n}\n";
  return os.str();
}

}  // namespace bitbranch

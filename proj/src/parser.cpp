#include "bitbranch/parser.hpp"

#include <cctype>
#include <charconv>
#include <set>
#include <vector>

namespace bitbranch {

ParseError::ParseError(SourceSpan span, const std::string& message)
    : std::runtime_error(std::to_string(span.start_line) + ":" +
                         std::to_string(span.start_column) + ": " + message),
      span_(span),
      message_(message) {}

namespace {

enum class Tok {
  Ident, Number, Punct, End,
};

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      SourceSpan span{line_, col_, line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", span});
        return out;
      }
      char c = src_[pos_];
      if (c == '#') fail(span, "preprocessor directives are not supported");
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          advance();
        out.push_back(finish(Tok::Ident, start, span));
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_]))))
          advance();
        out.push_back(finish(Tok::Number, start, span));
      } else {
        static constexpr std::string_view kTwo[] = {
            "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "++", "--"};
        std::size_t start = pos_;
        std::string_view rest = src_.substr(pos_);
        bool matched = false;
        for (auto p : kTwo) {
          if (rest.starts_with(p)) {
            advance();
            advance();
            matched = true;
            break;
          }
        }
        if (!matched) {
          if (std::string_view("+-*/%&|^~!<>=?:;,(){}").find(c) == std::string_view::npos)
            fail(span, std::string("unexpected character '") + c + "'");
          advance();
        }
        out.push_back(finish(Tok::Punct, start, span));
      }
    }
  }

 private:
  [[noreturn]] void fail(SourceSpan span, const std::string& msg) {
    throw ParseError(span, msg);
  }

  Token finish(Tok kind, std::size_t start, SourceSpan span) {
    span.end_line = line_;
    span.end_column = col_;
    return {kind, std::string(src_.substr(start, pos_ - start)), span};
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (src_.substr(pos_).starts_with("//")) {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (src_.substr(pos_).starts_with("/*")) {
        SourceSpan span{line_, col_, line_, col_};
        advance();
        advance();
        while (pos_ < src_.size() && !src_.substr(pos_).starts_with("*/")) advance();
        if (pos_ >= src_.size()) fail(span, "unterminated comment");
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

const std::set<std::string, std::less<>> kKeywords = {
    "int", "if", "else", "while", "assume", "assert", "return", "void", "main",
    "__VERIFIER_nondet_int"};

class Parser {
 public:
  Parser(std::vector<Token> toks, const ParseOptions& opts)
      : toks_(std::move(toks)), opts_(opts) {
    if (opts_.width < 2 || opts_.width > 64)
      throw std::invalid_argument("width must be in [2, 64]");
  }

  Program program() {
    Program p;
    p.width = opts_.width;
    bool wrapped = false;
    if (is("int") && peek(1).text == "main") {
      wrapped = true;
      next();
      next();
      expect("(");
      if (is("void")) next();
      expect(")");
      expect("{");
    }
    while (is("int")) declaration(p);
    while (!at_end() && !(wrapped && (is("}") || is("return")))) {
      if (is("int")) fail(peek().span, "declarations must precede statements");
      p.body.push_back(statement());
    }
    if (wrapped) {
      if (is("return")) {
        next();
        expr();
        expect(";");
      }
      expect("}");
    }
    if (!at_end()) fail(peek().span, "expected end of input");
    return p;
  }

  Expr standalone_expr(const std::vector<std::string>& declared) {
    for (const auto& d : declared) declared_.insert(d);
    Expr e = expr();
    if (!at_end()) fail(peek().span, "expected end of expression");
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  bool at_end() const { return peek().kind == Tok::End; }
  bool is(std::string_view text) const {
    return peek().kind != Tok::End && peek().kind != Tok::Number && peek().text == text;
  }
  Token next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  [[noreturn]] void fail(const SourceSpan& span, const std::string& msg) const {
    throw ParseError(span, msg);
  }

  std::string describe(const Token& t) const {
    return t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
  }

  void expect(std::string_view text) {
    if (!is(text))
      fail(peek().span, "expected '" + std::string(text) + "' but found " + describe(peek()));
    next();
  }

  std::string identifier(bool declaring) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || kKeywords.contains(t.text))
      fail(t.span, "expected identifier but found " + describe(t));
    if (!opts_.allow_reserved && t.text.starts_with(kReservedPrefix))
      fail(t.span, "identifier '" + t.text + "' uses the reserved prefix __bwb_");
    if (declaring) {
      if (declared_.contains(t.text))
        fail(t.span, "redeclaration of '" + t.text + "'");
      declared_.insert(t.text);
    } else if (!declared_.contains(t.text)) {
      fail(t.span, "use of undeclared identifier '" + t.text + "'");
    }
    return next().text;
  }

  void declaration(Program& p) {
    expect("int");
    for (;;) {
      std::string name = identifier(true);
      Decl d{name, std::nullopt};
      if (is("=")) {
        next();
        d.init = is_nondet_rhs() ? consume_nondet() : expr();
      }
      p.decls.push_back(std::move(d));
      if (!is(",")) break;
      next();
    }
    expect(";");
  }

  bool is_nondet_rhs() const {
    if (is("*") && peek(1).text == ";") return true;
    return is("__VERIFIER_nondet_int");
  }

  Expr consume_nondet() {
    if (is("*")) {
      next();
    } else {
      next();
      expect("(");
      expect(")");
    }
    if (!is(";") && !is(","))
      fail(peek().span, "nondeterministic value must be the entire right-hand side");
    return nondet();
  }

  StmtList body() {
    if (is("{")) {
      next();
      StmtList out;
      while (!is("}")) {
        if (at_end()) fail(peek().span, "expected '}' but found end of input");
        out.push_back(statement());
      }
      next();
      return out;
    }
    return {statement()};
  }

  Stmt statement() {
    const Token& t = peek();
    if (is("{")) return block(body());
    if (is("if")) {
      next();
      expect("(");
      Expr c = expr();
      expect(")");
      StmtList then_body = body();
      StmtList else_body;
      if (is("else")) {
        next();
        else_body = body();
      }
      return if_stmt(c, std::move(then_body), std::move(else_body));
    }
    if (is("while")) {
      next();
      expect("(");
      Expr c = expr();
      expect(")");
      return while_stmt(c, body());
    }
    if (is("assume") || is("assert")) {
      bool is_assume = is("assume");
      next();
      expect("(");
      Expr c = expr();
      expect(")");
      expect(";");
      return is_assume ? assume(c) : assert_stmt(c);
    }
    if (t.kind == Tok::Ident && !kKeywords.contains(t.text)) {
      std::string target = identifier(false);
      if (is("++") || is("--")) {
        BinOp op = next().text == "++" ? BinOp::Add : BinOp::Sub;
        expect(";");
        return assign(target, binary(op, var(target), lit(1)));
      }
      expect("=");
      Expr rhs = is_nondet_rhs() ? consume_nondet() : expr();
      expect(";");
      return assign(target, rhs);
    }
    fail(t.span, "expected statement but found " + describe(t));
  }

  // Precedence climbing over C binary operators.
  static int precedence(std::string_view op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "|") return 3;
    if (op == "^") return 4;
    if (op == "&") return 5;
    if (op == "==" || op == "!=") return 6;
    if (op == "<" || op == "<=" || op == ">" || op == ">=") return 7;
    if (op == "<<" || op == ">>") return 8;
    if (op == "+" || op == "-") return 9;
    if (op == "*" || op == "/" || op == "%") return 10;
    return 0;
  }

  static BinOp binop(std::string_view op) {
    static const std::pair<std::string_view, BinOp> table[] = {
        {"+", BinOp::Add},     {"-", BinOp::Sub},     {"*", BinOp::Mul},
        {"/", BinOp::Div},     {"%", BinOp::Mod},     {"&", BinOp::BitAnd},
        {"|", BinOp::BitOr},   {"^", BinOp::BitXor},  {"<<", BinOp::Shl},
        {">>", BinOp::Shr},    {"<", BinOp::Lt},      {"<=", BinOp::Le},
        {">", BinOp::Gt},      {">=", BinOp::Ge},     {"==", BinOp::Eq},
        {"!=", BinOp::Ne},     {"&&", BinOp::LogAnd}, {"||", BinOp::LogOr}};
    for (auto [s, b] : table)
      if (s == op) return b;
    return BinOp::Add;
  }

  Expr expr() {
    Expr c = binary_expr(1);
    if (!is("?")) return c;
    next();
    Expr t = expr();
    expect(":");
    Expr f = expr();
    return ternary(c, t, f);
  }

  Expr binary_expr(int min_prec) {
    Expr lhs = unary_expr();
    for (;;) {
      const Token& t = peek();
      int prec = t.kind == Tok::Punct ? precedence(t.text) : 0;
      if (prec < min_prec || prec == 0) return lhs;
      std::string op = next().text;
      Expr rhs = binary_expr(prec + 1);
      lhs = binary(binop(op), lhs, rhs);
    }
  }

  Expr unary_expr() {
    if (is("-") && peek(1).kind == Tok::Number) {
      next();
      return number(true);
    }
    if (is("-") || is("~") || is("!")) {
      std::string op = next().text;
      Expr operand = unary_expr();
      UnOp u = op == "-" ? UnOp::Neg : (op == "~" ? UnOp::BitNot : UnOp::LogNot);
      return unary(u, operand);
    }
    return primary();
  }

  Expr number(bool negative) {
    Token t = next();
    std::string_view text = t.text;
    int base = 10;
    if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
      base = 16;
      text.remove_prefix(2);
    }
    unsigned long long magnitude = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), magnitude, base);
    if (ec != std::errc() || ptr != text.data() + text.size())
      fail(t.span, "malformed integer literal '" + t.text + "'");
    const int w = opts_.width;
    const unsigned long long max_pos = (1ULL << (w - 1)) - 1;
    const unsigned long long max_neg = 1ULL << (w - 1);
    if (magnitude > (negative ? max_neg : max_pos))
      fail(t.span, "integer literal '" + t.text + "' does not fit in " +
                       std::to_string(w) + " bits");
    Value v = negative ? static_cast<Value>(0ULL - magnitude) : static_cast<Value>(magnitude);
    return lit(v);
  }

  Expr primary() {
    const Token& t = peek();
    if (t.kind == Tok::Number) return number(false);
    if (is("(")) {
      next();
      Expr e = expr();
      expect(")");
      return e;
    }
    if (is("*") || is("__VERIFIER_nondet_int"))
      fail(t.span, "nondeterministic value must be the entire right-hand side");
    if (t.kind == Tok::Ident && !kKeywords.contains(t.text)) return var(identifier(false));
    fail(t.span, "expected expression operand but found " + describe(t));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  ParseOptions opts_;
  std::set<std::string, std::less<>> declared_;
};

}  // namespace

Program parse(std::string_view text, const ParseOptions& options) {
  Parser parser(Lexer(text).run(), options);
  return parser.program();
}

Expr parse_expr(std::string_view text, const std::vector<std::string>& declared, int width) {
  ParseOptions opts;
  opts.width = width;
  opts.allow_reserved = true;
  Parser parser(Lexer(text).run(), opts);
  return parser.standalone_expr(declared);
}

}  // namespace bitbranch

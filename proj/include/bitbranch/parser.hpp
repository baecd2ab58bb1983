#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "bitbranch/ast.hpp"

namespace bitbranch {

/// 1-based line/column range in the source text.
struct SourceSpan {
  int start_line = 1;
  int start_column = 1;
  int end_line = 1;
  int end_column = 1;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(SourceSpan span, const std::string& message);

  const SourceSpan& span() const { return span_; }
  const std::string& message() const { return message_; }

 private:
  SourceSpan span_;
  std::string message_;
};

struct ParseOptions {
  int width = kDefaultWidth;
  /// Accept identifiers with the reserved `__bwb_` prefix (re-reading
  /// transformer output).
  bool allow_reserved = false;
};

/// Parses the mini-C subset. The body may be bare statements or wrapped in
/// `int main() { ... }`. Throws ParseError.
Program parse(std::string_view text, const ParseOptions& options = {});

/// Parses a single expression over the given declared variables. Used by
/// tests and tooling; no Nondet allowed.
Expr parse_expr(std::string_view text, const std::vector<std::string>& declared,
                int width = kDefaultWidth);

/// Prints an expression with minimal C parentheses. Metavariables print as
/// `$name`.
std::string print_expr(const Expr& e);

/// Prints a program as compilable C (given a prelude defining `assume` and
/// `__VERIFIER_nondet_int`). Rules fired are listed in the header and one
/// `// bwb: <rule>` line precedes each inserted guard.
std::string print(const Program& p);

}  // namespace bitbranch

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "opal/syntactic_ops.hpp"
#include "opal/syntax.hpp"

namespace opal {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

struct ParseOptions {
  /// Names already bound by code that precedes this text (e.g. the prelude).
  /// Binding one of them again counts as rebinding.
  VarSet predefined;
  /// When false, rebinding keeps the source name so the well-formedness
  /// checker can report it.
  bool rename_rebinding = true;
};

/// Parses a program: statements followed by `ret x` or a final bare operation.
Expr parse(const std::string& text, const ParseOptions& opts = {});

/// Parses a sequence of statements with no return (library files).
std::vector<Statement> parse_fragment(const std::string& text, const ParseOptions& opts = {});

/// Literal primitive expression: `<3>`, `(<3>, <"a">)`, `()`, `(<t>,)`.
PrimExpr parse_prim_expr(const std::string& text);

/// Contents of a `<...>` literal without the brackets, e.g. `"a"`, `7`, `&stdout`.
PrimValue parse_literal(const std::string& body);

bool is_reserved_word(const std::string& s);

}  // namespace opal

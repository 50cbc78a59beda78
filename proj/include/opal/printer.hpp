#pragma once

#include <string>

#include "opal/syntax.hpp"

namespace opal {

/// Concrete syntax accepted by `parse`; fun bodies indented four spaces.
std::string pretty(const Expr& e);
std::string pretty_statement(const Statement& s, int indent = 0);
std::string pretty_operation(const Operation& op, int indent = 0);

/// Labeled terms print one statement per line prefixed with `(l):`.
std::string pretty_labeled(const LabeledExpr& p);

/// `<...>` literal form.
std::string render_literal(const PrimValue& v);
/// Canonical argument encoding used by traces and the replay store.
std::string render_prim_expr(const PrimExpr& c);

/// Text written to an output channel by `print`.
std::string render_output(const PrimExpr& c);

std::string quote_string(const std::string& s);

}  // namespace opal

#pragma once

#include <set>
#include <string>
#include <unordered_set>

#include "opal/syntax.hpp"

namespace opal {

using VarSet = std::set<Var>;

/// Variables that occur in `e` without being bound (the return variable counts).
VarSet free_vars(const Expr& e);
VarSet free_vars(const Operation& op);

/// Every name occurring in `e`, bound or free, at any depth.
VarSet all_names(const Expr& e);

/// Replaces free occurrences of `from` with `to`. Bound occurrences and
/// scopes that rebind `from` are left alone.
Expr substitute(const Expr& e, const Var& to, const Var& from);
Operation substitute(const Operation& op, const Var& to, const Var& from);

/// Renames the top-level binders of `e` with a `_gN` suffix drawn from a
/// process-wide counter. Always renames, even without collisions; the result
/// avoids `scope` and every name already in `e`.
Expr freshen(const VarSet& scope, const Expr& e);
/// As `freshen`, additionally renaming the parameter.
Fun freshen_fun(const VarSet& scope, const Fun& f);

/// Label-derived freshening used by the rewrite rules: every binder in the
/// copied term (nested ones included) becomes `stem@l`, where `stem` is the
/// binder name up to its first '@'. Deterministic in (term, label), which is
/// what lets independent steps commute up to structural equality.
Expr freshen_at(const Expr& e, const Label& l);
Fun freshen_at(const Fun& f, const Label& l);
std::string stem_of(const Var& v);

/// Equality up to consistent renaming of bound variables.
bool alpha_equal(const Expr& a, const Expr& b);

LabeledExpr init_labels(const Expr& e);
Expr erase_labels(const LabeledExpr& p);
bool label_independent(const LabeledExpr& p);

/// True when any binder in `e` (at any depth) satisfies `pred`.
bool any_binder(const Expr& e, const std::function<bool(const Var&)>& pred);

}  // namespace opal

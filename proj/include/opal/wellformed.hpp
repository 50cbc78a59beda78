#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opal/syntactic_ops.hpp"

namespace opal {

struct WfViolation {
  /// Name of the violated rule, e.g. "WF-e-stmt" or "WF-o-call".
  std::string rule;
  std::string message;
  /// Statement indices (0-based) from the top level down into fun bodies.
  std::vector<std::size_t> path;
  Var var;

  std::string describe() const;
};

/// Checks `ctx ⊢ e`. Scoping is sequential: a statement sees only the names
/// bound before it, and no binder may reuse a name already in scope.
std::optional<WfViolation> check_well_formed(const VarSet& ctx, const Expr& e);

/// Convenience: check against the expression's own free variables.
std::optional<WfViolation> check_closed_under_free(const Expr& e);

}  // namespace opal

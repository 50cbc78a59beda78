#include "opal/wellformed.hpp"

#include <unordered_set>

namespace opal {

std::string WfViolation::describe() const {
  std::string where;
  for (std::size_t i = 0; i < path.size(); ++i) {
    where += i ? " > " : "";
    where += (i ? "body statement " : "statement ") + std::to_string(path[i] + 1);
  }
  if (where.empty()) where = "return";
  return rule + " at " + where + ": " + message;
}

namespace {

class Checker {
 public:
  explicit Checker(const VarSet& ctx) : scope_(ctx.begin(), ctx.end()) {}

  std::optional<WfViolation> expr(const Expr& e) {
    std::vector<Var> added;
    std::optional<WfViolation> bad;
    for (std::size_t i = 0; i < e.stmts.size() && !bad; ++i) {
      const Statement& s = e.stmts[i];
      path_.push_back(i);
      if (scope_.count(s.bound)) {
        bad = violation("WF-e-stmt", s.bound, "'" + s.bound + "' is already bound");
      } else {
        bad = operation(s.op);
      }
      path_.pop_back();
      if (!bad) {
        scope_.insert(s.bound);
        added.push_back(s.bound);
      }
    }
    if (!bad && !scope_.count(e.ret)) {
      bad = violation("WF-e-var", e.ret, "returned variable '" + e.ret + "' is unbound");
    }
    for (const auto& v : added) scope_.erase(v);
    return bad;
  }

 private:
  WfViolation violation(const char* rule, const Var& v, std::string msg) const {
    return WfViolation{rule, std::move(msg), path_, v};
  }

  std::optional<WfViolation> use(const char* rule, const Var& v) const {
    if (scope_.count(v)) return std::nullopt;
    return violation(rule, v, "'" + v + "' is unbound");
  }

  std::optional<WfViolation> operation(const Operation& op) {
    return std::visit(
        [&](const auto& o) -> std::optional<WfViolation> {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, Alias>) {
            return use("WF-o-var", o.source);
          } else if constexpr (std::is_same_v<T, Fun>) {
            if (scope_.count(o.param)) {
              return violation("WF-o-fun", o.param, "parameter '" + o.param + "' is already bound");
            }
            scope_.insert(o.param);
            auto bad = expr(*o.body);
            scope_.erase(o.param);
            return bad;
          } else if constexpr (std::is_same_v<T, Call>) {
            if (auto b = use("WF-o-call", o.fn)) return b;
            return use("WF-o-call", o.arg);
          } else if constexpr (std::is_same_v<T, Tuple>) {
            for (const auto& x : o.items) {
              if (auto b = use("WF-o-tuple", x)) return b;
            }
            return std::nullopt;
          } else if constexpr (std::is_same_v<T, Proj>) {
            if (o.index < 1) return violation("WF-o-proj", o.tuple, "projection index must be at least 1");
            return use("WF-o-proj", o.tuple);
          } else {
            return std::nullopt;
          }
        },
        op);
  }

  std::unordered_set<Var> scope_;
  std::vector<std::size_t> path_;
};

}  // namespace

std::optional<WfViolation> check_well_formed(const VarSet& ctx, const Expr& e) {
  Checker c(ctx);
  return c.expr(e);
}

std::optional<WfViolation> check_closed_under_free(const Expr& e) {
  return check_well_formed(free_vars(e), e);
}

}  // namespace opal

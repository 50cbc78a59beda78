#pragma once

// Graph-indexed term: statements keyed by label plus variable indices in
// both directions, so a rewrite touches only the statements it affects.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "opal/rewrite.hpp"

namespace opal {

class TermStore : public TermView {
 public:
  TermStore() = default;
  explicit TermStore(const LabeledExpr& p);
  static TermStore from_expr(const Expr& e);

  const Operation* definition(const Var& v) const override;
  bool referenced_outside(const Var& v, const Label& at) const override;

  const Statement* at(const Label& l) const;
  std::optional<Label> label_of(const Var& v) const;
  std::size_t size() const { return stmts_.size(); }
  const Var& ret() const { return ret_; }
  const std::map<Label, Statement>& statements() const { return stmts_; }
  /// Labels of statements that use `v` (free occurrences).
  std::size_t use_count(const Var& v) const;

  LabeledExpr to_labeled() const;
  Expr to_expr() const;

  /// Formally steppable labels (tasks included). Call `refresh` after
  /// mutations to bring this up to date.
  const std::set<Label>& steppable() const { return steppable_; }
  /// Labels of non-value statements (alias, call, proj, task).
  const std::set<Label>& active() const { return active_; }
  /// Labels that can never step, with a reason.
  const std::map<Label, std::string>& stuck() const { return stuck_; }
  void refresh();

  // Rewrites. Each keeps the indices exact and marks affected labels dirty.
  void replace(const Label& l, const std::vector<Statement>& stmts);
  /// Deletes the alias statement at `l` and substitutes its target for its
  /// bound variable in every user.
  void apply_alias(const Label& l, const Var& from, const Var& to);

  /// Statements rewritten by alias substitution so far.
  std::uint64_t substitution_touches() const { return touches_; }
  std::uint64_t refresh_checks() const { return refresh_checks_; }

  /// Compares the incremental indices against a rebuild from scratch.
  std::optional<std::string> verify_indices() const;
  void rebuild_indices();

 private:
  void insert(const Label& l, Statement s);
  void erase(const Label& l);
  void add_uses(const Label& l, const Operation& op);
  void drop_uses(const Label& l, const Operation& op);
  void mark(const Label& l) { dirty_.insert(l); }
  void mark_def(const Var& v);
  void definition_changed(const Var& v);

  std::map<Label, Statement> stmts_;
  std::unordered_map<Var, Label> def_;
  std::unordered_map<Var, std::set<Label>> users_;
  Var ret_;
  std::set<Label> steppable_;
  std::set<Label> active_;
  std::map<Label, std::string> stuck_;
  std::unordered_set<Label, LabelHash> dirty_;
  std::uint64_t touches_ = 0;
  std::uint64_t refresh_checks_ = 0;
};

}  // namespace opal

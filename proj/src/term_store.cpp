#include "opal/term_store.hpp"

namespace opal {

TermStore::TermStore(const LabeledExpr& p) : ret_(p.ret) {
  for (const auto& ls : p.stmts) insert(ls.label, ls.stmt);
  refresh();
}

TermStore TermStore::from_expr(const Expr& e) { return TermStore(init_labels(e)); }

const Operation* TermStore::definition(const Var& v) const {
  auto it = def_.find(v);
  if (it == def_.end()) return nullptr;
  return &stmts_.at(it->second).op;
}

bool TermStore::referenced_outside(const Var& v, const Label& at) const {
  if (ret_ == v) return true;
  auto it = users_.find(v);
  if (it == users_.end()) return false;
  const auto& ls = it->second;
  return ls.size() > 1 || (ls.size() == 1 && *ls.begin() != at);
}

const Statement* TermStore::at(const Label& l) const {
  auto it = stmts_.find(l);
  return it == stmts_.end() ? nullptr : &it->second;
}

std::optional<Label> TermStore::label_of(const Var& v) const {
  auto it = def_.find(v);
  if (it == def_.end()) return std::nullopt;
  return it->second;
}

std::size_t TermStore::use_count(const Var& v) const {
  auto it = users_.find(v);
  return it == users_.end() ? 0 : it->second.size();
}

LabeledExpr TermStore::to_labeled() const {
  LabeledExpr p;
  p.stmts.reserve(stmts_.size());
  for (const auto& [l, s] : stmts_) p.stmts.push_back(LabeledStatement{l, s});
  p.ret = ret_;
  return p;
}

Expr TermStore::to_expr() const { return erase_labels(to_labeled()); }

void TermStore::add_uses(const Label& l, const Operation& op) {
  for (const auto& v : operation_vars(op)) {
    auto& us = users_[v];
    // A first use can make a garbage-collectable definition live again.
    if (us.empty()) mark_def(v);
    us.insert(l);
  }
}

void TermStore::drop_uses(const Label& l, const Operation& op) {
  for (const auto& v : operation_vars(op)) {
    auto it = users_.find(v);
    if (it == users_.end()) continue;
    it->second.erase(l);
    if (it->second.empty()) users_.erase(it);
    // Dropping a use can make the definition collectable.
    mark_def(v);
  }
}

void TermStore::mark_def(const Var& v) {
  auto it = def_.find(v);
  if (it != def_.end()) mark(it->second);
}

void TermStore::definition_changed(const Var& v) {
  std::vector<Var> work{v};
  std::unordered_set<Var> seen;
  while (!work.empty()) {
    Var cur = std::move(work.back());
    work.pop_back();
    if (!seen.insert(cur).second) continue;
    auto it = users_.find(cur);
    if (it == users_.end()) continue;
    for (const auto& u : it->second) {
      mark(u);
      // Dispatch readiness looks through tuples to primitive leaves.
      const Statement& s = stmts_.at(u);
      if (std::holds_alternative<Tuple>(s.op)) work.push_back(s.bound);
    }
  }
}

void TermStore::insert(const Label& l, Statement s) {
  const Var bound = s.bound;
  add_uses(l, s.op);
  if (!is_value_op(s.op)) active_.insert(l);
  stmts_.emplace(l, std::move(s));
  def_[bound] = l;
  mark(l);
  definition_changed(bound);
}

void TermStore::erase(const Label& l) {
  auto it = stmts_.find(l);
  if (it == stmts_.end()) return;
  Statement s = std::move(it->second);
  stmts_.erase(it);
  drop_uses(l, s.op);
  auto d = def_.find(s.bound);
  if (d != def_.end() && d->second == l) def_.erase(d);
  active_.erase(l);
  steppable_.erase(l);
  stuck_.erase(l);
  dirty_.erase(l);
  definition_changed(s.bound);
}

void TermStore::replace(const Label& l, const std::vector<Statement>& stmts) {
  if (!stmts_.count(l)) throw std::out_of_range("no statement at label " + l.to_string());
  erase(l);
  for (std::size_t i = 0; i < stmts.size(); ++i) insert(l.child(static_cast<std::uint32_t>(i + 1)), stmts[i]);
}

void TermStore::apply_alias(const Label& l, const Var& from, const Var& to) {
  erase(l);
  std::vector<Label> targets;
  if (auto it = users_.find(from); it != users_.end()) targets.assign(it->second.begin(), it->second.end());
  for (const auto& u : targets) {
    Statement& s = stmts_.at(u);
    drop_uses(u, s.op);
    s.op = substitute(s.op, to, from);
    add_uses(u, s.op);
    mark(u);
    definition_changed(s.bound);
    ++touches_;
  }
  if (ret_ == from) {
    ret_ = to;
    mark_def(to);
  }
}

void TermStore::refresh() {
  for (const auto& l : dirty_) {
    auto it = stmts_.find(l);
    if (it == stmts_.end()) continue;
    ++refresh_checks_;
    Plan plan = plan_step(*this, l, it->second, false);
    stuck_.erase(l);
    if (plan.kind == Plan::None) {
      steppable_.erase(l);
    } else if (plan.kind == Plan::Stuck) {
      steppable_.erase(l);
      stuck_.emplace(l, plan.diagnostic);
    } else {
      steppable_.insert(l);
    }
  }
  dirty_.clear();
}

std::optional<std::string> TermStore::verify_indices() const {
  TermStore fresh(to_labeled());
  if (fresh.def_ != def_) return std::string("definition index diverges from a rebuild");
  if (fresh.users_ != users_) return std::string("use index diverges from a rebuild");
  if (fresh.active_ != active_) return std::string("active set diverges from a rebuild");
  if (dirty_.empty()) {
    if (fresh.steppable_ != steppable_) return std::string("steppable set diverges from a rebuild");
    if (fresh.stuck_ != stuck_) return std::string("stuck set diverges from a rebuild");
  }
  return std::nullopt;
}

void TermStore::rebuild_indices() {
  const auto touches = touches_;
  const auto checks = refresh_checks_;
  *this = TermStore(to_labeled());
  touches_ = touches;
  refresh_checks_ = checks;
}

}  // namespace opal

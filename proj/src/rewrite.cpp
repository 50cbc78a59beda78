#include "opal/rewrite.hpp"

#include <algorithm>
#include <set>

namespace opal {

const char* step_kind_name(StepKind k) {
  switch (k) {
    case StepKind::Alias: return "alias";
    case StepKind::Call: return "call";
    case StepKind::Proj: return "proj";
    case StepKind::Gc: return "gc";
    case StepKind::Dispatch: return "dispatch";
    case StepKind::Resolve: return "resolve";
  }
  return "?";
}

Trace trace_of(const std::vector<StepRecord>& log) {
  Trace t;
  for (const auto& r : log) {
    if (r.kind == StepKind::Resolve && r.raw_result) t.emplace(r.label, *r.raw_result);
  }
  return t;
}

std::optional<std::pair<EvalContext, Statement>> decompose(const LabeledExpr& p, const Label& l) {
  auto it = std::find_if(p.stmts.begin(), p.stmts.end(), [&](const LabeledStatement& s) { return s.label == l; });
  if (it == p.stmts.end()) return std::nullopt;
  EvalContext ctx;
  ctx.prefix.assign(p.stmts.begin(), it);
  ctx.hole = l;
  ctx.suffix.stmts.assign(std::next(it), p.stmts.end());
  ctx.suffix.ret = p.ret;
  return std::make_pair(std::move(ctx), it->stmt);
}

LabeledExpr fill(const EvalContext& ctx, const std::vector<Statement>& stmts) {
  LabeledExpr out;
  out.stmts.reserve(ctx.prefix.size() + stmts.size() + ctx.suffix.stmts.size());
  out.stmts = ctx.prefix;
  for (std::size_t i = 0; i < stmts.size(); ++i) {
    out.stmts.push_back(LabeledStatement{ctx.hole.child(static_cast<std::uint32_t>(i + 1)), stmts[i]});
  }
  out.stmts.insert(out.stmts.end(), ctx.suffix.stmts.begin(), ctx.suffix.stmts.end());
  out.ret = ctx.suffix.ret;
  return out;
}

LabeledExpr replace(const LabeledExpr& p, const Label& l, const std::vector<Statement>& stmts) {
  auto d = decompose(p, l);
  if (!d) throw std::out_of_range("no statement at label " + l.to_string());
  return fill(d->first, stmts);
}

std::optional<PrimExpr> pexp(const TermView& view, const Var& x) {
  const Operation* op = view.definition(x);
  if (!op) return std::nullopt;
  if (const auto* p = std::get_if<Prim>(op)) return PrimExpr::of(p->value);
  if (const auto* t = std::get_if<Tuple>(op)) {
    std::vector<PrimExpr> items;
    items.reserve(t->items.size());
    for (const auto& v : t->items) {
      auto c = pexp(view, v);
      if (!c) return std::nullopt;
      items.push_back(std::move(*c));
    }
    return PrimExpr::tuple(std::move(items));
  }
  return std::nullopt;
}

std::vector<Statement> resolution_statements(const Var& bound, const Expr& result, const Label& task_label) {
  Expr fresh = freshen_at(result, task_label);
  std::vector<Statement> out = std::move(fresh.stmts);
  out.push_back(Statement{bound, Alias{fresh.ret}});
  return out;
}

Plan plan_step(const TermView& view, const Label& l, const Statement& s, bool build_replacement) {
  Plan plan;
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Alias>) {
          plan.kind = Plan::Alias;
          plan.alias_from = s.bound;
          plan.alias_to = o.source;
        } else if constexpr (std::is_same_v<T, Fun> || std::is_same_v<T, Tuple> || std::is_same_v<T, Prim>) {
          if (!view.referenced_outside(s.bound, l)) plan.kind = Plan::Gc;
        } else if constexpr (std::is_same_v<T, Call>) {
          const Operation* def = view.definition(o.fn);
          if (!def) return;
          if (const auto* f = std::get_if<Fun>(def)) {
            plan.kind = Plan::Call;
            if (!build_replacement) return;
            Fun fresh = freshen_at(*f, l);
            plan.kind = Plan::Call;
            plan.replacement.reserve(fresh.body->stmts.size() + 2);
            plan.replacement.push_back(Statement{fresh.param, Alias{o.arg}});
            plan.replacement.insert(plan.replacement.end(), fresh.body->stmts.begin(), fresh.body->stmts.end());
            plan.replacement.push_back(Statement{s.bound, Alias{fresh.body->ret}});
          } else if (const auto* p = std::get_if<Prim>(def)) {
            const auto* ref = std::get_if<FnRef>(&p->value);
            if (!ref) {
              plan.kind = Plan::Stuck;
              plan.diagnostic = "'" + o.fn + "' is a primitive value, not a function";
              return;
            }
            if (auto arg = pexp(view, o.arg)) {
              plan.kind = Plan::Dispatch;
              plan.fn = *ref;
              plan.arg = std::move(*arg);
            }
          } else if (std::holds_alternative<Tuple>(*def)) {
            plan.kind = Plan::Stuck;
            plan.diagnostic = "'" + o.fn + "' is a tuple, not a function";
          }
        } else if constexpr (std::is_same_v<T, Proj>) {
          const Operation* def = view.definition(o.tuple);
          if (!def) return;
          if (const auto* t = std::get_if<Tuple>(def)) {
            if (o.index < 1 || o.index > t->items.size()) {
              plan.kind = Plan::Stuck;
              plan.diagnostic = "projection " + std::to_string(o.index) + " out of range for a " +
                                std::to_string(t->items.size()) + "-tuple";
              return;
            }
            plan.kind = Plan::Proj;
            plan.replacement.push_back(Statement{s.bound, Alias{t->items[o.index - 1]}});
          } else if (std::holds_alternative<Fun>(*def) || std::holds_alternative<Prim>(*def)) {
            plan.kind = Plan::Stuck;
            plan.diagnostic = "projection from '" + o.tuple + "', which is not a tuple";
          }
        } else {
          plan.kind = Plan::Resolve;
        }
      },
      s.op);
  return plan;
}

ListTermView::ListTermView(const LabeledExpr& p) : p_(p) {
  for (const auto& ls : p.stmts) {
    defs_[ls.stmt.bound] = &ls.stmt.op;
    for (const auto& v : operation_vars(ls.stmt.op)) users_[v].push_back(ls.label);
  }
}

const Operation* ListTermView::definition(const Var& v) const {
  auto it = defs_.find(v);
  return it == defs_.end() ? nullptr : it->second;
}

bool ListTermView::referenced_outside(const Var& v, const Label& at) const {
  if (p_.ret == v) return true;
  auto it = users_.find(v);
  if (it == users_.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(), [&](const Label& l) { return l != at; });
}

namespace {

const LabeledStatement* find_statement(const LabeledExpr& p, const Label& l) {
  for (const auto& ls : p.stmts) {
    if (ls.label == l) return &ls;
  }
  return nullptr;
}

void apply_alias(LabeledExpr& p, const Label& l, const Var& from, const Var& to) {
  LabeledExpr out;
  out.stmts.reserve(p.stmts.size());
  for (auto& ls : p.stmts) {
    if (ls.label == l) continue;
    out.stmts.push_back(LabeledStatement{ls.label, Statement{ls.stmt.bound, substitute(ls.stmt.op, to, from)}});
  }
  out.ret = p.ret == from ? to : p.ret;
  p = std::move(out);
}

}  // namespace

StepOutcome step_at(LabeledExpr& p, const Label& l, ExternalEnv& env) {
  StepOutcome out;
  const LabeledStatement* ls = find_statement(p, l);
  if (!ls) return out;
  const Statement stmt = ls->stmt;
  Plan plan;
  {
    ListTermView view(p);
    plan = plan_step(view, l, stmt);
  }
  StepRecord rec;
  rec.label = l;
  rec.old = stmt;
  rec.at_ms = env.now_ms();
  switch (plan.kind) {
    case Plan::None: out.status = StepOutcome::NotSteppable; return out;
    case Plan::Stuck:
      out.status = StepOutcome::Stuck;
      out.diagnostic = plan.diagnostic;
      return out;
    case Plan::Alias:
      rec.kind = StepKind::Alias;
      apply_alias(p, l, plan.alias_from, plan.alias_to);
      break;
    case Plan::Call:
    case Plan::Proj:
      rec.kind = plan.kind == Plan::Call ? StepKind::Call : StepKind::Proj;
      rec.replacement = plan.replacement;
      p = replace(p, l, plan.replacement);
      break;
    case Plan::Gc:
      rec.kind = StepKind::Gc;
      p = replace(p, l, {});
      break;
    case Plan::Dispatch: {
      const Label task_label = l.child(1);
      ExternalEnv::Dispatched d = env.dispatch(task_label, plan.fn, plan.arg);
      Statement task{stmt.bound, Task{plan.fn, plan.arg, d.handle}};
      rec.kind = StepKind::Dispatch;
      rec.fn = plan.fn;
      rec.arg = plan.arg;
      rec.replacement = {task};
      p = replace(p, l, rec.replacement);
      out.records.push_back(rec);
      if (d.immediate) {
        StepRecord res;
        res.label = task_label;
        res.kind = StepKind::Resolve;
        res.old = task;
        res.fn = plan.fn;
        res.arg = plan.arg;
        res.raw_result = *d.immediate;
        res.replacement = resolution_statements(stmt.bound, *d.immediate, task_label);
        res.at_ms = env.now_ms();
        p = replace(p, task_label, res.replacement);
        out.records.push_back(std::move(res));
      }
      out.status = StepOutcome::Stepped;
      return out;
    }
    case Plan::Resolve: {
      const Task& task = std::get<Task>(stmt.op);
      if (!env.ready(l, task)) {
        out.status = StepOutcome::Blocked;
        return out;
      }
      Expr result = env.take_result(l, task);
      rec.kind = StepKind::Resolve;
      rec.fn = task.fn;
      rec.arg = task.arg;
      rec.replacement = resolution_statements(stmt.bound, result, l);
      rec.raw_result = std::move(result);
      p = replace(p, l, rec.replacement);
      break;
    }
  }
  out.records.push_back(std::move(rec));
  out.status = StepOutcome::Stepped;
  return out;
}

bool steppable(const LabeledExpr& p, const Label& l) {
  const LabeledStatement* ls = find_statement(p, l);
  if (!ls) return false;
  ListTermView view(p);
  Plan plan = plan_step(view, l, ls->stmt, false);
  return plan.kind != Plan::None && plan.kind != Plan::Stuck;
}

std::vector<Label> steppable_set(const LabeledExpr& p) {
  std::vector<Label> out;
  ListTermView view(p);
  for (const auto& ls : p.stmts) {
    Plan plan = plan_step(view, ls.label, ls.stmt, false);
    if (plan.kind != Plan::None && plan.kind != Plan::Stuck) out.push_back(ls.label);
  }
  std::sort(out.begin(), out.end());
  return out;
}

RandomRun run_random_order(LabeledExpr p, ExternalEnv& env, std::mt19937_64& rng, std::size_t max_steps,
                           bool check_invariants) {
  RandomRun run;
  std::set<Label> stepped;
  std::vector<Label> current = steppable_set(p);
  for (std::size_t n = 0; n < max_steps; ++n) {
    std::vector<Label> candidates;
    for (const auto& l : current) {
      const LabeledStatement* ls = find_statement(p, l);
      if (const auto* t = std::get_if<Task>(&ls->stmt.op)) {
        if (!env.ready(l, *t)) continue;
      }
      candidates.push_back(l);
    }
    if (candidates.empty()) {
      run.terminated = true;
      break;
    }
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    const Label l = candidates[pick(rng)];
    StepOutcome o = step_at(p, l, env);
    if (o.status != StepOutcome::Stepped) {
      run.violations.push_back("label " + l.to_string() + " was steppable but did not step");
      break;
    }
    run.order.push_back(l);
    for (auto& r : o.records) {
      if (check_invariants && !stepped.insert(r.label).second) {
        run.violations.push_back("label " + r.label.to_string() + " stepped twice");
      }
      run.log.push_back(std::move(r));
    }
    std::vector<Label> next = steppable_set(p);
    if (check_invariants) {
      if (!label_independent(p)) run.violations.push_back("labels not independent after stepping " + l.to_string());
      for (const auto& old : current) {
        if (old == l) continue;
        if (!std::binary_search(next.begin(), next.end(), old)) {
          run.violations.push_back("label " + old.to_string() + " lost steppability after stepping " +
                                   l.to_string());
        }
      }
    }
    current = std::move(next);
  }
  run.final = std::move(p);
  return run;
}

}  // namespace opal

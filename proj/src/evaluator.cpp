#include "opal/evaluator.hpp"

#include <stdexcept>

#include "opal/printer.hpp"

namespace opal {

const char* strategy_name(Strategy s) { return s == Strategy::Cbv ? "cbv" : "opportunistic"; }

std::optional<Strategy> parse_strategy(const std::string& s) {
  if (s == "opportunistic" || s == "opp") return Strategy::Opportunistic;
  if (s == "cbv") return Strategy::Cbv;
  return std::nullopt;
}

const char* run_status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Terminated: return "terminated";
    case RunStatus::BudgetExhausted: return "budget_exhausted";
    case RunStatus::Stuck: return "stuck";
  }
  return "?";
}

std::vector<StepRecord> RunOutcome::call_log() const {
  std::vector<StepRecord> out;
  for (const auto& r : log) {
    if (r.kind == StepKind::Dispatch || r.kind == StepKind::Resolve) out.push_back(r);
  }
  return out;
}

StepOutcome step_store(TermStore& store, const Label& l, ExternalEnv& env) {
  StepOutcome out;
  const Statement* sp = store.at(l);
  if (!sp) return out;
  const Statement stmt = *sp;
  Plan plan = plan_step(store, l, stmt, true);
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
      store.apply_alias(l, plan.alias_from, plan.alias_to);
      break;
    case Plan::Call:
    case Plan::Proj:
      rec.kind = plan.kind == Plan::Call ? StepKind::Call : StepKind::Proj;
      store.replace(l, plan.replacement);
      rec.replacement = std::move(plan.replacement);
      break;
    case Plan::Gc:
      rec.kind = StepKind::Gc;
      store.replace(l, {});
      break;
    case Plan::Dispatch: {
      const Label task_label = l.child(1);
      ExternalEnv::Dispatched d = env.dispatch(task_label, plan.fn, plan.arg);
      Statement task{stmt.bound, Task{plan.fn, plan.arg, d.handle}};
      rec.kind = StepKind::Dispatch;
      rec.fn = plan.fn;
      rec.arg = plan.arg;
      rec.replacement = {task};
      store.replace(l, rec.replacement);
      out.records.push_back(rec);
      if (d.immediate) {
        StepRecord res;
        res.label = task_label;
        res.kind = StepKind::Resolve;
        res.old = task;
        res.fn = plan.fn;
        res.arg = plan.arg;
        res.replacement = resolution_statements(stmt.bound, *d.immediate, task_label);
        res.raw_result = std::move(*d.immediate);
        res.at_ms = env.now_ms();
        store.replace(task_label, res.replacement);
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
      store.replace(l, rec.replacement);
      break;
    }
  }
  out.records.push_back(std::move(rec));
  out.status = StepOutcome::Stepped;
  return out;
}

std::vector<Label> opportunistic_step(TermStore& store, ExternalEnv& env, std::vector<StepRecord>& log) {
  store.refresh();
  const std::vector<Label> snapshot(store.steppable().begin(), store.steppable().end());
  std::vector<Label> stepped;
  for (const auto& l : snapshot) {
    if (const Statement* s = store.at(l)) {
      if (const auto* t = std::get_if<Task>(&s->op); t && !env.ready(l, *t)) continue;
    }
    StepOutcome o = step_store(store, l, env);
    if (o.status != StepOutcome::Stepped) continue;
    stepped.push_back(l);
    for (auto& r : o.records) log.push_back(std::move(r));
  }
  store.refresh();
  return stepped;
}

namespace {

std::vector<std::string> stuck_diagnostics(const TermStore& store) {
  std::vector<std::string> out;
  for (const auto& l : store.active()) {
    const Statement& s = *store.at(l);
    std::string why;
    if (auto it = store.stuck().find(l); it != store.stuck().end()) {
      why = it->second;
    } else if (const auto* t = std::get_if<Task>(&s.op)) {
      why = "call of " + t->fn.name + " on " + render_prim_expr(t->arg) + " never resolved";
    } else {
      for (const auto& v : operation_vars(s.op)) {
        if (!store.definition(v)) {
          why = "'" + v + "' is not defined";
          break;
        }
      }
      if (why.empty()) why = "waiting on a statement that cannot step";
    }
    out.push_back(l.to_string() + " " + pretty_statement(s) + ": " + why);
  }
  return out;
}

void check_indices(const TermStore& store) {
  if (auto err = store.verify_indices()) throw std::logic_error("term store: " + *err);
}

void run_opportunistic(TermStore& store, ExternalEnv& env, const RunOptions& opts, RunOutcome& out) {
  while (true) {
    env.poll();
    if (out.metrics.macro_steps >= opts.budget) {
      out.status = RunStatus::BudgetExhausted;
      return;
    }
    std::vector<Label> stepped = opportunistic_step(store, env, out.log);
    if (opts.verify_indices) check_indices(store);
    if (!stepped.empty()) {
      ++out.metrics.macro_steps;
      continue;
    }
    if (env.outstanding() > 0 && env.wait()) continue;
    return;
  }
}

void run_cbv(TermStore& store, ExternalEnv& env, const RunOptions& opts, RunOutcome& out) {
  while (true) {
    store.refresh();
    if (out.metrics.macro_steps >= opts.budget) {
      out.status = RunStatus::BudgetExhausted;
      return;
    }
    Label pc;
    if (!store.active().empty()) {
      pc = *store.active().begin();
      if (!store.steppable().count(pc)) return;
      const Statement* s = store.at(pc);
      if (const auto* t = std::get_if<Task>(&s->op)) {
        env.poll();
        if (!env.ready(pc, *t)) {
          if (env.outstanding() > 0 && env.wait()) continue;
          return;
        }
      }
    } else if (!store.steppable().empty()) {
      // Only garbage is left.
      pc = *store.steppable().begin();
    } else {
      return;
    }
    StepOutcome o = step_store(store, pc, env);
    if (o.status != StepOutcome::Stepped) return;
    for (auto& r : o.records) out.log.push_back(std::move(r));
    ++out.metrics.macro_steps;
    if (opts.verify_indices) {
      store.refresh();
      check_indices(store);
    }
  }
}

}  // namespace

RunOutcome run(const Expr& program, ExternalEnv& env, const RunOptions& opts) {
  RunOutcome out;
  TermStore store = TermStore::from_expr(program);
  if (opts.strategy == Strategy::Cbv) {
    run_cbv(store, env, opts, out);
  } else {
    run_opportunistic(store, env, opts, out);
  }
  store.refresh();
  if (out.status != RunStatus::BudgetExhausted && !store.active().empty()) {
    out.status = RunStatus::Stuck;
    out.diagnostics = stuck_diagnostics(store);
  }
  out.final = store.to_expr();
  for (const auto& r : out.log) {
    ++out.metrics.steps;
    if (r.kind == StepKind::Dispatch) ++out.metrics.dispatches;
  }
  out.metrics.substitution_touches = store.substitution_touches();
  out.metrics.running_time_ms = env.now_ms();
  out.metrics.latency_ms = env.first_output_ms().value_or(out.metrics.running_time_ms);
  return out;
}

std::set<Label> needed_labels(const TermStore& store) {
  std::set<Label> out;
  std::vector<Var> work{store.ret()};
  std::set<Var> seen;
  while (!work.empty()) {
    Var v = std::move(work.back());
    work.pop_back();
    if (!seen.insert(v).second) continue;
    auto l = store.label_of(v);
    if (!l) continue;
    out.insert(*l);
    for (auto& u : operation_vars(store.at(*l)->op)) work.push_back(std::move(u));
  }
  return out;
}

}  // namespace opal

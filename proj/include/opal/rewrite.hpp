#pragma once

// Single-step semantics over labeled terms: evaluation contexts, statement
// replacement, the reduction/dispatch/resolution rules and the trace that
// makes resolution deterministic.

#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "opal/syntactic_ops.hpp"
#include "opal/syntax.hpp"

namespace opal {

enum class StepKind { Alias, Call, Proj, Gc, Dispatch, Resolve };
const char* step_kind_name(StepKind k);

struct StepRecord {
  Label label;
  StepKind kind = StepKind::Alias;
  Statement old;
  std::vector<Statement> replacement;
  // Dispatch and resolve only.
  std::optional<FnRef> fn;
  std::optional<PrimExpr> arg;
  /// The unfreshened expression a resolve consumed.
  std::optional<Expr> raw_result;
  std::int64_t at_ms = 0;
};

/// Partial map from task labels to the expression each task resolves to.
using Trace = std::map<Label, Expr>;

/// Collects the resolution choices of a run into a trace.
Trace trace_of(const std::vector<StepRecord>& log);

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The engine's view of the outside world. Dispatch starts an external call;
/// resolution consumes its result once available.
class ExternalEnv {
 public:
  struct Dispatched {
    TaskId handle = 0;
    /// Set for synchronous providers: the result is spliced in immediately.
    std::optional<Expr> immediate;
  };

  virtual ~ExternalEnv() = default;
  /// `task_label` is the label the task statement will carry.
  virtual Dispatched dispatch(const Label& task_label, const FnRef& fn, const PrimExpr& arg) = 0;
  /// True when the task at `task_label` can resolve right now.
  virtual bool ready(const Label& task_label, const Task& task) = 0;
  /// Consumes the result of a ready task.
  virtual Expr take_result(const Label& task_label, const Task& task) = 0;
  virtual std::int64_t now_ms() const { return 0; }

  /// Dispatched tasks whose results have not been delivered yet.
  virtual std::size_t outstanding() const { return 0; }
  /// Sleeps (or advances simulated time) until an outstanding task
  /// completes. False when nothing can complete.
  virtual bool wait() { return false; }
  /// Picks up completions delivered by other threads without blocking.
  virtual void poll() {}
  /// Time of the first output byte, if any output was produced.
  virtual std::optional<std::int64_t> first_output_ms() const { return std::nullopt; }
};

// ---------------------------------------------------------------------------
// Evaluation contexts

struct EvalContext {
  std::vector<LabeledStatement> prefix;
  Label hole;
  LabeledExpr suffix;
};

std::optional<std::pair<EvalContext, Statement>> decompose(const LabeledExpr& p, const Label& l);
/// Fills the hole with `stmts`, the i-th receiving label hole·i.
LabeledExpr fill(const EvalContext& ctx, const std::vector<Statement>& stmts);
/// Replaces the statement at `l`; throws std::out_of_range if absent.
LabeledExpr replace(const LabeledExpr& p, const Label& l, const std::vector<Statement>& stmts);

// ---------------------------------------------------------------------------
// Rule planning, shared by the list-based engine and the indexed store

class TermView {
 public:
  virtual ~TermView() = default;
  /// Operation binding `v` at top level, if any.
  virtual const Operation* definition(const Var& v) const = 0;
  /// Whether `v` occurs free anywhere other than the statement at `at`
  /// (the return variable counts).
  virtual bool referenced_outside(const Var& v, const Label& at) const = 0;
};

std::optional<PrimExpr> pexp(const TermView& view, const Var& x);

struct Plan {
  enum Kind {
    None,      // no rule applies (yet)
    Stuck,     // no rule will ever apply; see diagnostic
    Alias,     // delete; substitute `alias_from` by `alias_to` elsewhere
    Call,      // replace with `replacement`
    Proj,      // replace with `replacement`
    Gc,        // delete
    Dispatch,  // external call of `fn` on `arg`
    Resolve,   // task statement
  } kind = None;
  std::vector<Statement> replacement;
  Var alias_from;
  Var alias_to;
  FnRef fn;
  PrimExpr arg;
  std::string diagnostic;
};

/// With `build_replacement` false only the plan's kind and call target are
/// computed; callee bodies are not copied.
Plan plan_step(const TermView& view, const Label& l, const Statement& s, bool build_replacement = true);

/// Replacement statements for resolving the task bound to `bound` at
/// `task_label` with `result`.
std::vector<Statement> resolution_statements(const Var& bound, const Expr& result, const Label& task_label);

// ---------------------------------------------------------------------------
// List-based engine: direct transcription of the rules over LabeledExpr.

struct StepOutcome {
  enum Status { Stepped, Blocked, NotSteppable, Stuck, Absent } status = Absent;
  /// One record per semantic step (a synchronous dispatch yields two).
  std::vector<StepRecord> records;
  std::string diagnostic;
};

class ListTermView : public TermView {
 public:
  explicit ListTermView(const LabeledExpr& p);
  const Operation* definition(const Var& v) const override;
  bool referenced_outside(const Var& v, const Label& at) const override;

 private:
  const LabeledExpr& p_;
  std::map<Var, const Operation*> defs_;
  std::map<Var, std::vector<Label>> users_;
};

StepOutcome step_at(LabeledExpr& p, const Label& l, ExternalEnv& env);

/// Formal steppability: a task counts as steppable whether or not its
/// result has arrived.
bool steppable(const LabeledExpr& p, const Label& l);
std::vector<Label> steppable_set(const LabeledExpr& p);

/// Steps labels chosen uniformly at random until nothing is steppable or the
/// step budget runs out. Blocked tasks are never chosen.
struct RandomRun {
  LabeledExpr final;
  std::vector<StepRecord> log;
  std::vector<Label> order;
  bool terminated = false;
  /// Violations of label discipline or steppable-stability seen en route.
  std::vector<std::string> violations;
};
RandomRun run_random_order(LabeledExpr p, ExternalEnv& env, std::mt19937_64& rng, std::size_t max_steps,
                           bool check_invariants);

}  // namespace opal

#pragma once

// Evaluation loops over the indexed term store: opportunistic macro-steps
// (every steppable statement at once) and a call-by-value program counter.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "opal/rewrite.hpp"
#include "opal/term_store.hpp"

namespace opal {

enum class Strategy { Opportunistic, Cbv };
const char* strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(const std::string& s);

enum class RunStatus { Terminated, BudgetExhausted, Stuck };
const char* run_status_name(RunStatus s);

struct Metrics {
  /// Virtual or scaled-real time of the first output byte; running time if
  /// the run printed nothing.
  std::int64_t latency_ms = 0;
  /// Time at which evaluation stopped.
  std::int64_t running_time_ms = 0;
  std::uint64_t macro_steps = 0;
  std::uint64_t steps = 0;
  std::uint64_t dispatches = 0;
  /// Statements rewritten by alias substitution.
  std::uint64_t substitution_touches = 0;
  bool operator==(const Metrics&) const = default;
};

struct RunOutcome {
  Expr final;
  /// Every semantic step, in the order taken.
  std::vector<StepRecord> log;
  Metrics metrics;
  RunStatus status = RunStatus::Terminated;
  /// One line per statement that can never step.
  std::vector<std::string> diagnostics;

  /// Dispatch and resolve records only.
  std::vector<StepRecord> call_log() const;
};

struct RunOptions {
  Strategy strategy = Strategy::Opportunistic;
  /// Macro-steps (opportunistic) or single steps (call-by-value).
  std::uint64_t budget = 1'000'000;
  /// Compare the store's indices against a rebuild after every macro-step.
  bool verify_indices = false;
};

/// Applies one rule at `l` of the store. A synchronous dispatch resolves in
/// the same call and yields two records.
StepOutcome step_store(TermStore& store, const Label& l, ExternalEnv& env);

/// One opportunistic macro-step: every label steppable on entry is stepped
/// once in ascending order, skipping tasks whose result has not arrived.
/// Returns the labels stepped.
std::vector<Label> opportunistic_step(TermStore& store, ExternalEnv& env, std::vector<StepRecord>& log);

RunOutcome run(const Expr& program, ExternalEnv& env, const RunOptions& opts = {});

/// Statements the return value transitively depends on; a lazy strategy
/// would never evaluate anything outside this set.
std::set<Label> needed_labels(const TermStore& store);

}  // namespace opal

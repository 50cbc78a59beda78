#pragma once

// Running linked programs against the builtin providers, and the benchmark
// harness that compares strategies on the virtual clock.

#include <cstdint>
#include <string>
#include <vector>

#include "opal/evaluator.hpp"
#include "opal/providers.hpp"
#include "opal/runtime.hpp"

namespace opal {

enum class ClockMode { Virtual, Real };
std::optional<ClockMode> parse_clock_mode(const std::string& s);

struct ExecConfig {
  Strategy strategy = Strategy::Opportunistic;
  std::uint64_t budget = 1'000'000;
  std::uint64_t seed = 0;
  ClockMode clock = ClockMode::Virtual;
  /// Real clock only: simulated latencies are multiplied by this.
  double real_scale = 1.0;
  CallInterceptor* interceptor = nullptr;
  /// When set, every task resolves from this trace instead of a provider.
  const Trace* trace = nullptr;
};

struct Execution {
  RunOutcome outcome;
  OutputChannel output;
  double wall_ms = 0;
};

Execution execute(const Expr& program, const ProviderRegistry& registry, const ExecConfig& cfg);

struct BenchProgram {
  std::string name;
  std::string source;
};

/// The shipped suite: city_excursions, fact_check, tree_search, tts.
std::vector<BenchProgram> default_bench_programs();

struct BenchConfig {
  std::vector<BenchProgram> programs = default_bench_programs();
  TimingTable timing;
  std::vector<Strategy> strategies{Strategy::Opportunistic, Strategy::Cbv};
  std::uint64_t seed = 0;
  ClockMode clock = ClockMode::Virtual;
  double real_scale = 0.01;
  int repetitions = 3;
};

struct BenchRow {
  std::string program;
  Strategy strategy = Strategy::Opportunistic;
  /// Means over repetitions.
  double latency_ms = 0;
  double running_time_ms = 0;
  double dispatches = 0;
  double macro_steps = 0;
  std::string status;
};

struct BenchReport {
  std::vector<BenchRow> rows;

  const BenchRow* find(const std::string& program, Strategy s) const;
  /// Deterministic JSON document.
  std::string to_json() const;
  /// Latency and running time per program and strategy, with speedups.
  std::string to_table() const;
};

BenchReport run_bench(const BenchConfig& cfg);

}  // namespace opal

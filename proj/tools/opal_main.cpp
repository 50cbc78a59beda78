// opal: run, check, record, replay and benchmark Opal programs.
//
// Exit codes: 0 ok, 1 usage, 2 program error, 3 replay miss, 4 budget
// exhausted (partial output is still written).

#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "opal/bench.hpp"
#include "opal/linker.hpp"
#include "opal/parser.hpp"
#include "opal/printer.hpp"
#include "opal/replay.hpp"
#include "opal/wellformed.hpp"

namespace {

using namespace opal;

enum Exit { kOk = 0, kUsage = 1, kProgram = 2, kReplayMiss = 3, kBudget = 4 };

struct RunFlags {
  std::string file;
  std::string strategy = "opportunistic";
  std::string trace_out;
  std::string trace_in;
  std::string replay;
  std::string record;
  std::uint64_t budget = 1'000'000;
  std::uint64_t seed = 0;
  std::string clock = "virtual";
  double scale = 1.0;
  std::string report;
  bool strict = false;
  bool no_prelude = false;
  bool show_final = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("file", f.file, "Program source")->required()->check(CLI::ExistingFile);
  cmd->add_option("--strategy", f.strategy, "opportunistic or cbv")->check(CLI::IsMember({"opportunistic", "cbv"}));
  cmd->add_option("--trace-out", f.trace_out, "Write the resolution trace here");
  cmd->add_option("--trace-in", f.trace_in, "Resolve tasks from this trace instead of providers");
  cmd->add_option("--budget", f.budget, "Step budget: macro-steps, or single steps under cbv");
  cmd->add_option("--seed", f.seed, "Seed for nondeterministic providers");
  cmd->add_option("--clock", f.clock, "virtual or real")->check(CLI::IsMember({"virtual", "real"}));
  cmd->add_option("--scale", f.scale, "Real clock: latency multiplier")->check(CLI::PositiveNumber);
  cmd->add_option("--report", f.report, "Write a JSON report here");
  cmd->add_flag("--strict", f.strict, "Treat stuck statements as an error");
  cmd->add_flag("--no-prelude", f.no_prelude, "Do not link the standard library");
  cmd->add_flag("--show-final", f.show_final, "Print the final term to stderr");
}

std::string report_json(const Execution& ex, const RunFlags& f) {
  const Metrics& m = ex.outcome.metrics;
  nlohmann::ordered_json j;
  j["program"] = f.file;
  j["strategy"] = f.strategy;
  j["status"] = run_status_name(ex.outcome.status);
  j["latency_ms"] = m.latency_ms;
  j["running_time_ms"] = m.running_time_ms;
  j["macro_steps"] = m.macro_steps;
  j["steps"] = m.steps;
  j["dispatches"] = m.dispatches;
  j["wall_ms"] = ex.wall_ms;
  j["diagnostics"] = ex.outcome.diagnostics;
  nlohmann::ordered_json calls = nlohmann::ordered_json::array();
  for (const auto& r : ex.outcome.call_log()) {
    calls.push_back(nlohmann::ordered_json{{"label", r.label.dotted()},
                                           {"kind", step_kind_name(r.kind)},
                                           {"fn", r.fn ? r.fn->name : ""},
                                           {"arg", r.arg ? render_prim_expr(*r.arg) : ""},
                                           {"at_ms", r.at_ms}});
  }
  j["calls"] = std::move(calls);
  j["final"] = pretty(ex.outcome.final);
  return j.dump(2) + "\n";
}

int do_run(const RunFlags& f) {
  const ProviderRegistry registry = builtin_providers();
  const Expr program = link_program(read_file(f.file), registry, LinkOptions{!f.no_prelude}).program;

  ExecConfig cfg;
  cfg.strategy = *parse_strategy(f.strategy);
  cfg.budget = f.budget;
  cfg.seed = f.seed;
  cfg.clock = *parse_clock_mode(f.clock);
  cfg.real_scale = f.scale;

  std::optional<Trace> trace;
  if (!f.trace_in.empty()) {
    trace = parse_trace(read_file(f.trace_in));
    cfg.trace = &*trace;
  }
  ReplayStore replay_in;
  ReplayStore record_out;
  std::unique_ptr<CallInterceptor> interceptor;
  if (!f.replay.empty()) {
    replay_in = ReplayStore::load(f.replay);
    interceptor = std::make_unique<ReplayingInterceptor>(replay_in, f.record.empty() ? nullptr : &record_out);
  } else if (!f.record.empty()) {
    interceptor = std::make_unique<RecordingInterceptor>(record_out);
  }
  cfg.interceptor = interceptor.get();

  Execution ex = execute(program, registry, cfg);
  std::cout << ex.output.bytes << std::flush;

  if (!f.record.empty()) record_out.save(f.record);
  if (!f.trace_out.empty()) write_file(f.trace_out, serialize_trace(ex.outcome.log));
  if (!f.report.empty()) write_file(f.report, report_json(ex, f));
  if (f.show_final) std::cerr << pretty(ex.outcome.final) << "\n";

  for (const auto& d : ex.outcome.diagnostics) std::cerr << "stuck: " << d << "\n";
  switch (ex.outcome.status) {
    case RunStatus::BudgetExhausted:
      std::cerr << "budget of " << f.budget << " steps exhausted\n";
      return kBudget;
    case RunStatus::Stuck: return f.strict ? kProgram : kOk;
    case RunStatus::Terminated: return kOk;
  }
  return kOk;
}

int do_check(const std::string& file, bool core, bool no_prelude) {
  const std::string src = read_file(file);
  if (core) {
    ParseOptions po;
    po.rename_rebinding = false;
    const Expr e = parse(src, po);
    if (auto err = check_well_formed(free_vars(e), e)) {
      std::cout << err->describe() << "\n";
      return kProgram;
    }
    std::cout << "ok\n";
    return kOk;
  }
  const LinkedProgram lp = link_program(src, builtin_providers(), LinkOptions{!no_prelude});
  std::cout << "ok";
  if (!lp.externals.empty()) {
    std::cout << " (external:";
    for (const auto& n : lp.externals) std::cout << " " << n;
    std::cout << ")";
  }
  std::cout << "\n";
  return kOk;
}

struct BenchFlags {
  std::vector<std::string> programs;
  std::vector<std::string> strategies{"opportunistic", "cbv"};
  int reps = 3;
  std::uint64_t seed = 0;
  std::string clock = "virtual";
  double scale = 0.01;
  std::string report;
  std::string timing;
};

TimingTable load_timing(const std::string& path) {
  TimingTable t;
  const auto j = nlohmann::json::parse(read_file(path));
  for (const auto& [fn, v] : j.items()) {
    ProviderTiming pt = t.at(fn);
    pt.latency_ms = v.value("latency_ms", pt.latency_ms);
    pt.first_chunk_ms = v.value("first_chunk_ms", pt.first_chunk_ms);
    pt.chunk_spacing_ms = v.value("chunk_spacing_ms", pt.chunk_spacing_ms);
    pt.done_ms = v.value("done_ms", pt.done_ms);
    t.set(fn, pt);
  }
  return t;
}

int do_bench(const BenchFlags& f) {
  BenchConfig cfg;
  if (!f.programs.empty()) {
    std::map<std::string, BenchProgram> shipped;
    for (auto& p : default_bench_programs()) shipped.emplace(p.name, p);
    cfg.programs.clear();
    for (const auto& p : f.programs) {
      if (auto it = shipped.find(p); it != shipped.end()) {
        cfg.programs.push_back(it->second);
      } else {
        cfg.programs.push_back(BenchProgram{p, read_file(p)});
      }
    }
  }
  cfg.strategies.clear();
  for (const auto& s : f.strategies) cfg.strategies.push_back(*parse_strategy(s));
  cfg.repetitions = f.reps;
  cfg.seed = f.seed;
  cfg.clock = *parse_clock_mode(f.clock);
  cfg.real_scale = f.scale;
  if (!f.timing.empty()) cfg.timing = load_timing(f.timing);
  BenchReport r = run_bench(cfg);
  std::cout << r.to_table();
  if (!f.report.empty()) write_file(f.report, r.to_json());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Opportunistic evaluator for Opal programs"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Run a program");
  add_run_flags(run_cmd, run_flags);
  run_cmd->add_option("--replay", run_flags.replay, "Answer external calls from a replay store")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--record", run_flags.record, "Record external calls to a replay store");

  RunFlags record_flags;
  auto* record_cmd = app.add_subcommand("record", "Run a program and record its external calls");
  add_run_flags(record_cmd, record_flags);
  record_cmd->add_option("--out", record_flags.record, "Replay store to write")->required();

  RunFlags replay_flags;
  auto* replay_cmd = app.add_subcommand("replay", "Run a program against a replay store");
  add_run_flags(replay_cmd, replay_flags);
  replay_cmd->add_option("--store", replay_flags.replay, "Replay store to read")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--rerecord", replay_flags.record, "Write the calls answered to a new store");

  std::string check_file;
  bool check_core = false;
  bool check_no_prelude = false;
  auto* check_cmd = app.add_subcommand("check", "Parse, link and check well-formedness");
  check_cmd->add_option("file", check_file, "Program source")->required()->check(CLI::ExistingFile);
  check_cmd->add_flag("--core", check_core, "Check the program as written, without renaming or linking");
  check_cmd->add_flag("--no-prelude", check_no_prelude, "Do not link the standard library");

  BenchFlags bench_flags;
  auto* bench_cmd = app.add_subcommand("bench", "Compare strategies on the benchmark suite");
  bench_cmd->add_option("--program", bench_flags.programs, "Shipped program name or source path (repeatable)");
  bench_cmd->add_option("--strategy", bench_flags.strategies, "Strategies to run")
      ->check(CLI::IsMember({"opportunistic", "cbv"}));
  bench_cmd->add_option("--reps", bench_flags.reps, "Repetitions per program and strategy")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench_flags.seed, "Base seed");
  bench_cmd->add_option("--clock", bench_flags.clock, "virtual or real")->check(CLI::IsMember({"virtual", "real"}));
  bench_cmd->add_option("--scale", bench_flags.scale, "Real clock: latency multiplier")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--report", bench_flags.report, "Write a JSON report here");
  bench_cmd->add_option("--timing", bench_flags.timing, "JSON provider timing overrides")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run_cmd) return do_run(run_flags);
    if (*record_cmd) return do_run(record_flags);
    if (*replay_cmd) return do_run(replay_flags);
    if (*check_cmd) return do_check(check_file, check_core, check_no_prelude);
    if (*bench_cmd) return do_bench(bench_flags);
  } catch (const ReplayMiss& e) {
    std::cerr << e.what() << "\n";
    return kReplayMiss;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kProgram;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kProgram;
  }
  return kUsage;
}

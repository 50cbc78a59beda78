#include "opal/bench.hpp"

#include <chrono>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

#include "opal/assets.hpp"
#include "opal/linker.hpp"

namespace opal {

std::optional<ClockMode> parse_clock_mode(const std::string& s) {
  if (s == "virtual") return ClockMode::Virtual;
  if (s == "real") return ClockMode::Real;
  return std::nullopt;
}

Execution execute(const Expr& program, const ProviderRegistry& registry, const ExecConfig& cfg) {
  Execution ex;
  RunOptions ro;
  ro.strategy = cfg.strategy;
  ro.budget = cfg.budget;
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.trace) {
    TraceEnv env(registry, *cfg.trace);
    ex.outcome = run(program, env, ro);
    ex.output = env.output();
  } else {
    std::unique_ptr<Clock> clock;
    if (cfg.clock == ClockMode::Real) {
      clock = std::make_unique<RealClock>(cfg.real_scale);
    } else {
      clock = std::make_unique<VirtualClock>();
    }
    RuntimeEnv env(registry, std::move(clock), RuntimeOptions{cfg.seed, cfg.interceptor});
    ex.outcome = run(program, env, ro);
    ex.output = env.output();
  }
  ex.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return ex;
}

std::vector<BenchProgram> default_bench_programs() {
  return {
      {"city_excursions", assets::bench_city_excursions},
      {"fact_check", assets::bench_fact_check},
      {"tree_search", assets::bench_tree_search},
      {"tts", assets::bench_tts},
  };
}

const BenchRow* BenchReport::find(const std::string& program, Strategy s) const {
  for (const auto& r : rows) {
    if (r.program == program && r.strategy == s) return &r;
  }
  return nullptr;
}

std::string BenchReport::to_json() const {
  nlohmann::ordered_json rows_json = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    rows_json.push_back(nlohmann::ordered_json{{"program", r.program},
                                               {"strategy", strategy_name(r.strategy)},
                                               {"latency_ms", r.latency_ms},
                                               {"running_time_ms", r.running_time_ms},
                                               {"dispatches", r.dispatches},
                                               {"macro_steps", r.macro_steps},
                                               {"status", r.status}});
  }
  nlohmann::ordered_json doc{{"rows", rows_json}};
  return doc.dump(2) + "\n";
}

std::string BenchReport::to_table() const {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %-14s %12s %12s %10s %10s\n", "program", "strategy", "latency_s",
                "running_s", "dispatches", "steps");
  out += line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-16s %-14s %12.3f %12.3f %10.0f %10.0f\n", r.program.c_str(),
                  strategy_name(r.strategy), r.latency_ms / 1000.0, r.running_time_ms / 1000.0, r.dispatches,
                  r.macro_steps);
    out += line;
  }
  bool header = false;
  for (const auto& r : rows) {
    if (r.strategy != Strategy::Opportunistic) continue;
    const BenchRow* base = find(r.program, Strategy::Cbv);
    if (!base || r.latency_ms <= 0 || r.running_time_ms <= 0) continue;
    if (!header) {
      out += "\nspeedup of opportunistic over cbv\n";
      header = true;
    }
    std::snprintf(line, sizeof line, "%-16s latency %6.2fx  running time %6.2fx\n", r.program.c_str(),
                  base->latency_ms / r.latency_ms, base->running_time_ms / r.running_time_ms);
    out += line;
  }
  return out;
}

BenchReport run_bench(const BenchConfig& cfg) {
  if (cfg.repetitions < 1) throw std::invalid_argument("repetitions must be positive");
  ProviderRegistry registry = builtin_providers(cfg.timing);
  BenchReport report;
  for (const auto& p : cfg.programs) {
    const Expr program = link_program(p.source, registry).program;
    for (Strategy s : cfg.strategies) {
      BenchRow row;
      row.program = p.name;
      row.strategy = s;
      for (int i = 0; i < cfg.repetitions; ++i) {
        ExecConfig ec;
        ec.strategy = s;
        ec.seed = cfg.seed + static_cast<std::uint64_t>(i);
        ec.clock = cfg.clock;
        ec.real_scale = cfg.real_scale;
        Execution ex = execute(program, registry, ec);
        const Metrics& m = ex.outcome.metrics;
        row.latency_ms += static_cast<double>(m.latency_ms);
        row.running_time_ms += static_cast<double>(m.running_time_ms);
        row.dispatches += static_cast<double>(m.dispatches);
        row.macro_steps += static_cast<double>(m.macro_steps);
        row.status = run_status_name(ex.outcome.status);
      }
      const double n = cfg.repetitions;
      row.latency_ms /= n;
      row.running_time_ms /= n;
      row.dispatches /= n;
      row.macro_steps /= n;
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace opal

#pragma once

// Builtin external functions: printing and file simulators threaded by
// handles, arithmetic, a seeded coin, and simulated model/API calls whose
// timing comes from a table.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "opal/runtime.hpp"

namespace opal {

struct ProviderTiming {
  /// Completion offset of a value reply.
  std::int64_t latency_ms = 0;
  /// Streams: offset of the first chunk and spacing of later ones.
  std::int64_t first_chunk_ms = 0;
  std::int64_t chunk_spacing_ms = 0;
  /// Streams: offset at which the list closes; 0 means "with the last chunk".
  std::int64_t done_ms = 0;
  bool operator==(const ProviderTiming&) const = default;
};

/// Per-provider timing for the simulated calls. Defaults reproduce the
/// desk-scale motivating schedule (cities every 400 ms, 4 s per excursion).
struct TimingTable {
  std::map<std::string, ProviderTiming> entries;

  TimingTable();
  const ProviderTiming& at(const std::string& fn) const;
  void set(const std::string& fn, ProviderTiming t) { entries[fn] = t; }
};

/// Builds an expression returning `c` (tuples become tuple statements).
Expr expr_of(const PrimExpr& c);

/// Simulated answers, exposed so tests can state expectations.
std::vector<std::string> simulated_cities(const std::string& region);
std::string simulated_excursion(const std::string& city);
std::string simulated_completion(const std::string& prompt);

ProviderRegistry builtin_providers(const TimingTable& timing = {});

}  // namespace opal

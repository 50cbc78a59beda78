#pragma once

#include <algorithm>
#include <ostream>
#include <string>
#include <vector>

#include "opal/bench.hpp"
#include "opal/evaluator.hpp"
#include "opal/linker.hpp"
#include "opal/parser.hpp"
#include "opal/printer.hpp"
#include "opal/providers.hpp"
#include "opal/rewrite.hpp"
#include "opal/runtime.hpp"
#include "opal/syntactic_ops.hpp"
#include "opal/wellformed.hpp"

namespace opal {

// Readable gtest failure messages.
inline void PrintTo(const Label& l, std::ostream* os) { *os << l.to_string(); }

}  // namespace opal

namespace opal::testing {

/// Parses program text without renaming rebinders (the text is the term).
inline Expr core(const std::string& text) {
  ParseOptions po;
  po.rename_rebinding = false;
  return parse(text, po);
}

inline LabeledExpr labeled(const std::string& text) { return init_labels(core(text)); }

inline const Statement* statement_at(const LabeledExpr& p, const Label& l) {
  for (const auto& ls : p.stmts) {
    if (ls.label == l) return &ls.stmt;
  }
  return nullptr;
}

inline std::vector<Label> labels_of(const LabeledExpr& p) {
  std::vector<Label> out;
  for (const auto& ls : p.stmts) out.push_back(ls.label);
  return out;
}

/// (fn, arg) of every dispatch, sorted.
inline std::vector<std::string> dispatch_multiset(const std::vector<StepRecord>& log) {
  std::vector<std::string> out;
  for (const auto& r : log) {
    if (r.kind == StepKind::Dispatch) out.push_back(r.fn->name + " " + render_prim_expr(*r.arg));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// A call that never returns, then a print the return value does not need.
inline const char* const kDivergeProgram = R"(spin := fun self:
    loop := fun u:
        r := self u
        r
    loop
diverge := fix spin
u := ()
x := diverge u
out := print (stdout, "foo")
ret "bar")";

/// Runs linked program text on the virtual clock.
inline Execution run_text(const std::string& text, Strategy s = Strategy::Opportunistic, std::uint64_t seed = 0,
                          const TimingTable& timing = {}) {
  const ProviderRegistry registry = builtin_providers(timing);
  ExecConfig cfg;
  cfg.strategy = s;
  cfg.seed = seed;
  return execute(link_program(text, registry).program, registry, cfg);
}

}  // namespace opal::testing

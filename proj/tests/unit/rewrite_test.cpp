#include <gtest/gtest.h>

#include "support/fuzz_programs.hpp"
#include "support/test_util.hpp"

using namespace opal;
using namespace opal::testing;

namespace {

const char* const kTwoCalls = R"(g := fun x:
    y := f x
    ret y
z1 := g z0
z2 := g z1
ret z2)";

/// Environment for terms that never reach an external call.
struct PureEnv : TraceEnv {
  PureEnv() : TraceEnv(registry, {}) {}
  ProviderRegistry registry;
};

Expr resolve_value(const std::string& text) { return core(text); }

}  // namespace

TEST(Decompose, IsolatesTheStatementAtALabel) {
  LabeledExpr p = labeled(kTwoCalls);
  auto d = decompose(p, Label{3});
  ASSERT_TRUE(d);
  EXPECT_EQ(d->second, call("z2", "g", "z1"));
  EXPECT_EQ(d->first.prefix.size(), 2u);
  EXPECT_TRUE(d->first.suffix.stmts.empty());
  EXPECT_EQ(d->first.suffix.ret, "z2");
  EXPECT_FALSE(decompose(p, Label{9}));
}

TEST(Decompose, FillWithSameStatementIsIdentity) {
  LabeledExpr p = labeled(kTwoCalls);
  for (const auto& l : labels_of(p)) {
    auto d = decompose(p, l);
    ASSERT_TRUE(d);
    // The hole is refilled at l·1, so compare after erasing labels.
    EXPECT_EQ(erase_labels(fill(d->first, {d->second})), erase_labels(p));
  }
}

TEST(Replace, InsertsChildLabels) {
  LabeledExpr p = labeled(kTwoCalls);
  LabeledExpr q = replace(p, Label{3}, {alias("a", "z1"), alias("b", "a"), alias("z2", "b")});
  EXPECT_EQ(labels_of(q), (std::vector<Label>{{1}, {2}, {3, 1}, {3, 2}, {3, 3}}));
  EXPECT_TRUE(label_independent(q));
}

TEST(Replace, EmptySequenceDeletes) {
  LabeledExpr q = replace(labeled(kTwoCalls), Label{1}, {});
  EXPECT_EQ(labels_of(q), (std::vector<Label>{{2}, {3}}));
}

TEST(Replace, AbsentLabelThrows) { EXPECT_THROW(replace(labeled(kTwoCalls), Label{7}, {}), std::out_of_range); }

TEST(Replace, IndependentReplacementsCommute) {
  LabeledExpr p = labeled(kTwoCalls);
  const std::vector<Statement> s1{alias("q", "z0"), alias("z1", "q")};
  const std::vector<Statement> s2{alias("z2", "z1")};
  EXPECT_EQ(replace(replace(p, Label{2}, s1), Label{3}, s2), replace(replace(p, Label{3}, s2), Label{2}, s1));
}

TEST(Pexp, PrimsAndTuples) {
  LabeledExpr p = labeled("w := <1>\nx := <2>\ny := (w, x)\nz := (w, y)\ng := fun a: a\nret z");
  ListTermView view(p);
  EXPECT_EQ(pexp(view, "y"), PrimExpr::tuple({PrimExpr::of(int_value(1)), PrimExpr::of(int_value(2))}));
  auto nested = pexp(view, "z");
  ASSERT_TRUE(nested);
  ASSERT_EQ(nested->items.size(), 2u);
  EXPECT_TRUE(nested->items[1].is_tuple);
  EXPECT_FALSE(pexp(view, "g"));
  EXPECT_FALSE(pexp(view, "unbound"));
}

TEST(Pexp, TupleWithFunComponentIsAbsent) {
  LabeledExpr p = labeled("g := fun a: a\nw := <1>\ny := (w, g)\nret y");
  ListTermView view(p);
  EXPECT_FALSE(pexp(view, "y"));
}

TEST(Step, CallReplacesWithFreshBody) {
  LabeledExpr p = labeled(kTwoCalls);
  PureEnv env;
  StepOutcome o = step_at(p, Label{3}, env);
  ASSERT_EQ(o.status, StepOutcome::Stepped);
  ASSERT_EQ(o.records.size(), 1u);
  EXPECT_EQ(o.records[0].kind, StepKind::Call);
  EXPECT_EQ(labels_of(p), (std::vector<Label>{{1}, {2}, {3, 1}, {3, 2}, {3, 3}}));
  const Statement* s31 = statement_at(p, Label{3, 1});
  const Statement* s32 = statement_at(p, Label{3, 2});
  const Statement* s33 = statement_at(p, Label{3, 3});
  const Var x0 = s31->bound;
  const Var y0 = s32->bound;
  EXPECT_EQ(*s31, alias(x0, "z1"));
  EXPECT_EQ(*s32, call(y0, "f", x0));
  EXPECT_EQ(*s33, alias("z2", y0));
  EXPECT_NE(x0, "x");
  EXPECT_NE(y0, "y");
  // The original definition is untouched.
  EXPECT_EQ(*statement_at(p, Label{1}), labeled(kTwoCalls).stmts[0].stmt);
}

TEST(Step, AliasSubstitutesAndDeletes) {
  LabeledExpr p = labeled("a := <1>\nb := a\nc := (b, b)\nret b");
  PureEnv env;
  ASSERT_EQ(step_at(p, Label{2}, env).status, StepOutcome::Stepped);
  EXPECT_EQ(erase_labels(p), core("a := <1>\nc := (a, a)\nret a"));
}

TEST(Step, ProjectionBecomesAlias) {
  LabeledExpr p = labeled("a := <1>\nb := <2>\nt := (a, b)\nx := prj 2 t\nret x");
  PureEnv env;
  ASSERT_EQ(step_at(p, Label{4}, env).status, StepOutcome::Stepped);
  EXPECT_EQ(*statement_at(p, Label{4, 1}), alias("x", "b"));
}

TEST(Step, ProjectionOutOfRangeIsStuck) {
  LabeledExpr p = labeled("a := <1>\nt := (a, a)\nx := prj 3 t\nret x");
  PureEnv env;
  StepOutcome o = step_at(p, Label{3}, env);
  EXPECT_EQ(o.status, StepOutcome::Stuck);
  EXPECT_FALSE(o.diagnostic.empty());
}

TEST(Step, CallOfTupleIsStuck) {
  LabeledExpr p = labeled("a := <1>\nt := (a, a)\nx := t a\nret x");
  PureEnv env;
  EXPECT_EQ(step_at(p, Label{3}, env).status, StepOutcome::Stuck);
}

TEST(Step, GcOnlyWhenUnreferenced) {
  LabeledExpr p = labeled("a := <1>\nb := <2>\nret b");
  PureEnv env;
  EXPECT_EQ(step_at(p, Label{2}, env).status, StepOutcome::NotSteppable);
  StepOutcome o = step_at(p, Label{1}, env);
  ASSERT_EQ(o.status, StepOutcome::Stepped);
  EXPECT_EQ(o.records[0].kind, StepKind::Gc);
  EXPECT_EQ(erase_labels(p), core("b := <2>\nret b"));
}

TEST(Step, AbsentLabel) {
  LabeledExpr p = labeled(kTwoCalls);
  PureEnv env;
  EXPECT_EQ(step_at(p, Label{8}, env).status, StepOutcome::Absent);
}

TEST(Step, AdditionDispatchesAndResolvesToSeven) {
  const ProviderRegistry reg = builtin_providers();
  RuntimeEnv env(reg, std::make_unique<VirtualClock>());
  LabeledExpr p = labeled("f := <+>\nt3 := <3>\nt4 := <4>\nx := (t3, t4)\ny := f x\nret y");
  StepOutcome o = step_at(p, Label{5}, env);
  ASSERT_EQ(o.status, StepOutcome::Stepped);
  ASSERT_EQ(o.records.size(), 2u);
  EXPECT_EQ(o.records[0].kind, StepKind::Dispatch);
  EXPECT_EQ(o.records[0].fn->name, "+");
  EXPECT_EQ(render_prim_expr(*o.records[0].arg), "(<3>, <4>)");
  EXPECT_EQ(o.records[1].kind, StepKind::Resolve);
  EXPECT_EQ(o.records[1].label, (Label{5, 1}));
  // Result binding then the alias to y.
  Expr e = erase_labels(p);
  const Statement& last = e.stmts.back();
  EXPECT_EQ(last.bound, "y");
  const Var& result = std::get<Alias>(last.op).source;
  const Statement& value = e.stmts[e.stmts.size() - 2];
  EXPECT_EQ(value.bound, result);
  EXPECT_EQ(value.op, Operation(Prim{int_value(7)}));
}

TEST(Step, DispatchWaitsForPrimitiveArgument) {
  const ProviderRegistry reg = builtin_providers();
  RuntimeEnv env(reg, std::make_unique<VirtualClock>());
  LabeledExpr p = labeled("f := <+>\ng := fun a: a\nx := g f\ny := f x\nret y");
  EXPECT_EQ(step_at(p, Label{4}, env).status, StepOutcome::NotSteppable);
}

TEST(Step, CoinResolvesFromTrace) {
  const ProviderRegistry reg = builtin_providers();
  for (bool side : {false, true}) {
    Trace trace;
    trace[Label{3, 1}] = value_expr(side);
    TraceEnv env(reg, trace);
    LabeledExpr p = labeled("c := <coin>\nu := ()\nr := c u\nret r");
    ASSERT_EQ(step_at(p, Label{3}, env).status, StepOutcome::Stepped);
    const Statement* task = statement_at(p, Label{3, 1});
    ASSERT_TRUE(task && std::holds_alternative<Task>(task->op));
    ASSERT_EQ(step_at(p, Label{3, 1}, env).status, StepOutcome::Stepped);
    EXPECT_TRUE(alpha_equal(erase_labels(p), core(std::string("c := <coin>\nu := ()\nv := <") + (side ? "t" : "f") +
                                                    ">\nr := v\nret r")));
  }
}

TEST(Step, TaskWithoutTraceEntryIsBlocked) {
  const ProviderRegistry reg = builtin_providers();
  TraceEnv env(reg, {});
  LabeledExpr p = labeled("c := <coin>\nu := ()\nr := c u\nret r");
  ASSERT_EQ(step_at(p, Label{3}, env).status, StepOutcome::Stepped);
  EXPECT_EQ(step_at(p, Label{3, 1}, env).status, StepOutcome::Blocked);
  EXPECT_TRUE(steppable(p, Label{3, 1}));
}

TEST(Step, TraceEntryOutsideSemanticsIsRejected) {
  const ProviderRegistry reg = builtin_providers();
  Trace trace;
  trace[Label{5, 1}] = value_expr(int_value(8));
  TraceEnv env(reg, trace);
  LabeledExpr p = labeled("f := <+>\nt3 := <3>\nt4 := <4>\nx := (t3, t4)\ny := f x\nret y");
  ASSERT_EQ(step_at(p, Label{5}, env).status, StepOutcome::Stepped);
  EXPECT_THROW(step_at(p, Label{5, 1}, env), TraceError);
}

TEST(Step, ResolutionFreshensAgainstBoundVariable) {
  const ProviderRegistry reg = builtin_providers();
  Trace trace;
  trace[Label{2, 1}] = resolve_value("r := <t>\nret r");
  TraceEnv env(reg, trace);
  LabeledExpr p = labeled("c := <coin>\nr := c c\nret r");
  ASSERT_EQ(step_at(p, Label{2}, env).status, StepOutcome::Stepped);
  ASSERT_EQ(step_at(p, Label{2, 1}, env).status, StepOutcome::Stepped);
  EXPECT_FALSE(check_well_formed({}, erase_labels(p)));
}

TEST(Steppable, ReductionExampleSet) {
  LabeledExpr p = labeled(kTwoCalls);
  EXPECT_EQ(steppable_set(p), (std::vector<Label>{{2}, {3}}));
  EXPECT_TRUE(steppable_set(labeled("ret x")).empty());
}

TEST(Steppable, DiamondClosesStructurally) {
  LabeledExpr p = labeled(kTwoCalls);
  PureEnv env;
  LabeledExpr a = p;
  LabeledExpr b = p;
  step_at(a, Label{2}, env);
  step_at(a, Label{3}, env);
  step_at(b, Label{3}, env);
  step_at(b, Label{2}, env);
  EXPECT_EQ(a, b);
  EXPECT_EQ(labels_of(a), (std::vector<Label>{{1}, {2, 1}, {2, 2}, {2, 3}, {3, 1}, {3, 2}, {3, 3}}));
}

TEST(Properties, DeterminacyAndPreservation) {
  const ProviderRegistry reg = builtin_providers();
  std::mt19937_64 rng(11);
  for (int n = 0; n < 150; ++n) {
    Expr e = random_program(rng);
    ASSERT_FALSE(check_well_formed({}, e)) << pretty(e);
    // A live run fixes every nondeterministic choice.
    RuntimeEnv live(reg, std::make_unique<VirtualClock>(), RuntimeOptions{static_cast<std::uint64_t>(n)});
    std::mt19937_64 order(n);
    RandomRun first = run_random_order(init_labels(e), live, order, 10000, false);
    ASSERT_TRUE(first.terminated);
    const Trace trace = trace_of(first.log);

    LabeledExpr p = init_labels(e);
    TraceEnv env1(reg, trace);
    TraceEnv env2(reg, trace);
    std::mt19937_64 pick(n * 7 + 1);
    for (int steps = 0; steps < 10000; ++steps) {
      std::vector<Label> ls = steppable_set(p);
      if (ls.empty()) break;
      const Label l = ls[std::uniform_int_distribution<std::size_t>(0, ls.size() - 1)(pick)];
      LabeledExpr q1 = p;
      LabeledExpr q2 = p;
      StepOutcome o1 = step_at(q1, l, env1);
      StepOutcome o2 = step_at(q2, l, env2);
      ASSERT_EQ(o1.status, o2.status);
      ASSERT_EQ(q1, q2);
      if (o1.status == StepOutcome::Blocked) break;
      ASSERT_EQ(o1.status, StepOutcome::Stepped);
      ASSERT_TRUE(label_independent(q1));
      ASSERT_FALSE(check_well_formed({}, erase_labels(q1))) << pretty_labeled(q1);
      p = std::move(q1);
    }
  }
}

TEST(Properties, TraceReplaysTheSameRun) {
  const ProviderRegistry reg = builtin_providers();
  std::mt19937_64 rng(5);
  for (int n = 0; n < 100; ++n) {
    Expr e = random_program(rng);
    RuntimeEnv live(reg, std::make_unique<VirtualClock>(), RuntimeOptions{static_cast<std::uint64_t>(n)});
    std::mt19937_64 o1(n);
    RandomRun a = run_random_order(init_labels(e), live, o1, 10000, false);
    TraceEnv env(reg, trace_of(a.log));
    std::mt19937_64 o2(n);
    RandomRun b = run_random_order(init_labels(e), env, o2, 10000, false);
    // Live sync calls resolve inside their dispatch step, so step orders
    // differ; the resulting term and choices do not.
    ASSERT_TRUE(b.terminated);
    ASSERT_EQ(a.final, b.final);
    ASSERT_EQ(trace_of(a.log), trace_of(b.log));
    ASSERT_EQ(dispatch_multiset(a.log), dispatch_multiset(b.log));
  }
}

#pragma once

// External-call runtime: provider registry, task table, clocks and the
// completion queue that connects finished calls back to the evaluator.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "opal/rewrite.hpp"

namespace opal {

// ---------------------------------------------------------------------------
// Providers

enum class ProviderKind { Sync, Async, Streaming };
const char* provider_kind_name(ProviderKind k);

struct Chunk {
  /// Offset from dispatch.
  std::int64_t at_ms = 0;
  PrimValue payload;
  bool operator==(const Chunk&) const = default;
};

struct ProviderReply {
  enum Kind { Value, Stream, Failure } kind = Value;
  Expr value;
  /// Completion offset from dispatch for `Value` replies of async providers.
  std::int64_t latency_ms = 0;
  std::vector<Chunk> chunks;
  /// Stream completion offset (when the list closes).
  std::int64_t done_ms = 0;
  std::string error;

  static ProviderReply of(Expr e, std::int64_t latency_ms = 0);
  static ProviderReply of(PrimValue v, std::int64_t latency_ms = 0);
  static ProviderReply stream(std::vector<Chunk> chunks, std::int64_t done_ms);
  static ProviderReply failure(std::string why);
};

struct CallContext {
  std::mt19937_64& rng;
  std::int64_t now_ms = 0;
};

struct ProviderSpec {
  std::string name;
  ProviderKind kind = ProviderKind::Sync;
  std::function<ProviderReply(const PrimExpr& arg, CallContext& ctx)> behavior;
  /// Membership test for trace-driven resolution. Empty means "trust the
  /// trace"; deterministic providers default to comparing with `behavior`.
  std::function<bool(const PrimExpr& arg, const Expr& result)> declared_semantics;
  /// Text written to the output channel when the call is dispatched.
  std::function<std::string(const PrimExpr& arg)> output;
  /// Whether record/replay captures this provider.
  bool recordable = false;
  /// Deterministic in its argument: the trace check may recompute it.
  bool deterministic = true;
};

class ProviderRegistry {
 public:
  void add(ProviderSpec spec);
  const ProviderSpec* find(const std::string& name) const;
  bool contains(const std::string& name) const { return find(name) != nullptr; }
  std::vector<std::string> names() const;

 private:
  std::map<std::string, ProviderSpec> specs_;
};

/// Name of the internal provider that continues a streamed list.
inline constexpr const char* kStreamNext = "stream.next";

/// Expression `x := <v>; ret x`.
Expr value_expr(const PrimValue& v);
/// The distinguished failure result.
Expr error_expr(const std::string& why);
bool is_error_expr(const Expr& e);

/// Fresh sequencing handle derived from the one passed in and the call.
Handle next_handle(const Handle& h, const std::string& fn, const PrimExpr& arg);
std::uint64_t stable_hash(const std::string& s);

// ---------------------------------------------------------------------------
// Output

struct OutputChannel {
  std::string bytes;
  std::optional<std::int64_t> first_ms;
  std::vector<std::pair<std::int64_t, std::string>> writes;

  void write(std::int64_t at_ms, const std::string& text);
};

// ---------------------------------------------------------------------------
// Completion plumbing

/// Multi-producer, single-consumer queue of completed task ids.
class CompletionQueue {
 public:
  void push(TaskId id);
  std::vector<TaskId> drain();
  /// Blocks until at least one id is queued, then drains.
  std::vector<TaskId> wait_drain();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<TaskId> items_;
};

class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() const = 0;
  /// Arranges for `id` to be delivered to `queue` at `at_ms`.
  virtual void schedule(std::int64_t at_ms, TaskId id) = 0;
  /// Blocks or jumps ahead until some scheduled id is delivered; returns the
  /// delivered ids in delivery order (empty if nothing is scheduled).
  virtual std::vector<TaskId> wait_next() = 0;
  /// Ids already delivered, without blocking.
  virtual std::vector<TaskId> poll() = 0;
};

/// Simulated time: advances only when the evaluator waits, firing every
/// timer due at the next instant, FIFO among equal deadlines.
class VirtualClock : public Clock {
 public:
  std::int64_t now_ms() const override { return now_; }
  void schedule(std::int64_t at_ms, TaskId id) override;
  std::vector<TaskId> wait_next() override;
  std::vector<TaskId> poll() override;
  std::size_t pending() const { return timers_.size(); }

 private:
  struct Timer {
    std::int64_t at;
    std::uint64_t seq;
    TaskId id;
    bool operator>(const Timer& o) const { return at != o.at ? at > o.at : seq > o.seq; }
  };
  std::int64_t now_ = 0;
  std::uint64_t seq_ = 0;
  std::priority_queue<Timer, std::vector<Timer>, std::greater<Timer>> timers_;
  std::vector<TaskId> due_;
};

/// Wall-clock time. A timer thread feeds the completion queue; `scale`
/// shrinks simulated latencies (0.01 runs a 4 s call in 40 ms).
class RealClock : public Clock {
 public:
  explicit RealClock(double scale = 1.0);
  ~RealClock() override;
  std::int64_t now_ms() const override;
  void schedule(std::int64_t at_ms, TaskId id) override;
  std::vector<TaskId> wait_next() override;
  std::vector<TaskId> poll() override;

 private:
  void loop();
  double scale_;
  std::chrono::steady_clock::time_point start_;
  CompletionQueue queue_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::multimap<std::int64_t, TaskId> timers_;
  std::size_t in_flight_ = 0;
  bool stop_ = false;
  std::thread worker_;
};

// ---------------------------------------------------------------------------
// Live environment

/// Hook for record/replay: may supply a reply instead of running the
/// provider, and observes every reply obtained.
class CallInterceptor {
 public:
  virtual ~CallInterceptor() = default;
  virtual std::optional<ProviderReply> lookup(const std::string& fn, const std::string& arg, std::uint64_t occ) = 0;
  virtual void observe(const std::string& fn, const std::string& arg, std::uint64_t occ, const ProviderKind kind,
                       const ProviderReply& reply) = 0;
};

struct TaskState {
  TaskId id = 0;
  std::string fn;
  PrimExpr arg;
  std::int64_t dispatched_at = 0;
  std::int64_t due_at = 0;
  enum State { Pending, Completed, Consumed } state = Pending;
  Expr result;
  bool failed = false;
};

struct RuntimeOptions {
  std::uint64_t seed = 0;
  CallInterceptor* interceptor = nullptr;
};

class RuntimeEnv : public ExternalEnv {
 public:
  RuntimeEnv(const ProviderRegistry& registry, std::unique_ptr<Clock> clock, RuntimeOptions opts = {});

  Dispatched dispatch(const Label& task_label, const FnRef& fn, const PrimExpr& arg) override;
  bool ready(const Label& task_label, const Task& task) override;
  Expr take_result(const Label& task_label, const Task& task) override;
  std::int64_t now_ms() const override { return clock_->now_ms(); }
  std::size_t outstanding() const override { return pending_; }
  bool wait() override;
  void poll() override;
  std::optional<std::int64_t> first_output_ms() const override { return output_.first_ms; }

  const OutputChannel& output() const { return output_; }
  const std::map<TaskId, TaskState>& tasks() const { return tasks_; }
  /// Task ids in the order their results were consumed.
  const std::vector<TaskId>& completion_log() const { return completion_log_; }
  const std::vector<std::string>& failures() const { return failures_; }
  std::uint64_t dispatch_count() const { return dispatches_; }

 private:
  struct StreamState {
    std::vector<Chunk> chunks;
    std::int64_t done_ms = 0;
    std::int64_t started_at = 0;
  };

  ProviderReply obtain(const ProviderSpec& spec, const PrimExpr& arg);
  Dispatched start_task(const std::string& fn, const PrimExpr& arg, Expr result, std::int64_t due);
  Dispatched continue_stream(const PrimExpr& arg);
  Expr stream_piece(std::int64_t stream_id, std::size_t k) const;
  std::int64_t stream_due(const StreamState& s, std::size_t k) const;
  void deliver(const std::vector<TaskId>& ids);

  const ProviderRegistry& registry_;
  std::unique_ptr<Clock> clock_;
  RuntimeOptions opts_;
  std::mt19937_64 rng_;
  OutputChannel output_;
  std::map<TaskId, TaskState> tasks_;
  std::map<std::int64_t, StreamState> streams_;
  std::map<std::pair<std::string, std::string>, std::uint64_t> occurrences_;
  std::vector<TaskId> completion_log_;
  std::vector<std::string> failures_;
  TaskId next_id_ = 1;
  std::size_t pending_ = 0;
  std::uint64_t dispatches_ = 0;
};

// ---------------------------------------------------------------------------
// Trace-driven environment

/// Resolves each task from a trace keyed by task label. Output-producing
/// providers still write to the channel when dispatched; results are checked
/// against the provider's declared semantics.
class TraceEnv : public ExternalEnv {
 public:
  TraceEnv(const ProviderRegistry& registry, Trace trace, bool check_membership = true);

  Dispatched dispatch(const Label& task_label, const FnRef& fn, const PrimExpr& arg) override;
  bool ready(const Label& task_label, const Task& task) override;
  Expr take_result(const Label& task_label, const Task& task) override;
  std::optional<std::int64_t> first_output_ms() const override { return output_.first_ms; }

  const OutputChannel& output() const { return output_; }
  std::uint64_t dispatch_count() const { return dispatches_; }

 private:
  const ProviderRegistry& registry_;
  Trace trace_;
  bool check_;
  OutputChannel output_;
  std::set<Label> consumed_;
  std::uint64_t dispatches_ = 0;
  std::mt19937_64 scratch_rng_{0};
};

}  // namespace opal

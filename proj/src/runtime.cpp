#include "opal/runtime.hpp"

#include <algorithm>
#include <chrono>

#include "opal/church.hpp"
#include "opal/printer.hpp"

namespace opal {

const char* provider_kind_name(ProviderKind k) {
  switch (k) {
    case ProviderKind::Sync: return "sync";
    case ProviderKind::Async: return "async";
    case ProviderKind::Streaming: return "stream";
  }
  return "?";
}

ProviderReply ProviderReply::of(Expr e, std::int64_t latency_ms) {
  ProviderReply r;
  r.kind = Value;
  r.value = std::move(e);
  r.latency_ms = latency_ms;
  return r;
}

ProviderReply ProviderReply::of(PrimValue v, std::int64_t latency_ms) { return of(value_expr(v), latency_ms); }

ProviderReply ProviderReply::stream(std::vector<Chunk> chunks, std::int64_t done_ms) {
  ProviderReply r;
  r.kind = Stream;
  r.chunks = std::move(chunks);
  r.done_ms = done_ms;
  return r;
}

ProviderReply ProviderReply::failure(std::string why) {
  ProviderReply r;
  r.kind = Failure;
  r.error = std::move(why);
  return r;
}

void ProviderRegistry::add(ProviderSpec spec) {
  std::string name = spec.name;
  specs_[name] = std::move(spec);
}

const ProviderSpec* ProviderRegistry::find(const std::string& name) const {
  auto it = specs_.find(name);
  return it == specs_.end() ? nullptr : &it->second;
}

std::vector<std::string> ProviderRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [n, _] : specs_) out.push_back(n);
  return out;
}

Expr value_expr(const PrimValue& v) { return Expr{{Statement{"x", Prim{v}}}, "x"}; }

std::uint64_t stable_hash(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Expr error_expr(const std::string& why) {
  return value_expr(Handle{"error", static_cast<std::int64_t>(stable_hash(why) % 1000000007ULL) + 1});
}

bool is_error_expr(const Expr& e) {
  if (e.stmts.size() != 1 || e.stmts[0].bound != e.ret) return false;
  const auto* p = std::get_if<Prim>(&e.stmts[0].op);
  if (!p) return false;
  const auto* h = std::get_if<Handle>(&p->value);
  return h && h->name == "error";
}

Handle next_handle(const Handle& h, const std::string& fn, const PrimExpr& arg) {
  std::string key = std::to_string(h.id) + "|" + fn + "|" + render_prim_expr(arg);
  return Handle{h.name, static_cast<std::int64_t>(stable_hash(key) % 1000000007ULL) + 1};
}

void OutputChannel::write(std::int64_t at_ms, const std::string& text) {
  if (!first_ms) first_ms = at_ms;
  bytes += text;
  writes.emplace_back(at_ms, text);
}

// ---------------------------------------------------------------------------

void CompletionQueue::push(TaskId id) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    items_.push_back(id);
  }
  cv_.notify_one();
}

std::vector<TaskId> CompletionQueue::drain() {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<TaskId> out;
  out.swap(items_);
  return out;
}

std::vector<TaskId> CompletionQueue::wait_drain() {
  std::unique_lock<std::mutex> lock(mu_);
  cv_.wait(lock, [&] { return !items_.empty(); });
  std::vector<TaskId> out;
  out.swap(items_);
  return out;
}

void VirtualClock::schedule(std::int64_t at_ms, TaskId id) {
  timers_.push(Timer{std::max(at_ms, now_), seq_++, id});
}

std::vector<TaskId> VirtualClock::wait_next() {
  if (!due_.empty()) return poll();
  std::vector<TaskId> out;
  if (timers_.empty()) return out;
  const std::int64_t t = timers_.top().at;
  now_ = std::max(now_, t);
  while (!timers_.empty() && timers_.top().at == t) {
    out.push_back(timers_.top().id);
    timers_.pop();
  }
  return out;
}

std::vector<TaskId> VirtualClock::poll() {
  std::vector<TaskId> out;
  out.swap(due_);
  return out;
}

RealClock::RealClock(double scale)
    : scale_(scale), start_(std::chrono::steady_clock::now()), worker_([this] { loop(); }) {}

RealClock::~RealClock() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  worker_.join();
}

std::int64_t RealClock::now_ms() const {
  auto elapsed = std::chrono::steady_clock::now() - start_;
  double ms = std::chrono::duration<double, std::milli>(elapsed).count();
  return static_cast<std::int64_t>(ms / scale_);
}

void RealClock::schedule(std::int64_t at_ms, TaskId id) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    timers_.emplace(at_ms, id);
    ++in_flight_;
  }
  cv_.notify_all();
}

void RealClock::loop() {
  std::unique_lock<std::mutex> lock(mu_);
  while (!stop_) {
    if (timers_.empty()) {
      cv_.wait(lock);
      continue;
    }
    auto first = timers_.begin();
    auto deadline = start_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                 std::chrono::duration<double, std::milli>(static_cast<double>(first->first) * scale_));
    if (std::chrono::steady_clock::now() < deadline) {
      cv_.wait_until(lock, deadline);
      continue;
    }
    TaskId id = first->second;
    timers_.erase(first);
    lock.unlock();
    queue_.push(id);
    lock.lock();
  }
}

std::vector<TaskId> RealClock::wait_next() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (in_flight_ == 0) return {};
  }
  std::vector<TaskId> out = queue_.wait_drain();
  std::lock_guard<std::mutex> lock(mu_);
  in_flight_ -= out.size();
  return out;
}

std::vector<TaskId> RealClock::poll() {
  std::vector<TaskId> out = queue_.drain();
  std::lock_guard<std::mutex> lock(mu_);
  in_flight_ -= out.size();
  return out;
}

// ---------------------------------------------------------------------------

RuntimeEnv::RuntimeEnv(const ProviderRegistry& registry, std::unique_ptr<Clock> clock, RuntimeOptions opts)
    : registry_(registry), clock_(std::move(clock)), opts_(opts), rng_(opts.seed) {}

ProviderReply RuntimeEnv::obtain(const ProviderSpec& spec, const PrimExpr& arg) {
  const std::string canon = render_prim_expr(arg);
  const std::uint64_t occ = occurrences_[{spec.name, canon}]++;
  if (opts_.interceptor && spec.recordable) {
    if (auto r = opts_.interceptor->lookup(spec.name, canon, occ)) return *r;
  }
  CallContext ctx{rng_, clock_->now_ms()};
  ProviderReply reply = spec.behavior(arg, ctx);
  if (opts_.interceptor && spec.recordable) opts_.interceptor->observe(spec.name, canon, occ, spec.kind, reply);
  return reply;
}

ExternalEnv::Dispatched RuntimeEnv::start_task(const std::string& fn, const PrimExpr& arg, Expr result,
                                               std::int64_t due) {
  const TaskId id = next_id_++;
  TaskState t;
  t.id = id;
  t.fn = fn;
  t.arg = arg;
  t.dispatched_at = clock_->now_ms();
  t.due_at = std::max(due, t.dispatched_at);
  t.result = std::move(result);
  tasks_.emplace(id, std::move(t));
  ++pending_;
  clock_->schedule(due, id);
  return Dispatched{id, std::nullopt};
}

std::int64_t RuntimeEnv::stream_due(const StreamState& s, std::size_t k) const {
  if (k < s.chunks.size()) return s.started_at + s.chunks[k].at_ms;
  return s.started_at + s.done_ms;
}

Expr RuntimeEnv::stream_piece(std::int64_t stream_id, std::size_t k) const {
  const StreamState& s = streams_.at(stream_id);
  std::vector<ListPiece> pieces;
  if (k < s.chunks.size()) {
    // Chunks sharing an arrival time travel together.
    std::size_t m = k;
    while (m < s.chunks.size() && s.chunks[m].at_ms == s.chunks[k].at_ms) {
      pieces.push_back(ListPiece::element(s.chunks[m].payload));
      ++m;
    }
    const bool closes_now = m == s.chunks.size() && s.done_ms <= s.chunks[k].at_ms;
    if (!closes_now) {
      pieces.push_back(ListPiece::hole(
          kStreamNext, PrimExpr::tuple({PrimExpr::of(Handle{"stream", stream_id}),
                                        PrimExpr::of(int_value(static_cast<std::int64_t>(m)))})));
    }
  }
  return make_streaming_result(pieces);
}

ExternalEnv::Dispatched RuntimeEnv::continue_stream(const PrimExpr& arg) {
  const Handle* h = nullptr;
  const std::int64_t* k = nullptr;
  if (arg.is_tuple && arg.items.size() == 2 && !arg.items[0].is_tuple && !arg.items[1].is_tuple) {
    h = std::get_if<Handle>(&arg.items[0].value);
    k = std::get_if<std::int64_t>(&arg.items[1].value);
  }
  if (!h || !k || h->name != "stream" || !streams_.count(h->id) || *k < 0) {
    failures_.push_back("bad stream continuation " + render_prim_expr(arg));
    return Dispatched{0, error_expr(failures_.back())};
  }
  const StreamState& s = streams_.at(h->id);
  const std::size_t idx = static_cast<std::size_t>(*k);
  return start_task(kStreamNext, arg, stream_piece(h->id, idx), stream_due(s, idx));
}

ExternalEnv::Dispatched RuntimeEnv::dispatch(const Label&, const FnRef& fn, const PrimExpr& arg) {
  ++dispatches_;
  if (fn.name == kStreamNext) return continue_stream(arg);
  const ProviderSpec* spec = registry_.find(fn.name);
  if (!spec) {
    failures_.push_back("unknown external function '" + fn.name + "'");
    return Dispatched{0, error_expr(failures_.back())};
  }
  if (spec->output) output_.write(clock_->now_ms(), spec->output(arg));
  ProviderReply reply = obtain(*spec, arg);
  if (reply.kind == ProviderReply::Failure) {
    failures_.push_back(fn.name + " " + render_prim_expr(arg) + ": " + reply.error);
    return Dispatched{0, error_expr(reply.error)};
  }
  const std::int64_t now = clock_->now_ms();
  if (reply.kind == ProviderReply::Stream) {
    const std::string canon = render_prim_expr(arg);
    const std::uint64_t occ = occurrences_[{spec->name, canon}] - 1;
    auto sid = static_cast<std::int64_t>(stable_hash(fn.name + "|" + canon + "|" + std::to_string(occ)) %
                                         1000000007ULL) + 1;
    while (streams_.count(sid)) ++sid;
    StreamState st{reply.chunks, reply.done_ms, now};
    streams_.emplace(sid, st);
    const std::int64_t due = stream_due(st, 0);
    return start_task(fn.name, arg, stream_piece(sid, 0), due);
  }
  if (spec->kind == ProviderKind::Sync) return Dispatched{0, std::move(reply.value)};
  return start_task(fn.name, arg, std::move(reply.value), now + reply.latency_ms);
}

bool RuntimeEnv::ready(const Label&, const Task& task) {
  auto it = tasks_.find(task.handle);
  return it != tasks_.end() && it->second.state == TaskState::Completed;
}

Expr RuntimeEnv::take_result(const Label&, const Task& task) {
  TaskState& t = tasks_.at(task.handle);
  t.state = TaskState::Consumed;
  completion_log_.push_back(t.id);
  return t.result;
}

void RuntimeEnv::deliver(const std::vector<TaskId>& ids) {
  for (TaskId id : ids) {
    auto it = tasks_.find(id);
    if (it == tasks_.end() || it->second.state != TaskState::Pending) continue;
    it->second.state = TaskState::Completed;
    --pending_;
  }
}

bool RuntimeEnv::wait() {
  if (pending_ == 0) return false;
  std::vector<TaskId> ids = clock_->wait_next();
  deliver(ids);
  return !ids.empty();
}

void RuntimeEnv::poll() { deliver(clock_->poll()); }

// ---------------------------------------------------------------------------

TraceEnv::TraceEnv(const ProviderRegistry& registry, Trace trace, bool check_membership)
    : registry_(registry), trace_(std::move(trace)), check_(check_membership) {}

ExternalEnv::Dispatched TraceEnv::dispatch(const Label&, const FnRef& fn, const PrimExpr& arg) {
  ++dispatches_;
  if (const ProviderSpec* spec = registry_.find(fn.name); spec && spec->output) {
    output_.write(0, spec->output(arg));
  }
  return Dispatched{};
}

bool TraceEnv::ready(const Label& task_label, const Task&) {
  return trace_.count(task_label) && !consumed_.count(task_label);
}

Expr TraceEnv::take_result(const Label& task_label, const Task& task) {
  const Expr& r = trace_.at(task_label);
  consumed_.insert(task_label);
  if (!check_) return r;
  const ProviderSpec* spec = registry_.find(task.fn.name);
  if (!spec) return r;
  bool ok = true;
  if (spec->declared_semantics) {
    ok = spec->declared_semantics(task.arg, r);
  } else if (spec->deterministic && spec->kind != ProviderKind::Streaming) {
    CallContext ctx{scratch_rng_, 0};
    ProviderReply expected = spec->behavior(task.arg, ctx);
    Expr e = expected.kind == ProviderReply::Failure ? error_expr(expected.error) : expected.value;
    ok = alpha_equal(e, r);
  }
  if (!ok) {
    throw TraceError("trace entry at " + task_label.to_string() + " is not a possible result of " +
                     task.fn.name + " " + render_prim_expr(task.arg));
  }
  return r;
}

}  // namespace opal

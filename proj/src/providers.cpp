#include "opal/providers.hpp"

#include <sstream>

#include "opal/church.hpp"
#include "opal/printer.hpp"

namespace opal {

TimingTable::TimingTable() {
  entries["llm_sim"] = {4000, 0, 0, 0};
  entries["llm_stream_sim"] = {0, 200, 100, 0};
  entries["cities_sim"] = {0, 400, 400, 4000};
  entries["excursions_sim"] = {4000, 0, 0, 0};
  entries["verify_sim"] = {1000, 0, 0, 0};
  entries["score_sim"] = {1000, 0, 0, 0};
}

const ProviderTiming& TimingTable::at(const std::string& fn) const {
  static const ProviderTiming zero{};
  auto it = entries.find(fn);
  return it == entries.end() ? zero : it->second;
}

namespace {

void build(Expr& e, const PrimExpr& c, int& n, Var& out) {
  out = "c" + std::to_string(++n);
  if (!c.is_tuple) {
    e.stmts.push_back(prim(out, c.value));
    return;
  }
  std::vector<Var> items(c.items.size());
  for (std::size_t i = 0; i < c.items.size(); ++i) build(e, c.items[i], n, items[i]);
  e.stmts.push_back(tuple(out, std::move(items)));
}

const PrimValue* leaf(const PrimExpr& c) { return c.is_tuple ? nullptr : &c.value; }

template <class T>
const T* leaf_as(const PrimExpr& c) {
  const PrimValue* v = leaf(c);
  return v ? std::get_if<T>(v) : nullptr;
}

/// Arguments of an n-ary call; a unary call takes its argument bare.
std::vector<PrimExpr> args_of(const PrimExpr& arg, std::size_t n) {
  if (n == 1) return {arg};
  if (!arg.is_tuple || arg.items.size() != n) return {};
  return arg.items;
}

PrimExpr pv(PrimValue v) { return PrimExpr::of(std::move(v)); }

ProviderReply pair_reply(PrimValue a, PrimValue b) { return ProviderReply::of(expr_of(PrimExpr::tuple({pv(a), pv(b)}))); }

std::string text_of(const PrimExpr& c) { return render_output(c); }

std::vector<Chunk> spaced_chunks(const std::vector<std::string>& items, const ProviderTiming& t) {
  std::vector<Chunk> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    out.push_back(Chunk{t.first_chunk_ms + static_cast<std::int64_t>(i) * t.chunk_spacing_ms, items[i]});
  }
  return out;
}

std::int64_t stream_done(const std::vector<Chunk>& chunks, const ProviderTiming& t) {
  std::int64_t last = chunks.empty() ? t.first_chunk_ms : chunks.back().at_ms;
  return std::max(last, t.done_ms);
}

std::vector<std::string> words_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(out.empty() ? w : " " + w);
  return out;
}

ProviderSpec sync(std::string name, std::function<ProviderReply(const PrimExpr&, CallContext&)> f) {
  ProviderSpec s;
  s.name = std::move(name);
  s.kind = ProviderKind::Sync;
  s.behavior = std::move(f);
  return s;
}

ProviderSpec arith(std::string name, std::function<PrimValue(std::int64_t, std::int64_t)> op) {
  const std::string label = name;
  return sync(std::move(name), [op, label](const PrimExpr& arg, CallContext&) {
    auto a = args_of(arg, 2);
    const std::int64_t* x = a.empty() ? nullptr : leaf_as<std::int64_t>(a[0]);
    const std::int64_t* y = a.empty() ? nullptr : leaf_as<std::int64_t>(a[1]);
    if (!x || !y) return ProviderReply::failure(label + " expects two integers");
    return ProviderReply::of(op(*x, *y));
  });
}

}  // namespace

Expr expr_of(const PrimExpr& c) {
  Expr e;
  int n = 0;
  build(e, c, n, e.ret);
  return e;
}

std::vector<std::string> simulated_cities(const std::string& region) {
  if (region == "Oceania") {
    return {"Honolulu", "Jakarta", "Sydney", "Auckland", "Suva",
            "Port Moresby", "Nouméa", "Apia", "Wellington", "Brisbane"};
  }
  std::vector<std::string> out;
  for (int i = 1; i <= 10; ++i) out.push_back(region + " City " + std::to_string(i));
  return out;
}

std::string simulated_excursion(const std::string& city) { return "A day trip around " + city; }

std::string simulated_completion(const std::string& prompt) {
  static const char* const kWords[] = {"the", "answer", "depends", "on", "careful", "reading", "of",
                                       "sources", "and", "evidence", "found", "so", "far"};
  const std::uint64_t h = stable_hash(prompt);
  const std::size_t n = 4 + h % 5;
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += kWords[(h >> (i * 4)) % 13];
  }
  return out;
}

ProviderRegistry builtin_providers(const TimingTable& timing) {
  ProviderRegistry reg;

  {
    ProviderSpec p = sync("print", [](const PrimExpr& arg, CallContext&) {
      auto a = args_of(arg, 2);
      const Handle* h = a.empty() ? nullptr : leaf_as<Handle>(a[0]);
      if (!h) return ProviderReply::failure("print expects (handle, value)");
      return ProviderReply::of(next_handle(*h, "print", arg));
    });
    p.output = [](const PrimExpr& arg) {
      auto a = args_of(arg, 2);
      return a.empty() ? std::string() : text_of(a[1]) + "\n";
    };
    reg.add(std::move(p));
  }

  // In-memory file simulators. Results are pure in the arguments; ordering
  // comes only from the handles threaded through them.
  reg.add(sync("open", [](const PrimExpr& arg, CallContext&) {
    auto a = args_of(arg, 2);
    const Handle* t = a.empty() ? nullptr : leaf_as<Handle>(a[0]);
    const std::string* path = a.empty() ? nullptr : leaf_as<std::string>(a[1]);
    if (!t || !path) return ProviderReply::failure("open expects (handle, path)");
    return pair_reply(next_handle(*t, "open", arg),
                      Handle{"fd", static_cast<std::int64_t>(stable_hash(*path) % 1000000007ULL) + 1});
  }));
  reg.add(sync("read", [](const PrimExpr& arg, CallContext&) {
    auto a = args_of(arg, 2);
    const Handle* t = a.empty() ? nullptr : leaf_as<Handle>(a[0]);
    const Handle* fd = a.empty() ? nullptr : leaf_as<Handle>(a[1]);
    if (!t || !fd) return ProviderReply::failure("read expects (handle, fd)");
    return pair_reply(next_handle(*t, "read", arg), "contents of fd " + std::to_string(fd->id));
  }));
  reg.add(sync("write", [](const PrimExpr& arg, CallContext&) {
    auto a = args_of(arg, 3);
    const Handle* t = a.empty() ? nullptr : leaf_as<Handle>(a[0]);
    const Handle* fd = a.empty() ? nullptr : leaf_as<Handle>(a[1]);
    if (!t || !fd) return ProviderReply::failure("write expects (handle, fd, data)");
    return ProviderReply::of(next_handle(*t, "write", arg));
  }));
  reg.add(sync("fork", [](const PrimExpr& arg, CallContext&) {
    const Handle* t = leaf_as<Handle>(arg);
    if (!t) return ProviderReply::failure("fork expects a handle");
    Handle child = next_handle(*t, "fork.child", arg);
    return pair_reply(next_handle(*t, "fork", arg), child);
  }));
  reg.add(sync("join", [](const PrimExpr& arg, CallContext&) {
    auto a = args_of(arg, 2);
    const Handle* t = a.empty() ? nullptr : leaf_as<Handle>(a[0]);
    const Handle* u = a.empty() ? nullptr : leaf_as<Handle>(a[1]);
    if (!t || !u) return ProviderReply::failure("join expects two handles");
    return ProviderReply::of(next_handle(*t, "join", arg));
  }));

  for (const char* n : {"+", "add"}) reg.add(arith(n, [](std::int64_t x, std::int64_t y) -> PrimValue { return x + y; }));
  for (const char* n : {"-", "sub"}) reg.add(arith(n, [](std::int64_t x, std::int64_t y) -> PrimValue { return x - y; }));
  for (const char* n : {"*", "mul"}) reg.add(arith(n, [](std::int64_t x, std::int64_t y) -> PrimValue { return x * y; }));
  reg.add(arith("lt", [](std::int64_t x, std::int64_t y) -> PrimValue { return x < y; }));
  reg.add(sync("eq", [](const PrimExpr& arg, CallContext&) {
    auto a = args_of(arg, 2);
    if (a.empty()) return ProviderReply::failure("eq expects two values");
    return ProviderReply::of(PrimValue(a[0] == a[1]));
  }));
  reg.add(sync("strcat", [](const PrimExpr& arg, CallContext&) {
    auto a = args_of(arg, 2);
    if (a.empty()) return ProviderReply::failure("strcat expects two values");
    return ProviderReply::of(PrimValue(text_of(a[0]) + text_of(a[1])));
  }));
  reg.add(sync("cbool", [](const PrimExpr& arg, CallContext&) {
    const bool* b = leaf_as<bool>(arg);
    if (!b) return ProviderReply::failure("cbool expects a boolean");
    return ProviderReply::of(church_bool(*b));
  }));

  {
    ProviderSpec p = sync("coin", [](const PrimExpr&, CallContext& ctx) {
      return ProviderReply::of(PrimValue(static_cast<bool>(ctx.rng() & 1)));
    });
    p.deterministic = false;
    p.recordable = true;
    p.declared_semantics = [](const PrimExpr&, const Expr& r) {
      return alpha_equal(r, value_expr(true)) || alpha_equal(r, value_expr(false));
    };
    reg.add(std::move(p));
  }

  {
    ProviderSpec p;
    p.name = "delay";
    p.kind = ProviderKind::Async;
    p.recordable = true;
    p.behavior = [](const PrimExpr& arg, CallContext&) {
      auto a = args_of(arg, 2);
      const std::int64_t* ms = a.empty() ? nullptr : leaf_as<std::int64_t>(a[0]);
      if (!ms || *ms < 0) return ProviderReply::failure("delay expects (milliseconds, value)");
      return ProviderReply::of(expr_of(a[1]), *ms);
    };
    reg.add(std::move(p));
  }

  auto async_text = [&](const std::string& name, std::function<std::string(const std::string&)> f) {
    ProviderSpec p;
    p.name = name;
    p.kind = ProviderKind::Async;
    p.recordable = true;
    const std::int64_t latency = timing.at(name).latency_ms;
    p.behavior = [f, latency](const PrimExpr& arg, CallContext&) {
      return ProviderReply::of(PrimValue(f(text_of(arg))), latency);
    };
    reg.add(std::move(p));
  };
  async_text("llm_sim", simulated_completion);
  async_text("excursions_sim", simulated_excursion);

  auto streaming = [&](const std::string& name, std::function<std::vector<std::string>(const std::string&)> f) {
    ProviderSpec p;
    p.name = name;
    p.kind = ProviderKind::Streaming;
    p.recordable = true;
    const ProviderTiming t = timing.at(name);
    p.behavior = [f, t](const PrimExpr& arg, CallContext&) {
      auto chunks = spaced_chunks(f(text_of(arg)), t);
      const std::int64_t done = stream_done(chunks, t);
      return ProviderReply::stream(std::move(chunks), done);
    };
    reg.add(std::move(p));
  };
  streaming("cities_sim", simulated_cities);
  streaming("llm_stream_sim", [](const std::string& prompt) { return words_of(simulated_completion(prompt)); });

  {
    // Passes once the round number reaches 2; returns a Church boolean.
    ProviderSpec p;
    p.name = "verify_sim";
    p.kind = ProviderKind::Async;
    p.recordable = true;
    const std::int64_t latency = timing.at("verify_sim").latency_ms;
    p.behavior = [latency](const PrimExpr& arg, CallContext&) {
      auto a = args_of(arg, 2);
      const std::int64_t* round = a.empty() ? nullptr : leaf_as<std::int64_t>(a[1]);
      if (!round) return ProviderReply::failure("verify_sim expects (claim, round)");
      return ProviderReply::of(church_bool(*round >= 2), latency);
    };
    reg.add(std::move(p));
  }
  {
    ProviderSpec p;
    p.name = "score_sim";
    p.kind = ProviderKind::Async;
    p.recordable = true;
    const std::int64_t latency = timing.at("score_sim").latency_ms;
    p.behavior = [latency](const PrimExpr& arg, CallContext&) {
      return ProviderReply::of(PrimValue(static_cast<std::int64_t>(stable_hash(text_of(arg)) % 100)), latency);
    };
    reg.add(std::move(p));
  }

  return reg;
}

}  // namespace opal

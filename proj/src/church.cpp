#include "opal/church.hpp"

#include <algorithm>
#include <map>
#include <memory>

#include "opal/assets.hpp"

namespace opal {

namespace {

/// Appends statements building `arg` and returns the variable holding it.
Var build_prim_expr(std::vector<Statement>& out, const PrimExpr& arg, const std::string& base, int& counter) {
  Var v = base + "_" + std::to_string(++counter);
  if (!arg.is_tuple) {
    out.push_back(prim(v, arg.value));
    return v;
  }
  std::vector<Var> items;
  for (const auto& item : arg.items) items.push_back(build_prim_expr(out, item, base, counter));
  out.push_back(tuple(v, std::move(items)));
  return v;
}

}  // namespace

Expr make_streaming_result(const std::vector<ListPiece>& pieces) {
  Expr top;
  std::vector<Var> holes;
  int counter = 0;
  for (const auto& p : pieces) {
    if (!p.is_hole) continue;
    const std::string k = std::to_string(holes.size() + 1);
    Var fn = "hf" + k;
    top.stmts.push_back(prim(fn, FnRef{p.fn}));
    Var a = build_prim_expr(top.stmts, p.arg, "ha" + k, counter);
    Var h = "hole" + k;
    top.stmts.push_back(call(h, fn, a));
    holes.push_back(h);
  }

  Expr body;
  body.stmts.push_back(proj("state", 1, "args"));
  body.stmts.push_back(proj("append", 2, "args"));
  Var cur = "state";
  std::size_t next_hole = 0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const std::string k = std::to_string(i + 1);
    Var t = "t" + k;
    Var s = "s" + k;
    if (pieces[i].is_hole) {
      body.stmts.push_back(tuple(t, {cur, "append"}));
      body.stmts.push_back(call(s, holes[next_hole++], t));
    } else {
      Var e = "e" + k;
      body.stmts.push_back(prim(e, pieces[i].value));
      body.stmts.push_back(tuple(t, {cur, e}));
      body.stmts.push_back(call(s, "append", t));
    }
    cur = s;
  }
  body.ret = cur;
  top.stmts.push_back(fun("list", "args", std::move(body)));
  top.ret = "list";
  return top;
}

Expr encode_list(const std::vector<PrimValue>& values) {
  std::vector<ListPiece> pieces;
  pieces.reserve(values.size());
  for (const auto& v : values) pieces.push_back(ListPiece::element(v));
  return make_streaming_result(pieces);
}

std::vector<std::string> utf8_chars(const std::string& s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t n = 1;
    if (c >= 0xF0) n = 4;
    else if (c >= 0xE0) n = 3;
    else if (c >= 0xC0) n = 2;
    n = std::min(n, s.size() - i);
    out.push_back(s.substr(i, n));
    i += n;
  }
  return out;
}

Expr encode_string(const std::string& s) {
  std::vector<PrimValue> values;
  for (auto& c : utf8_chars(s)) values.emplace_back(std::move(c));
  return encode_list(values);
}

// ---------------------------------------------------------------------------
// Symbolic reading of list and boolean shapes

namespace {

struct Sym;
using SymEnv = std::map<Var, std::shared_ptr<const Sym>>;

struct Sym {
  enum Kind { Opaque, Prim, Tuple, Closure, State, Append, Marker, Called } kind = Opaque;
  PrimValue prim;
  std::vector<std::shared_ptr<const Sym>> items;
  const Fun* fn = nullptr;
  std::shared_ptr<const SymEnv> env;
  int id = 0;
};
using SymPtr = std::shared_ptr<const Sym>;

SymPtr make(Sym::Kind k, int id = 0) {
  auto s = std::make_shared<Sym>();
  s->kind = k;
  s->id = id;
  return s;
}

struct Failed {};

/// Abstract interpreter: calls to closures are inlined, calls to unknown
/// functions on `(state, append)` count as holes, and `append` records.
class Reader {
 public:
  std::vector<PrimValue> elements;
  std::size_t holes = 0;
  std::size_t fuel = 0;

  explicit Reader(std::size_t fuel) : fuel(fuel) {}

  SymPtr eval(const Expr& e, SymEnv env) {
    for (const auto& s : e.stmts) env[s.bound] = eval_op(s.op, env);
    return lookup(env, e.ret);
  }

 private:
  SymPtr lookup(const SymEnv& env, const Var& v) {
    auto it = env.find(v);
    return it == env.end() ? make(Sym::Opaque) : it->second;
  }

  SymPtr eval_op(const Operation& op, const SymEnv& env) {
    if (fuel == 0) throw Failed{};
    --fuel;
    if (auto* a = std::get_if<opal::Alias>(&op)) return lookup(env, a->source);
    if (auto* p = std::get_if<opal::Prim>(&op)) {
      auto s = std::make_shared<Sym>();
      s->kind = Sym::Prim;
      s->prim = p->value;
      return s;
    }
    if (auto* t = std::get_if<opal::Tuple>(&op)) {
      auto s = std::make_shared<Sym>();
      s->kind = Sym::Tuple;
      for (const auto& v : t->items) s->items.push_back(lookup(env, v));
      return s;
    }
    if (auto* pr = std::get_if<opal::Proj>(&op)) {
      SymPtr t = lookup(env, pr->tuple);
      if (t->kind != Sym::Tuple) return make(Sym::Opaque);
      if (pr->index < 1 || pr->index > t->items.size()) throw Failed{};
      return t->items[pr->index - 1];
    }
    if (auto* f = std::get_if<opal::Fun>(&op)) {
      auto s = std::make_shared<Sym>();
      s->kind = Sym::Closure;
      s->fn = f;
      s->env = std::make_shared<const SymEnv>(env);
      return s;
    }
    if (std::holds_alternative<opal::Task>(op)) return make(Sym::Opaque);
    const auto& c = std::get<opal::Call>(op);
    return apply(lookup(env, c.fn), lookup(env, c.arg));
  }

  SymPtr apply(const SymPtr& f, const SymPtr& arg) {
    switch (f->kind) {
      case Sym::Closure: {
        SymEnv inner = *f->env;
        inner[f->fn->param] = arg;
        return eval(*f->fn->body, std::move(inner));
      }
      case Sym::Append: {
        if (arg->kind != Sym::Tuple || arg->items.size() != 2 || arg->items[0]->kind != Sym::State) throw Failed{};
        const SymPtr& v = arg->items[1];
        if (v->kind != Sym::Prim) throw Failed{};
        if (holes == 0) elements.push_back(v->prim);
        return make(Sym::State);
      }
      case Sym::Marker:
        return make(Sym::Called, f->id);
      case Sym::Opaque:
      case Sym::Prim: {
        // An unresolved continuation spliced into the list.
        if (arg->kind == Sym::Tuple && arg->items.size() == 2 && arg->items[0]->kind == Sym::State &&
            arg->items[1]->kind == Sym::Append) {
          ++holes;
          return make(Sym::State);
        }
        return make(Sym::Opaque);
      }
      default:
        throw Failed{};
    }
  }

 public:
  SymPtr call(const SymPtr& f, std::vector<SymPtr> args) {
    auto t = std::make_shared<Sym>();
    t->kind = Sym::Tuple;
    t->items = std::move(args);
    return apply(f, t);
  }
};

constexpr std::size_t kDecodeFuel = 50'000'000;

}  // namespace

std::optional<DecodedList> decode_list(const Expr& e) {
  try {
    Reader r(kDecodeFuel);
    SymPtr l = r.eval(e, {});
    if (l->kind != Sym::Closure) return std::nullopt;
    SymPtr out = r.call(l, {make(Sym::State), make(Sym::Append)});
    if (out->kind != Sym::State) return std::nullopt;
    return DecodedList{std::move(r.elements), r.holes};
  } catch (const Failed&) {
    return std::nullopt;
  }
}

std::optional<std::string> decode_string(const Expr& e) {
  auto d = decode_list(e);
  if (!d || !d->complete()) return std::nullopt;
  std::string out;
  for (const auto& v : d->prefix) {
    const auto* s = std::get_if<std::string>(&v);
    if (!s) return std::nullopt;
    out += *s;
  }
  return out;
}

Expr church_bool(bool b) {
  Expr body;
  body.stmts.push_back(proj("t", 1, "cases"));
  body.stmts.push_back(proj("f", 2, "cases"));
  body.stmts.push_back(tuple("u", {}));
  body.stmts.push_back(call("r", b ? "t" : "f", "u"));
  body.ret = "r";
  Expr top;
  top.stmts.push_back(fun("b", "cases", std::move(body)));
  top.ret = "b";
  return top;
}

std::optional<bool> decode_bool(const Expr& e) {
  try {
    Reader r(1'000'000);
    SymPtr b = r.eval(e, {});
    if (b->kind != Sym::Closure) return std::nullopt;
    SymPtr out = r.call(b, {make(Sym::Marker, 1), make(Sym::Marker, 2)});
    if (out->kind != Sym::Called) return std::nullopt;
    return out->id == 1;
  } catch (const Failed&) {
    return std::nullopt;
  }
}

const std::string& prelude_source() {
  static const std::string s = assets::prelude;
  return s;
}

const std::string& fix_source() {
  static const std::string s = assets::fix;
  return s;
}

const std::string& threaded_chain_program() {
  static const std::string s =
      "(thread, fd1) := open (thread, <\"foo.txt\">)\n"
      "(thread, c) := read (thread, fd1)\n"
      "(thread, fd2) := open (thread, <\"bar.txt\">)\n"
      "thread := write (thread, fd2, c)\n"
      "ret thread\n";
  return s;
}

const std::string& fork_join_program() {
  static const std::string s =
      "(thread, fd1) := open (thread, <\"foo.txt\">)\n"
      "(thread, thread2) := fork (thread)\n"
      "(thread2, c) := read (thread2, fd1)\n"
      "(thread, fd2) := open (thread, <\"bar.txt\">)\n"
      "thread := join (thread, thread2)\n"
      "thread := write (thread, fd2, c)\n"
      "ret thread\n";
  return s;
}

}  // namespace opal

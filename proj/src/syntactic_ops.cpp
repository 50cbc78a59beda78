#include "opal/syntactic_ops.hpp"

#include <algorithm>
#include <atomic>
#include <unordered_map>

namespace opal {
namespace {

// Scoped renaming environment with O(1) lookup; each binder pushes a
// mapping that is popped when its scope closes.
class ScopedNames {
 public:
  void push(const Var& from, Var to) { map_[from].push_back(std::move(to)); }
  void pop(const Var& from) {
    auto it = map_.find(from);
    it->second.pop_back();
    if (it->second.empty()) map_.erase(it);
  }
  const Var& lookup(const Var& v) const {
    auto it = map_.find(v);
    return it == map_.end() ? v : it->second.back();
  }

 private:
  std::unordered_map<Var, std::vector<Var>> map_;
};

using PickName = std::function<std::optional<Var>(const Var& binder, int depth)>;

class Renamer {
 public:
  explicit Renamer(PickName pick) : pick_(std::move(pick)) {}

  Expr expr(const Expr& e, int depth) {
    Expr out;
    out.stmts.reserve(e.stmts.size());
    std::vector<Var> pushed;
    pushed.reserve(e.stmts.size());
    for (const auto& s : e.stmts) {
      Operation op = operation(s.op, depth);
      Var bound = pick_(s.bound, depth).value_or(s.bound);
      env_.push(s.bound, bound);
      pushed.push_back(s.bound);
      out.stmts.push_back(Statement{std::move(bound), std::move(op)});
    }
    out.ret = env_.lookup(e.ret);
    for (auto it = pushed.rbegin(); it != pushed.rend(); ++it) env_.pop(*it);
    return out;
  }

  Fun function(const Fun& f, int depth) {
    Var param = pick_(f.param, depth).value_or(f.param);
    env_.push(f.param, param);
    Expr body = expr(*f.body, depth + 1);
    env_.pop(f.param);
    return Fun{std::move(param), std::make_shared<const Expr>(std::move(body))};
  }

  Operation operation(const Operation& op, int depth) {
    return std::visit(
        [&](const auto& o) -> Operation {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, Alias>) {
            return Alias{env_.lookup(o.source)};
          } else if constexpr (std::is_same_v<T, Fun>) {
            // Nested function parameters live one level deeper than the
            // statement that binds the function.
            Var param = pick_(o.param, depth + 1).value_or(o.param);
            env_.push(o.param, param);
            Expr body = expr(*o.body, depth + 1);
            env_.pop(o.param);
            return Fun{std::move(param), std::make_shared<const Expr>(std::move(body))};
          } else if constexpr (std::is_same_v<T, Call>) {
            return Call{env_.lookup(o.fn), env_.lookup(o.arg)};
          } else if constexpr (std::is_same_v<T, Tuple>) {
            Tuple t;
            t.items.reserve(o.items.size());
            for (const auto& x : o.items) t.items.push_back(env_.lookup(x));
            return t;
          } else if constexpr (std::is_same_v<T, Proj>) {
            return Proj{o.index, env_.lookup(o.tuple)};
          } else {
            return o;
          }
        },
        op);
  }

 private:
  PickName pick_;
  ScopedNames env_;
};

void collect_free(const Expr& e, std::unordered_map<Var, int>& bound, VarSet& out);

void collect_free_op(const Operation& op, std::unordered_map<Var, int>& bound, VarSet& out) {
  auto use = [&](const Var& v) {
    if (!bound.count(v)) out.insert(v);
  };
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Alias>) {
          use(o.source);
        } else if constexpr (std::is_same_v<T, Fun>) {
          ++bound[o.param];
          collect_free(*o.body, bound, out);
          if (--bound[o.param] == 0) bound.erase(o.param);
        } else if constexpr (std::is_same_v<T, Call>) {
          use(o.fn);
          use(o.arg);
        } else if constexpr (std::is_same_v<T, Tuple>) {
          for (const auto& x : o.items) use(x);
        } else if constexpr (std::is_same_v<T, Proj>) {
          use(o.tuple);
        }
      },
      op);
}

void collect_free(const Expr& e, std::unordered_map<Var, int>& bound, VarSet& out) {
  std::vector<Var> added;
  for (const auto& s : e.stmts) {
    collect_free_op(s.op, bound, out);
    ++bound[s.bound];
    added.push_back(s.bound);
  }
  if (!bound.count(e.ret)) out.insert(e.ret);
  for (const auto& v : added) {
    if (--bound[v] == 0) bound.erase(v);
  }
}

void collect_names(const Expr& e, VarSet& out);

void collect_names_op(const Operation& op, VarSet& out) {
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Alias>) {
          out.insert(o.source);
        } else if constexpr (std::is_same_v<T, Fun>) {
          out.insert(o.param);
          collect_names(*o.body, out);
        } else if constexpr (std::is_same_v<T, Call>) {
          out.insert(o.fn);
          out.insert(o.arg);
        } else if constexpr (std::is_same_v<T, Tuple>) {
          out.insert(o.items.begin(), o.items.end());
        } else if constexpr (std::is_same_v<T, Proj>) {
          out.insert(o.tuple);
        }
      },
      op);
}

void collect_names(const Expr& e, VarSet& out) {
  for (const auto& s : e.stmts) {
    out.insert(s.bound);
    collect_names_op(s.op, out);
  }
  out.insert(e.ret);
}

std::atomic<std::uint64_t> g_fresh_counter{0};

std::string strip_generated_suffix(const Var& v) {
  auto pos = v.rfind("_g");
  if (pos == std::string::npos || pos == 0 || pos + 2 == v.size()) return v;
  for (std::size_t i = pos + 2; i < v.size(); ++i) {
    if (v[i] < '0' || v[i] > '9') return v;
  }
  return v.substr(0, pos);
}

Var next_global_name(const Var& base, const VarSet& avoid1, const VarSet& avoid2) {
  const std::string stem = strip_generated_suffix(base);
  for (;;) {
    Var candidate = stem + "_g" + std::to_string(g_fresh_counter.fetch_add(1));
    if (!avoid1.count(candidate) && !avoid2.count(candidate)) return candidate;
  }
}

Operation substitute_op(const Operation& op, const Var& to, const Var& from);

Expr substitute_expr(const Expr& e, const Var& to, const Var& from) {
  Expr out;
  out.stmts.reserve(e.stmts.size());
  bool shadowed = false;
  for (const auto& s : e.stmts) {
    out.stmts.push_back(Statement{s.bound, shadowed ? s.op : substitute_op(s.op, to, from)});
    if (s.bound == from) shadowed = true;
  }
  out.ret = (!shadowed && e.ret == from) ? to : e.ret;
  return out;
}

Operation substitute_op(const Operation& op, const Var& to, const Var& from) {
  auto sub = [&](const Var& v) -> const Var& { return v == from ? to : v; };
  return std::visit(
      [&](const auto& o) -> Operation {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Alias>) {
          return Alias{sub(o.source)};
        } else if constexpr (std::is_same_v<T, Fun>) {
          if (o.param == from) return o;
          return Fun{o.param, std::make_shared<const Expr>(substitute_expr(*o.body, to, from))};
        } else if constexpr (std::is_same_v<T, Call>) {
          return Call{sub(o.fn), sub(o.arg)};
        } else if constexpr (std::is_same_v<T, Tuple>) {
          Tuple t;
          t.items.reserve(o.items.size());
          for (const auto& x : o.items) t.items.push_back(sub(x));
          return t;
        } else if constexpr (std::is_same_v<T, Proj>) {
          return Proj{o.index, sub(o.tuple)};
        } else {
          return o;
        }
      },
      op);
}

class AlphaComparer {
 public:
  bool expr(const Expr& a, const Expr& b) {
    if (a.stmts.size() != b.stmts.size()) return false;
    std::vector<std::pair<Var, Var>> pushed;
    bool ok = true;
    for (std::size_t i = 0; i < a.stmts.size() && ok; ++i) {
      const auto& sa = a.stmts[i];
      const auto& sb = b.stmts[i];
      ok = operation(sa.op, sb.op);
      bind(sa.bound, sb.bound);
      pushed.emplace_back(sa.bound, sb.bound);
    }
    ok = ok && same_var(a.ret, b.ret);
    for (auto it = pushed.rbegin(); it != pushed.rend(); ++it) unbind(it->first, it->second);
    return ok;
  }

 private:
  bool same_var(const Var& x, const Var& y) const {
    auto ix = left_.find(x);
    auto iy = right_.find(y);
    const bool bx = ix != left_.end();
    const bool by = iy != right_.end();
    if (bx != by) return false;
    if (!bx) return x == y;
    return ix->second.back() == iy->second.back();
  }

  void bind(const Var& x, const Var& y) {
    const std::uint64_t id = next_id_++;
    left_[x].push_back(id);
    right_[y].push_back(id);
  }

  void unbind(const Var& x, const Var& y) {
    auto ix = left_.find(x);
    ix->second.pop_back();
    if (ix->second.empty()) left_.erase(ix);
    auto iy = right_.find(y);
    iy->second.pop_back();
    if (iy->second.empty()) right_.erase(iy);
  }

  bool operation(const Operation& a, const Operation& b) {
    if (a.index() != b.index()) return false;
    return std::visit(
        [&](const auto& oa) -> bool {
          using T = std::decay_t<decltype(oa)>;
          const auto& ob = std::get<T>(b);
          if constexpr (std::is_same_v<T, Alias>) {
            return same_var(oa.source, ob.source);
          } else if constexpr (std::is_same_v<T, Fun>) {
            bind(oa.param, ob.param);
            const bool ok = expr(*oa.body, *ob.body);
            unbind(oa.param, ob.param);
            return ok;
          } else if constexpr (std::is_same_v<T, Call>) {
            return same_var(oa.fn, ob.fn) && same_var(oa.arg, ob.arg);
          } else if constexpr (std::is_same_v<T, Tuple>) {
            if (oa.items.size() != ob.items.size()) return false;
            for (std::size_t i = 0; i < oa.items.size(); ++i) {
              if (!same_var(oa.items[i], ob.items[i])) return false;
            }
            return true;
          } else if constexpr (std::is_same_v<T, Proj>) {
            return oa.index == ob.index && same_var(oa.tuple, ob.tuple);
          } else {
            return oa == ob;
          }
        },
        a);
  }

  std::unordered_map<Var, std::vector<std::uint64_t>> left_;
  std::unordered_map<Var, std::vector<std::uint64_t>> right_;
  std::uint64_t next_id_ = 0;
};

bool any_binder_op(const Operation& op, const std::function<bool(const Var&)>& pred) {
  if (const auto* f = std::get_if<Fun>(&op)) {
    return pred(f->param) || any_binder(*f->body, pred);
  }
  return false;
}

}  // namespace

VarSet free_vars(const Expr& e) {
  std::unordered_map<Var, int> bound;
  VarSet out;
  collect_free(e, bound, out);
  return out;
}

VarSet free_vars(const Operation& op) {
  std::unordered_map<Var, int> bound;
  VarSet out;
  collect_free_op(op, bound, out);
  return out;
}

VarSet all_names(const Expr& e) {
  VarSet out;
  collect_names(e, out);
  return out;
}

Expr substitute(const Expr& e, const Var& to, const Var& from) {
  if (to == from) return e;
  return substitute_expr(e, to, from);
}

Operation substitute(const Operation& op, const Var& to, const Var& from) {
  if (to == from) return op;
  return substitute_op(op, to, from);
}

Expr freshen(const VarSet& scope, const Expr& e) {
  const VarSet own = all_names(e);
  Renamer r([&](const Var& v, int depth) -> std::optional<Var> {
    if (depth != 0) return std::nullopt;
    return next_global_name(v, scope, own);
  });
  return r.expr(e, 0);
}

Fun freshen_fun(const VarSet& scope, const Fun& f) {
  VarSet own = all_names(*f.body);
  own.insert(f.param);
  // The parameter and the body's top-level binders are renamed; deeper
  // binders keep their names.
  Renamer r([&](const Var& v, int depth) -> std::optional<Var> {
    if (depth > 1) return std::nullopt;
    return next_global_name(v, scope, own);
  });
  return r.function(f, 0);
}

std::string stem_of(const Var& v) {
  auto pos = v.find('@');
  return pos == std::string::npos ? v : v.substr(0, pos);
}

Expr freshen_at(const Expr& e, const Label& l) {
  const std::string suffix = "@" + l.dotted();
  Renamer r([&](const Var& v, int) -> std::optional<Var> { return stem_of(v) + suffix; });
  return r.expr(e, 0);
}

Fun freshen_at(const Fun& f, const Label& l) {
  const std::string suffix = "@" + l.dotted();
  Renamer r([&](const Var& v, int) -> std::optional<Var> { return stem_of(v) + suffix; });
  return r.function(f, 0);
}

bool alpha_equal(const Expr& a, const Expr& b) {
  AlphaComparer cmp;
  return cmp.expr(a, b);
}

LabeledExpr init_labels(const Expr& e) {
  LabeledExpr p;
  p.stmts.reserve(e.stmts.size());
  std::uint32_t i = 1;
  for (const auto& s : e.stmts) p.stmts.push_back(LabeledStatement{Label{i++}, s});
  p.ret = e.ret;
  return p;
}

Expr erase_labels(const LabeledExpr& p) {
  Expr e;
  e.stmts.reserve(p.stmts.size());
  for (const auto& ls : p.stmts) e.stmts.push_back(ls.stmt);
  e.ret = p.ret;
  return e;
}

bool label_independent(const LabeledExpr& p) {
  std::vector<const Label*> labels;
  labels.reserve(p.stmts.size());
  for (const auto& ls : p.stmts) {
    if (ls.label.empty()) return false;
    for (auto x : ls.label.path()) {
      if (x == 0) return false;
    }
    labels.push_back(&ls.label);
  }
  std::sort(labels.begin(), labels.end(), [](const Label* a, const Label* b) { return *a < *b; });
  // In lexicographic order, any label having `a` as a prefix sorts directly
  // after `a`, so checking neighbours is enough.
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (labels[i - 1]->is_prefix_of(*labels[i])) return false;
  }
  return true;
}

bool any_binder(const Expr& e, const std::function<bool(const Var&)>& pred) {
  for (const auto& s : e.stmts) {
    if (pred(s.bound) || any_binder_op(s.op, pred)) return true;
  }
  return false;
}

}  // namespace opal

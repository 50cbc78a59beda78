#include "opal/syntax.hpp"

#include <algorithm>
#include <set>

#include "opal/syntactic_ops.hpp"

namespace opal {

bool PrimExpr::operator==(const PrimExpr& other) const {
  if (is_tuple != other.is_tuple) return false;
  if (!is_tuple) return value == other.value;
  return items == other.items;
}

bool Fun::operator==(const Fun& other) const {
  if (param != other.param) return false;
  if (body == other.body) return true;
  if (!body || !other.body) return false;
  return *body == *other.body;
}

Label Label::child(std::uint32_t i) const {
  std::vector<std::uint32_t> p = path_;
  p.push_back(i);
  return Label(std::move(p));
}

bool Label::is_prefix_of(const Label& other) const {
  if (path_.size() > other.path_.size()) return false;
  return std::equal(path_.begin(), path_.end(), other.path_.begin());
}

bool Label::independent_of(const Label& other) const {
  return !is_prefix_of(other) && !other.is_prefix_of(*this);
}

std::string Label::dotted() const {
  std::string out;
  for (std::size_t i = 0; i < path_.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(path_[i]);
  }
  return out;
}

std::string Label::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < path_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(path_[i]);
  }
  return out + ")";
}

std::size_t LabelHash::operator()(const Label& l) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (auto x : l.path()) {
    h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

Statement alias(Var bound, Var source) { return {std::move(bound), Alias{std::move(source)}}; }

Statement fun(Var bound, Var param, Expr body) {
  return {std::move(bound), Fun{std::move(param), std::make_shared<const Expr>(std::move(body))}};
}

Statement call(Var bound, Var fn, Var arg) {
  return {std::move(bound), Call{std::move(fn), std::move(arg)}};
}

Statement tuple(Var bound, std::vector<Var> items) {
  return {std::move(bound), Tuple{std::move(items)}};
}

Statement proj(Var bound, std::size_t index, Var tuple) {
  return {std::move(bound), Proj{index, std::move(tuple)}};
}

Statement prim(Var bound, PrimValue value) { return {std::move(bound), Prim{std::move(value)}}; }

PrimValue int_value(std::int64_t v) { return PrimValue{std::in_place_type<std::int64_t>, v}; }
PrimValue str_value(std::string v) { return PrimValue{std::in_place_type<std::string>, std::move(v)}; }
PrimValue bool_value(bool v) { return PrimValue{std::in_place_type<bool>, v}; }

std::vector<Var> operation_vars(const Operation& op) {
  struct Visitor {
    std::vector<Var> operator()(const Alias& a) const { return {a.source}; }
    std::vector<Var> operator()(const Fun& f) const {
      auto fv = free_vars(*f.body);
      fv.erase(f.param);
      return {fv.begin(), fv.end()};
    }
    std::vector<Var> operator()(const Call& c) const {
      if (c.fn == c.arg) return {c.fn};
      return {c.fn, c.arg};
    }
    std::vector<Var> operator()(const Tuple& t) const {
      std::vector<Var> out = t.items;
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
    std::vector<Var> operator()(const Proj& p) const { return {p.tuple}; }
    std::vector<Var> operator()(const Prim&) const { return {}; }
    std::vector<Var> operator()(const Task&) const { return {}; }
  };
  return std::visit(Visitor{}, op);
}

bool is_value_op(const Operation& op) {
  return std::holds_alternative<Fun>(op) || std::holds_alternative<Tuple>(op) ||
         std::holds_alternative<Prim>(op);
}

const char* op_kind_name(const Operation& op) {
  static constexpr const char* kNames[] = {"alias", "fun", "call", "tuple", "proj", "prim", "task"};
  return kNames[op.index()];
}

}  // namespace opal

#pragma once

// Term representation for the opportunistic calculus: ANF expressions,
// statements, operations, primitive values and statement labels.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace opal {

using Var = std::string;

/// Identifier of a dispatched external task. Zero means "no live task"
/// (trace-driven evaluation never allocates live handles).
using TaskId = std::uint64_t;

struct Unit {
  auto operator<=>(const Unit&) const = default;
};

/// Opaque handle such as `&stdout` or a sequencing token `&thread#91`.
struct Handle {
  std::string name;
  std::int64_t id = 0;
  auto operator<=>(const Handle&) const = default;
};

/// Reference to an external function, resolved in the provider registry
/// at dispatch time.
struct FnRef {
  std::string name;
  auto operator<=>(const FnRef&) const = default;
};

using PrimValue = std::variant<std::int64_t, std::string, bool, Unit, Handle, FnRef>;

/// A primitive or a (possibly nested) tuple of primitives.
struct PrimExpr {
  bool is_tuple = false;
  PrimValue value;
  std::vector<PrimExpr> items;

  static PrimExpr of(PrimValue v) { return PrimExpr{false, std::move(v), {}}; }
  static PrimExpr tuple(std::vector<PrimExpr> xs) {
    return PrimExpr{true, Unit{}, std::move(xs)};
  }
  bool operator==(const PrimExpr& other) const;
};

struct Expr;

struct Alias {
  Var source;
  bool operator==(const Alias&) const = default;
};

struct Fun {
  Var param;
  std::shared_ptr<const Expr> body;
  bool operator==(const Fun& other) const;
};

struct Call {
  Var fn;
  Var arg;
  bool operator==(const Call&) const = default;
};

struct Tuple {
  std::vector<Var> items;
  bool operator==(const Tuple&) const = default;
};

/// `prj i x`, 1-based.
struct Proj {
  std::size_t index = 1;
  Var tuple;
  bool operator==(const Proj&) const = default;
};

struct Prim {
  PrimValue value;
  bool operator==(const Prim&) const = default;
};

/// Placeholder for a running external call. Only dispatch creates these.
struct Task {
  FnRef fn;
  PrimExpr arg;
  TaskId handle = 0;
  bool operator==(const Task&) const = default;
};

using Operation = std::variant<Alias, Fun, Call, Tuple, Proj, Prim, Task>;

struct Statement {
  Var bound;
  Operation op;
  bool operator==(const Statement&) const = default;
};

struct Expr {
  std::vector<Statement> stmts;
  Var ret;
  bool operator==(const Expr&) const = default;
};

/// Nonempty sequence of positive integers identifying a top-level statement.
class Label {
 public:
  Label() = default;
  explicit Label(std::vector<std::uint32_t> path) : path_(std::move(path)) {}
  Label(std::initializer_list<std::uint32_t> path) : path_(path) {}

  const std::vector<std::uint32_t>& path() const { return path_; }
  std::size_t depth() const { return path_.size(); }
  bool empty() const { return path_.empty(); }

  Label child(std::uint32_t i) const;
  /// True when this label is a (non-strict) prefix of `other`.
  bool is_prefix_of(const Label& other) const;
  /// Neither equal nor a prefix of one another.
  bool independent_of(const Label& other) const;

  /// "3.2" form used inside generated names and diagnostics.
  std::string dotted() const;
  /// "(3,2)" form used in printed labeled terms.
  std::string to_string() const;

  auto operator<=>(const Label&) const = default;
  bool operator==(const Label&) const = default;

 private:
  std::vector<std::uint32_t> path_;
};

struct LabelHash {
  std::size_t operator()(const Label& l) const noexcept;
};

struct LabeledStatement {
  Label label;
  Statement stmt;
  bool operator==(const LabeledStatement&) const = default;
};

struct LabeledExpr {
  std::vector<LabeledStatement> stmts;
  Var ret;
  bool operator==(const LabeledExpr&) const = default;
};

// Small constructors used heavily by tests and generated code.
Statement alias(Var bound, Var source);
Statement fun(Var bound, Var param, Expr body);
Statement call(Var bound, Var fn, Var arg);
Statement tuple(Var bound, std::vector<Var> items);
Statement proj(Var bound, std::size_t index, Var tuple);
Statement prim(Var bound, PrimValue value);

PrimValue int_value(std::int64_t v);
PrimValue str_value(std::string v);
PrimValue bool_value(bool v);

/// Variables referenced by an operation (free occurrences only).
std::vector<Var> operation_vars(const Operation& op);

bool is_value_op(const Operation& op);

const char* op_kind_name(const Operation& op);

}  // namespace opal

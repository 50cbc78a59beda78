#pragma once

// Church-encoded data: booleans, lists (possibly with unresolved holes),
// strings as lists of one-character strings, and the library sources.

#include <optional>
#include <string>
#include <vector>

#include "opal/syntactic_ops.hpp"

namespace opal {

/// One element of a list under construction, or a hole standing for the
/// rest of some external call's output.
struct ListPiece {
  bool is_hole = false;
  PrimValue value;
  std::string fn;
  PrimExpr arg;

  static ListPiece element(PrimValue v) { return ListPiece{false, std::move(v), {}, {}}; }
  static ListPiece hole(std::string fn, PrimExpr arg) { return ListPiece{true, Unit{}, std::move(fn), std::move(arg)}; }
};

/// Closed expression returning a list `fun (state, append)`. Each hole is a
/// top-level call of `fn` on `arg` (so it is dispatched exactly once) and is
/// spliced into the body as `state := hole (state, append)`.
Expr make_streaming_result(const std::vector<ListPiece>& pieces);

Expr encode_list(const std::vector<PrimValue>& values);
/// Splits UTF-8 text into code points.
std::vector<std::string> utf8_chars(const std::string& s);
Expr encode_string(const std::string& s);

struct DecodedList {
  /// Elements before the first unresolved hole.
  std::vector<PrimValue> prefix;
  /// Unresolved holes anywhere in the list.
  std::size_t holes = 0;
  bool complete() const { return holes == 0; }
};

/// Reads back the list the expression returns. Nested lists built by
/// `cons`/`concat`-style folds are flattened. Nullopt when the value does
/// not have list shape.
std::optional<DecodedList> decode_list(const Expr& e);
/// Concatenation of a fully resolved list of strings.
std::optional<std::string> decode_string(const Expr& e);

/// `fun (t, f): t ()` or `fun (t, f): f ()` as a closed expression.
Expr church_bool(bool b);
/// Which branch a closed Church boolean takes, if recognizable.
std::optional<bool> decode_bool(const Expr& e);

/// Library sources shipped with the binary.
const std::string& prelude_source();
const std::string& fix_source();

/// Example programs reifying effect order as handle dependencies.
const std::string& threaded_chain_program();
const std::string& fork_join_program();

}  // namespace opal

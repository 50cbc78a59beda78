#pragma once

// Turns program text into a closed term: free names are bound to external
// functions or handles, and library definitions the program uses are
// placed ahead of it.

#include <stdexcept>
#include <string>
#include <vector>

#include "opal/runtime.hpp"

namespace opal {

class LinkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Names that link to a fresh handle instead of a function.
bool is_handle_name(const std::string& name);

struct LinkOptions {
  bool include_library = true;
};

struct LinkedProgram {
  Expr program;
  /// Free names bound to providers or handles, sorted.
  std::vector<std::string> externals;
  /// Library definitions pulled in, in program order.
  std::vector<std::string> library;
};

/// Library text: prelude followed by the fixpoint combinator.
const std::string& library_source();

/// Throws ParseError on syntax errors and LinkError for unknown names or an
/// ill-formed result.
LinkedProgram link_program(const std::string& source, const ProviderRegistry& registry,
                           const LinkOptions& opts = {});

}  // namespace opal

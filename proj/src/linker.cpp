#include "opal/linker.hpp"

#include <map>

#include "opal/church.hpp"
#include "opal/parser.hpp"
#include "opal/wellformed.hpp"

namespace opal {

bool is_handle_name(const std::string& name) {
  return name == "stdout" || name == "stderr" || name == "thread" || name == "fs";
}

const std::string& library_source() {
  static const std::string s = prelude_source() + "\n" + fix_source();
  return s;
}

LinkedProgram link_program(const std::string& source, const ProviderRegistry& registry, const LinkOptions& opts) {
  VarSet lib_top;
  if (opts.include_library) {
    for (const auto& s : parse_fragment(library_source())) lib_top.insert(s.bound);
  }

  // Free names of the program decide which names are external.
  const Expr probe = parse(source, ParseOptions{lib_top, true});
  VarSet externals;
  for (const auto& v : free_vars(probe)) {
    if (!lib_top.count(v)) externals.insert(v);
  }
  for (const auto& v : externals) {
    if (!registry.contains(v) && !is_handle_name(v)) throw LinkError("unknown name '" + v + "'");
  }

  std::vector<Statement> lib;
  VarSet lib_names;
  if (opts.include_library) {
    lib = parse_fragment(library_source(), ParseOptions{externals, true});
    for (const auto& s : lib) {
      Expr single{{s}, s.bound};
      for (const auto& n : all_names(single)) lib_names.insert(n);
    }
  }

  VarSet predefined = externals;
  predefined.insert(lib_names.begin(), lib_names.end());
  Expr prog = parse(source, ParseOptions{predefined, true});

  // Library definitions reachable from the program's free names.
  std::map<Var, std::size_t> lib_index;
  for (std::size_t i = 0; i < lib.size(); ++i) lib_index[lib[i].bound] = i;
  std::vector<bool> keep(lib.size(), false);
  std::vector<Var> work;
  for (const auto& v : free_vars(prog)) {
    if (lib_index.count(v)) work.push_back(v);
  }
  while (!work.empty()) {
    Var v = work.back();
    work.pop_back();
    auto it = lib_index.find(v);
    if (it == lib_index.end() || keep[it->second]) continue;
    keep[it->second] = true;
    for (const auto& u : free_vars(lib[it->second].op)) work.push_back(u);
  }

  LinkedProgram out;
  for (const auto& v : externals) {
    if (is_handle_name(v)) {
      out.program.stmts.push_back(prim(v, Handle{v, 0}));
    } else {
      out.program.stmts.push_back(prim(v, FnRef{v}));
    }
    out.externals.push_back(v);
  }
  for (std::size_t i = 0; i < lib.size(); ++i) {
    if (!keep[i]) continue;
    out.program.stmts.push_back(lib[i]);
    out.library.push_back(lib[i].bound);
  }
  for (auto& s : prog.stmts) out.program.stmts.push_back(std::move(s));
  out.program.ret = prog.ret;

  if (auto err = check_well_formed({}, out.program)) throw LinkError("linked program is ill-formed: " + err->describe());
  return out;
}

}  // namespace opal

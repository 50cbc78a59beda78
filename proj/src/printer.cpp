#include "opal/printer.hpp"

namespace opal {
namespace {

void append_expr(std::string& out, const Expr& e, int indent);

void append_indent(std::string& out, int indent) { out.append(static_cast<std::size_t>(indent), ' '); }

void append_operation(std::string& out, const Operation& op, int indent) {
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Alias>) {
          out += o.source;
        } else if constexpr (std::is_same_v<T, Fun>) {
          out += "fun ";
          out += o.param;
          out += ":\n";
          append_expr(out, *o.body, indent + 4);
        } else if constexpr (std::is_same_v<T, Call>) {
          out += o.fn;
          out += ' ';
          out += o.arg;
        } else if constexpr (std::is_same_v<T, Tuple>) {
          out += '(';
          for (std::size_t i = 0; i < o.items.size(); ++i) {
            if (i) out += ", ";
            out += o.items[i];
          }
          if (o.items.size() == 1) out += ',';
          out += ')';
        } else if constexpr (std::is_same_v<T, Proj>) {
          out += "prj ";
          out += std::to_string(o.index);
          out += ' ';
          out += o.tuple;
        } else if constexpr (std::is_same_v<T, Prim>) {
          out += render_literal(o.value);
        } else {
          out += "<<";
          out += o.fn.name;
          out += ' ';
          out += render_prim_expr(o.arg);
          if (o.handle) {
            out += " #";
            out += std::to_string(o.handle);
          }
          out += ">>";
        }
      },
      op);
}

void append_statement(std::string& out, const Statement& s, int indent) {
  append_indent(out, indent);
  out += s.bound;
  out += " := ";
  append_operation(out, s.op, indent);
  // Fun bodies end with their own newline.
  if (!std::holds_alternative<Fun>(s.op)) out += '\n';
}

void append_expr(std::string& out, const Expr& e, int indent) {
  for (const auto& s : e.stmts) append_statement(out, s, indent);
  append_indent(out, indent);
  out += "ret ";
  out += e.ret;
  out += '\n';
}

void append_output(std::string& out, const PrimExpr& c) {
  if (c.is_tuple) {
    out += '(';
    for (std::size_t i = 0; i < c.items.size(); ++i) {
      if (i) out += ", ";
      append_output(out, c.items[i]);
    }
    out += ')';
    return;
  }
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::int64_t>) out += std::to_string(v);
        else if constexpr (std::is_same_v<T, std::string>) out += v;
        else if constexpr (std::is_same_v<T, bool>) out += v ? "true" : "false";
        else if constexpr (std::is_same_v<T, Unit>) out += "()";
        else if constexpr (std::is_same_v<T, Handle>) out += "&" + v.name + (v.id ? "#" + std::to_string(v.id) : "");
        else out += v.name;
      },
      c.value);
}

}  // namespace

std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\0': out += "\\0"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string render_literal(const PrimValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::int64_t>) return "<" + std::to_string(x) + ">";
        else if constexpr (std::is_same_v<T, std::string>) return "<" + quote_string(x) + ">";
        else if constexpr (std::is_same_v<T, bool>) return x ? "<t>" : "<f>";
        else if constexpr (std::is_same_v<T, Unit>) return "<()>";
        else if constexpr (std::is_same_v<T, Handle>) {
          return "<&" + x.name + (x.id ? "#" + std::to_string(x.id) : "") + ">";
        } else {
          return "<" + x.name + ">";
        }
      },
      v);
}

std::string render_prim_expr(const PrimExpr& c) {
  if (!c.is_tuple) return render_literal(c.value);
  std::string out = "(";
  for (std::size_t i = 0; i < c.items.size(); ++i) {
    if (i) out += ", ";
    out += render_prim_expr(c.items[i]);
  }
  if (c.items.size() == 1) out += ',';
  return out + ")";
}

std::string render_output(const PrimExpr& c) {
  std::string out;
  append_output(out, c);
  return out;
}

std::string pretty(const Expr& e) {
  std::string out;
  append_expr(out, e, 0);
  out.pop_back();
  return out;
}

std::string pretty_statement(const Statement& s, int indent) {
  std::string out;
  append_statement(out, s, indent);
  out.pop_back();
  return out;
}

std::string pretty_operation(const Operation& op, int indent) {
  std::string out;
  append_operation(out, op, indent);
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

std::string pretty_labeled(const LabeledExpr& p) {
  std::string out;
  for (const auto& ls : p.stmts) {
    std::string prefix = ls.label.to_string() + ": ";
    out += prefix;
    std::string body;
    append_statement(body, ls.stmt, 0);
    // Continuation lines of fun bodies line up under the statement.
    std::size_t start = 0;
    bool first = true;
    while (start < body.size()) {
      std::size_t nl = body.find('\n', start);
      if (!first) append_indent(out, static_cast<int>(prefix.size()));
      out.append(body, start, nl - start + 1);
      start = nl + 1;
      first = false;
    }
  }
  out += "ret " + p.ret;
  return out;
}

}  // namespace opal

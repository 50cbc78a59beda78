#include "opal/parser.hpp"

#include <cctype>
#include <memory>
#include <string_view>
#include <unordered_map>

namespace opal {

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      message_(message) {}

bool is_reserved_word(const std::string& s) { return s == "fun" || s == "ret" || s == "prj"; }

namespace {

// ---------------------------------------------------------------------------
// Tokens

enum class Tok {
  Ident,
  Int,
  String,
  Literal,  // `<...>`, text holds the body
  Handle,   // bare `&name`
  LParen,
  RParen,
  Comma,
  Assign,
  Colon,
  Semi,
  Newline,
  Indent,
  Dedent,
  Fun,
  Ret,
  Prj,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '@' || c == '.';
}

// Reads a double-quoted string starting at s[i] == '"'; returns the
// unescaped contents and leaves i after the closing quote.
std::string read_string(const std::string& s, std::size_t& i, int line, int col) {
  std::string out;
  ++i;
  while (i < s.size() && s[i] != '"') {
    char c = s[i];
    if (c == '\n') throw ParseError(line, col, "unterminated string");
    if (c == '\\') {
      if (i + 1 >= s.size()) throw ParseError(line, col, "unterminated string");
      char e = s[++i];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '0': out += '\0'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: throw ParseError(line, col, std::string("unknown escape \\") + e);
      }
      ++i;
      continue;
    }
    out += c;
    ++i;
  }
  if (i >= s.size()) throw ParseError(line, col, "unterminated string");
  ++i;
  return out;
}

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  std::vector<Token> run() {
    indents_.push_back(0);
    while (pos_ < src_.size()) {
      if (at_line_start_ && depth_ == 0) {
        if (!handle_indent()) continue;
      }
      char c = src_[pos_];
      if (c == '\n') {
        newline();
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r') {
        advance();
        continue;
      }
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        continue;
      }
      lex_token();
    }
    if (!tokens_.empty() && tokens_.back().kind != Tok::Newline && tokens_.back().kind != Tok::Dedent) {
      push(Tok::Newline, "", line_, col_);
    }
    while (indents_.size() > 1) {
      indents_.pop_back();
      push(Tok::Dedent, "", line_, col_);
    }
    push(Tok::End, "", line_, col_);
    return std::move(tokens_);
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void push(Tok k, std::string text, int line, int col) {
    tokens_.push_back(Token{k, std::move(text), line, col});
  }

  void newline() {
    if (depth_ == 0 && !tokens_.empty() && tokens_.back().kind != Tok::Newline &&
        tokens_.back().kind != Tok::Indent && tokens_.back().kind != Tok::Dedent) {
      push(Tok::Newline, "", line_, col_);
    }
    advance();
    if (depth_ == 0) at_line_start_ = true;
  }

  // Measures indentation at the start of a line. Returns false when the line
  // is blank or a comment (consumed entirely).
  bool handle_indent() {
    int width = 0;
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) {
      width = src_[pos_] == '\t' ? (width / 4 + 1) * 4 : width + 1;
      advance();
    }
    if (pos_ >= src_.size()) return false;
    char c = src_[pos_];
    if (c == '\n' || c == '\r' || c == '#') {
      while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      if (pos_ < src_.size()) advance();
      return false;
    }
    at_line_start_ = false;
    if (width > indents_.back()) {
      indents_.push_back(width);
      push(Tok::Indent, "", line_, col_);
    } else {
      while (width < indents_.back()) {
        indents_.pop_back();
        push(Tok::Dedent, "", line_, col_);
      }
      if (width != indents_.back()) throw ParseError(line_, col_, "inconsistent indentation");
    }
    return true;
  }

  void lex_token() {
    const int line = line_;
    const int col = col_;
    char c = src_[pos_];
    if (ident_start(c)) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && ident_char(src_[pos_])) advance();
      std::string word = src_.substr(start, pos_ - start);
      if (word == "fun") return push(Tok::Fun, word, line, col);
      if (word == "ret") return push(Tok::Ret, word, line, col);
      if (word == "prj") return push(Tok::Prj, word, line, col);
      return push(Tok::Ident, word, line, col);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      std::size_t start = pos_;
      advance();
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      return push(Tok::Int, src_.substr(start, pos_ - start), line, col);
    }
    switch (c) {
      case '"': {
        std::size_t i = pos_;
        std::string s = read_string(src_, i, line, col);
        while (pos_ < i) advance();
        return push(Tok::String, std::move(s), line, col);
      }
      case '<': return lex_literal(line, col);
      case '&': {
        advance();
        std::size_t start = pos_;
        while (pos_ < src_.size() && (ident_char(src_[pos_]) || src_[pos_] == '#')) advance();
        if (pos_ == start) throw ParseError(line, col, "expected handle name after '&'");
        return push(Tok::Handle, src_.substr(start, pos_ - start), line, col);
      }
      case '(':
        ++depth_;
        advance();
        return push(Tok::LParen, "(", line, col);
      case ')':
        if (depth_ == 0) throw ParseError(line, col, "unbalanced ')'");
        --depth_;
        advance();
        return push(Tok::RParen, ")", line, col);
      case ',': advance(); return push(Tok::Comma, ",", line, col);
      case ';': advance(); return push(Tok::Semi, ";", line, col);
      case ':':
        advance();
        if (pos_ < src_.size() && src_[pos_] == '=') {
          advance();
          return push(Tok::Assign, ":=", line, col);
        }
        return push(Tok::Colon, ":", line, col);
      default: break;
    }
    throw ParseError(line, col, std::string("unexpected character '") + c + "'");
  }

  void lex_literal(int line, int col) {
    advance();
    if (pos_ < src_.size() && src_[pos_] == '<') {
      throw ParseError(line, col, "task placeholders cannot appear in source programs");
    }
    std::string body;
    if (pos_ < src_.size() && src_[pos_] == '"') {
      std::size_t i = pos_;
      std::size_t start = pos_;
      read_string(src_, i, line, col);
      while (pos_ < i) advance();
      body = src_.substr(start, i - start);
    } else {
      std::size_t start = pos_;
      while (pos_ < src_.size() && src_[pos_] != '>' && src_[pos_] != '\n') advance();
      body = src_.substr(start, pos_ - start);
    }
    if (pos_ >= src_.size() || src_[pos_] != '>') throw ParseError(line, col, "unterminated literal");
    advance();
    push(Tok::Literal, std::move(body), line, col);
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  int depth_ = 0;
  bool at_line_start_ = true;
  std::vector<int> indents_;
  std::vector<Token> tokens_;
};

// ---------------------------------------------------------------------------
// Surface syntax tree

struct Pattern {
  bool is_tuple = false;
  std::string name;
  std::vector<Pattern> items;
  int line = 0;
  int col = 0;
};

struct Node;
using NodePtr = std::unique_ptr<Node>;

struct Block;

struct Node {
  enum Kind { Name, Lit, FunDef, Apply, TupleLit, Project } kind;
  std::string name;
  PrimValue lit;
  Pattern param;
  std::shared_ptr<Block> body;
  std::vector<NodePtr> kids;
  std::size_t index = 0;
  int line = 0;
  int col = 0;
};

struct SurfaceStmt {
  enum Kind { Bind, Return, Bare } kind;
  Pattern pattern;
  NodePtr op;
  int line = 0;
  int col = 0;
};

struct Block {
  std::vector<SurfaceStmt> stmts;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Block program() {
    Block b = statements(/*inline_only=*/false);
    if (peek().kind != Tok::End) fail(peek(), "unexpected token");
    return b;
  }

 private:
  const Token& peek(std::size_t k = 0) const {
    std::size_t i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    next();
    return true;
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) fail(peek(), std::string("expected ") + what);
    return next();
  }
  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    std::string got;
    switch (t.kind) {
      case Tok::End: got = "end of input"; break;
      case Tok::Newline: got = "end of line"; break;
      case Tok::Indent: got = "indentation"; break;
      case Tok::Dedent: got = "dedent"; break;
      default: got = "'" + t.text + "'"; break;
    }
    throw ParseError(t.line, t.col, msg + ", got " + got);
  }

  // Statements until the end of the current block. Inline blocks stop at the
  // end of the line.
  Block statements(bool inline_only) {
    Block b;
    bool need_sep = false;
    for (;;) {
      Tok k = peek().kind;
      if (k == Tok::End || k == Tok::Dedent) break;
      if (inline_only && (k == Tok::Newline || k == Tok::RParen || k == Tok::Comma)) break;
      if (k == Tok::Newline || k == Tok::Semi) {
        next();
        need_sep = false;
        continue;
      }
      if (need_sep) fail(peek(), "expected ';' or newline between statements");
      b.stmts.push_back(statement());
      need_sep = !last_was_block_;
    }
    return b;
  }

  bool looks_like_binding() const {
    std::size_t i = pos_;
    if (toks_[i].kind == Tok::Ident) return toks_[i + 1].kind == Tok::Assign;
    if (toks_[i].kind != Tok::LParen) return false;
    int depth = 0;
    for (; i < toks_.size(); ++i) {
      Tok k = toks_[i].kind;
      if (k == Tok::LParen) ++depth;
      else if (k == Tok::RParen) {
        if (--depth == 0) return i + 1 < toks_.size() && toks_[i + 1].kind == Tok::Assign;
      } else if (k != Tok::Ident && k != Tok::Comma) {
        return false;
      }
    }
    return false;
  }

  SurfaceStmt statement() {
    last_was_block_ = false;
    const Token& t = peek();
    SurfaceStmt s;
    s.line = t.line;
    s.col = t.col;
    if (accept(Tok::Ret)) {
      s.kind = SurfaceStmt::Return;
      s.op = operation();
      return s;
    }
    if (looks_like_binding()) {
      s.kind = SurfaceStmt::Bind;
      s.pattern = pattern();
      expect(Tok::Assign, "':='");
      s.op = operation();
      return s;
    }
    s.kind = SurfaceStmt::Bare;
    s.op = operation();
    return s;
  }

  Pattern pattern() {
    const Token& t = peek();
    Pattern p;
    p.line = t.line;
    p.col = t.col;
    if (t.kind == Tok::Ident) {
      p.name = next().text;
      return p;
    }
    if (is_keyword(t.kind)) fail(t, "reserved word cannot be used as a name");
    expect(Tok::LParen, "name or '('");
    p.is_tuple = true;
    if (accept(Tok::RParen)) return p;
    for (;;) {
      p.items.push_back(pattern());
      if (accept(Tok::RParen)) break;
      expect(Tok::Comma, "',' or ')'");
      if (accept(Tok::RParen)) break;
    }
    return p;
  }

  static bool is_keyword(Tok k) { return k == Tok::Fun || k == Tok::Ret || k == Tok::Prj; }

  static bool starts_atom(Tok k) {
    return k == Tok::Ident || k == Tok::Int || k == Tok::String || k == Tok::Literal ||
           k == Tok::Handle || k == Tok::LParen;
  }

  NodePtr operation() {
    const Token& t = peek();
    if (t.kind == Tok::Fun) return function();
    if (t.kind == Tok::Prj) {
      next();
      const Token& n = expect(Tok::Int, "projection index");
      long idx = std::stol(n.text);
      if (idx < 1) throw ParseError(n.line, n.col, "projection index must be at least 1");
      auto node = make(Node::Project, t);
      node->index = static_cast<std::size_t>(idx);
      node->kids.push_back(atom());
      return node;
    }
    if (is_keyword(t.kind)) fail(t, "reserved word cannot be used as a name");
    NodePtr head = atom();
    while (starts_atom(peek().kind)) {
      const Token& at = peek();
      auto app = make(Node::Apply, at);
      app->line = head->line;
      app->col = head->col;
      app->kids.push_back(std::move(head));
      app->kids.push_back(atom());
      head = std::move(app);
    }
    return head;
  }

  NodePtr function() {
    const Token& t = next();
    auto node = make(Node::FunDef, t);
    node->param = pattern();
    expect(Tok::Colon, "':' after function parameter");
    node->body = std::make_shared<Block>();
    if (accept(Tok::Newline)) {
      expect(Tok::Indent, "indented function body");
      *node->body = statements(false);
      expect(Tok::Dedent, "end of function body");
      last_was_block_ = true;
    } else {
      *node->body = statements(true);
      // An inline body consumed the rest of the line; the line break that
      // ends it is the separator for the enclosing block.
    }
    if (node->body->stmts.empty()) throw ParseError(t.line, t.col, "empty function body");
    return node;
  }

  NodePtr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Ident: {
        auto n = make(Node::Name, t);
        n->name = next().text;
        return n;
      }
      case Tok::Int: {
        auto n = make(Node::Lit, t);
        n->lit = int_value(std::stoll(next().text));
        return n;
      }
      case Tok::String: {
        auto n = make(Node::Lit, t);
        n->lit = str_value(next().text);
        return n;
      }
      case Tok::Handle: {
        auto n = make(Node::Lit, t);
        n->lit = parse_literal("&" + next().text);
        return n;
      }
      case Tok::Literal: {
        auto n = make(Node::Lit, t);
        try {
          n->lit = parse_literal(t.text);
        } catch (const ParseError& e) {
          throw ParseError(t.line, t.col, e.message());
        }
        next();
        return n;
      }
      case Tok::LParen: {
        next();
        if (accept(Tok::RParen)) return make(Node::TupleLit, t);
        NodePtr first = operation();
        if (accept(Tok::RParen)) return first;  // grouping
        auto tup = make(Node::TupleLit, t);
        tup->kids.push_back(std::move(first));
        while (accept(Tok::Comma)) {
          if (peek().kind == Tok::RParen) break;
          tup->kids.push_back(operation());
        }
        expect(Tok::RParen, "',' or ')'");
        return tup;
      }
      default: break;
    }
    if (is_keyword(t.kind)) fail(t, "reserved word cannot be used as a name");
    fail(t, "expected a name, literal or '('");
  }

  static NodePtr make(Node::Kind k, const Token& t) {
    auto n = std::make_unique<Node>();
    n->kind = k;
    n->line = t.line;
    n->col = t.col;
    return n;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  bool last_was_block_ = false;
};

// ---------------------------------------------------------------------------
// Desugaring

class Desugarer {
 public:
  Desugarer(const VarSet& used, const VarSet& prebound, bool rename)
      : used_(used), rename_(rename) {
    for (const auto& v : prebound) scope_push(v, v);
  }

  const VarSet& free_names() const { return free_; }

  Expr block(const Block& b, std::vector<Statement> prologue = {}) {
    Expr out;
    out.stmts = std::move(prologue);
    std::size_t mark = undo_.size();
    bool have_ret = false;
    for (std::size_t i = 0; i < b.stmts.size(); ++i) {
      const SurfaceStmt& s = b.stmts[i];
      if (have_ret) throw ParseError(s.line, s.col, "statement after return");
      switch (s.kind) {
        case SurfaceStmt::Bind: {
          Operation op = operation(*s.op, out.stmts);
          bind(s.pattern, std::move(op), out.stmts);
          break;
        }
        case SurfaceStmt::Return:
        case SurfaceStmt::Bare: {
          if (s.kind == SurfaceStmt::Bare && i + 1 != b.stmts.size()) {
            throw ParseError(s.line, s.col, "a bare operation must be the last statement of a block");
          }
          out.ret = as_var(*s.op, out.stmts);
          have_ret = true;
          break;
        }
      }
    }
    if (!have_ret) {
      int line = b.stmts.empty() ? 0 : b.stmts.back().line;
      throw ParseError(line, 1, "block has no return");
    }
    scope_pop_to(mark);
    return out;
  }

  std::vector<Statement> fragment(const Block& b) {
    std::vector<Statement> out;
    for (const auto& s : b.stmts) {
      if (s.kind != SurfaceStmt::Bind) {
        throw ParseError(s.line, s.col, "library files contain only bindings");
      }
      Operation op = operation(*s.op, out);
      bind(s.pattern, std::move(op), out);
    }
    return out;
  }

 private:
  Var fresh(const std::string& base) {
    for (std::size_t n = 1;; ++n) {
      Var candidate = base + "_" + std::to_string(n);
      if (!used_.count(candidate)) {
        used_.insert(candidate);
        return candidate;
      }
    }
  }

  void scope_push(const Var& src, const Var& core) {
    names_[src].push_back(core);
    undo_.emplace_back(src, core);
  }

  void scope_pop_to(std::size_t mark) {
    while (undo_.size() > mark) {
      auto it = names_.find(undo_.back().first);
      it->second.pop_back();
      if (it->second.empty()) names_.erase(it);
      undo_.pop_back();
    }
  }

  Var lookup(const std::string& name) {
    auto it = names_.find(name);
    if (it != names_.end()) return it->second.back();
    free_.insert(name);
    return name;
  }

  Var bind_name(const std::string& name, int line, int col) {
    if (is_reserved_word(name)) throw ParseError(line, col, "reserved word cannot be bound");
    Var core = name;
    if (rename_ && names_.count(name)) core = fresh(name);
    used_.insert(core);
    scope_push(name, core);
    return core;
  }

  void bind(const Pattern& p, Operation op, std::vector<Statement>& out) {
    if (!p.is_tuple) {
      Var core = bind_name(p.name, p.line, p.col);
      out.push_back(Statement{core, std::move(op)});
      return;
    }
    if (p.items.empty()) {
      out.push_back(Statement{fresh("unused"), std::move(op)});
      return;
    }
    Var tmp = fresh("tup");
    out.push_back(Statement{tmp, std::move(op)});
    destructure(p, tmp, out);
  }

  void destructure(const Pattern& p, const Var& source, std::vector<Statement>& out) {
    for (std::size_t i = 0; i < p.items.size(); ++i) {
      bind(p.items[i], Proj{i + 1, source}, out);
    }
  }

  // Variable standing for `n`, emitting intermediate statements as needed.
  Var as_var(const Node& n, std::vector<Statement>& out) {
    if (n.kind == Node::Name) return lookup(n.name);
    Operation op = operation(n, out);
    Var v = fresh("v");
    out.push_back(Statement{v, std::move(op)});
    return v;
  }

  Operation operation(const Node& n, std::vector<Statement>& out) {
    switch (n.kind) {
      case Node::Name: return Alias{lookup(n.name)};
      case Node::Lit: return Prim{n.lit};
      case Node::Apply: {
        Var f = as_var(*n.kids[0], out);
        Var x = as_var(*n.kids[1], out);
        return Call{std::move(f), std::move(x)};
      }
      case Node::TupleLit: {
        Tuple t;
        for (const auto& k : n.kids) t.items.push_back(as_var(*k, out));
        return t;
      }
      case Node::Project: return Proj{n.index, as_var(*n.kids[0], out)};
      case Node::FunDef: {
        std::size_t mark = undo_.size();
        Var param;
        std::vector<Statement> prologue;
        if (!n.param.is_tuple) {
          param = bind_name(n.param.name, n.param.line, n.param.col);
        } else {
          param = fresh("arg");
          destructure(n.param, param, prologue);
        }
        Expr body = block(*n.body, std::move(prologue));
        scope_pop_to(mark);
        return Fun{param, std::make_shared<const Expr>(std::move(body))};
      }
    }
    return Alias{};
  }

  VarSet used_;
  bool rename_;
  VarSet free_;
  std::unordered_map<Var, std::vector<Var>> names_;
  std::vector<std::pair<Var, Var>> undo_;
};

VarSet source_identifiers(const std::vector<Token>& toks) {
  VarSet out;
  for (const auto& t : toks) {
    if (t.kind == Tok::Ident) out.insert(t.text);
  }
  return out;
}

Block parse_block(const std::string& text, std::vector<Token>& toks) {
  toks = Lexer(text).run();
  return Parser(toks).program();
}

template <typename Fn>
auto desugar_twice(const std::vector<Token>& toks, const ParseOptions& opts, Fn&& run) {
  VarSet used = source_identifiers(toks);
  used.insert(opts.predefined.begin(), opts.predefined.end());
  // First pass discovers free names; the second treats them as bound from
  // the start so binders that collide with them are renamed.
  VarSet prebound = opts.predefined;
  if (opts.rename_rebinding) {
    Desugarer probe(used, prebound, true);
    run(probe);
    prebound.insert(probe.free_names().begin(), probe.free_names().end());
  }
  Desugarer real(used, prebound, opts.rename_rebinding);
  return run(real);
}

}  // namespace

Expr parse(const std::string& text, const ParseOptions& opts) {
  std::vector<Token> toks;
  Block b = parse_block(text, toks);
  if (b.stmts.empty()) throw ParseError(1, 1, "empty program");
  return desugar_twice(toks, opts, [&](Desugarer& d) { return d.block(b); });
}

std::vector<Statement> parse_fragment(const std::string& text, const ParseOptions& opts) {
  std::vector<Token> toks;
  Block b = parse_block(text, toks);
  return desugar_twice(toks, opts, [&](Desugarer& d) { return d.fragment(b); });
}

PrimValue parse_literal(const std::string& body) {
  if (body.empty()) throw ParseError(0, 0, "empty literal");
  if (body[0] == '"') {
    std::size_t i = 0;
    std::string s = read_string(body, i, 0, 0);
    if (i != body.size()) throw ParseError(0, 0, "trailing characters in string literal");
    return str_value(std::move(s));
  }
  if (body == "t") return bool_value(true);
  if (body == "f") return bool_value(false);
  if (body == "()") return Unit{};
  bool numeric = true;
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (!(std::isdigit(static_cast<unsigned char>(c)) || (i == 0 && c == '-' && body.size() > 1))) {
      numeric = false;
      break;
    }
  }
  if (numeric) return int_value(std::stoll(body));
  if (body[0] == '&') {
    std::string rest = body.substr(1);
    auto hash = rest.find('#');
    Handle h;
    h.name = rest.substr(0, hash);
    if (h.name.empty()) throw ParseError(0, 0, "handle needs a name");
    if (hash != std::string::npos) {
      std::string digits = rest.substr(hash + 1);
      if (digits.empty()) throw ParseError(0, 0, "handle id missing after '#'");
      for (char c : digits) {
        if (!std::isdigit(static_cast<unsigned char>(c)) && c != '-') {
          throw ParseError(0, 0, "bad handle id");
        }
      }
      h.id = std::stoll(digits);
    }
    return h;
  }
  bool ident = ident_start(body[0]);
  for (char c : body) ident = ident && ident_char(c);
  bool op = true;
  for (char c : body) op = op && std::string_view("+-*/%=!|^~?").find(c) != std::string_view::npos;
  if (ident || op) return FnRef{body};
  throw ParseError(0, 0, "unrecognized literal <" + body + ">");
}

PrimExpr parse_prim_expr(const std::string& text) {
  std::vector<Token> toks = Lexer(text).run();
  std::size_t pos = 0;
  auto peek = [&]() -> const Token& { return toks[std::min(pos, toks.size() - 1)]; };
  std::function<PrimExpr()> item = [&]() -> PrimExpr {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Literal: ++pos; return PrimExpr::of(parse_literal(t.text));
      case Tok::Int: ++pos; return PrimExpr::of(int_value(std::stoll(t.text)));
      case Tok::String: ++pos; return PrimExpr::of(str_value(t.text));
      case Tok::Handle: ++pos; return PrimExpr::of(parse_literal("&" + t.text));
      case Tok::LParen: {
        ++pos;
        std::vector<PrimExpr> xs;
        if (peek().kind == Tok::RParen) {
          ++pos;
          return PrimExpr::tuple({});
        }
        for (;;) {
          xs.push_back(item());
          if (peek().kind == Tok::RParen) {
            ++pos;
            break;
          }
          if (peek().kind != Tok::Comma) throw ParseError(peek().line, peek().col, "expected ',' or ')'");
          ++pos;
          if (peek().kind == Tok::RParen) {
            ++pos;
            break;
          }
        }
        return PrimExpr::tuple(std::move(xs));
      }
      default: throw ParseError(t.line, t.col, "expected a primitive expression");
    }
  };
  PrimExpr out = item();
  while (peek().kind == Tok::Newline) ++pos;
  if (peek().kind != Tok::End) throw ParseError(peek().line, peek().col, "trailing input");
  return out;
}

}  // namespace opal

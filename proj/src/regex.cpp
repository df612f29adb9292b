#include "repath/regex.hpp"

#include <cctype>

namespace repath {

int RegexAst::add_symbol(std::string symbol) {
  Node n;
  n.kind = Kind::Symbol;
  n.wildcard = symbol == "#";
  n.occ = static_cast<OccId>(occ_symbols_.size());
  occ_symbols_.push_back(symbol);
  n.symbol = std::move(symbol);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int RegexAst::add_concat(int lhs, int rhs) {
  nodes_.push_back({Kind::Concat, lhs, rhs, {}, false, kNoOcc});
  return static_cast<int>(nodes_.size()) - 1;
}

int RegexAst::add_alt(int lhs, int rhs) {
  nodes_.push_back({Kind::Alt, lhs, rhs, {}, false, kNoOcc});
  return static_cast<int>(nodes_.size()) - 1;
}

int RegexAst::add_plus(int child) {
  nodes_.push_back({Kind::Plus, child, -1, {}, false, kNoOcc});
  return static_cast<int>(nodes_.size()) - 1;
}

void RegexAst::finalize() {
  // flag wildcards under +
  auto has_wild = [&](auto&& self, int i) -> bool {
    const Node& n = nodes_[i];
    switch (n.kind) {
      case Kind::Symbol: return n.wildcard;
      case Kind::Plus: return self(self, n.lhs);
      default: return self(self, n.lhs) || self(self, n.rhs);
    }
  };
  auto walk = [&](auto&& self, int i) -> void {
    const Node& n = nodes_[i];
    if (n.kind == Kind::Symbol) return;
    if (n.kind == Kind::Plus) {
      if (has_wild(has_wild, n.lhs)) wildcard_in_closure_ = true;
      self(self, n.lhs);
      return;
    }
    self(self, n.lhs);
    self(self, n.rhs);
  };
  if (root_ >= 0) walk(walk, root_);
}

namespace {

// alternation := concat ('|' concat)*
// concat      := repeated+
// repeated    := primary ('+' | '^+')*
// primary     := symbol | '#' | quoted | '(' alternation ')'
class Parser {
 public:
  Parser(std::string_view s) : s_(s) {}

  RegexAst run() {
    skip_space();
    if (eof()) throw SyntaxError(0, "empty query");
    int root = alternation();
    skip_space();
    if (!eof()) throw SyntaxError(pos_, "unexpected trailing input");
    ast_.set_root(root);
    ast_.finalize();
    return std::move(ast_);
  }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  void skip_space() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  int alternation() {
    int lhs = concat();
    skip_space();
    while (!eof() && peek() == '|') {
      ++pos_;
      skip_space();
      if (eof() || peek() == '|' || peek() == ')')
        throw SyntaxError(pos_, "empty alternative");
      int rhs = concat();
      lhs = ast_.add_alt(lhs, rhs);
      skip_space();
    }
    return lhs;
  }

  bool at_primary() {
    if (eof()) return false;
    char c = peek();
    return std::isalnum(static_cast<unsigned char>(c)) || c == '#' || c == '\'' || c == '(';
  }

  int concat() {
    skip_space();
    if (!at_primary()) throw SyntaxError(pos_, "expected a symbol or '('");
    int lhs = repeated();
    skip_space();
    while (at_primary()) {
      int rhs = repeated();
      lhs = ast_.add_concat(lhs, rhs);
      skip_space();
    }
    return lhs;
  }

  int repeated() {
    int child = primary();
    skip_space();
    while (!eof()) {
      if (peek() == '+') {
        ++pos_;
        child = ast_.add_plus(child);
      } else if (peek() == '^') {
        ++pos_;
        if (eof() || peek() != '+') throw SyntaxError(pos_, "expected '+' after '^'");
        ++pos_;
        child = ast_.add_plus(child);
      } else {
        break;
      }
      skip_space();
    }
    return child;
  }

  int primary() {
    skip_space();
    if (eof()) throw SyntaxError(pos_, "expected a symbol or '('");
    char c = peek();
    if (c == '(') {
      std::size_t open = pos_;
      ++pos_;
      int inner = alternation();
      skip_space();
      if (eof() || peek() != ')') throw SyntaxError(open, "unbalanced '('");
      ++pos_;
      return inner;
    }
    if (c == '\'') {
      std::size_t open = pos_;
      ++pos_;
      std::string sym;
      while (!eof() && peek() != '\'') sym.push_back(s_[pos_++]);
      if (eof()) throw SyntaxError(open, "unterminated quoted label");
      ++pos_;
      if (sym.empty()) throw SyntaxError(open, "empty quoted label");
      return ast_.add_symbol(std::move(sym));
    }
    if (c == '#') {
      ++pos_;
      return ast_.add_symbol("#");
    }
    if (std::isalnum(static_cast<unsigned char>(c))) {
      ++pos_;
      return ast_.add_symbol(std::string(1, c));
    }
    throw SyntaxError(pos_, std::string("unexpected character '") + c + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  RegexAst ast_;
};

int precedence(RegexAst::Kind k) {
  switch (k) {
    case RegexAst::Kind::Alt: return 0;
    case RegexAst::Kind::Concat: return 1;
    case RegexAst::Kind::Plus: return 2;
    case RegexAst::Kind::Symbol: return 3;
  }
  return 3;
}

void print_node(const RegexAst& ast, int i, int parent_prec, std::string& out) {
  const auto& n = ast.node(i);
  bool paren = precedence(n.kind) < parent_prec;
  if (paren) out.push_back('(');
  switch (n.kind) {
    case RegexAst::Kind::Symbol:
      if (n.symbol.size() == 1) {
        out += n.symbol;
      } else {
        out.push_back('\'');
        out += n.symbol;
        out.push_back('\'');
      }
      break;
    case RegexAst::Kind::Concat:
      print_node(ast, n.lhs, 1, out);
      print_node(ast, n.rhs, 2, out);  // right operand must bind at least as tight
      break;
    case RegexAst::Kind::Alt:
      print_node(ast, n.lhs, 0, out);
      out.push_back('|');
      print_node(ast, n.rhs, 1, out);
      break;
    case RegexAst::Kind::Plus:
      print_node(ast, n.lhs, 3, out);
      out.push_back('+');
      break;
  }
  if (paren) out.push_back(')');
}

}  // namespace

RegexAst parse(std::string_view query) { return Parser(query).run(); }

std::string print(const RegexAst& ast) {
  std::string out;
  print_node(ast, ast.root(), 0, out);
  return out;
}

namespace {

void postfix_walk(const RegexAst& ast, int i, PostfixProgram& out) {
  const auto& n = ast.node(i);
  switch (n.kind) {
    case RegexAst::Kind::Symbol:
      out.push_back({PostfixToken::Kind::Symbol, n.occ});
      break;
    case RegexAst::Kind::Concat:
      postfix_walk(ast, n.lhs, out);
      postfix_walk(ast, n.rhs, out);
      out.push_back({PostfixToken::Kind::Concat, kNoOcc});
      break;
    case RegexAst::Kind::Alt:
      postfix_walk(ast, n.lhs, out);
      postfix_walk(ast, n.rhs, out);
      out.push_back({PostfixToken::Kind::Alt, kNoOcc});
      break;
    case RegexAst::Kind::Plus:
      postfix_walk(ast, n.lhs, out);
      out.push_back({PostfixToken::Kind::Plus, kNoOcc});
      break;
  }
}

}  // namespace

PostfixProgram to_postfix(const RegexAst& ast) {
  PostfixProgram out;
  postfix_walk(ast, ast.root(), out);
  return out;
}

std::string postfix_to_string(const RegexAst& ast, const PostfixProgram& p) {
  std::string out;
  for (const auto& t : p) {
    if (!out.empty()) out.push_back(' ');
    switch (t.kind) {
      case PostfixToken::Kind::Symbol: out += ast.occurrences()[t.occ]; break;
      case PostfixToken::Kind::Concat: out.push_back('-'); break;
      case PostfixToken::Kind::Alt: out.push_back('|'); break;
      case PostfixToken::Kind::Plus: out.push_back('+'); break;
    }
  }
  return out;
}

std::pair<std::set<OccId>, std::set<OccId>> head_tail(const RegexAst& ast, int i) {
  const auto& n = ast.node(i);
  switch (n.kind) {
    case RegexAst::Kind::Symbol:
      return {{n.occ}, {n.occ}};
    case RegexAst::Kind::Concat: {
      auto [h, _] = head_tail(ast, n.lhs);
      auto [_h2, t] = head_tail(ast, n.rhs);
      return {h, t};
    }
    case RegexAst::Kind::Alt: {
      auto [h1, t1] = head_tail(ast, n.lhs);
      auto [h2, t2] = head_tail(ast, n.rhs);
      h1.insert(h2.begin(), h2.end());
      t1.insert(t2.begin(), t2.end());
      return {h1, t1};
    }
    case RegexAst::Kind::Plus:
      return head_tail(ast, n.lhs);
  }
  return {};
}

std::pair<std::set<OccId>, std::set<OccId>> head_tail(const RegexAst& ast) {
  return head_tail(ast, ast.root());
}

bool ast_equal(const RegexAst& a, const RegexAst& b) {
  auto eq = [&](auto&& self, int ia, int ib) -> bool {
    const auto& na = a.node(ia);
    const auto& nb = b.node(ib);
    if (na.kind != nb.kind) return false;
    switch (na.kind) {
      case RegexAst::Kind::Symbol: return na.symbol == nb.symbol;
      case RegexAst::Kind::Plus: return self(self, na.lhs, nb.lhs);
      default: return self(self, na.lhs, nb.lhs) && self(self, na.rhs, nb.rhs);
    }
  };
  return eq(eq, a.root(), b.root());
}

}  // namespace repath

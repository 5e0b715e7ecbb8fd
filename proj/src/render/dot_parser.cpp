#include "rstdiag/render/dot_parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace rstdiag::render {

DotParseError::DotParseError(const std::string& message, int line)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

std::string DotGraph::graph_attr(std::string_view key) const {
  for (auto it = graph_attrs.rbegin(); it != graph_attrs.rend(); ++it) {
    if (it->key == key) return it->value;
  }
  return {};
}

namespace {

enum class Tok { id, lbrace, rbrace, lbracket, rbracket, semi, comma, equals, colon, arrow, dashdash, end };

struct Token {
  Tok kind;
  std::string text;
  bool bare = false;  // unquoted identifier, may be a keyword
  int line;
};

bool id_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool id_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : s_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (i_ >= s_.size()) break;
      out.push_back(next());
    }
    out.push_back({Tok::end, "", false, line_});
    return out;
  }

 private:
  void skip_space() {
    bool at_line_start = i_ == 0 || s_[i_ - 1] == '\n';
    while (i_ < s_.size()) {
      const char c = s_[i_];
      if (c == '\n') {
        ++line_;
        ++i_;
        at_line_start = true;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++i_;
      } else if (c == '#' && at_line_start) {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else if (c == '/' && i_ + 1 < s_.size() && s_[i_ + 1] == '/') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else if (c == '/' && i_ + 1 < s_.size() && s_[i_ + 1] == '*') {
        const int start = line_;
        i_ += 2;
        while (i_ + 1 < s_.size() && !(s_[i_] == '*' && s_[i_ + 1] == '/')) {
          if (s_[i_] == '\n') ++line_;
          ++i_;
        }
        if (i_ + 1 >= s_.size()) throw DotParseError("unterminated comment", start);
        i_ += 2;
      } else {
        break;
      }
    }
  }

  Token next() {
    const int line = line_;
    const char c = s_[i_];
    auto single = [&](Tok k) {
      ++i_;
      return Token{k, std::string(1, c), false, line};
    };
    switch (c) {
      case '{': return single(Tok::lbrace);
      case '}': return single(Tok::rbrace);
      case '[': return single(Tok::lbracket);
      case ']': return single(Tok::rbracket);
      case ';': return single(Tok::semi);
      case ',': return single(Tok::comma);
      case '=': return single(Tok::equals);
      case ':': return single(Tok::colon);
      case '"': return quoted();
      case '<': return html();
      default: break;
    }
    if (c == '-' && i_ + 1 < s_.size() && (s_[i_ + 1] == '>' || s_[i_ + 1] == '-')) {
      const Tok k = s_[i_ + 1] == '>' ? Tok::arrow : Tok::dashdash;
      i_ += 2;
      return {k, std::string(s_.substr(i_ - 2, 2)), false, line};
    }
    if (id_start(static_cast<unsigned char>(c))) {
      const auto start = i_;
      while (i_ < s_.size() && id_char(static_cast<unsigned char>(s_[i_]))) ++i_;
      return {Tok::id, std::string(s_.substr(start, i_ - start)), true, line};
    }
    if (c == '-' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) {
      const auto start = i_;
      if (s_[i_] == '-') ++i_;
      bool digits = false, dot = false;
      while (i_ < s_.size()) {
        const char d = s_[i_];
        if (std::isdigit(static_cast<unsigned char>(d))) {
          digits = true;
        } else if (d == '.' && !dot) {
          dot = true;
        } else {
          break;
        }
        ++i_;
      }
      if (!digits) throw DotParseError("syntax error near '" + std::string(s_.substr(start, i_ - start)) + "'", line);
      return {Tok::id, std::string(s_.substr(start, i_ - start)), false, line};
    }
    throw DotParseError(std::string("syntax error near '") + c + "'", line);
  }

  Token quoted() {
    const int line = line_;
    std::string text;
    while (true) {
      ++i_;  // opening quote
      while (true) {
        if (i_ >= s_.size()) throw DotParseError("unterminated string", line);
        const char c = s_[i_];
        if (c == '"') break;
        if (c == '\\' && i_ + 1 < s_.size()) {
          const char n = s_[i_ + 1];
          if (n == '"') {
            text += '"';
            i_ += 2;
            continue;
          }
          if (n == '\n') {  // line continuation
            ++line_;
            i_ += 2;
            continue;
          }
        }
        if (c == '\n') ++line_;
        text += c;
        ++i_;
      }
      ++i_;  // closing quote
      // "a" + "b" concatenation
      auto j = i_;
      while (j < s_.size() && std::isspace(static_cast<unsigned char>(s_[j]))) ++j;
      if (j < s_.size() && s_[j] == '+') {
        auto k = j + 1;
        while (k < s_.size() && std::isspace(static_cast<unsigned char>(s_[k]))) ++k;
        if (k < s_.size() && s_[k] == '"') {
          for (auto p = i_; p < k; ++p)
            if (s_[p] == '\n') ++line_;
          i_ = k;
          continue;
        }
      }
      return {Tok::id, text, false, line};
    }
  }

  Token html() {
    const int line = line_;
    int depth = 0;
    const auto start = i_;
    while (i_ < s_.size()) {
      const char c = s_[i_];
      if (c == '<') ++depth;
      if (c == '>') --depth;
      if (c == '\n') ++line_;
      ++i_;
      if (depth == 0) return {Tok::id, std::string(s_.substr(start + 1, i_ - start - 2)), false, line};
    }
    throw DotParseError("unterminated HTML string", line);
  }

  std::string_view s_;
  std::size_t i_ = 0;
  int line_ = 1;
};

struct Scope {
  std::map<std::string, std::string> edge_defaults;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  DotGraph run() {
    if (is_kw("strict")) {
      g_.strict = true;
      ++p_;
    }
    if (is_kw("digraph")) {
      g_.directed = true;
    } else if (is_kw("graph")) {
      g_.directed = false;
    } else {
      fail();
    }
    ++p_;
    if (peek().kind == Tok::id && !is_keyword(peek())) g_.id = t_[p_++].text;
    expect(Tok::lbrace);
    Scope root;
    stmt_list(root, true);
    expect(Tok::rbrace);
    if (peek().kind != Tok::end) fail();
    return std::move(g_);
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return t_[std::min(p_ + ahead, t_.size() - 1)]; }

  bool is_kw(const char* kw) const {
    const auto& t = peek();
    return t.kind == Tok::id && t.bare && lower(t.text) == kw;
  }

  static bool is_keyword(const Token& t) {
    if (t.kind != Tok::id || !t.bare) return false;
    const auto l = lower(t.text);
    return l == "node" || l == "edge" || l == "graph" || l == "digraph" || l == "subgraph" || l == "strict";
  }

  [[noreturn]] void fail() const {
    const auto& t = peek();
    throw DotParseError(t.kind == Tok::end ? "syntax error at end of input" : "syntax error near '" + t.text + "'",
                        t.line);
  }

  void expect(Tok k) {
    if (peek().kind != k) fail();
    ++p_;
  }

  std::string take_id() {
    if (peek().kind != Tok::id || is_keyword(peek())) fail();
    return t_[p_++].text;
  }

  void see_node(const std::string& id) {
    if (seen_.insert(id).second) g_.nodes.push_back(id);
    if (collecting_ > 0) collected_.push_back(id);
  }

  std::vector<DotAttr> attr_lists() {
    std::vector<DotAttr> out;
    while (peek().kind == Tok::lbracket) {
      ++p_;
      while (peek().kind != Tok::rbracket) {
        DotAttr a;
        a.key = take_id();
        expect(Tok::equals);
        a.value = take_id();
        out.push_back(std::move(a));
        if (peek().kind == Tok::semi || peek().kind == Tok::comma) ++p_;
      }
      ++p_;
    }
    return out;
  }

  void stmt_list(Scope& scope, bool root) {
    while (peek().kind != Tok::rbrace) {
      if (peek().kind == Tok::end) fail();
      stmt(scope, root);
      if (peek().kind == Tok::semi) ++p_;
    }
  }

  // Node ids contained in the subgraph, including nested ones.
  std::vector<std::string> subgraph(const Scope& parent) {
    if (is_kw("subgraph")) {
      ++p_;
      if (peek().kind == Tok::id && !is_keyword(peek())) ++p_;
    }
    expect(Tok::lbrace);
    Scope inner = parent;
    const auto before = collected_.size();
    ++collecting_;
    stmt_list(inner, false);
    --collecting_;
    expect(Tok::rbrace);
    std::vector<std::string> members;
    std::set<std::string> uniq;
    for (auto i = before; i < collected_.size(); ++i)
      if (uniq.insert(collected_[i]).second) members.push_back(collected_[i]);
    if (collecting_ == 0) collected_.clear();
    return members;
  }

  std::vector<std::string> endpoint(const Scope& scope) {
    if (is_kw("subgraph") || peek().kind == Tok::lbrace) return subgraph(scope);
    std::string id = take_id();
    if (peek().kind == Tok::colon) {  // port and compass point
      ++p_;
      take_id();
      if (peek().kind == Tok::colon) {
        ++p_;
        take_id();
      }
    }
    see_node(id);
    return {id};
  }

  void stmt(Scope& scope, bool root) {
    if (is_kw("graph") || is_kw("node") || is_kw("edge")) {
      const auto kind = lower(t_[p_++].text);
      if (peek().kind != Tok::lbracket) fail();
      auto attrs = attr_lists();
      if (kind == "graph" && root) {
        for (auto& a : attrs) g_.graph_attrs.push_back(std::move(a));
      } else if (kind == "edge") {
        for (auto& a : attrs) scope.edge_defaults[a.key] = a.value;
      }
      return;
    }
    if (peek().kind == Tok::id && !is_keyword(peek()) && peek(1).kind == Tok::equals) {
      DotAttr a;
      a.key = t_[p_++].text;
      ++p_;
      a.value = take_id();
      if (root) g_.graph_attrs.push_back(std::move(a));
      return;
    }
    const int line = peek().line;
    const bool is_sub = is_kw("subgraph") || peek().kind == Tok::lbrace;
    auto left = endpoint(scope);
    if (peek().kind != Tok::arrow && peek().kind != Tok::dashdash) {
      attr_lists();
      if (!is_sub && declared_.insert(left.front()).second) g_.declared_nodes.push_back(left.front());
      return;
    }
    std::vector<std::vector<std::string>> chain{std::move(left)};
    while (peek().kind == Tok::arrow || peek().kind == Tok::dashdash) {
      if ((peek().kind == Tok::arrow) != g_.directed) fail();
      ++p_;
      chain.push_back(endpoint(scope));
    }
    auto merged = scope.edge_defaults;
    for (auto& a : attr_lists()) merged[a.key] = a.value;
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
      for (const auto& from : chain[k]) {
        for (const auto& to : chain[k + 1]) g_.edges.push_back({from, to, merged, line});
      }
    }
  }

  std::vector<Token> t_;
  std::size_t p_ = 0;
  DotGraph g_;
  std::set<std::string> seen_;
  std::set<std::string> declared_;
  std::vector<std::string> collected_;
  int collecting_ = 0;
};

}  // namespace

DotGraph parse_dot(std::string_view source) {
  auto toks = Lexer(source).run();
  return Parser(std::move(toks)).run();
}

}  // namespace rstdiag::render

#include "rstdiag/pipeline/extract.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <vector>

namespace rstdiag::pipeline {

namespace {

struct Span {
  std::size_t begin;
  std::size_t end;  // exclusive
};

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Position just past the brace matching the one at `open`, or nullopt.
std::optional<std::size_t> match_braces(std::string_view s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '"') {
      for (++i; i < s.size() && s[i] != '"'; ++i)
        if (s[i] == '\\') ++i;
      if (i >= s.size()) return std::nullopt;
    } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
      const auto close = s.find("*/", i + 2);
      if (close == std::string_view::npos) return std::nullopt;
      i = close + 1;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::nullopt;
}

// Longest balanced graph span in `s`.
std::optional<Span> graph_span(std::string_view s) {
  const std::string l = lower(s);
  std::optional<Span> best;
  for (const std::string kw : {"digraph", "graph"}) {
    for (auto pos = l.find(kw); pos != std::string::npos; pos = l.find(kw, pos + 1)) {
      if (pos > 0 && word_char(l[pos - 1])) continue;
      const auto after = pos + kw.size();
      if (after < l.size() && word_char(l[after])) continue;
      const auto open = s.find('{', after);
      if (open == std::string_view::npos) continue;
      // only an optional graph id may sit between the keyword and the brace
      const auto between = s.substr(after, open - after);
      if (std::count(between.begin(), between.end(), '\n') > 1) continue;
      const auto end = match_braces(s, open);
      if (!end) continue;
      std::size_t begin = pos;
      // include a preceding `strict`
      auto p = begin;
      while (p > 0 && std::isspace(static_cast<unsigned char>(s[p - 1]))) --p;
      if (p >= 6 && l.compare(p - 6, 6, "strict") == 0 && (p == 6 || !word_char(l[p - 7]))) begin = p - 6;
      const Span cand{begin, *end};
      if (!best || cand.end - cand.begin > best->end - best->begin) best = cand;
    }
  }
  return best;
}

struct Fence {
  std::size_t outer_begin, outer_end;  // including the fence lines
  std::size_t body_begin, body_end;
  std::string tag;
};

std::vector<Fence> fences(std::string_view s) {
  std::vector<Fence> out;
  std::size_t pos = 0;
  while (true) {
    const auto open = s.find("```", pos);
    if (open == std::string_view::npos) break;
    const auto line_end = s.find('\n', open);
    if (line_end == std::string_view::npos) break;
    const auto close = s.find("```", line_end + 1);
    if (close == std::string_view::npos) break;
    Fence f;
    f.outer_begin = open;
    f.outer_end = close + 3;
    f.body_begin = line_end + 1;
    f.body_end = close;
    f.tag = lower(trim(s.substr(open + 3, line_end - open - 3)));
    out.push_back(f);
    pos = close + 3;
  }
  return out;
}

std::string remove_span(std::string_view s, std::size_t b, std::size_t e) {
  std::string out(s.substr(0, b));
  const std::string before = trim(out);
  const std::string after = trim(s.substr(e));
  if (before.empty()) return after;
  if (after.empty()) return before;
  return before + "\n\n" + after;
}

}  // namespace

ExtractedDot extract_dot(std::string_view response) {
  const auto fs = fences(response);
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& f : fs) {
      const bool tagged = f.tag == "dot" || f.tag == "graphviz" || f.tag == "gv";
      if (pass == 0 && !tagged) continue;
      const auto body = response.substr(f.body_begin, f.body_end - f.body_begin);
      const auto span = graph_span(body);
      if (!span) continue;
      return {std::string(body.substr(span->begin, span->end - span->begin)),
              remove_span(response, f.outer_begin, f.outer_end)};
    }
  }
  if (const auto span = graph_span(response)) {
    return {std::string(response.substr(span->begin, span->end - span->begin)),
            remove_span(response, span->begin, span->end)};
  }
  throw ExtractionError("no dot code found in the model response");
}

int count_words(std::string_view text) {
  int n = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c));
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

}  // namespace rstdiag::pipeline

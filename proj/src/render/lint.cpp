#include "rstdiag/render/lint.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "rstdiag/render/dot_parser.hpp"

namespace rstdiag::render {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool invisible(const DotEdge& e) {
  auto it = e.attrs.find("style");
  return it != e.attrs.end() && lower(it->second).find("invis") != std::string::npos;
}

}  // namespace

std::string_view to_string(LintKind k) {
  switch (k) {
    case LintKind::node_count: return "node_count";
    case LintKind::orphan_node: return "orphan_node";
    case LintKind::unused_node: return "unused_node";
    case LintKind::duplicate_edge: return "duplicate_edge";
    case LintKind::unparseable: return "unparseable";
  }
  return "?";
}

bool check_disclaimer(std::string_view code, const std::vector<std::string>& phrases) {
  std::string label;
  try {
    label = lower(parse_dot(code).graph_attr("label"));
  } catch (const DotParseError&) {
    return false;
  }
  if (label.empty()) return false;
  return std::any_of(phrases.begin(), phrases.end(), [&](const std::string& p) {
    return !p.empty() && label.find(lower(p)) != std::string::npos;
  });
}

std::vector<LintIssue> static_lint(std::string_view code) {
  DotGraph g;
  try {
    g = parse_dot(code);
  } catch (const DotParseError& e) {
    return {{LintKind::unparseable, "", e.what()}};
  }
  std::vector<LintIssue> issues;
  issues.push_back({LintKind::node_count, std::to_string(g.nodes.size()),
                    std::to_string(g.nodes.size()) + " node(s), " + std::to_string(g.edges.size()) + " edge(s)"});

  std::set<std::string> any_edge, visible_edge;
  for (const auto& e : g.edges) {
    any_edge.insert(e.from);
    any_edge.insert(e.to);
    if (!invisible(e)) {
      visible_edge.insert(e.from);
      visible_edge.insert(e.to);
    }
  }
  for (const auto& n : g.nodes) {
    if (!visible_edge.count(n)) issues.push_back({LintKind::orphan_node, n, "node '" + n + "' has no visible edge"});
  }
  for (const auto& n : g.declared_nodes) {
    if (!any_edge.count(n)) issues.push_back({LintKind::unused_node, n, "node '" + n + "' is declared but never connected"});
  }
  std::map<std::pair<std::string, std::string>, int> seen;
  for (const auto& e : g.edges) {
    auto key = std::make_pair(e.from, e.to);
    if (!g.directed && key.second < key.first) std::swap(key.first, key.second);
    if (++seen[key] == 2) {
      const std::string subject = key.first + (g.directed ? " -> " : " -- ") + key.second;
      issues.push_back({LintKind::duplicate_edge, subject, "edge " + subject + " appears more than once"});
    }
  }
  return issues;
}

}  // namespace rstdiag::render

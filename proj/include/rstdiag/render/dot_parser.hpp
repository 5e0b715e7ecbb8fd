#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rstdiag::render {

struct DotAttr {
  std::string key;
  std::string value;  // quoted strings unescaped, HTML strings without the outer <>
  bool operator==(const DotAttr&) const = default;
};

struct DotEdge {
  std::string from;
  std::string to;
  std::map<std::string, std::string> attrs;  // scope edge defaults merged with the statement's list
  int line = 0;
};

/// Flat view of a dot graph: enough structure for linting, not for layout.
struct DotGraph {
  bool strict = false;
  bool directed = true;
  std::string id;
  /// Root-scope graph attributes in source order (`a=b` and `graph [..]`).
  std::vector<DotAttr> graph_attrs;
  /// Node ids with a node statement, in order of first declaration.
  std::vector<std::string> declared_nodes;
  /// Every node id seen anywhere, in order of first appearance.
  std::vector<std::string> nodes;
  std::vector<DotEdge> edges;

  /// Last root-scope value of `key`, or empty.
  std::string graph_attr(std::string_view key) const;
};

class DotParseError : public std::runtime_error {
 public:
  DotParseError(const std::string& message, int line);
  int line() const { return line_; }

 private:
  int line_;
};

/// Parses a single graph. Edges to or from a subgraph expand to every node
/// inside it.
DotGraph parse_dot(std::string_view source);

}  // namespace rstdiag::render

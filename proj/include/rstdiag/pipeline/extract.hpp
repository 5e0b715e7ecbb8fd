#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rstdiag::pipeline {

class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExtractedDot {
  std::string code;
  /// Response text with the code (and its fence, if any) removed, trimmed.
  std::string remainder;
};

/// Fenced blocks are preferred (dot/graphviz/gv tags first, then any block
/// holding a graph). Otherwise the longest brace-balanced span starting at
/// a `digraph`/`graph` keyword is taken; braces inside quoted strings and
/// comments do not count. Throws ExtractionError when nothing qualifies.
ExtractedDot extract_dot(std::string_view response);

/// Whitespace-separated word count.
int count_words(std::string_view text);

}  // namespace rstdiag::pipeline

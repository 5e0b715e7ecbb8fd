#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rstdiag/core/types.hpp"

namespace rstdiag::render {

inline const std::vector<std::string> kDefaultDisclaimerPhrases = {"generated with an AI", "AI model"};

/// True iff the root graph label contains one of `phrases`, ignoring case.
/// Unparseable code has no label and yields false.
bool check_disclaimer(std::string_view code, const std::vector<std::string>& phrases = kDefaultDisclaimerPhrases);
inline bool check_disclaimer(const core::DotSource& code,
                             const std::vector<std::string>& phrases = kDefaultDisclaimerPhrases) {
  return check_disclaimer(code.code, phrases);
}

enum class LintKind { node_count, orphan_node, unused_node, duplicate_edge, unparseable };

std::string_view to_string(LintKind k);

struct LintIssue {
  LintKind kind;
  std::string subject;  // node id, "a -> b", or the count
  std::string message;
  bool operator==(const LintIssue&) const = default;
};

/// Always starts with a node_count entry unless the code is unparseable, in
/// which case the single issue is `unparseable`.
///  orphan_node:    no visible edge (style=invis edges are ignored)
///  unused_node:    has a node statement but appears in no edge at all
///  duplicate_edge: the same endpoint pair more than once (unordered for graphs)
std::vector<LintIssue> static_lint(std::string_view code);
inline std::vector<LintIssue> static_lint(const core::DotSource& code) { return static_lint(code.code); }

}  // namespace rstdiag::render

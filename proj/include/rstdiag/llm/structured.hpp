#pragma once

#include <optional>
#include <string_view>

#include "rstdiag/core/types.hpp"

namespace rstdiag::llm {

/// Parses the grader output format "Q1: <int> Q2: <int> Q3: <int>". Returns
/// nullopt if any label is missing or any value is outside 1..5.
std::optional<core::ScoreTriple> parse_score_triple(std::string_view text);

/// First integer in the reply, accepted only if it lies in 1..max_index.
std::optional<int> parse_index_choice(std::string_view text, int max_index);

}  // namespace rstdiag::llm

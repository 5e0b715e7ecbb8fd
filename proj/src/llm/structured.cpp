#include "rstdiag/llm/structured.hpp"

#include <cctype>
#include <regex>
#include <string>

namespace rstdiag::llm {

std::optional<core::ScoreTriple> parse_score_triple(std::string_view text) {
  static const std::regex kLabel(R"(\bQ([123])\s*[:=]\s*\**\s*(-?\d+))", std::regex::icase);
  std::optional<int> values[3];
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), kLabel); it != std::sregex_iterator(); ++it) {
    const int slot = std::stoi((*it)[1].str()) - 1;
    if (values[slot]) continue;  // first occurrence wins
    values[slot] = std::stoi((*it)[2].str());
  }
  for (const auto& v : values)
    if (!v || !rubric::in_score_range(*v)) return std::nullopt;
  return core::ScoreTriple{*values[0], *values[1], *values[2]};
}

std::optional<int> parse_index_choice(std::string_view text, int max_index) {
  std::size_t i = 0;
  while (i < text.size() && !std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
  if (i == text.size()) return std::nullopt;
  std::size_t j = i;
  while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
  if (j - i > 6) return std::nullopt;
  const int value = std::stoi(std::string(text.substr(i, j - i)));
  if (value < 1 || value > max_index) return std::nullopt;
  return value;
}

}  // namespace rstdiag::llm

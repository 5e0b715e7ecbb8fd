#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rstdiag::llm {

enum class TemplateId { R1, R2, R3rst1, R3rst2, R30, R4, R5, Ra };

inline constexpr std::size_t kTemplateCount = 8;
inline constexpr std::array kAllTemplates = {TemplateId::R1,  TemplateId::R2, TemplateId::R3rst1, TemplateId::R3rst2,
                                             TemplateId::R30, TemplateId::R4, TemplateId::R5,     TemplateId::Ra};

std::string_view to_string(TemplateId id);
/// Throws std::invalid_argument for unknown names.
TemplateId parse_template_id(std::string_view name);

/// Message bodies with `{slot}` placeholders.
struct TemplateBody {
  TemplateId id;
  std::string_view system;
  std::string_view user;
};

const TemplateBody& template_body(TemplateId id);

/// Placeholder names of a template, in order of first appearance.
std::vector<std::string> template_slots(TemplateId id);
/// Slots that render as empty text when unbound (R1's user turn).
std::vector<std::string> optional_slots(TemplateId id);

/// A list value renders as its items separated by a blank line.
using SlotValue = std::variant<std::string, std::vector<std::string>>;
using SlotBindings = std::map<std::string, SlotValue>;

struct RenderedPrompt {
  std::string system_message;
  std::string user_message;
};

class UnboundSlotError : public std::invalid_argument {
 public:
  UnboundSlotError(TemplateId id, std::string slot);
  const std::string& slot() const { return slot_; }

 private:
  std::string slot_;
};

class UnknownSlotError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Substitutes every placeholder once; slot values are inserted verbatim and
/// never re-scanned for placeholders.
RenderedPrompt render_prompt(TemplateId id, const SlotBindings& bindings);

}  // namespace rstdiag::llm

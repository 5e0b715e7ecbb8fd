#include "rstdiag/llm/prompts.hpp"

#include <algorithm>

namespace rstdiag::llm {

namespace detail {
extern const std::array<TemplateBody, kTemplateCount> kTemplateBodies;
}

namespace {

// Appends placeholder names found in `body` to `out` (no duplicates).
void collect_slots(std::string_view body, std::vector<std::string>& out) {
  std::size_t pos = 0;
  while ((pos = body.find('{', pos)) != std::string_view::npos) {
    const auto end = body.find('}', pos);
    if (end == std::string_view::npos) break;
    std::string name(body.substr(pos + 1, end - pos - 1));
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
    pos = end + 1;
  }
}

std::string join_items(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += "\n\n";
    out += items[i];
  }
  return out;
}

std::string substitute(TemplateId id, std::string_view body, const SlotBindings& bindings) {
  const auto optional = optional_slots(id);
  std::string out;
  out.reserve(body.size());
  std::size_t pos = 0;
  while (true) {
    const auto open = body.find('{', pos);
    if (open == std::string_view::npos) break;
    const auto close = body.find('}', open);
    out.append(body.substr(pos, open - pos));
    const std::string name(body.substr(open + 1, close - open - 1));
    const auto it = bindings.find(name);
    if (it == bindings.end()) {
      if (std::find(optional.begin(), optional.end(), name) == optional.end()) throw UnboundSlotError(id, name);
    } else if (const auto* s = std::get_if<std::string>(&it->second)) {
      out += *s;
    } else {
      out += join_items(std::get<std::vector<std::string>>(it->second));
    }
    pos = close + 1;
  }
  out.append(body.substr(pos));
  return out;
}

}  // namespace

std::string_view to_string(TemplateId id) {
  switch (id) {
    case TemplateId::R1: return "R1";
    case TemplateId::R2: return "R2";
    case TemplateId::R3rst1: return "R3rst1";
    case TemplateId::R3rst2: return "R3rst2";
    case TemplateId::R30: return "R30";
    case TemplateId::R4: return "R4";
    case TemplateId::R5: return "R5";
    case TemplateId::Ra: return "Ra";
  }
  return "?";
}

TemplateId parse_template_id(std::string_view name) {
  for (auto id : kAllTemplates)
    if (to_string(id) == name) return id;
  throw std::invalid_argument("unknown template id '" + std::string(name) + "'");
}

const TemplateBody& template_body(TemplateId id) {
  for (const auto& t : detail::kTemplateBodies)
    if (t.id == id) return t;
  throw std::logic_error("template table is missing an entry");
}

std::vector<std::string> template_slots(TemplateId id) {
  const auto& t = template_body(id);
  std::vector<std::string> out;
  collect_slots(t.system, out);
  collect_slots(t.user, out);
  return out;
}

std::vector<std::string> optional_slots(TemplateId id) {
  if (id == TemplateId::R1) return {"text"};
  return {};
}

UnboundSlotError::UnboundSlotError(TemplateId id, std::string slot)
    : std::invalid_argument("template " + std::string(to_string(id)) + ": slot '" + slot + "' is not bound"),
      slot_(std::move(slot)) {}

RenderedPrompt render_prompt(TemplateId id, const SlotBindings& bindings) {
  const auto slots = template_slots(id);
  for (const auto& [name, value] : bindings)
    if (std::find(slots.begin(), slots.end(), name) == slots.end())
      throw UnknownSlotError("template " + std::string(to_string(id)) + " has no slot '" + name + "'");
  const auto& t = template_body(id);
  return {substitute(id, t.system, bindings), substitute(id, t.user, bindings)};
}

}  // namespace rstdiag::llm

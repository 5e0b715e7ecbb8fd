#include "rstdiag/llm/mock_backend.hpp"

#include <fstream>

namespace rstdiag::llm {

using nlohmann::json;

MockBackend::MockBackend(std::vector<MockStep> script, bool accepts_images)
    : script_(std::move(script)), accepts_images_(accepts_images) {}

std::vector<MockStep> MockBackend::parse_script(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("mock script must be a JSON array");
  std::vector<MockStep> steps;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    const std::string where = "mock script step " + std::to_string(i + 1);
    if (!e.is_object()) throw std::invalid_argument(where + ": not an object");
    MockStep s;
    if (auto m = e.find("match"); m != e.end()) {
      if (!m->is_object()) throw std::invalid_argument(where + ": match must be an object");
      if (m->contains("template")) s.template_id = parse_template_id(m->at("template").get<std::string>());
      if (m->contains("contains")) s.contains = m->at("contains").get<std::string>();
    }
    if (auto err = e.find("error"); err != e.end()) {
      const auto kind = err->get<std::string>();
      if (kind == "transport")
        s.outcome = MockStep::Outcome::transport_error;
      else if (kind == "refusal")
        s.outcome = MockStep::Outcome::refusal;
      else
        throw std::invalid_argument(where + ": unknown error kind '" + kind + "'");
    }
    if (e.contains("response")) s.response = e.at("response").get<std::string>();
    steps.push_back(std::move(s));
  }
  return steps;
}

std::vector<MockStep> MockBackend::load_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mock script " + path.string());
  return parse_script(json::parse(in));
}

BackendReply MockBackend::complete(const ChatRequest& request) {
  std::lock_guard lock(mu_);
  if (cursor_ >= script_.size())
    throw MockScriptError("mock script exhausted after " + std::to_string(script_.size()) + " step(s)");
  const MockStep& step = script_[cursor_];
  if (step.template_id && request.template_id != step.template_id) {
    throw MockScriptError("mock step " + std::to_string(cursor_ + 1) + " expects template " +
                          std::string(to_string(*step.template_id)) + ", got " +
                          (request.template_id ? std::string(to_string(*request.template_id)) : "none"));
  }
  if (step.contains && request.system_message.find(*step.contains) == std::string::npos &&
      request.user_message.find(*step.contains) == std::string::npos) {
    throw MockScriptError("mock step " + std::to_string(cursor_ + 1) + " expects a message containing '" +
                          *step.contains + "'");
  }
  ++cursor_;
  switch (step.outcome) {
    case MockStep::Outcome::transport_error:
      throw TransportError(step.response.empty() ? "scripted transport failure" : step.response);
    case MockStep::Outcome::refusal:
      throw RefusalError(step.response.empty() ? "scripted refusal" : step.response);
    case MockStep::Outcome::reply:
      break;
  }
  return {step.response, accepts_images_ && !request.attachments.empty()};
}

bool MockBackend::exhausted() const { return remaining() == 0; }

std::size_t MockBackend::consumed() const {
  std::lock_guard lock(mu_);
  return cursor_;
}

std::size_t MockBackend::remaining() const {
  std::lock_guard lock(mu_);
  return script_.size() - cursor_;
}

MockStep reply_to(TemplateId id, std::string text) {
  MockStep s;
  s.template_id = id;
  s.response = std::move(text);
  return s;
}

MockStep transport_failure(std::string message) {
  MockStep s;
  s.outcome = MockStep::Outcome::transport_error;
  s.response = std::move(message);
  return s;
}

}  // namespace rstdiag::llm

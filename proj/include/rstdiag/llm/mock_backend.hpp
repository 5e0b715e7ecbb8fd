#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rstdiag/llm/gateway.hpp"

namespace rstdiag::llm {

struct MockStep {
  enum class Outcome { reply, transport_error, refusal };

  // Matchers; an entry with neither matches any request.
  std::optional<TemplateId> template_id;
  std::optional<std::string> contains;  // substring of system or user message

  Outcome outcome = Outcome::reply;
  std::string response;  // reply text, or the error message
};

/// Raised when a request does not match the next scripted step or the
/// script is exhausted. Not a GatewayError, so it is never retried.
class MockScriptError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Deterministic scripted backend. Steps are consumed strictly in order.
class MockBackend : public ChatBackend {
 public:
  explicit MockBackend(std::vector<MockStep> script, bool accepts_images = true);

  /// Loads `[{"match": {"template": "R1"} | {"contains": "..."} | {},
  ///          "response": "...", "error": "transport" | "refusal"}]`.
  static std::vector<MockStep> load_script(const std::filesystem::path& path);
  static std::vector<MockStep> parse_script(const nlohmann::json& j);

  BackendReply complete(const ChatRequest& request) override;
  std::string name() const override { return "mock"; }

  bool exhausted() const;
  std::size_t consumed() const;
  std::size_t remaining() const;

 private:
  std::vector<MockStep> script_;
  bool accepts_images_;
  mutable std::mutex mu_;
  std::size_t cursor_ = 0;
};

MockStep reply_to(TemplateId id, std::string text);
MockStep transport_failure(std::string message = "scripted transport failure");

}  // namespace rstdiag::llm

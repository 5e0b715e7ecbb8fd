#pragma once

#include <chrono>
#include <string>

#include "rstdiag/llm/gateway.hpp"

namespace rstdiag::llm {

struct HttpBackendOptions {
  /// Full URL of an OpenAI-compatible chat completions endpoint,
  /// e.g. https://api.openai.com/v1/chat/completions.
  std::string endpoint;
  /// Name of the environment variable holding the API key; empty for none.
  std::string api_key_env;
  bool supports_images = true;
  std::chrono::seconds timeout{120};
  /// Extra request fields (temperature, top_p, seed, ...).
  nlohmann::json sampling = nlohmann::json::object();
};

/// Chat-completions client. 5xx, 429 and network failures raise
/// TransportError; a content filter or explicit refusal raises RefusalError;
/// other client errors raise GatewayError.
class HttpBackend : public ChatBackend {
 public:
  explicit HttpBackend(HttpBackendOptions options);

  BackendReply complete(const ChatRequest& request) override;
  std::string name() const override { return "http:" + options_.endpoint; }

  /// Request body as sent; exposed for tests.
  nlohmann::json build_body(const ChatRequest& request) const;

 private:
  HttpBackendOptions options_;
  std::string base_;  // scheme://host[:port]
  std::string path_;
  std::string api_key_;
};

}  // namespace rstdiag::llm

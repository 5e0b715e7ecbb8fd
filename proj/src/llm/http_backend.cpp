#include "rstdiag/llm/http_backend.hpp"

#include <cstdlib>

#include <httplib.h>

#include "rstdiag/core/encoding.hpp"

namespace rstdiag::llm {

using nlohmann::json;

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
  const auto scheme_end = options_.endpoint.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("endpoint must be an absolute URL: " + options_.endpoint);
  const auto path_start = options_.endpoint.find('/', scheme_end + 3);
  base_ = options_.endpoint.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/v1/chat/completions" : options_.endpoint.substr(path_start);
  if (!options_.api_key_env.empty()) {
    const char* key = std::getenv(options_.api_key_env.c_str());
    if (!key || !*key) throw std::runtime_error("environment variable " + options_.api_key_env + " is not set");
    api_key_ = key;
  }
}

json HttpBackend::build_body(const ChatRequest& request) const {
  json messages = json::array();
  if (!request.system_message.empty()) messages.push_back({{"role", "system"}, {"content", request.system_message}});
  if (options_.supports_images && !request.attachments.empty()) {
    json parts = json::array();
    if (!request.user_message.empty()) parts.push_back({{"type", "text"}, {"text", request.user_message}});
    for (const auto& a : request.attachments) {
      parts.push_back({{"type", "image_url"},
                       {"image_url", {{"url", "data:" + a.mime_type + ";base64," + core::base64_encode(a.bytes)}}}});
    }
    messages.push_back({{"role", "user"}, {"content", parts}});
  } else if (!request.user_message.empty()) {
    messages.push_back({{"role", "user"}, {"content", request.user_message}});
  }
  json body = options_.sampling.is_object() ? options_.sampling : json::object();
  body["model"] = request.model_id;
  body["messages"] = std::move(messages);
  return body;
}

BackendReply HttpBackend::complete(const ChatRequest& request) {
  httplib::Client client(base_);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  client.set_write_timeout(options_.timeout);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  auto res = client.Post(path_, headers, build_body(request).dump(), "application/json");
  if (!res) throw TransportError("request to " + options_.endpoint + " failed: " + httplib::to_string(res.error()));
  if (res->status == 429 || res->status >= 500)
    throw TransportError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500));
  if (res->status != 200) throw GatewayError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500));

  json reply;
  try {
    reply = json::parse(res->body);
  } catch (const json::exception& e) {
    throw GatewayError(std::string("malformed response body: ") + e.what());
  }
  if (!reply.contains("choices") || reply["choices"].empty()) throw GatewayError("response has no choices");
  const auto& choice = reply["choices"][0];
  const auto& message = choice.value("message", json::object());
  if (message.contains("refusal") && message["refusal"].is_string())
    throw RefusalError(message["refusal"].get<std::string>());
  if (choice.value("finish_reason", json()) == "content_filter") throw RefusalError("response withheld by content filter");
  if (!message.contains("content") || !message["content"].is_string()) throw GatewayError("response has no text content");
  return {message["content"].get<std::string>(), options_.supports_images && !request.attachments.empty()};
}

}  // namespace rstdiag::llm

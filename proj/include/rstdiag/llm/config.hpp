#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "rstdiag/llm/gateway.hpp"

namespace rstdiag::llm {

struct BackendConfig {
  std::string kind = "mock";  // "mock" or "http"
  std::string endpoint;
  std::string api_key_env;
  std::filesystem::path mock_script;
  bool supports_images = true;
  int timeout_s = 120;
};

/// Effective settings for a batch run. Precedence: flags > env > file.
struct Config {
  BackendConfig backend;
  std::string model = "o3";
  std::string repair_model = "gpt-4o";
  int max_retries = 2;
  int retry_backoff_ms = 500;
  int structured_attempts = 3;
  nlohmann::json sampling = nlohmann::json::object();
  std::string dot_path;  // empty: build-time default
  int render_timeout_s = 30;
  int repair_max_iters = 5;
  int jobs = 1;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void to_json(nlohmann::json& j, const Config& c);
/// Missing keys keep their current values; unknown keys are rejected.
void merge_config(Config& c, const nlohmann::json& j);
Config load_config(const std::filesystem::path& path);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

/// Applies RSTDIAG_BACKEND, RSTDIAG_ENDPOINT, RSTDIAG_API_KEY_ENV,
/// RSTDIAG_MOCK_SCRIPT, RSTDIAG_MODEL, RSTDIAG_REPAIR_MODEL, RSTDIAG_DOT.
void apply_env(Config& c, const EnvLookup& env);

GatewayOptions gateway_options(const Config& c);
/// Throws ConfigError for an unknown kind or a missing endpoint/script.
std::shared_ptr<ChatBackend> make_backend(const Config& c);

}  // namespace rstdiag::llm

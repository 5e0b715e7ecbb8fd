#include "rstdiag/llm/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "rstdiag/llm/http_backend.hpp"
#include "rstdiag/llm/mock_backend.hpp"

namespace rstdiag::llm {

using nlohmann::json;

void to_json(json& j, const Config& c) {
  j = {{"backend",
        {{"kind", c.backend.kind},
         {"endpoint", c.backend.endpoint},
         {"api_key_env", c.backend.api_key_env},
         {"mock_script", c.backend.mock_script.string()},
         {"supports_images", c.backend.supports_images},
         {"timeout_s", c.backend.timeout_s}}},
       {"model", c.model},
       {"repair_model", c.repair_model},
       {"max_retries", c.max_retries},
       {"retry_backoff_ms", c.retry_backoff_ms},
       {"structured_attempts", c.structured_attempts},
       {"sampling", c.sampling},
       {"dot_path", c.dot_path},
       {"render_timeout_s", c.render_timeout_s},
       {"repair_max_iters", c.repair_max_iters},
       {"jobs", c.jobs}};
}

namespace {

template <class T>
void take(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
  }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw ConfigError("unknown config key '" + where + k + "'");
  }
}

}  // namespace

void merge_config(Config& c, const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"backend", "model", "repair_model", "max_retries", "retry_backoff_ms", "structured_attempts",
                  "sampling", "dot_path", "render_timeout_s", "repair_max_iters", "jobs"},
                 "");
  if (auto b = j.find("backend"); b != j.end()) {
    if (!b->is_object()) throw ConfigError("config key 'backend' must be an object");
    reject_unknown(*b, {"kind", "endpoint", "api_key_env", "mock_script", "supports_images", "timeout_s"}, "backend.");
    take(*b, "kind", c.backend.kind);
    take(*b, "endpoint", c.backend.endpoint);
    take(*b, "api_key_env", c.backend.api_key_env);
    std::string script = c.backend.mock_script.string();
    take(*b, "mock_script", script);
    c.backend.mock_script = script;
    take(*b, "supports_images", c.backend.supports_images);
    take(*b, "timeout_s", c.backend.timeout_s);
  }
  take(j, "model", c.model);
  take(j, "repair_model", c.repair_model);
  take(j, "max_retries", c.max_retries);
  take(j, "retry_backoff_ms", c.retry_backoff_ms);
  take(j, "structured_attempts", c.structured_attempts);
  take(j, "sampling", c.sampling);
  take(j, "dot_path", c.dot_path);
  take(j, "render_timeout_s", c.render_timeout_s);
  take(j, "repair_max_iters", c.repair_max_iters);
  take(j, "jobs", c.jobs);
  if (!c.sampling.is_object()) throw ConfigError("config key 'sampling' must be an object");
  if (c.repair_max_iters < 1) throw ConfigError("repair_max_iters must be >= 1");
  if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  Config c;
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  merge_config(c, j);
  // Relative script paths are resolved against the config file.
  if (!c.backend.mock_script.empty() && c.backend.mock_script.is_relative())
    c.backend.mock_script = path.parent_path() / c.backend.mock_script;
  return c;
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
}

void apply_env(Config& c, const EnvLookup& env) {
  if (auto v = env("RSTDIAG_BACKEND")) c.backend.kind = *v;
  if (auto v = env("RSTDIAG_ENDPOINT")) c.backend.endpoint = *v;
  if (auto v = env("RSTDIAG_API_KEY_ENV")) c.backend.api_key_env = *v;
  if (auto v = env("RSTDIAG_MOCK_SCRIPT")) c.backend.mock_script = *v;
  if (auto v = env("RSTDIAG_MODEL")) c.model = *v;
  if (auto v = env("RSTDIAG_REPAIR_MODEL")) c.repair_model = *v;
  if (auto v = env("RSTDIAG_DOT")) c.dot_path = *v;
}

GatewayOptions gateway_options(const Config& c) {
  GatewayOptions o;
  o.max_retries = c.max_retries;
  o.retry_backoff = std::chrono::milliseconds(c.retry_backoff_ms);
  o.structured_attempts = c.structured_attempts;
  o.sampling = c.sampling;
  return o;
}

std::shared_ptr<ChatBackend> make_backend(const Config& c) {
  if (c.backend.kind == "mock") {
    if (c.backend.mock_script.empty()) throw ConfigError("mock backend requires backend.mock_script");
    try {
      return std::make_shared<MockBackend>(MockBackend::load_script(c.backend.mock_script), c.backend.supports_images);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  if (c.backend.kind == "http") {
    if (c.backend.endpoint.empty()) throw ConfigError("http backend requires backend.endpoint");
    HttpBackendOptions o;
    o.endpoint = c.backend.endpoint;
    o.api_key_env = c.backend.api_key_env;
    o.supports_images = c.backend.supports_images;
    o.timeout = std::chrono::seconds(c.backend.timeout_s);
    o.sampling = c.sampling;
    try {
      return std::make_shared<HttpBackend>(std::move(o));
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  throw ConfigError("unknown backend kind '" + c.backend.kind + "'");
}

}  // namespace rstdiag::llm

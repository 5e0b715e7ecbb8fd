#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rstdiag/core/types.hpp"
#include "rstdiag/llm/prompts.hpp"

namespace rstdiag::llm {

enum class StructuredSchema { score_triple, index_choice };

struct Attachment {
  std::string bytes;
  std::string mime_type = "image/png";
};

struct ChatRequest {
  std::string model_id;
  std::string system_message;
  std::string user_message;
  std::optional<StructuredSchema> schema;
  std::vector<Attachment> attachments;
  /// Which bundled template produced the messages, if any; used for call-log
  /// assertions and mock matching.
  std::optional<TemplateId> template_id;
  /// Free-form label for requests not built from a bundled template.
  std::string purpose;
};

/// Builds a request from a bundled template. Throws on unbound slots.
ChatRequest make_request(TemplateId id, const SlotBindings& bindings, std::string model_id);

struct BackendReply {
  std::string text;
  bool images_accepted = false;
};

class GatewayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Network failures, timeouts, 5xx and rate limits. Retried by the gateway.
class TransportError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

/// The backend answered but declined the request. Not retried.
class RefusalError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

/// The reply could not be parsed into the requested schema.
class StructuredOutputError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual BackendReply complete(const ChatRequest& request) = 0;
  virtual std::string name() const = 0;
};

struct CallLogEntry {
  std::uint64_t seq = 0;
  std::uint64_t call_id = 0;  // one logical call; retries share it
  int attempt = 0;            // 0 for the first transport attempt
  bool is_retry = false;
  int structured_attempt = 0; // parse-and-reject round, 0 when unstructured
  std::optional<TemplateId> template_id;
  std::string purpose;
  std::string model_id;
  std::string system_message;
  std::string user_message;
  std::size_t attachments = 0;
  bool images_accepted = false;
  std::string response;
  std::string error;
  std::string error_kind;  // "", "transport", "refusal", "structured"
  double latency_ms = 0.0;
  std::string timestamp;
  nlohmann::json sampling;
};

void to_json(nlohmann::json& j, const CallLogEntry& e);

/// Append-only record of every backend attempt. Optionally mirrored to a
/// JSONL file; each entry is written with a single locked append.
class CallLog {
 public:
  CallLog() = default;
  explicit CallLog(std::filesystem::path jsonl_path);

  void append(CallLogEntry entry);
  std::vector<CallLogEntry> entries() const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::vector<CallLogEntry> entries_;
  std::optional<std::filesystem::path> path_;
  std::ofstream file_;
  std::uint64_t next_seq_ = 1;
};

struct GatewayOptions {
  int max_retries = 2;                        // extra transport attempts
  std::chrono::milliseconds retry_backoff{0};  // linear backoff per attempt
  int structured_attempts = 3;
  nlohmann::json sampling = nlohmann::json::object();
};

class Gateway {
 public:
  Gateway(std::shared_ptr<ChatBackend> backend, GatewayOptions options = {},
          std::shared_ptr<CallLog> log = std::make_shared<CallLog>());

  /// Full assistant text. Retries transport errors up to max_retries times.
  std::string complete(const ChatRequest& request);

  /// Reply parsed as "Q1: n Q2: n Q3: n" with every score in 1..5.
  core::ScoreTriple complete_score_triple(ChatRequest request);
  /// Reply parsed as an index in 1..max_index.
  int complete_index(ChatRequest request, int max_index);

  CallLog& call_log() { return *log_; }
  const GatewayOptions& options() const { return options_; }
  std::string backend_name() const { return backend_->name(); }

 private:
  // `reject` returns a reason when a successful reply fails to parse; the
  // attempt is then logged with error_kind "structured".
  using Rejector = std::function<std::optional<std::string>(const std::string&)>;
  std::string complete_impl(const ChatRequest& request, int structured_attempt, const Rejector& reject = {});

  std::shared_ptr<ChatBackend> backend_;
  GatewayOptions options_;
  std::shared_ptr<CallLog> log_;
  std::mutex id_mu_;
  std::uint64_t next_call_id_ = 1;
};

}  // namespace rstdiag::llm

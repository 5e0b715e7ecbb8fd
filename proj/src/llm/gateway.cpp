#include "rstdiag/llm/gateway.hpp"

#include <thread>

#include "rstdiag/core/encoding.hpp"
#include "rstdiag/llm/structured.hpp"

namespace rstdiag::llm {

using nlohmann::json;

ChatRequest make_request(TemplateId id, const SlotBindings& bindings, std::string model_id) {
  auto rendered = render_prompt(id, bindings);
  ChatRequest r;
  r.model_id = std::move(model_id);
  r.system_message = std::move(rendered.system_message);
  r.user_message = std::move(rendered.user_message);
  r.template_id = id;
  return r;
}

void to_json(json& j, const CallLogEntry& e) {
  j = {{"seq", e.seq},
       {"call_id", e.call_id},
       {"attempt", e.attempt},
       {"is_retry", e.is_retry},
       {"structured_attempt", e.structured_attempt},
       {"template_id", e.template_id ? json(std::string(to_string(*e.template_id))) : json(nullptr)},
       {"purpose", e.purpose},
       {"model_id", e.model_id},
       {"system_message", e.system_message},
       {"user_message", e.user_message},
       {"attachments", e.attachments},
       {"images_accepted", e.images_accepted},
       {"response", e.response},
       {"error", e.error},
       {"error_kind", e.error_kind},
       {"latency_ms", e.latency_ms},
       {"timestamp", e.timestamp},
       {"sampling", e.sampling}};
}

CallLog::CallLog(std::filesystem::path jsonl_path) : path_(std::move(jsonl_path)) {
  if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
  file_.open(*path_, std::ios::app | std::ios::binary);
  if (!file_) throw std::runtime_error("cannot open call log " + path_->string());
}

void CallLog::append(CallLogEntry entry) {
  std::lock_guard lock(mu_);
  entry.seq = next_seq_++;
  if (file_.is_open()) {
    file_ << json(entry).dump() << '\n';
    file_.flush();
  }
  entries_.push_back(std::move(entry));
}

std::vector<CallLogEntry> CallLog::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::size_t CallLog::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

Gateway::Gateway(std::shared_ptr<ChatBackend> backend, GatewayOptions options, std::shared_ptr<CallLog> log)
    : backend_(std::move(backend)), options_(std::move(options)), log_(std::move(log)) {
  if (!backend_) throw std::invalid_argument("gateway requires a backend");
  if (!log_) log_ = std::make_shared<CallLog>();
  if (options_.max_retries < 0) throw std::invalid_argument("max_retries must be >= 0");
  if (options_.structured_attempts < 1) throw std::invalid_argument("structured_attempts must be >= 1");
}

std::string Gateway::complete(const ChatRequest& request) { return complete_impl(request, 0); }

std::string Gateway::complete_impl(const ChatRequest& request, int structured_attempt, const Rejector& reject) {
  if (request.system_message.empty() && request.user_message.empty())
    throw std::invalid_argument("chat request has neither a system nor a user message");
  std::uint64_t call_id;
  {
    std::lock_guard lock(id_mu_);
    call_id = next_call_id_++;
  }
  for (int attempt = 0;; ++attempt) {
    CallLogEntry entry;
    entry.call_id = call_id;
    entry.attempt = attempt;
    entry.is_retry = attempt > 0;
    entry.structured_attempt = structured_attempt;
    entry.template_id = request.template_id;
    entry.purpose = request.purpose;
    entry.model_id = request.model_id;
    entry.system_message = request.system_message;
    entry.user_message = request.user_message;
    entry.attachments = request.attachments.size();
    entry.timestamp = core::utc_now_iso();
    entry.sampling = options_.sampling;

    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
      return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    };
    try {
      BackendReply reply = backend_->complete(request);
      entry.latency_ms = elapsed();
      entry.response = reply.text;
      entry.images_accepted = reply.images_accepted;
      if (reject) {
        if (auto reason = reject(reply.text)) {
          entry.error = *reason;
          entry.error_kind = "structured";
        }
      }
      log_->append(std::move(entry));
      return reply.text;
    } catch (const TransportError& e) {
      entry.latency_ms = elapsed();
      entry.error = e.what();
      entry.error_kind = "transport";
      log_->append(std::move(entry));
      if (attempt >= options_.max_retries) throw;
      if (options_.retry_backoff.count() > 0) std::this_thread::sleep_for(options_.retry_backoff * (attempt + 1));
    } catch (const RefusalError& e) {
      entry.latency_ms = elapsed();
      entry.error = e.what();
      entry.error_kind = "refusal";
      log_->append(std::move(entry));
      throw;
    } catch (const std::exception& e) {
      entry.latency_ms = elapsed();
      entry.error = e.what();
      entry.error_kind = "backend";
      log_->append(std::move(entry));
      throw;
    }
  }
}

core::ScoreTriple Gateway::complete_score_triple(ChatRequest request) {
  request.schema = StructuredSchema::score_triple;
  std::string last;
  for (int k = 1; k <= options_.structured_attempts; ++k) {
    std::optional<core::ScoreTriple> parsed;
    last = complete_impl(request, k, [&](const std::string& text) -> std::optional<std::string> {
      parsed = parse_score_triple(text);
      if (parsed) return std::nullopt;
      return "reply does not contain Q1..Q3 scores in 1..5";
    });
    if (parsed) return *parsed;
  }
  throw StructuredOutputError("no valid score triple after " + std::to_string(options_.structured_attempts) +
                              " attempt(s); last reply: " + last.substr(0, 200));
}

int Gateway::complete_index(ChatRequest request, int max_index) {
  request.schema = StructuredSchema::index_choice;
  std::string last;
  for (int k = 1; k <= options_.structured_attempts; ++k) {
    std::optional<int> parsed;
    last = complete_impl(request, k, [&](const std::string& text) -> std::optional<std::string> {
      parsed = parse_index_choice(text, max_index);
      if (parsed) return std::nullopt;
      return "reply does not contain an index in 1.." + std::to_string(max_index);
    });
    if (parsed) return *parsed;
  }
  throw StructuredOutputError("no valid index in 1.." + std::to_string(max_index) + " after " +
                              std::to_string(options_.structured_attempts) +
                              " attempt(s); last reply: " + last.substr(0, 200));
}

}  // namespace rstdiag::llm

#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rstdiag/core/types.hpp"
#include "rstdiag/stats/summary.hpp"

namespace rstdiag::service {

/// Carries the HTTP status the error maps to.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, const std::string& message) : std::runtime_error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

struct RaterServiceConfig {
  std::map<std::string, std::string> rater_tokens;  // bearer token -> rater id
  std::set<std::string> admin_tokens;
  /// Assignment order; empty means the token raters sorted by id.
  std::vector<std::string> rater_pool;
  bool blinding = true;
  stats::AlphaOptions alpha;
  /// Base directory for record image paths.
  std::filesystem::path image_base;
  /// When set, the dataset is rewritten here after every accepted change.
  std::optional<std::filesystem::path> persist_path;

  /// {"raters": {"token": "rater-id"}, "admin_tokens": [...], "rater_pool": [...], "blinding": true}
  static RaterServiceConfig from_json(const nlohmann::json& j);
};

/// Strict {"h_fact": bool, ...}; throws ServiceError(400).
core::HallucinationTags parse_hallucination_tags(const nlohmann::json& j);

struct Viewer {
  std::optional<std::string> rater_id;
  bool admin = false;
};

/// Rating workflow over an evaluation dataset. Every diagram goes to two
/// distinct raters: diagram i (dataset order) is assigned to
/// pool[2i mod P] and pool[(2i+1) mod P]. C1 and C3 are always recomputed
/// from the submitted L scores and layout flags.
class RaterService {
 public:
  RaterService(core::EvaluationDataset dataset, RaterServiceConfig config);

  /// Resolves an "Authorization: Bearer ..." token; throws 401.
  Viewer authenticate(const std::string& token) const;

  std::vector<std::string> assigned_raters(const std::string& diagram_id) const;
  /// Diagram ids assigned to the rater and not yet scored by them.
  std::vector<std::string> pending(const std::string& rater_id) const;

  nlohmann::json list_diagrams(const Viewer& viewer) const;
  nlohmann::json get_diagram(const std::string& diagram_id, const Viewer& viewer) const;
  /// Image bytes and MIME type.
  std::pair<std::string, std::string> get_image(const std::string& diagram_id) const;

  /// 400 on malformed or out-of-range input, 403 when not assigned, 404 on
  /// an unknown diagram, 409 on a repeated submission.
  core::RubricAnnotation submit_scores(const std::string& rater_id, const std::string& diagram_id,
                                       const nlohmann::json& payload);
  void submit_consensus(const std::string& diagram_id, const core::HallucinationTags& tags);

  /// Per criterion over the diagrams with two ratings.
  std::vector<stats::ReliabilityEstimate> irr_summary() const;
  nlohmann::json irr_summary_json() const;

  /// With blinding on: diagram ids that spell out their own model or method
  /// name, which raters would see in URLs and listings.
  std::vector<std::string> blinding_leaks() const;

  core::EvaluationDataset snapshot() const;
  const RaterServiceConfig& config() const { return config_; }

 private:
  const core::EvaluationRecord& record(const std::string& diagram_id) const;
  std::size_t index_of(const std::string& diagram_id) const;
  nlohmann::json diagram_view(std::size_t index, const Viewer& viewer) const;
  void persist() const;

  mutable std::mutex mu_;
  core::EvaluationDataset dataset_;
  RaterServiceConfig config_;
  std::vector<std::string> pool_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace rstdiag::service

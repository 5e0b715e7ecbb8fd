#include "rstdiag/service/rater_service.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "rstdiag/core/json.hpp"
#include "rstdiag/core/validate.hpp"
#include "rstdiag/store/dataset_io.hpp"

namespace rstdiag::service {

using nlohmann::json;

RaterServiceConfig RaterServiceConfig::from_json(const json& j) {
  RaterServiceConfig c;
  if (!j.is_object()) throw std::invalid_argument("service config must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& key = it.key();
    if (key == "raters") {
      for (auto r = it->begin(); r != it->end(); ++r) c.rater_tokens[r.key()] = r->get<std::string>();
    } else if (key == "admin_tokens") {
      for (const auto& t : *it) c.admin_tokens.insert(t.get<std::string>());
    } else if (key == "rater_pool") {
      c.rater_pool = it->get<std::vector<std::string>>();
    } else if (key == "blinding") {
      c.blinding = it->get<bool>();
    } else if (key == "bootstrap_samples") {
      c.alpha.bootstrap_samples = it->get<int>();
    } else if (key == "seed") {
      c.alpha.seed = it->get<std::uint64_t>();
    } else {
      throw std::invalid_argument("unknown service config key: " + key);
    }
  }
  return c;
}

RaterService::RaterService(core::EvaluationDataset dataset, RaterServiceConfig config)
    : dataset_(std::move(dataset)), config_(std::move(config)) {
  pool_ = config_.rater_pool;
  if (pool_.empty()) {
    std::set<std::string> ids;
    for (const auto& [token, id] : config_.rater_tokens) ids.insert(id);
    pool_.assign(ids.begin(), ids.end());
  }
  std::set<std::string> unique(pool_.begin(), pool_.end());
  if (unique.size() != pool_.size()) throw std::invalid_argument("rater pool has duplicates");
  if (pool_.size() < std::size_t(core::kRatersPerDiagram))
    throw std::invalid_argument("rater pool needs at least two raters");
  for (std::size_t i = 0; i < dataset_.records.size(); ++i) {
    if (!index_.emplace(dataset_.records[i].diagram_id, i).second)
      throw std::invalid_argument("duplicate diagram id " + dataset_.records[i].diagram_id);
  }
}

Viewer RaterService::authenticate(const std::string& token) const {
  Viewer v;
  if (config_.admin_tokens.count(token)) v.admin = true;
  if (auto it = config_.rater_tokens.find(token); it != config_.rater_tokens.end()) v.rater_id = it->second;
  if (!v.admin && !v.rater_id) throw ServiceError(401, "unknown or missing token");
  return v;
}

std::size_t RaterService::index_of(const std::string& diagram_id) const {
  auto it = index_.find(diagram_id);
  if (it == index_.end()) throw ServiceError(404, "unknown diagram " + diagram_id);
  return it->second;
}

const core::EvaluationRecord& RaterService::record(const std::string& diagram_id) const {
  return dataset_.records[index_of(diagram_id)];
}

std::vector<std::string> RaterService::assigned_raters(const std::string& diagram_id) const {
  std::size_t i = index_of(diagram_id);
  std::size_t p = pool_.size();
  return {pool_[(2 * i) % p], pool_[(2 * i + 1) % p]};
}

namespace {

bool has_rated(const core::EvaluationRecord& r, const std::string& rater) {
  return std::any_of(r.annotations.begin(), r.annotations.end(),
                     [&](const core::RubricAnnotation& a) { return a.rater_id == rater; });
}

int half_up_mean(int a, int b) { return (a + b + 1) / 2; }

}  // namespace

std::vector<std::string> RaterService::pending(const std::string& rater_id) const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& r : dataset_.records) {
    auto raters = assigned_raters(r.diagram_id);
    if (std::find(raters.begin(), raters.end(), rater_id) != raters.end() && !has_rated(r, rater_id))
      out.push_back(r.diagram_id);
  }
  return out;
}

json RaterService::diagram_view(std::size_t index, const Viewer& viewer) const {
  const auto& r = dataset_.records[index];
  json j = {{"diagram_id", r.diagram_id},
            {"source_id", r.source_id},
            {"source_text", r.source_text},
            {"difficulty", r.difficulty},
            {"image_url", "/diagrams/" + r.diagram_id + "/image.png"},
            {"assigned_raters", assigned_raters(r.diagram_id)},
            {"n_annotations", r.annotations.size()}};
  if (viewer.rater_id) j["rated_by_me"] = has_rated(r, *viewer.rater_id);
  if (!config_.blinding || viewer.admin) {
    j["method"] = r.method;
    j["model"] = r.model;
  }
  if (viewer.admin) {
    j["scores"] = r.scores;
    j["annotations"] = r.annotations;
    j["consensus_hallucination"] = r.consensus_hallucination ? json(*r.consensus_hallucination) : json();
  } else if (viewer.rater_id) {
    for (const auto& a : r.annotations)
      if (a.rater_id == *viewer.rater_id) j["my_annotation"] = a;
  }
  return j;
}

json RaterService::list_diagrams(const Viewer& viewer) const {
  std::lock_guard lock(mu_);
  json out = json::array();
  for (std::size_t i = 0; i < dataset_.records.size(); ++i) {
    if (!viewer.admin) {
      auto raters = assigned_raters(dataset_.records[i].diagram_id);
      if (std::find(raters.begin(), raters.end(), *viewer.rater_id) == raters.end()) continue;
    }
    out.push_back(diagram_view(i, viewer));
  }
  return out;
}

json RaterService::get_diagram(const std::string& diagram_id, const Viewer& viewer) const {
  std::lock_guard lock(mu_);
  std::size_t i = index_of(diagram_id);
  if (!viewer.admin) {
    auto raters = assigned_raters(diagram_id);
    if (std::find(raters.begin(), raters.end(), *viewer.rater_id) == raters.end())
      throw ServiceError(403, "diagram not assigned to " + *viewer.rater_id);
  }
  return diagram_view(i, viewer);
}

std::pair<std::string, std::string> RaterService::get_image(const std::string& diagram_id) const {
  std::string rel;
  {
    std::lock_guard lock(mu_);
    rel = record(diagram_id).image_path;
  }
  if (rel.empty()) throw ServiceError(404, "no image for " + diagram_id);
  std::filesystem::path p = rel;
  if (p.is_relative()) p = config_.image_base / p;
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ServiceError(404, "image not found for " + diagram_id);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string mime = p.extension() == ".svg" ? "image/svg+xml" : "image/png";
  return {buf.str(), mime};
}

namespace {

int field_int(const json& payload, const char* key) {
  auto it = payload.find(key);
  if (it == payload.end()) throw ServiceError(400, std::string("missing field ") + key);
  if (!it->is_number_integer()) throw ServiceError(400, std::string(key) + " must be an integer");
  return it->get<int>();
}

rubric::LayoutChecklist parse_flags(const json& payload) {
  auto it = payload.find("layout_flags");
  if (it == payload.end()) throw ServiceError(400, "missing field layout_flags");
  rubric::LayoutChecklist flags;
  if (it->is_array()) {
    if (it->size() != std::size_t(rubric::kLayoutFlagCount))
      throw ServiceError(400, "layout_flags must have 7 entries");
    for (int i = 0; i < rubric::kLayoutFlagCount; ++i) {
      if (!(*it)[i].is_boolean()) throw ServiceError(400, "layout_flags entries must be booleans");
      flags.flags[i] = (*it)[i].get<bool>();
    }
  } else if (it->is_object()) {
    for (auto f = it->begin(); f != it->end(); ++f) {
      const auto& k = f.key();
      if (k.size() != 2 || k[0] != 'k' || k[1] < '1' || k[1] > '7' || !f->is_boolean())
        throw ServiceError(400, "layout_flags keys are k1..k7 with boolean values");
      flags.flags[k[1] - '1'] = f->get<bool>();
    }
  } else {
    throw ServiceError(400, "layout_flags must be an array or object");
  }
  return flags;
}

}  // namespace

core::HallucinationTags parse_hallucination_tags(const json& j) {
  if (!j.is_object()) throw ServiceError(400, "hallucination must be an object");
  core::HallucinationTags t;
  for (auto f = j.begin(); f != j.end(); ++f) {
    if (!f->is_boolean()) throw ServiceError(400, "hallucination values must be booleans");
    bool v = f->get<bool>();
    if (f.key() == "h_fact") t.h_fact = v;
    else if (f.key() == "h_ae") t.h_ae = v;
    else if (f.key() == "h_c") t.h_c = v;
    else if (f.key() == "h_log") t.h_log = v;
    else throw ServiceError(400, "unknown hallucination tag " + f.key());
  }
  return t;
}

core::RubricAnnotation RaterService::submit_scores(const std::string& rater_id, const std::string& diagram_id,
                                                   const json& payload) {
  if (!payload.is_object()) throw ServiceError(400, "body must be a JSON object");
  int l1 = field_int(payload, "L1");
  int l2 = field_int(payload, "L2");
  int l3 = field_int(payload, "L3");
  int c2 = field_int(payload, "C2");
  auto flags = parse_flags(payload);
  core::HallucinationTags tags;
  if (auto it = payload.find("hallucination"); it != payload.end()) tags = parse_hallucination_tags(*it);

  core::RubricAnnotation a;
  try {
    a = core::make_annotation(diagram_id, rater_id, l1, l2, l3, c2, flags, tags);
  } catch (const std::exception& e) {
    throw ServiceError(400, e.what());
  }

  std::lock_guard lock(mu_);
  std::size_t i = index_of(diagram_id);
  auto raters = assigned_raters(diagram_id);
  if (std::find(raters.begin(), raters.end(), rater_id) == raters.end())
    throw ServiceError(403, "diagram not assigned to " + rater_id);
  auto& r = dataset_.records[i];
  if (has_rated(r, rater_id)) throw ServiceError(409, rater_id + " already scored " + diagram_id);
  r.annotations.push_back(a);
  if (r.annotations.size() == std::size_t(core::kRatersPerDiagram) && r.scores == core::ScoreTriple{}) {
    const auto& x = r.annotations[0];
    const auto& y = r.annotations[1];
    r.scores = {half_up_mean(x.C1, y.C1), half_up_mean(x.C2, y.C2), half_up_mean(x.C3, y.C3)};
  }
  persist();
  return a;
}

void RaterService::submit_consensus(const std::string& diagram_id, const core::HallucinationTags& tags) {
  std::lock_guard lock(mu_);
  dataset_.records[index_of(diagram_id)].consensus_hallucination = tags;
  persist();
}

std::vector<stats::ReliabilityEstimate> RaterService::irr_summary() const {
  std::lock_guard lock(mu_);
  // All records go in so the unit order, and with it the bootstrap draw,
  // matches the offline computation; units with one rating are not pairable.
  std::vector<const core::EvaluationRecord*> all;
  for (const auto& r : dataset_.records) all.push_back(&r);
  std::vector<stats::ReliabilityEstimate> out;
  for (auto c : core::kAllCriteria) out.push_back(stats::reliability_for(all, c, config_.alpha));
  return out;
}

json RaterService::irr_summary_json() const {
  auto est = irr_summary();
  std::size_t complete = 0, total = 0;
  {
    std::lock_guard lock(mu_);
    total = dataset_.records.size();
    for (const auto& r : dataset_.records)
      if (r.annotations.size() >= std::size_t(core::kRatersPerDiagram)) ++complete;
  }
  json crit = json::array();
  for (const auto& e : est) crit.push_back(stats::to_json(e));
  return {{"completed", complete}, {"total", total}, {"criteria", crit}};
}

std::vector<std::string> RaterService::blinding_leaks() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  if (!config_.blinding) return out;
  for (const auto& r : dataset_.records) {
    const std::string method(core::to_string(r.method));
    if ((!r.model.empty() && r.diagram_id.find(r.model) != std::string::npos) ||
        r.diagram_id.find(method) != std::string::npos)
      out.push_back(r.diagram_id);
  }
  return out;
}

core::EvaluationDataset RaterService::snapshot() const {
  std::lock_guard lock(mu_);
  return dataset_;
}

void RaterService::persist() const {
  if (config_.persist_path) store::save_dataset(dataset_, *config_.persist_path);
}

}  // namespace rstdiag::service

#include "rstdiag/core/json.hpp"

#include "rstdiag/core/encoding.hpp"

namespace rstdiag::core {

using nlohmann::json;

namespace {

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<T>();
}

}  // namespace

void to_json(json& j, Difficulty v) { j = std::string(to_string(v)); }
void from_json(const json& j, Difficulty& v) { v = parse_difficulty(j.get<std::string>()); }
void to_json(json& j, Method v) { j = std::string(to_string(v)); }
void from_json(const json& j, Method& v) { v = parse_method(j.get<std::string>()); }
void to_json(json& j, DotStage v) { j = std::string(to_string(v)); }
void from_json(const json& j, DotStage& v) { v = parse_dot_stage(j.get<std::string>()); }
void to_json(json& j, ImageFormat v) { j = std::string(to_string(v)); }
void from_json(const json& j, ImageFormat& v) { v = parse_image_format(j.get<std::string>()); }

void to_json(json& j, const SourceText& v) {
  j = {{"id", v.id}, {"body", v.body}, {"difficulty", v.difficulty}, {"license_note", v.license_note}};
}
void from_json(const json& j, SourceText& v) {
  v.id = j.at("id").get<std::string>();
  v.body = j.at("body").get<std::string>();
  v.difficulty = j.at("difficulty").get<Difficulty>();
  v.license_note = get_or<std::string>(j, "license_note", "");
}

void to_json(json& j, const RstAnalysis& v) {
  j = {{"source_id", v.source_id}, {"text", v.text}, {"producer_model", v.producer_model}};
}
void from_json(const json& j, RstAnalysis& v) {
  v.source_id = j.at("source_id").get<std::string>();
  v.text = j.at("text").get<std::string>();
  v.producer_model = get_or<std::string>(j, "producer_model", "");
}

void to_json(json& j, const DotSource& v) { j = {{"code", v.code}, {"stage", v.stage}}; }
void from_json(const json& j, DotSource& v) {
  v.code = j.at("code").get<std::string>();
  v.stage = j.at("stage").get<DotStage>();
}

void to_json(json& j, const ExampleEntry& v) {
  j = {{"index", v.index}, {"source", v.source}, {"analysis", v.analysis}, {"diagram", v.diagram}};
}
void from_json(const json& j, ExampleEntry& v) {
  v.index = j.at("index").get<int>();
  v.source = j.at("source").get<SourceText>();
  v.analysis = j.at("analysis").get<RstAnalysis>();
  v.diagram = j.at("diagram").get<DotSource>();
}

void to_json(json& j, const ExampleDictionary& v) { j = {{"M", v.size()}, {"entries", v.entries()}}; }
void from_json(const json& j, ExampleDictionary& v) {
  v = ExampleDictionary(j.at("entries").get<std::vector<ExampleEntry>>());
  if (j.contains("M") && j.at("M").get<int>() != v.size()) throw ParseError("example dictionary M does not match entries");
}

void to_json(json& j, const Demonstration& v) {
  j = {{"kind", v.kind}, {"context", v.context}, {"dot", v.dot}};
}
void from_json(const json& j, Demonstration& v) {
  v.kind = j.at("kind").get<Method>();
  v.context = j.at("context").get<std::string>();
  v.dot = j.at("dot").get<std::string>();
}

void to_json(json& j, const RenderOutcome& v) {
  j = {{"renderer_version", v.renderer_version}};
  if (v.ok()) {
    j["image"] = {{"bytes", base64_encode(v.image().bytes)}, {"format", v.image().format}};
  } else {
    j["error"] = {{"message", v.error().message}, {"exit_status", v.error().exit_status}};
  }
}
void from_json(const json& j, RenderOutcome& v) {
  v.renderer_version = get_or<std::string>(j, "renderer_version", "");
  const bool has_image = j.contains("image") && !j.at("image").is_null();
  const bool has_error = j.contains("error") && !j.at("error").is_null();
  if (has_image == has_error) throw ParseError("render outcome must hold exactly one of image or error");
  if (has_image) {
    const auto& img = j.at("image");
    v.result = RenderedImage{base64_decode(img.at("bytes").get<std::string>()), img.at("format").get<ImageFormat>()};
  } else {
    const auto& err = j.at("error");
    v.result = RenderError{err.at("message").get<std::string>(), err.at("exit_status").get<int>()};
  }
}

void to_json(json& j, const RepairStep& v) {
  j = {{"faulty_code", v.faulty_code}, {"error", v.error}, {"corrected_code", v.corrected_code}};
}
void from_json(const json& j, RepairStep& v) {
  v.faulty_code = j.at("faulty_code").get<std::string>();
  v.error = j.at("error").get<std::string>();
  v.corrected_code = j.at("corrected_code").get<std::string>();
}

void to_json(json& j, const StepTiming& v) {
  j = {{"step", v.step}, {"started", v.started}, {"finished", v.finished}};
}
void from_json(const json& j, StepTiming& v) {
  v.step = j.at("step").get<std::string>();
  v.started = j.at("started").get<std::string>();
  v.finished = j.at("finished").get<std::string>();
}

void to_json(json& j, const PipelineRun& v) {
  j = {{"schema_version", kSchemaVersion},
       {"run_id", v.run_id},
       {"method", v.method},
       {"source_id", v.source_id},
       {"model_id", v.model_id},
       {"repair_model_id", v.repair_model_id},
       {"input_hash", v.input_hash},
       {"analysis", opt(v.analysis)},
       {"chosen_example", opt(v.chosen_example)},
       {"demonstration", opt(v.demonstration)},
       {"initial_code", opt(v.initial_code)},
       {"initial_image", base64_encode(v.initial_image)},
       {"repair_log_initial", v.repair_log_initial},
       {"refined_code", opt(v.refined_code)},
       {"refinement_explanation", v.refinement_explanation},
       {"explanation_words", v.explanation_words},
       {"repair_log_final", v.repair_log_final},
       {"final_code", opt(v.final_code)},
       {"final_image", base64_encode(v.final_image)},
       {"image_format", v.image_format},
       {"flags", v.flags},
       {"status", std::string(to_string(v.status))},
       {"failed_step", v.failed_step},
       {"error", v.error},
       {"renderer_version", v.renderer_version},
       {"supersedes", opt(v.supersedes)},
       {"settings", v.settings},
       {"timestamps", v.timestamps}};
}

void from_json(const json& j, PipelineRun& v) {
  v.run_id = j.at("run_id").get<std::string>();
  v.method = j.at("method").get<Method>();
  v.source_id = j.at("source_id").get<std::string>();
  v.model_id = j.at("model_id").get<std::string>();
  v.repair_model_id = get_or<std::string>(j, "repair_model_id", "");
  v.input_hash = get_or<std::string>(j, "input_hash", "");
  v.analysis = get_opt<RstAnalysis>(j, "analysis");
  v.chosen_example = get_opt<int>(j, "chosen_example");
  v.demonstration = get_opt<Demonstration>(j, "demonstration");
  v.initial_code = get_opt<DotSource>(j, "initial_code");
  v.initial_image = base64_decode(get_or<std::string>(j, "initial_image", ""));
  v.repair_log_initial = get_or<std::vector<RepairStep>>(j, "repair_log_initial", {});
  v.refined_code = get_opt<DotSource>(j, "refined_code");
  v.refinement_explanation = get_or<std::string>(j, "refinement_explanation", "");
  v.explanation_words = get_or<int>(j, "explanation_words", 0);
  v.repair_log_final = get_or<std::vector<RepairStep>>(j, "repair_log_final", {});
  v.final_code = get_opt<DotSource>(j, "final_code");
  v.final_image = base64_decode(get_or<std::string>(j, "final_image", ""));
  v.image_format = get_or<ImageFormat>(j, "image_format", ImageFormat::png);
  v.flags = get_or<std::vector<std::string>>(j, "flags", {});
  v.status = parse_run_status(j.at("status").get<std::string>());
  v.failed_step = get_or<std::string>(j, "failed_step", "");
  v.error = get_or<std::string>(j, "error", "");
  v.renderer_version = get_or<std::string>(j, "renderer_version", "");
  v.supersedes = get_opt<std::string>(j, "supersedes");
  v.settings = get_or<json>(j, "settings", json::object());
  v.timestamps = get_or<std::vector<StepTiming>>(j, "timestamps", {});
}

void to_json(json& j, const HallucinationTags& v) {
  j = {{"h_fact", v.h_fact}, {"h_ae", v.h_ae}, {"h_c", v.h_c}, {"h_log", v.h_log}};
}
void from_json(const json& j, HallucinationTags& v) {
  v.h_fact = j.at("h_fact").get<bool>();
  v.h_ae = j.at("h_ae").get<bool>();
  v.h_c = j.at("h_c").get<bool>();
  v.h_log = j.at("h_log").get<bool>();
}

void to_json(json& j, const RubricAnnotation& v) {
  j = {{"diagram_id", v.diagram_id}, {"rater_id", v.rater_id}, {"L1", v.L1},
       {"L2", v.L2},                 {"L3", v.L3},             {"C1", v.C1},
       {"C2", v.C2},                 {"layout_flags", v.layout_flags.flags},
       {"C3", v.C3},                 {"hallucination", v.hallucination}};
}
void from_json(const json& j, RubricAnnotation& v) {
  v.diagram_id = j.at("diagram_id").get<std::string>();
  v.rater_id = j.at("rater_id").get<std::string>();
  v.L1 = j.at("L1").get<int>();
  v.L2 = j.at("L2").get<int>();
  v.L3 = j.at("L3").get<int>();
  v.C1 = j.at("C1").get<int>();
  v.C2 = j.at("C2").get<int>();
  const auto& flags = j.at("layout_flags");
  if (!flags.is_array() || flags.size() != rubric::kLayoutFlagCount)
    throw ParseError("layout_flags must be an array of 7 booleans");
  for (int i = 0; i < rubric::kLayoutFlagCount; ++i) v.layout_flags.flags[i] = flags.at(i).get<bool>();
  v.C3 = j.at("C3").get<int>();
  v.hallucination = get_or<HallucinationTags>(j, "hallucination", {});
}

void to_json(json& j, const StepHallucinationRecord& v) {
  j = {{"run_id", v.run_id}, {"h1", opt(v.h1)}, {"h2", opt(v.h2)}, {"h6", opt(v.h6)}, {"h_inh", opt(v.h_inh)}};
}
void from_json(const json& j, StepHallucinationRecord& v) {
  v.run_id = get_or<std::string>(j, "run_id", "");
  v.h1 = get_opt<bool>(j, "h1");
  v.h2 = get_opt<bool>(j, "h2");
  v.h6 = get_opt<bool>(j, "h6");
  v.h_inh = get_opt<bool>(j, "h_inh");
}

void to_json(json& j, const ScoreTriple& v) { j = {{"c1", v.c1}, {"c2", v.c2}, {"c3", v.c3}}; }
void from_json(const json& j, ScoreTriple& v) {
  v.c1 = j.at("c1").get<int>();
  v.c2 = j.at("c2").get<int>();
  v.c3 = j.at("c3").get<int>();
}

void to_json(json& j, const EvaluationRecord& v) {
  j = {{"diagram_id", v.diagram_id},
       {"image_path", v.image_path},
       {"source_id", v.source_id},
       {"source_text", v.source_text},
       {"difficulty", v.difficulty},
       {"method", v.method},
       {"model", v.model},
       {"c1", v.scores.c1},
       {"c2", v.scores.c2},
       {"c3", v.scores.c3},
       {"annotations", v.annotations},
       {"consensus_hallucination", opt(v.consensus_hallucination)},
       {"step_hallucination", opt(v.step_hallucination)}};
}
void from_json(const json& j, EvaluationRecord& v) {
  v.diagram_id = j.at("diagram_id").get<std::string>();
  v.image_path = get_or<std::string>(j, "image_path", "");
  v.source_id = j.at("source_id").get<std::string>();
  v.source_text = get_or<std::string>(j, "source_text", "");
  v.difficulty = j.at("difficulty").get<Difficulty>();
  v.method = j.at("method").get<Method>();
  v.model = j.at("model").get<std::string>();
  v.scores = {j.at("c1").get<int>(), j.at("c2").get<int>(), j.at("c3").get<int>()};
  v.annotations = get_or<std::vector<RubricAnnotation>>(j, "annotations", {});
  v.consensus_hallucination = get_opt<HallucinationTags>(j, "consensus_hallucination");
  v.step_hallucination = get_opt<StepHallucinationRecord>(j, "step_hallucination");
}

void to_json(json& j, const EvaluationDataset& v) {
  j = {{"schema_version", kSchemaVersion}, {"records", v.records}};
}
void from_json(const json& j, EvaluationDataset& v) {
  const int version = get_or<int>(j, "schema_version", kSchemaVersion);
  if (version != kSchemaVersion) throw ParseError("unsupported dataset schema_version " + std::to_string(version));
  v.records = j.at("records").get<std::vector<EvaluationRecord>>();
}

}  // namespace rstdiag::core

#pragma once

// Domain values shared across the workbench. Plain aggregates: they are
// built once and passed around by value or const reference.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "rstdiag/rubric/rubric.hpp"

namespace rstdiag::core {

class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Difficulty { advanced, medium, basic };
enum class Method { rst1, rst2, zero_shot };
enum class DotStage { initial, repaired, refined, final };
enum class ImageFormat { png, svg };
enum class RunStatus { ok, failed };
enum class Criterion { c1, c2, c3 };

inline constexpr std::array kAllDifficulties = {Difficulty::advanced, Difficulty::medium, Difficulty::basic};
inline constexpr std::array kAllMethods = {Method::rst1, Method::zero_shot, Method::rst2};
inline constexpr std::array kAllCriteria = {Criterion::c1, Criterion::c2, Criterion::c3};

std::string_view to_string(Difficulty d);
std::string_view to_string(Method m);
std::string_view to_string(DotStage s);
std::string_view to_string(ImageFormat f);
std::string_view to_string(RunStatus s);
std::string_view to_string(Criterion c);

Difficulty parse_difficulty(std::string_view s);
/// Accepts "zero_shot", "zero-shot" and "0-shot" for the baseline.
Method parse_method(std::string_view s);
DotStage parse_dot_stage(std::string_view s);
ImageFormat parse_image_format(std::string_view s);
RunStatus parse_run_status(std::string_view s);
Criterion parse_criterion(std::string_view s);

struct SourceText {
  std::string id;
  std::string body;
  Difficulty difficulty = Difficulty::medium;
  std::string license_note;

  bool operator==(const SourceText&) const = default;
};

/// Raw analysis text (EDU list and relation tree) as produced by the model.
struct RstAnalysis {
  std::string source_id;
  std::string text;
  std::string producer_model;

  bool operator==(const RstAnalysis&) const = default;
};

struct DotSource {
  std::string code;
  DotStage stage = DotStage::initial;

  bool operator==(const DotSource&) const = default;
};

struct ExampleEntry {
  int index = 0;
  SourceText source;
  RstAnalysis analysis;
  DotSource diagram;

  bool operator==(const ExampleEntry&) const = default;
};

class ExampleDictionary {
 public:
  ExampleDictionary() = default;
  /// Throws ParseError on duplicate or out-of-range indices.
  explicit ExampleDictionary(std::vector<ExampleEntry> entries);

  const std::vector<ExampleEntry>& entries() const { return entries_; }
  int size() const { return static_cast<int>(entries_.size()); }
  bool empty() const { return entries_.empty(); }
  /// Entry with the given 1-based index; throws std::out_of_range.
  const ExampleEntry& at(int index) const;

  bool operator==(const ExampleDictionary&) const = default;

 private:
  std::vector<ExampleEntry> entries_;
};

/// In-context example: (source text, dot) for rst1, (analysis, dot) for rst2.
struct Demonstration {
  Method kind = Method::rst1;
  std::string context;
  std::string dot;

  bool operator==(const Demonstration&) const = default;
};

struct RenderError {
  std::string message;
  int exit_status = 0;

  bool operator==(const RenderError&) const = default;
};

struct RenderedImage {
  std::string bytes;
  ImageFormat format = ImageFormat::png;

  bool operator==(const RenderedImage&) const = default;
};

struct RenderOutcome {
  std::variant<RenderedImage, RenderError> result;
  std::string renderer_version;

  bool ok() const { return std::holds_alternative<RenderedImage>(result); }
  const RenderedImage& image() const { return std::get<RenderedImage>(result); }
  const RenderError& error() const { return std::get<RenderError>(result); }
  bool operator==(const RenderOutcome&) const = default;
};

struct RepairStep {
  std::string faulty_code;
  std::string error;
  std::string corrected_code;

  bool operator==(const RepairStep&) const = default;
};

struct StepTiming {
  std::string step;
  std::string started;   // ISO-8601 UTC
  std::string finished;

  bool operator==(const StepTiming&) const = default;
};

struct PipelineRun {
  std::string run_id;
  Method method = Method::rst1;
  std::string source_id;
  std::string model_id;
  std::string repair_model_id;
  std::string input_hash;

  std::optional<RstAnalysis> analysis;
  std::optional<int> chosen_example;
  std::optional<Demonstration> demonstration;

  std::optional<DotSource> initial_code;
  std::string initial_image;
  std::vector<RepairStep> repair_log_initial;

  std::optional<DotSource> refined_code;
  std::string refinement_explanation;
  int explanation_words = 0;

  std::vector<RepairStep> repair_log_final;
  std::optional<DotSource> final_code;
  std::string final_image;
  ImageFormat image_format = ImageFormat::png;

  std::vector<std::string> flags;
  RunStatus status = RunStatus::ok;
  std::string failed_step;
  std::string error;
  std::string renderer_version;
  std::optional<std::string> supersedes;
  nlohmann::json settings = nlohmann::json::object();
  std::vector<StepTiming> timestamps;

  bool operator==(const PipelineRun&) const = default;
};

/// True means the hallucination type is present.
struct HallucinationTags {
  bool h_fact = false;
  bool h_ae = false;
  bool h_c = false;
  bool h_log = false;

  bool any() const { return h_fact || h_ae || h_c || h_log; }
  int faithfulness_count() const { return int(h_ae) + int(h_c) + int(h_log); }
  bool operator==(const HallucinationTags&) const = default;
};

struct RubricAnnotation {
  std::string diagram_id;
  std::string rater_id;
  int L1 = 0;
  int L2 = 0;
  int L3 = 0;
  int C1 = 0;
  int C2 = 0;
  rubric::LayoutChecklist layout_flags;
  int C3 = 0;
  HallucinationTags hallucination;

  int score(Criterion c) const;
  bool operator==(const RubricAnnotation&) const = default;
};

/// Builds an annotation with C1 and C3 derived from the inputs; throws
/// rubric::RangeError for out-of-range scores.
RubricAnnotation make_annotation(std::string diagram_id, std::string rater_id, int l1, int l2, int l3,
                                 int c2, const rubric::LayoutChecklist& flags,
                                 const HallucinationTags& tags = {});

/// Per-step hallucination flags; a value is absent where the step did not run.
struct StepHallucinationRecord {
  std::string run_id;
  std::optional<bool> h1;
  std::optional<bool> h2;
  std::optional<bool> h6;
  std::optional<bool> h_inh;

  bool operator==(const StepHallucinationRecord&) const = default;
};

struct ScoreTriple {
  int c1 = 0;
  int c2 = 0;
  int c3 = 0;

  int at(Criterion c) const;
  bool operator==(const ScoreTriple&) const = default;
};

/// Throws rubric::RangeError unless every score is in 1..5.
ScoreTriple make_score_triple(int c1, int c2, int c3);

struct EvaluationRecord {
  std::string diagram_id;
  std::string image_path;
  std::string source_id;
  std::string source_text;
  Difficulty difficulty = Difficulty::medium;
  Method method = Method::rst1;
  std::string model;
  ScoreTriple scores;
  std::vector<RubricAnnotation> annotations;
  std::optional<HallucinationTags> consensus_hallucination;
  std::optional<StepHallucinationRecord> step_hallucination;

  /// Consensus tags when recorded, otherwise the union of the raters' tags.
  HallucinationTags effective_hallucination() const;
  bool operator==(const EvaluationRecord&) const = default;
};

struct EvaluationDataset {
  std::vector<EvaluationRecord> records;

  const EvaluationRecord* find(std::string_view diagram_id) const;
  bool operator==(const EvaluationDataset&) const = default;
};

inline constexpr int kRatersPerDiagram = 2;

}  // namespace rstdiag::core

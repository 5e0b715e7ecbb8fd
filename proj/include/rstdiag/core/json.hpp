#pragma once

// Canonical JSON form of the core types. Field names follow the type
// definitions; enums are written as their lower-case names. Image bytes
// are base64 strings.

#include <nlohmann/json.hpp>

#include "rstdiag/core/types.hpp"

namespace rstdiag::core {

inline constexpr int kSchemaVersion = 1;

void to_json(nlohmann::json& j, Difficulty v);
void from_json(const nlohmann::json& j, Difficulty& v);
void to_json(nlohmann::json& j, Method v);
void from_json(const nlohmann::json& j, Method& v);
void to_json(nlohmann::json& j, DotStage v);
void from_json(const nlohmann::json& j, DotStage& v);
void to_json(nlohmann::json& j, ImageFormat v);
void from_json(const nlohmann::json& j, ImageFormat& v);

void to_json(nlohmann::json& j, const SourceText& v);
void from_json(const nlohmann::json& j, SourceText& v);
void to_json(nlohmann::json& j, const RstAnalysis& v);
void from_json(const nlohmann::json& j, RstAnalysis& v);
void to_json(nlohmann::json& j, const DotSource& v);
void from_json(const nlohmann::json& j, DotSource& v);
void to_json(nlohmann::json& j, const ExampleEntry& v);
void from_json(const nlohmann::json& j, ExampleEntry& v);
void to_json(nlohmann::json& j, const ExampleDictionary& v);
void from_json(const nlohmann::json& j, ExampleDictionary& v);
void to_json(nlohmann::json& j, const Demonstration& v);
void from_json(const nlohmann::json& j, Demonstration& v);
void to_json(nlohmann::json& j, const RenderOutcome& v);
void from_json(const nlohmann::json& j, RenderOutcome& v);
void to_json(nlohmann::json& j, const RepairStep& v);
void from_json(const nlohmann::json& j, RepairStep& v);
void to_json(nlohmann::json& j, const StepTiming& v);
void from_json(const nlohmann::json& j, StepTiming& v);
void to_json(nlohmann::json& j, const PipelineRun& v);
void from_json(const nlohmann::json& j, PipelineRun& v);
void to_json(nlohmann::json& j, const HallucinationTags& v);
void from_json(const nlohmann::json& j, HallucinationTags& v);
void to_json(nlohmann::json& j, const RubricAnnotation& v);
void from_json(const nlohmann::json& j, RubricAnnotation& v);
void to_json(nlohmann::json& j, const StepHallucinationRecord& v);
void from_json(const nlohmann::json& j, StepHallucinationRecord& v);
void to_json(nlohmann::json& j, const ScoreTriple& v);
void from_json(const nlohmann::json& j, ScoreTriple& v);
void to_json(nlohmann::json& j, const EvaluationRecord& v);
void from_json(const nlohmann::json& j, EvaluationRecord& v);
void to_json(nlohmann::json& j, const EvaluationDataset& v);
void from_json(const nlohmann::json& j, EvaluationDataset& v);

}  // namespace rstdiag::core

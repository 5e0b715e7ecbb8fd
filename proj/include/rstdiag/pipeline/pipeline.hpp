#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rstdiag/core/types.hpp"
#include "rstdiag/llm/gateway.hpp"
#include "rstdiag/render/lint.hpp"
#include "rstdiag/render/render_engine.hpp"
#include "rstdiag/store/experiment_store.hpp"

namespace rstdiag::pipeline {

/// A step failed; `step()` is "step1".."step7".
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string step, const std::string& message);
  const std::string& step() const { return step_; }

 private:
  std::string step_;
};

class RepairExhaustedError : public PipelineError {
 public:
  RepairExhaustedError(std::string step, const std::string& message, std::vector<core::RepairStep> log);
  const std::vector<core::RepairStep>& log() const { return log_; }

 private:
  std::vector<core::RepairStep> log_;
};

struct PipelineConfig {
  std::string main_model = "o3";
  std::string repair_model = "gpt-4o";
  int repair_max_iters = 5;
  core::ImageFormat image_format = core::ImageFormat::png;
  std::vector<std::string> disclaimer_phrases = render::kDefaultDisclaimerPhrases;
  /// Echoed into every run's settings.
  nlohmann::json settings = nlohmann::json::object();
};

struct RepairResult {
  core::DotSource code;
  std::string image;
  std::vector<core::RepairStep> log;
};

struct Refinement {
  core::DotSource code;
  std::string explanation;
  int explanation_words = 0;
};

/// Run flags.
inline constexpr const char* kFlagDroppedDisclaimer = "refinement_dropped_disclaimer";
inline constexpr const char* kFlagFinalWithoutDisclaimer = "final_without_disclaimer";
inline constexpr const char* kFlagLongExplanation = "explanation_over_100_words";

class Pipeline {
 public:
  /// `store` may be null; otherwise every run, failed or not, is saved.
  Pipeline(llm::Gateway& gateway, const render::RenderEngine& renderer, const core::ExampleDictionary& dictionary,
           PipelineConfig config, store::ExperimentStore* store = nullptr);

  /// Step 1: R1 with the source text in the user turn.
  core::RstAnalysis run_rst_analysis(const core::SourceText& source);
  /// Step 2: R2 with all example analyses; returns z in 1..M.
  int select_similar_example(const core::RstAnalysis& analysis);
  /// Step 3: (s_z, d_z) for rst1, (a_z, d_z) for rst2.
  core::Demonstration construct_demonstration(core::Method method, int z) const;
  /// Step 4: R3rst1 / R3rst2 / R30; returns the extracted code.
  core::DotSource generate_diagram(core::Method method, const core::SourceText& source,
                                   const std::optional<core::RstAnalysis>& analysis,
                                   const std::optional<core::Demonstration>& demonstration);
  /// Steps 5 and 7: render, and on error ask for a fix with R5, at most
  /// repair_max_iters times. Throws RepairExhaustedError tagged with `step`.
  RepairResult repair_until_renderable(const core::DotSource& code, const std::string& step = "step5");
  /// Step 6: R4 with the code in the prompt and the image attached.
  Refinement refine_diagram(const core::DotSource& code, const std::string& image);

  /// Steps 1-7 with the method's skips. Step failures produce a run with
  /// status failed and `failed_step` set; a missing renderer propagates.
  core::PipelineRun run(core::Method method, const core::SourceText& source);

  const PipelineConfig& config() const { return config_; }

 private:
  llm::Gateway& gateway_;
  const render::RenderEngine& renderer_;
  const core::ExampleDictionary& dictionary_;
  PipelineConfig config_;
  store::ExperimentStore* store_;
};

/// "<source>-<method>-<utc stamp>-<8 hex>"; safe as a directory name.
std::string make_run_id(const core::SourceText& source, core::Method method, const std::string& input_hash);

}  // namespace rstdiag::pipeline

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rstdiag/autoeval/icl_examples.hpp"
#include "rstdiag/core/types.hpp"
#include "rstdiag/llm/gateway.hpp"

namespace rstdiag::autoeval {

/// E1: scored examples only. E2: grading instructions plus examples.
/// E3: grading instructions only.
enum class Mode { E1, E2, E3 };

std::string_view to_string(Mode m);
/// Accepts "e1".."e3" in either case.
Mode parse_mode(std::string_view s);

class AutoEvalConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct AutoEvalConfig {
  Mode mode = Mode::E3;
  std::string model_id;
  int repeats = 2;
  std::optional<IclExampleSet> examples;
  int concurrency = 1;

  /// E1/E2 need a non-empty example set, E3 must not have one.
  void validate() const;
};

/// Rounded mean with halves rounded up: floor((2*sum + n) / (2n)).
int aggregate_half_up(const std::vector<int>& scores);
core::ScoreTriple aggregate_half_up(const std::vector<core::ScoreTriple>& runs);

/// The request for one evaluation. Example text and scores go into the
/// system message in example order; example images are attached in the
/// same order, followed by the diagram under evaluation.
llm::ChatRequest build_request(const AutoEvalConfig& config, const std::string& image, const std::string& source_text,
                               const std::string& image_mime = "image/png");

core::ScoreTriple evaluate_diagram(llm::Gateway& gateway, const AutoEvalConfig& config, const std::string& image,
                                   const std::string& source_text);

struct AutoEvalItem {
  std::string diagram_id;
  std::vector<core::ScoreTriple> runs;
  std::optional<core::ScoreTriple> aggregated;
  std::string error;  // non-empty when the diagram could not be scored
};

struct AutoEvalResult {
  Mode mode = Mode::E3;
  std::string model_id;
  int repeats = 0;
  std::vector<AutoEvalItem> items;         // dataset order, excluded diagrams omitted
  std::vector<std::string> excluded;       // diagram ids sharing a source with the examples
  nlohmann::json metadata;

  std::vector<const AutoEvalItem*> failures() const;
};

/// Loads the image bytes of a record.
using ImageLoader = std::function<std::string(const core::EvaluationRecord&)>;
/// Reads record.image_path relative to `base`.
ImageLoader file_image_loader(std::filesystem::path base);

/// True if the record's source is one of the example set's held-out texts
/// (matched by id or by identical text).
bool shares_example_source(const core::EvaluationRecord& record, const IclExampleSet& examples);

/// Scores every eligible diagram `repeats` times and aggregates. Diagrams
/// that fail are reported in the items rather than aborting the run.
AutoEvalResult evaluate_dataset(llm::Gateway& gateway, const AutoEvalConfig& config,
                                const core::EvaluationDataset& dataset, const ImageLoader& load_image);

/// Columns: diagram_id, mode, model, run_index, c1, c2, c3, aggregated.
/// One row per run (aggregated=0) and one aggregate row (run_index "mean",
/// aggregated=1) per scored diagram.
void write_csv(const AutoEvalResult& result, std::ostream& out);

}  // namespace rstdiag::autoeval

#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rstdiag/core/types.hpp"
#include "rstdiag/render/render_engine.hpp"

namespace rstdiag::store {

/// Directory of the bundled assets, fixed at build time.
std::filesystem::path default_data_dir();

/// Reads <dir>/manifest.json and the text, analysis and dot files it names.
/// With a renderer, every diagram is rendered once and a failure throws
/// StoreError naming the entry.
core::ExampleDictionary load_example_dictionary(const std::filesystem::path& dir,
                                                const render::RenderEngine* smoke_renderer = nullptr);

/// A directory of *.txt source texts, sorted by file name; the id is the
/// file stem. An optional sources.json maps ids to difficulty and license.
std::vector<core::SourceText> load_source_texts(const std::filesystem::path& dir);

core::EvaluationDataset load_dataset(const std::filesystem::path& path);
void save_dataset(const core::EvaluationDataset& dataset, const std::filesystem::path& path);

/// Header plus one "rater" row per annotation and one "consensus" row per
/// diagram (tag columns empty when no consensus was recorded).
void export_dataset_csv(const core::EvaluationDataset& dataset, std::ostream& out);
void export_dataset_csv(const core::EvaluationDataset& dataset, const std::filesystem::path& path);

struct ImportRowError {
  int row = 0;  // 1-based data row, header excluded
  std::string message;
};

struct ImportResult {
  std::vector<core::RubricAnnotation> annotations;
  std::vector<ImportRowError> errors;
};

/// Reads rater rows of the export format (other row kinds are skipped).
/// C1/C3 columns are optional; when present they must equal the values
/// derived from L1..L3 and k1..k7 or the row is rejected.
ImportResult import_annotations_text(std::string_view csv_text);
ImportResult import_annotations(const std::filesystem::path& path);

}  // namespace rstdiag::store

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "rstdiag/core/types.hpp"

namespace rstdiag::store {

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RunExistsError : public StoreError {
 public:
  using StoreError::StoreError;
};

/// Letters, digits, '.', '_' and '-'; no leading dot.
bool valid_run_id(std::string_view id);

/// One directory per run under <root>/runs:
///   run.json          the full run, images replaced by file names
///   step1.json ..     per-step inputs/outputs for the steps that ran
///   initial.dot, refined.dot, final.dot, initial.<fmt>, final.<fmt>
/// A run is staged in <root>/.staging and renamed into place, so readers
/// never see a partial directory and an existing id is never overwritten.
class ExperimentStore {
 public:
  explicit ExperimentStore(std::filesystem::path root);

  /// Throws RunExistsError if the id is taken.
  std::string save_run(const core::PipelineRun& run);
  core::PipelineRun load_run(const std::string& run_id) const;
  bool has_run(const std::string& run_id) const;
  std::vector<std::string> list_runs() const;

  /// Stores `corrected` as a new run that supersedes `original_id`; the
  /// original is left untouched.
  std::string save_correction(core::PipelineRun corrected, const std::string& original_id);

  std::filesystem::path run_dir(const std::string& run_id) const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
};

}  // namespace rstdiag::store

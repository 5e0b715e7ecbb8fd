#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "rstdiag/core/types.hpp"

namespace rstdiag::core {

enum class IssueKind { range, derived_mismatch, missing_rater, duplicate_rater, missing_field, field_matrix };

std::string_view to_string(IssueKind k);

struct ValidationIssue {
  IssueKind kind;
  std::string where;    // e.g. "annotations[1].C1"
  std::string message;
};

using ValidationReport = std::vector<ValidationIssue>;

/// Every violated invariant of one dataset record; empty iff the record is valid.
/// `require_complete` demands exactly two annotations from distinct raters.
ValidationReport validate_record(const EvaluationRecord& record, bool require_complete = true);

/// Range and derived-score checks of one annotation, with issue locations
/// prefixed by `where`.
ValidationReport validate_annotation(const RubricAnnotation& a, const std::string& where = "");

/// Method/field presence matrix and success-state requirements of a run.
ValidationReport validate_run(const PipelineRun& run);

class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string context, ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// Throws ValidationError carrying every issue of every record.
void require_valid(const EvaluationDataset& dataset, bool require_complete = true);

}  // namespace rstdiag::core

#include "rstdiag/core/validate.hpp"

#include <set>

namespace rstdiag::core {

std::string_view to_string(IssueKind k) {
  switch (k) {
    case IssueKind::range: return "range";
    case IssueKind::derived_mismatch: return "derived_mismatch";
    case IssueKind::missing_rater: return "missing_rater";
    case IssueKind::duplicate_rater: return "duplicate_rater";
    case IssueKind::missing_field: return "missing_field";
    case IssueKind::field_matrix: return "field_matrix";
  }
  return "?";
}

namespace {

void check_range(ValidationReport& out, int value, const std::string& where) {
  if (!rubric::in_score_range(value))
    out.push_back({IssueKind::range, where, where + " = " + std::to_string(value) + " is outside 1..5"});
}

std::string summarize(const std::string& context, const ValidationReport& report) {
  std::string msg = context + ": " + std::to_string(report.size()) + " validation issue(s)";
  for (std::size_t i = 0; i < report.size() && i < 5; ++i) msg += "; " + report[i].message;
  return msg;
}

}  // namespace

ValidationReport validate_annotation(const RubricAnnotation& a, const std::string& where) {
  ValidationReport out;
  const std::string p = where.empty() ? "" : where + ".";
  check_range(out, a.L1, p + "L1");
  check_range(out, a.L2, p + "L2");
  check_range(out, a.L3, p + "L3");
  check_range(out, a.C1, p + "C1");
  check_range(out, a.C2, p + "C2");
  check_range(out, a.C3, p + "C3");
  if (rubric::in_score_range(a.L1) && rubric::in_score_range(a.L2) && rubric::in_score_range(a.L3)) {
    const int expected = rubric::compute_c1(a.L1, a.L2, a.L3);
    if (a.C1 != expected)
      out.push_back({IssueKind::derived_mismatch, p + "C1",
                     p + "C1 = " + std::to_string(a.C1) + " but L scores give " + std::to_string(expected)});
  }
  const int expected_c3 = rubric::compute_c3(a.layout_flags);
  if (a.C3 != expected_c3)
    out.push_back({IssueKind::derived_mismatch, p + "C3",
                   p + "C3 = " + std::to_string(a.C3) + " but " + std::to_string(a.layout_flags.count()) +
                       " layout flag(s) give " + std::to_string(expected_c3)});
  if (a.rater_id.empty()) out.push_back({IssueKind::missing_field, p + "rater_id", p + "rater_id is empty"});
  return out;
}

ValidationReport validate_record(const EvaluationRecord& r, bool require_complete) {
  ValidationReport out;
  if (r.diagram_id.empty()) out.push_back({IssueKind::missing_field, "diagram_id", "diagram_id is empty"});
  if (r.source_id.empty()) out.push_back({IssueKind::missing_field, "source_id", "source_id is empty"});
  check_range(out, r.scores.c1, "c1");
  check_range(out, r.scores.c2, "c2");
  check_range(out, r.scores.c3, "c3");

  std::set<std::string> raters;
  for (std::size_t i = 0; i < r.annotations.size(); ++i) {
    const auto& a = r.annotations[i];
    const std::string where = "annotations[" + std::to_string(i) + "]";
    for (auto& issue : validate_annotation(a, where)) out.push_back(std::move(issue));
    if (a.diagram_id != r.diagram_id)
      out.push_back({IssueKind::field_matrix, where + ".diagram_id",
                     where + " belongs to diagram '" + a.diagram_id + "'"});
    if (!a.rater_id.empty() && !raters.insert(a.rater_id).second)
      out.push_back({IssueKind::duplicate_rater, where + ".rater_id", "rater '" + a.rater_id + "' annotated twice"});
  }
  if (require_complete && r.annotations.size() != kRatersPerDiagram)
    out.push_back({IssueKind::missing_rater, "annotations",
                   "expected " + std::to_string(kRatersPerDiagram) + " annotations, found " +
                       std::to_string(r.annotations.size())});

  if (r.step_hallucination && r.method == Method::zero_shot) {
    const auto& s = *r.step_hallucination;
    if (s.h1) out.push_back({IssueKind::field_matrix, "step_hallucination.h1", "zero_shot runs have no Step 1"});
    if (s.h2) out.push_back({IssueKind::field_matrix, "step_hallucination.h2", "zero_shot runs have no Step 2"});
    if (s.h_inh)
      out.push_back({IssueKind::field_matrix, "step_hallucination.h_inh", "zero_shot runs cannot inherit"});
  }
  return out;
}

ValidationReport validate_run(const PipelineRun& run) {
  ValidationReport out;
  const bool icl = run.method != Method::zero_shot;
  if (!icl) {
    if (run.analysis) out.push_back({IssueKind::field_matrix, "analysis", "zero_shot run carries an analysis"});
    if (run.chosen_example)
      out.push_back({IssueKind::field_matrix, "chosen_example", "zero_shot run carries a chosen example"});
    if (run.demonstration)
      out.push_back({IssueKind::field_matrix, "demonstration", "zero_shot run carries a demonstration"});
  }
  if (run.demonstration && run.demonstration->kind != run.method)
    out.push_back({IssueKind::field_matrix, "demonstration.kind", "demonstration kind differs from run method"});
  if (run.status == RunStatus::ok) {
    if (icl && !(run.analysis && run.chosen_example && run.demonstration))
      out.push_back({IssueKind::field_matrix, "analysis", "successful ICL run lacks analysis/example/demonstration"});
    if (!run.initial_code) out.push_back({IssueKind::missing_field, "initial_code", "initial_code missing"});
    if (!run.refined_code) out.push_back({IssueKind::missing_field, "refined_code", "refined_code missing"});
    if (!run.final_code) out.push_back({IssueKind::missing_field, "final_code", "final_code missing"});
    if (run.final_image.empty()) out.push_back({IssueKind::missing_field, "final_image", "final_image is empty"});
  } else if (run.failed_step.empty()) {
    out.push_back({IssueKind::missing_field, "failed_step", "failed run without a step tag"});
  }
  for (const auto* log : {&run.repair_log_initial, &run.repair_log_final})
    for (std::size_t k = 1; k < log->size(); ++k)
      if ((*log)[k].faulty_code != (*log)[k - 1].corrected_code)
        out.push_back({IssueKind::field_matrix, "repair_log", "repair log entries are not consecutive"});
  return out;
}

ValidationError::ValidationError(std::string context, ValidationReport report)
    : std::runtime_error(summarize(context, report)), report_(std::move(report)) {}

void require_valid(const EvaluationDataset& dataset, bool require_complete) {
  ValidationReport all;
  for (const auto& r : dataset.records)
    for (auto& issue : validate_record(r, require_complete)) {
      issue.where = r.diagram_id + ":" + issue.where;
      issue.message = r.diagram_id + ": " + issue.message;
      all.push_back(std::move(issue));
    }
  if (!all.empty()) throw ValidationError("dataset", std::move(all));
}

}  // namespace rstdiag::core

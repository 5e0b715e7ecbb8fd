#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rstdiag/core/types.hpp"
#include "rstdiag/stats/reliability.hpp"

namespace rstdiag::stats {

/// Exact proportion; undefined when the denominator is zero.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 0;

  bool defined() const { return den > 0; }
  double value() const;
  /// Decimal with `places` digits, or "NA".
  std::string fixed(int places = 2) const;
  bool operator==(const Ratio&) const = default;
};

struct ReliabilityEstimate {
  core::Criterion criterion = core::Criterion::c1;
  std::optional<AlphaEstimate> alpha;
  std::string alpha_error;
  std::optional<KendallW> w;
  std::string w_error;
  int n_units = 0;   // diagrams with at least two ratings
  int n_raters = 0;  // distinct raters in the pool
};

/// Alpha on the sparse diagrams x rater-pool matrix. W on the two-column
/// matrix formed by each diagram's first two ratings, ordered by rater id.
ReliabilityEstimate reliability_for(const std::vector<const core::EvaluationRecord*>& records, core::Criterion c,
                                    const AlphaOptions& options = {});

struct CriterionTable {
  core::Criterion criterion = core::Criterion::c1;
  std::int64_t n = 0;
  std::array<std::int64_t, 5> counts{};  // scores 1..5
  std::array<Ratio, 5> distribution{};
  std::vector<int> modes;
  Quartiles quartiles;
  std::map<core::Difficulty, Ratio> good_by_difficulty;  // score > 3: G_a, G_m, G_b
  std::optional<ReliabilityEstimate> irr;
};

/// Hallucination-free ratios (tag false).
struct HallucinationTable {
  Ratio h_fact, h_ae, h_c, h_log;
  /// All three scores above 3 and free of every tag, over all diagrams.
  Ratio g_r;
};

/// Step-level hallucination-free ratios over records where the step ran.
struct StepTable {
  Ratio h1, h2, h6, h_inh;
  /// Among high-quality diagrams (c1, c2, c3 all > 3): share with no H6 / H_inh.
  Ratio g6, g_inh;
};

struct CellSummary {
  std::string model;
  core::Method method = core::Method::rst1;
  std::int64_t n = 0;
  std::array<CriterionTable, 3> criteria;
  HallucinationTable hallucination;
  StepTable steps;
};

struct FigureSeries {
  /// [criterion][score-1][type] with types H_ae, H_c, H_log: diagrams with
  /// that score carrying that type.
  std::array<std::array<std::array<std::int64_t, 3>, 5>, 3> faith_by_score{};
  /// Diagrams per tier carrying 0, 1, 2 or 3 faithfulness types.
  std::map<core::Difficulty, std::array<std::int64_t, 4>> faith_count_by_difficulty;
  /// Hallucination-free rates per tier for H1, H2, H6, H_inh, H_fact.
  std::map<core::Difficulty, std::map<std::string, Ratio>> free_by_difficulty;
};

struct SummaryOptions {
  AlphaOptions alpha;
  bool compute_irr = true;
  bool require_complete = true;
};

struct SummaryTables {
  std::vector<CellSummary> cells;  // ordered by model, then rst1, zero_shot, rst2
  FigureSeries figures;
  /// Per criterion over every diagram in the dataset.
  std::vector<ReliabilityEstimate> overall_irr;
  std::string quartile_method = "type7";
};

/// Validates the dataset (throws core::ValidationError) and builds every table.
SummaryTables summarize_dataset(const core::EvaluationDataset& dataset, const SummaryOptions& options = {});

nlohmann::json to_json(const Ratio& r);
nlohmann::json to_json(const ReliabilityEstimate& r);
nlohmann::json to_json(const SummaryTables& t);

/// scores.csv, hallucination.csv, steps.csv, fig_faith_by_score.csv,
/// fig_faith_by_difficulty.csv, fig_free_by_difficulty.csv.
std::vector<std::filesystem::path> write_summary_csvs(const SummaryTables& t, const std::filesystem::path& dir);

}  // namespace rstdiag::stats

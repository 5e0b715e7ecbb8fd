#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rstdiag::stats {

class StatsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Units x raters grid of optional integer ratings.
class RatingsMatrix {
 public:
  RatingsMatrix(int units, int raters);
  /// Rows are units; every row must have the same length.
  static RatingsMatrix from_rows(const std::vector<std::vector<std::optional<int>>>& rows);

  int units() const { return units_; }
  int raters() const { return raters_; }
  const std::optional<int>& at(int unit, int rater) const;
  void set(int unit, int rater, std::optional<int> value);

  bool complete() const;
  /// Units with at least two ratings.
  int pairable_units() const;
  /// Throws StatsError unless there are >= 2 raters and >= 1 pairable unit.
  void validate() const;

 private:
  int units_;
  int raters_;
  std::vector<std::optional<int>> cells_;
};

struct AlphaOptions {
  int bootstrap_samples = 1000;
  std::uint64_t seed = 20250101;
  double confidence = 0.95;
  int threads = 0;  // 0: hardware concurrency
};

struct AlphaEstimate {
  double alpha = 1.0;
  double ci_low = 1.0;
  double ci_high = 1.0;
  /// The percentile interval did not contain alpha and was extended to it.
  bool ci_widened = false;
  /// All pairable values identical; alpha is defined as 1.
  bool degenerate = false;
  int n_units = 0;   // pairable units
  int n_raters = 0;
  double n_values = 0;  // pairable values
  int bootstrap_samples = 0;
  std::uint64_t seed = 0;
};

/// Point estimate with the ordinal metric on the coincidence matrix; units
/// with fewer than two ratings are ignored. Returns nullopt when the
/// expected disagreement is zero.
std::optional<double> alpha_ordinal_point(const RatingsMatrix& m);

/// Point estimate plus a percentile bootstrap interval over units. Resample
/// b draws from its own generator seeded with (seed, b), so the interval does
/// not depend on thread scheduling.
AlphaEstimate krippendorff_alpha_ordinal(const RatingsMatrix& m, const AlphaOptions& options = {});

struct KendallW {
  double w = 0.0;
  double chi_square = 0.0;
  int df = 0;
  double p_value = 1.0;
  int n_items = 0;   // units
  int n_raters = 0;
};

/// Coefficient of concordance with midranks and the tie correction; p from
/// the chi-square approximation with n-1 degrees of freedom. Throws
/// StatsError on missing cells or when every rater gives constant ratings.
KendallW kendall_w(const RatingsMatrix& m);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double x, int df);

/// Midranks of `values` (1-based), ties share the mean rank.
std::vector<double> midranks(const std::vector<double>& values);

struct Quartiles {
  double q1 = 0, q2 = 0, q3 = 0;
  bool operator==(const Quartiles&) const = default;
};

/// Type-7 quantile (linear interpolation between order statistics).
double quantile(std::vector<double> sorted_or_not, double p);
/// Throws StatsError on empty input.
Quartiles quartiles(const std::vector<int>& scores);

}  // namespace rstdiag::stats

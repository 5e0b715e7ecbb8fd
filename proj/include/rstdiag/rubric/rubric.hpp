#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace rstdiag::rubric {

inline constexpr int kMinScore = 1;
inline constexpr int kMaxScore = 5;
inline constexpr int kLayoutFlagCount = 7;

class RangeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

constexpr bool in_score_range(int v) { return v >= kMinScore && v <= kMaxScore; }

/// Nearest integer to numerator/denominator; exact .5 ties go to the odd
/// neighbour. Requires numerator >= 0 and denominator > 0.
int round_half_to_odd(std::int64_t numerator, std::int64_t denominator);

/// Logical organization score from the weighted sub-scores
/// 0.6*L1 + 0.3*L2 + 0.1*L3, evaluated in integer tenths.
int compute_c1(int l1, int l2, int l3);

/// Layout problems k1..k7, true when the problem is present.
///   k1 excessive line crossings or bends
///   k2 obscured elements
///   k3 elements incomprehensible due to colour, size or shape
///   k4 asymmetry
///   k5 vertical/horizontal misalignment
///   k6 excessive width
///   k7 dishomogeneous appearance
struct LayoutChecklist {
  std::array<bool, kLayoutFlagCount> flags{};

  int count() const;
  static LayoutChecklist from_mask(unsigned mask);
  bool operator==(const LayoutChecklist&) const = default;
};

/// Layout aesthetic score from the number of flagged problems:
/// 0 -> 5, 1..2 -> 4, 3 -> 3, 4 -> 2, more -> 1.
int compute_c3(const LayoutChecklist& checklist);

/// Connectivity is judged holistically; this only range-checks it.
int validate_c2(int score);

/// Every (L1, L2, L3) triple and every flag combination with the expected
/// derived score, for clients that re-implement the formulas for display.
nlohmann::json export_test_vectors();

}  // namespace rstdiag::rubric

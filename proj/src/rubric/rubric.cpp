#include "rstdiag/rubric/rubric.hpp"

#include <algorithm>

namespace rstdiag::rubric {

namespace {

void require_score(int v, const char* name) {
  if (!in_score_range(v)) {
    throw RangeError(std::string(name) + " must be in 1..5, got " + std::to_string(v));
  }
}

}  // namespace

int round_half_to_odd(std::int64_t numerator, std::int64_t denominator) {
  if (denominator <= 0) throw std::invalid_argument("round_half_to_odd: denominator must be positive");
  if (numerator < 0) throw std::invalid_argument("round_half_to_odd: value must be non-negative");
  const std::int64_t q = numerator / denominator;
  const std::int64_t twice_rem = 2 * (numerator % denominator);
  if (twice_rem < denominator) return static_cast<int>(q);
  if (twice_rem > denominator) return static_cast<int>(q + 1);
  return static_cast<int>(q % 2 == 1 ? q : q + 1);
}

int compute_c1(int l1, int l2, int l3) {
  require_score(l1, "L1");
  require_score(l2, "L2");
  require_score(l3, "L3");
  return round_half_to_odd(6 * l1 + 3 * l2 + 1 * l3, 10);
}

int LayoutChecklist::count() const {
  return static_cast<int>(std::count(flags.begin(), flags.end(), true));
}

LayoutChecklist LayoutChecklist::from_mask(unsigned mask) {
  LayoutChecklist c;
  for (int i = 0; i < kLayoutFlagCount; ++i) c.flags[i] = (mask >> i) & 1U;
  return c;
}

int compute_c3(const LayoutChecklist& checklist) {
  const int s = checklist.count();
  if (s < 1) return 5;
  if (s < 3) return 4;
  if (s == 3) return 3;
  if (s == 4) return 2;
  return 1;
}

int validate_c2(int score) {
  require_score(score, "C2");
  return score;
}

nlohmann::json export_test_vectors() {
  nlohmann::json c1 = nlohmann::json::array();
  for (int a = kMinScore; a <= kMaxScore; ++a)
    for (int b = kMinScore; b <= kMaxScore; ++b)
      for (int c = kMinScore; c <= kMaxScore; ++c)
        c1.push_back({{"L1", a}, {"L2", b}, {"L3", c}, {"C1", compute_c1(a, b, c)}});

  nlohmann::json c3 = nlohmann::json::array();
  for (unsigned mask = 0; mask < (1U << kLayoutFlagCount); ++mask) {
    const auto checklist = LayoutChecklist::from_mask(mask);
    c3.push_back({{"layout_flags", checklist.flags}, {"C3", compute_c3(checklist)}});
  }
  return {{"c1", std::move(c1)}, {"c3", std::move(c3)}};
}

}  // namespace rstdiag::rubric

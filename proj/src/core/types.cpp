#include "rstdiag/core/types.hpp"

#include <algorithm>
#include <set>

namespace rstdiag::core {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::array<std::pair<std::string_view, Enum>, N>& table,
                const char* what) {
  for (const auto& [name, value] : table)
    if (name == s) return value;
  throw ParseError(std::string("unknown ") + what + ": '" + std::string(s) + "'");
}

}  // namespace

std::string_view to_string(Difficulty d) {
  switch (d) {
    case Difficulty::advanced: return "advanced";
    case Difficulty::medium: return "medium";
    case Difficulty::basic: return "basic";
  }
  return "?";
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::rst1: return "rst1";
    case Method::rst2: return "rst2";
    case Method::zero_shot: return "zero_shot";
  }
  return "?";
}

std::string_view to_string(DotStage s) {
  switch (s) {
    case DotStage::initial: return "initial";
    case DotStage::repaired: return "repaired";
    case DotStage::refined: return "refined";
    case DotStage::final: return "final";
  }
  return "?";
}

std::string_view to_string(ImageFormat f) { return f == ImageFormat::png ? "png" : "svg"; }
std::string_view to_string(RunStatus s) { return s == RunStatus::ok ? "ok" : "failed"; }

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::c1: return "C1";
    case Criterion::c2: return "C2";
    case Criterion::c3: return "C3";
  }
  return "?";
}

Difficulty parse_difficulty(std::string_view s) {
  static constexpr std::array<std::pair<std::string_view, Difficulty>, 3> t{
      {{"advanced", Difficulty::advanced}, {"medium", Difficulty::medium}, {"basic", Difficulty::basic}}};
  return parse_enum(s, t, "difficulty");
}

Method parse_method(std::string_view s) {
  static constexpr std::array<std::pair<std::string_view, Method>, 5> t{{{"rst1", Method::rst1},
                                                                         {"rst2", Method::rst2},
                                                                         {"zero_shot", Method::zero_shot},
                                                                         {"zero-shot", Method::zero_shot},
                                                                         {"0-shot", Method::zero_shot}}};
  return parse_enum(s, t, "method");
}

DotStage parse_dot_stage(std::string_view s) {
  static constexpr std::array<std::pair<std::string_view, DotStage>, 4> t{{{"initial", DotStage::initial},
                                                                           {"repaired", DotStage::repaired},
                                                                           {"refined", DotStage::refined},
                                                                           {"final", DotStage::final}}};
  return parse_enum(s, t, "dot stage");
}

ImageFormat parse_image_format(std::string_view s) {
  static constexpr std::array<std::pair<std::string_view, ImageFormat>, 2> t{
      {{"png", ImageFormat::png}, {"svg", ImageFormat::svg}}};
  return parse_enum(s, t, "image format");
}

RunStatus parse_run_status(std::string_view s) {
  static constexpr std::array<std::pair<std::string_view, RunStatus>, 2> t{
      {{"ok", RunStatus::ok}, {"failed", RunStatus::failed}}};
  return parse_enum(s, t, "run status");
}

Criterion parse_criterion(std::string_view s) {
  static constexpr std::array<std::pair<std::string_view, Criterion>, 6> t{{{"C1", Criterion::c1},
                                                                            {"C2", Criterion::c2},
                                                                            {"C3", Criterion::c3},
                                                                            {"c1", Criterion::c1},
                                                                            {"c2", Criterion::c2},
                                                                            {"c3", Criterion::c3}}};
  return parse_enum(s, t, "criterion");
}

ExampleDictionary::ExampleDictionary(std::vector<ExampleEntry> entries) : entries_(std::move(entries)) {
  std::set<int> seen;
  for (const auto& e : entries_) {
    if (e.index < 1 || e.index > static_cast<int>(entries_.size()))
      throw ParseError("example index " + std::to_string(e.index) + " outside 1.." +
                       std::to_string(entries_.size()));
    if (!seen.insert(e.index).second) throw ParseError("duplicate example index " + std::to_string(e.index));
  }
  std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
}

const ExampleEntry& ExampleDictionary::at(int index) const {
  if (index < 1 || index > size())
    throw std::out_of_range("example index " + std::to_string(index) + " outside 1.." + std::to_string(size()));
  return entries_[static_cast<std::size_t>(index - 1)];
}

int RubricAnnotation::score(Criterion c) const {
  switch (c) {
    case Criterion::c1: return C1;
    case Criterion::c2: return C2;
    case Criterion::c3: return C3;
  }
  return 0;
}

RubricAnnotation make_annotation(std::string diagram_id, std::string rater_id, int l1, int l2, int l3, int c2,
                                 const rubric::LayoutChecklist& flags, const HallucinationTags& tags) {
  RubricAnnotation a;
  a.diagram_id = std::move(diagram_id);
  a.rater_id = std::move(rater_id);
  a.L1 = l1;
  a.L2 = l2;
  a.L3 = l3;
  a.C1 = rubric::compute_c1(l1, l2, l3);
  a.C2 = rubric::validate_c2(c2);
  a.layout_flags = flags;
  a.C3 = rubric::compute_c3(flags);
  a.hallucination = tags;
  return a;
}

int ScoreTriple::at(Criterion c) const {
  switch (c) {
    case Criterion::c1: return c1;
    case Criterion::c2: return c2;
    case Criterion::c3: return c3;
  }
  return 0;
}

ScoreTriple make_score_triple(int c1, int c2, int c3) {
  for (int v : {c1, c2, c3})
    if (!rubric::in_score_range(v)) throw rubric::RangeError("score out of range 1..5: " + std::to_string(v));
  return {c1, c2, c3};
}

HallucinationTags EvaluationRecord::effective_hallucination() const {
  if (consensus_hallucination) return *consensus_hallucination;
  HallucinationTags t;
  for (const auto& a : annotations) {
    t.h_fact |= a.hallucination.h_fact;
    t.h_ae |= a.hallucination.h_ae;
    t.h_c |= a.hallucination.h_c;
    t.h_log |= a.hallucination.h_log;
  }
  return t;
}

const EvaluationRecord* EvaluationDataset::find(std::string_view diagram_id) const {
  for (const auto& r : records)
    if (r.diagram_id == diagram_id) return &r;
  return nullptr;
}

}  // namespace rstdiag::core

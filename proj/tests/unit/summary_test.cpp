#include <doctest.h>

#include "rstdiag/core/csv.hpp"
#include "rstdiag/core/json.hpp"
#include "rstdiag/core/validate.hpp"
#include "rstdiag/stats/summary.hpp"
#include "rstdiag/store/dataset_io.hpp"
#include "test_support.hpp"

using namespace rstdiag;
using namespace rstdiag::stats;
using core::Criterion;
using core::Difficulty;
using core::Method;
using nlohmann::json;
using rstdiag::testing::TempDir;

namespace {

const core::EvaluationDataset& synthetic() {
  static const auto ds = store::load_dataset(rstdiag::testing::fixtures_dir() / "synthetic_150.json");
  return ds;
}

// Flags that make C3 come out as `c3`.
unsigned mask_for_c3(int c3) {
  switch (c3) {
    case 5: return 0;
    case 4: return 0b1;
    case 3: return 0b111;
    case 2: return 0b1111;
    default: return 0b11111;
  }
}

core::EvaluationRecord record(const std::string& id, Difficulty d, int c1, int c2, int c3,
                              core::HallucinationTags tags = {}) {
  core::EvaluationRecord r;
  r.diagram_id = id;
  r.source_id = "src-" + id;
  r.difficulty = d;
  r.method = Method::rst1;
  r.model = "o3";
  r.scores = {c1, c2, c3};
  auto flags = rubric::LayoutChecklist::from_mask(mask_for_c3(c3));
  r.annotations = {core::make_annotation(id, "r1", c1, c1, c1, c2, flags, tags),
                   core::make_annotation(id, "r2", c1, c1, c1, c2, flags, tags)};
  return r;
}

SummaryOptions no_irr() {
  SummaryOptions o;
  o.compute_irr = false;
  return o;
}

}  // namespace

TEST_CASE("synthetic study matches the enumerated tables") {
  auto tables = summarize_dataset(synthetic(), no_irr());
  json expected = rstdiag::testing::read_json(rstdiag::testing::fixtures_dir() / "synthetic_150_summary.json");
  CHECK(to_json(tables) == expected);
  CHECK(tables.cells.size() == 6);
  CHECK(tables.overall_irr.empty());
  CHECK(tables.cells[0].model == "gpt-4o");
  CHECK(tables.cells[0].method == Method::rst1);
  CHECK(tables.cells[1].method == Method::zero_shot);
  CHECK(tables.cells[2].method == Method::rst2);
}

TEST_CASE("tables are internally consistent") {
  auto tables = summarize_dataset(synthetic(), no_irr());
  for (const auto& cell : tables.cells) {
    CHECK(cell.n == 25);
    for (const auto& t : cell.criteria) {
      std::int64_t sum = 0;
      for (auto c : t.counts) sum += c;
      CHECK(sum == cell.n);
      std::int64_t num = 0;
      for (const auto& r : t.distribution) {
        CHECK(r.den == cell.n);
        num += r.num;
      }
      CHECK(num == cell.n);
      for (auto m : t.modes) CHECK(t.counts[m - 1] == *std::max_element(t.counts.begin(), t.counts.end()));
      CHECK(t.quartiles.q1 <= t.quartiles.q2);
      CHECK(t.quartiles.q2 <= t.quartiles.q3);
    }
    for (const auto* r : {&cell.hallucination.h_fact, &cell.hallucination.h_ae, &cell.hallucination.h_c,
                          &cell.hallucination.h_log, &cell.hallucination.g_r, &cell.steps.h1, &cell.steps.h6}) {
      CHECK(r->num >= 0);
      CHECK(r->num <= r->den);
    }
  }
}

TEST_CASE("good ratio on advanced texts, two decimals") {
  core::EvaluationDataset ds;
  for (int i = 0; i < 6; ++i) ds.records.push_back(record("a" + std::to_string(i), Difficulty::advanced, i < 5 ? 4 : 3, 4, 5));
  auto t = summarize_dataset(ds, no_irr());
  const auto& ga = t.cells[0].criteria[0].good_by_difficulty.at(Difficulty::advanced);
  CHECK(ga == Ratio{5, 6});
  CHECK(ga.fixed() == "0.83");
  CHECK(!t.cells[0].criteria[0].good_by_difficulty.at(Difficulty::basic).defined());
  CHECK(t.cells[0].criteria[0].good_by_difficulty.at(Difficulty::basic).fixed() == "NA");
}

TEST_CASE("hallucination-free ratio with one tagged diagram") {
  core::EvaluationDataset ds;
  for (int i = 0; i < 25; ++i) {
    core::HallucinationTags tags;
    tags.h_fact = i == 0;
    ds.records.push_back(record("d" + std::to_string(i), Difficulty::medium, 4, 4, 4, tags));
  }
  auto t = summarize_dataset(ds, no_irr());
  CHECK(t.cells[0].hallucination.h_fact == Ratio{24, 25});
  CHECK(t.cells[0].hallucination.h_fact.fixed() == "0.96");
  CHECK(t.cells[0].hallucination.g_r == Ratio{24, 25});
}

TEST_CASE("no tags anywhere gives ratios of one") {
  core::EvaluationDataset ds;
  for (int i = 0; i < 4; ++i) ds.records.push_back(record("d" + std::to_string(i), Difficulty::basic, 2, 3, 4));
  auto h = summarize_dataset(ds, no_irr()).cells[0].hallucination;
  for (const auto& r : {h.h_fact, h.h_ae, h.h_c, h.h_log}) CHECK(r.value() == 1.0);
  CHECK(h.g_r == Ratio{0, 4});  // scores not all above 3
}

TEST_CASE("quartiles from a published score distribution") {
  // 25 diagrams: 2 x 2, 1 x 3, 11 x 4, 11 x 5.
  core::EvaluationDataset ds;
  int i = 0;
  for (auto [score, count] : std::vector<std::pair<int, int>>{{2, 2}, {3, 1}, {4, 11}, {5, 11}})
    for (int k = 0; k < count; ++k) ds.records.push_back(record("d" + std::to_string(i++), Difficulty::medium, score, 4, 5));
  const auto c1 = summarize_dataset(ds, no_irr()).cells[0].criteria[0];
  CHECK(c1.quartiles == Quartiles{4, 4, 5});
  CHECK(c1.distribution[1].fixed() == "0.08");
  CHECK(c1.distribution[2].fixed() == "0.04");
  CHECK(c1.distribution[3].fixed() == "0.44");
  CHECK(c1.modes == std::vector<int>{4, 5});
}

TEST_CASE("step ratios count only the steps that ran") {
  core::EvaluationDataset ds;
  auto a = record("a", Difficulty::basic, 5, 5, 5);
  a.step_hallucination = core::StepHallucinationRecord{"run-a", false, true, false, false};
  auto b = record("b", Difficulty::basic, 5, 5, 5);
  b.step_hallucination = core::StepHallucinationRecord{"run-b", false, false, true, std::nullopt};
  auto c = record("c", Difficulty::basic, 2, 5, 5);
  c.step_hallucination = core::StepHallucinationRecord{"run-c", true, false, true, true};
  ds.records = {a, b, c};
  const auto s = summarize_dataset(ds, no_irr()).cells[0].steps;
  CHECK(s.h1 == Ratio{2, 3});
  CHECK(s.h2 == Ratio{2, 3});
  CHECK(s.h6 == Ratio{1, 3});
  CHECK(s.h_inh == Ratio{1, 2});
  CHECK(s.g6 == Ratio{1, 2});
  CHECK(s.g_inh == Ratio{1, 1});
}

TEST_CASE("consensus tags override the raters") {
  core::HallucinationTags tagged;
  tagged.h_c = true;
  auto r = record("d", Difficulty::basic, 4, 4, 4, tagged);
  core::EvaluationDataset ds{{r}};
  CHECK(summarize_dataset(ds, no_irr()).cells[0].hallucination.h_c == Ratio{0, 1});
  ds.records[0].consensus_hallucination = core::HallucinationTags{};
  CHECK(summarize_dataset(ds, no_irr()).cells[0].hallucination.h_c == Ratio{1, 1});
}

TEST_CASE("incomplete studies are rejected") {
  core::EvaluationDataset ds{{record("d", Difficulty::basic, 4, 4, 4)}};
  ds.records[0].annotations.pop_back();
  CHECK_THROWS_AS(summarize_dataset(ds, no_irr()), core::ValidationError);
  auto o = no_irr();
  o.require_complete = false;
  CHECK_NOTHROW(summarize_dataset(ds, o));
}

TEST_CASE("reliability is attached per cell and overall") {
  SummaryOptions o;
  o.alpha.bootstrap_samples = 200;
  auto t = summarize_dataset(synthetic(), o);
  REQUIRE(t.overall_irr.size() == 3);
  std::vector<const core::EvaluationRecord*> all;
  for (const auto& r : synthetic().records) all.push_back(&r);
  for (auto c : core::kAllCriteria) {
    auto direct = reliability_for(all, c, o.alpha);
    const auto& overall = t.overall_irr[static_cast<int>(c)];
    CHECK(overall.criterion == c);
    REQUIRE(overall.alpha);
    CHECK(overall.alpha->alpha == direct.alpha->alpha);
    CHECK(overall.alpha->ci_low == direct.alpha->ci_low);
    CHECK(overall.alpha->ci_low <= overall.alpha->alpha);
    CHECK(overall.alpha->alpha <= overall.alpha->ci_high);
    CHECK(overall.n_units == 150);
    CHECK(overall.n_raters == 4);
    REQUIRE(overall.w);
    CHECK(overall.w->n_items == 150);
  }
  for (const auto& cell : t.cells)
    for (const auto& crit : cell.criteria) {
      REQUIRE(crit.irr);
      CHECK(crit.irr->n_units == 25);
    }
  auto j = to_json(t);
  CHECK(j["overall_irr"].size() == 3);
  CHECK(j["overall_irr"][0].contains("alpha"));
}

TEST_CASE("csv tables are written") {
  TempDir dir;
  auto files = write_summary_csvs(summarize_dataset(synthetic(), no_irr()), dir.path());
  CHECK(files.size() == 6);
  for (const auto& f : files) {
    CAPTURE(f.string());
    auto rows = core::parse_csv(rstdiag::testing::read_file(f));
    CHECK(rows.size() > 1);
  }
  auto scores = core::parse_csv(rstdiag::testing::read_file(dir / "scores.csv"));
  CHECK(scores.size() == 1 + 6 * 3);
}

TEST_CASE("ratio formatting") {
  CHECK(Ratio{1, 3}.fixed() == "0.33");
  CHECK(Ratio{2, 3}.fixed() == "0.67");
  CHECK(Ratio{1, 8}.fixed(2) == "0.13");
  CHECK(Ratio{0, 0}.fixed() == "NA");
  CHECK(to_json(Ratio{0, 0})["value"].is_null());
  CHECK(to_json(Ratio{1, 4}) == json{{"num", 1}, {"den", 4}, {"value", 0.25}});
}

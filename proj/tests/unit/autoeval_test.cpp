#include <doctest.h>

#include <set>

#include "rstdiag/autoeval/auto_evaluator.hpp"
#include "rstdiag/core/csv.hpp"
#include "rstdiag/llm/mock_backend.hpp"
#include "rstdiag/llm/prompts.hpp"
#include "rstdiag/store/dataset_io.hpp"
#include "test_support.hpp"

using namespace rstdiag;
using namespace rstdiag::autoeval;
using core::ScoreTriple;
using llm::TemplateId;

namespace {

const core::EvaluationDataset& synthetic() {
  static const auto ds = store::load_dataset(rstdiag::testing::fixtures_dir() / "synthetic_150.json");
  return ds;
}

const std::string kDiagram("\x89PNG\r\n\x1a\nDIAGRAM", 15);

ImageLoader fake_images() {
  return [](const core::EvaluationRecord& r) { return kDiagram + r.diagram_id; };
}

llm::MockStep any_reply(const std::string& text) {
  llm::MockStep s;
  s.response = text;
  return s;
}

std::vector<llm::MockStep> replies(int n, const std::string& text) { return std::vector<llm::MockStep>(n, any_reply(text)); }

IclExampleSet with_images(IclExampleSet set) {
  for (std::size_t i = 0; i < set.examples.size(); ++i) set.examples[i].image = "EXAMPLE-IMAGE-" + std::to_string(i + 1);
  return set;
}

AutoEvalConfig config(Mode mode, std::optional<IclExampleSet> examples = std::nullopt) {
  AutoEvalConfig c;
  c.mode = mode;
  c.model_id = "o3";
  c.examples = std::move(examples);
  return c;
}

}  // namespace

TEST_CASE("rounded mean, halves up") {
  for (int a = 1; a <= 5; ++a)
    for (int b = 1; b <= 5; ++b) {
      CAPTURE(a);
      CAPTURE(b);
      const int expected = (a + b) % 2 == 0 ? (a + b) / 2 : (a + b + 1) / 2;
      const int got = aggregate_half_up(std::vector<int>{a, b});
      CHECK(got == expected);
      CHECK(got >= 1);
      CHECK(got <= 5);
    }
  CHECK(aggregate_half_up(std::vector<int>{4, 5}) == 5);
  CHECK(aggregate_half_up(std::vector<int>{4, 4}) == 4);
  CHECK(aggregate_half_up(std::vector<int>{3}) == 3);
  CHECK(aggregate_half_up(std::vector<int>{1, 2, 2}) == 2);  // 5/3
  CHECK(aggregate_half_up(std::vector<ScoreTriple>{ScoreTriple{4, 5, 1}, ScoreTriple{5, 5, 2}}) == ScoreTriple{5, 5, 2});
  CHECK_THROWS(aggregate_half_up(std::vector<int>{}));
}

TEST_CASE("mode configuration rules") {
  auto examples = load_icl_examples(rstdiag::testing::data_dir() / "icl_examples");
  CHECK(examples.examples.size() == 9);
  CHECK(examples.held_out_sources.size() == 3);
  CHECK_THROWS_AS(config(Mode::E1).validate(), AutoEvalConfigError);
  CHECK_THROWS_AS(config(Mode::E2).validate(), AutoEvalConfigError);
  CHECK_THROWS_AS(config(Mode::E3, examples).validate(), AutoEvalConfigError);
  CHECK_THROWS_AS(config(Mode::E1, IclExampleSet{}).validate(), AutoEvalConfigError);
  CHECK_NOTHROW(config(Mode::E1, examples).validate());
  CHECK_NOTHROW(config(Mode::E3).validate());
  auto zero = config(Mode::E3);
  zero.repeats = 0;
  CHECK_THROWS_AS(zero.validate(), AutoEvalConfigError);
  CHECK(parse_mode("e2") == Mode::E2);
  CHECK(parse_mode("E3") == Mode::E3);
  CHECK_THROWS(parse_mode("e4"));
}

TEST_CASE("prompt content per mode") {
  const auto examples = with_images(load_icl_examples(rstdiag::testing::data_dir() / "icl_examples"));
  const std::string ra(llm::template_body(TemplateId::Ra).system);
  REQUIRE(!ra.empty());

  auto e1 = build_request(config(Mode::E1, examples), kDiagram, "the text");
  CHECK(e1.system_message.find(ra) == std::string::npos);
  CHECK(e1.system_message.find("Example 9") != std::string::npos);
  REQUIRE(e1.attachments.size() == 10);
  CHECK(e1.attachments[0].bytes == "EXAMPLE-IMAGE-1");
  CHECK(e1.attachments[8].bytes == "EXAMPLE-IMAGE-9");
  CHECK(e1.attachments[9].bytes == kDiagram);
  CHECK(e1.user_message.find("the text") != std::string::npos);

  auto e2 = build_request(config(Mode::E2, examples), kDiagram, "the text");
  CHECK(e2.system_message.find(ra) == 0);
  CHECK(e2.system_message.find("Example 1") != std::string::npos);
  CHECK(e2.attachments.size() == 10);

  auto e3 = build_request(config(Mode::E3), kDiagram, "the text");
  CHECK(e3.system_message == ra);
  REQUIRE(e3.attachments.size() == 1);
  CHECK(e3.attachments[0].bytes == kDiagram);

  // Examples appear in set order.
  CHECK(e1.system_message.find("Example 1") < e1.system_message.find("Example 2"));
}

TEST_CASE("a judge scripted to published labels reproduces them") {
  const auto examples = load_icl_examples(rstdiag::testing::data_dir() / "icl_examples");
  const auto& sample8 = examples.examples.at(7);
  CHECK(sample8.id == "sample-8");
  CHECK(sample8.scores == ScoreTriple{5, 5, 4});
  llm::Gateway g(std::make_shared<llm::MockBackend>(std::vector<llm::MockStep>{
      llm::reply_to(TemplateId::Ra, "Q1: 5 Q2: 5 Q3: 4")}));
  CHECK(evaluate_diagram(g, config(Mode::E2, examples), kDiagram, "text") == ScoreTriple{5, 5, 4});
  llm::Gateway g3(std::make_shared<llm::MockBackend>(std::vector<llm::MockStep>{any_reply("Q1: 4 Q2: 5 Q3: 4")}));
  CHECK(evaluate_diagram(g3, config(Mode::E3), kDiagram, "text") == ScoreTriple{4, 5, 4});
}

TEST_CASE("E1 and E2 skip diagrams from the example texts") {
  const auto examples = load_icl_examples(rstdiag::testing::fixtures_dir() / "icl_132");
  REQUIRE(examples.examples.size() == 9);
  for (Mode mode : {Mode::E1, Mode::E2}) {
    CAPTURE(to_string(mode));
    auto backend = std::make_shared<llm::MockBackend>(replies(132 * 2, "Q1: 4 Q2: 4 Q3: 5"));
    llm::Gateway g(backend);
    auto res = evaluate_dataset(g, config(mode, examples), synthetic(), fake_images());
    CHECK(res.items.size() == 132);
    CHECK(res.excluded.size() == 18);
    CHECK(backend->exhausted());
    CHECK(g.call_log().size() == 264);
    std::set<std::string> held = {"text-04", "text-11", "text-20"};
    for (const auto& item : res.items) {
      const auto* rec = synthetic().find(item.diagram_id);
      REQUIRE(rec);
      CHECK(!held.count(rec->source_id));
      CHECK(item.aggregated == ScoreTriple{4, 4, 5});
    }
    CHECK(res.metadata["evaluated"] == 132);
    CHECK(res.metadata["example_order"].size() == 9);
  }
}

TEST_CASE("E3 scores all diagrams and aggregates per diagram") {
  // Alternate replies so each diagram sees (4,5,3) then (5,5,3).
  std::vector<llm::MockStep> script;
  for (int i = 0; i < 150; ++i) {
    script.push_back(any_reply("Q1: 4 Q2: 5 Q3: 3"));
    script.push_back(any_reply("Q1: 5 Q2: 5 Q3: 3"));
  }
  auto backend = std::make_shared<llm::MockBackend>(script);
  llm::Gateway g(backend);
  auto res = evaluate_dataset(g, config(Mode::E3), synthetic(), fake_images());
  REQUIRE(res.items.size() == 150);
  CHECK(res.excluded.empty());
  CHECK(res.failures().empty());
  for (const auto& item : res.items) {
    REQUIRE(item.runs.size() == 2);
    CHECK(item.runs[0] == ScoreTriple{4, 5, 3});
    CHECK(item.aggregated == ScoreTriple{5, 5, 3});
  }
  CHECK(res.items[0].diagram_id == synthetic().records[0].diagram_id);
  for (const auto& e : g.call_log().entries()) CHECK(e.attachments == 1);
  CHECK(res.metadata["aggregation"] == "rounded mean, halves round up");
}

TEST_CASE("one run means identity and parallel runs agree") {
  auto c = config(Mode::E3);
  c.repeats = 1;
  c.concurrency = 4;
  auto backend = std::make_shared<llm::MockBackend>(replies(150, "Q1: 2 Q2: 3 Q3: 4"));
  llm::Gateway g(backend);
  auto res = evaluate_dataset(g, c, synthetic(), fake_images());
  REQUIRE(res.items.size() == 150);
  for (std::size_t i = 0; i < res.items.size(); ++i) {
    CHECK(res.items[i].diagram_id == synthetic().records[i].diagram_id);
    CHECK(res.items[i].aggregated == ScoreTriple{2, 3, 4});
  }
}

TEST_CASE("unscorable diagrams are reported, not fatal") {
  core::EvaluationDataset small;
  small.records.assign(synthetic().records.begin(), synthetic().records.begin() + 3);
  auto backend = std::make_shared<llm::MockBackend>(std::vector<llm::MockStep>{
      any_reply("Q1: 3 Q2: 3 Q3: 3"), any_reply("Q1: 3 Q2: 3 Q3: 3"),
      // second diagram: three malformed answers exhaust the structured retries
      any_reply("hmm"), any_reply("hmm"), any_reply("hmm"),
      any_reply("Q1: 1 Q2: 1 Q3: 1"), any_reply("Q1: 2 Q2: 2 Q3: 2")});
  llm::Gateway g(backend);
  auto res = evaluate_dataset(g, config(Mode::E3), small, fake_images());
  REQUIRE(res.items.size() == 3);
  auto failed = res.failures();
  REQUIRE(failed.size() == 1);
  CHECK(failed[0]->diagram_id == small.records[1].diagram_id);
  CHECK(!failed[0]->aggregated);
  CHECK(res.items[2].aggregated == ScoreTriple{2, 2, 2});

  auto missing = [](const core::EvaluationRecord&) -> std::string { throw std::runtime_error("cannot read image"); };
  llm::Gateway g2(std::make_shared<llm::MockBackend>(std::vector<llm::MockStep>{}));
  auto none = evaluate_dataset(g2, config(Mode::E3), small, missing);
  CHECK(none.failures().size() == 3);
  CHECK(none.items[0].error.find("cannot read image") != std::string::npos);
  CHECK_THROWS(evaluate_dataset(g2, config(Mode::E3), core::EvaluationDataset{}, fake_images()));
}

TEST_CASE("csv output") {
  AutoEvalResult r;
  r.mode = Mode::E2;
  r.model_id = "gpt-4o";
  AutoEvalItem ok{"d1", {ScoreTriple{4, 5, 3}, ScoreTriple{5, 5, 3}}, ScoreTriple{5, 5, 3}, ""};
  AutoEvalItem bad{"d2", {}, std::nullopt, "refused"};
  r.items = {ok, bad};
  std::ostringstream out;
  write_csv(r, out);
  auto rows = core::parse_csv(out.str());
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"diagram_id", "mode", "model", "run_index", "c1", "c2", "c3", "aggregated"});
  CHECK(rows[1] == std::vector<std::string>{"d1", "E2", "gpt-4o", "1", "4", "5", "3", "0"});
  CHECK(rows[2] == std::vector<std::string>{"d1", "E2", "gpt-4o", "2", "5", "5", "3", "0"});
  CHECK(rows[3] == std::vector<std::string>{"d1", "E2", "gpt-4o", "mean", "5", "5", "3", "1"});
}

TEST_CASE("example loading and source matching") {
  const auto set = load_icl_examples(rstdiag::testing::fixtures_dir() / "icl_132");
  core::EvaluationRecord r;
  r.source_id = "text-11";
  CHECK(shares_example_source(r, set));
  r.source_id = "renamed";
  r.source_text = set.held_out_sources[0].body;
  CHECK(shares_example_source(r, set));
  r.source_text = "something else";
  CHECK(!shares_example_source(r, set));
  rstdiag::testing::TempDir dir;
  CHECK_THROWS(load_icl_examples(dir.path()));
}

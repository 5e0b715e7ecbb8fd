#include <doctest.h>

#include <set>

#include "rstdiag/llm/mock_backend.hpp"
#include "rstdiag/core/validate.hpp"
#include "rstdiag/core/encoding.hpp"
#include "rstdiag/pipeline/extract.hpp"
#include "rstdiag/pipeline/pipeline.hpp"
#include "rstdiag/store/dataset_io.hpp"
#include "test_support.hpp"

using namespace rstdiag;
using namespace rstdiag::pipeline;
using core::Method;
using llm::TemplateId;
using llm::reply_to;
using rstdiag::testing::TempDir;

namespace {

const std::string kGood = "digraph G { label=\"Generated with an AI model\"; a -> b }";
const std::string kGoodNoDisclaimer = "digraph G { a -> b -> c }";
const std::string kBroken = "digraph G { a -> }";

const render::RenderEngine& engine() {
  static const render::RenderEngine e([] {
    render::RenderConfig c;
    c.dot_executable = rstdiag::testing::dot_executable();
    return c;
  }());
  return e;
}

const core::ExampleDictionary& dictionary() {
  static const auto d = store::load_example_dictionary(rstdiag::testing::data_dir() / "example_dictionary");
  return d;
}

core::SourceText source() { return {"text-07", "Because it rained, the match was postponed.", core::Difficulty::basic, ""}; }

std::string fenced(const std::string& code, const std::string& after = "") {
  return "Here you go:\n```dot\n" + code + "\n```\n" + after;
}

struct Harness {
  std::shared_ptr<llm::MockBackend> backend;
  llm::Gateway gateway;
  Pipeline pipeline;

  explicit Harness(std::vector<llm::MockStep> script, PipelineConfig cfg = {}, store::ExperimentStore* store = nullptr)
      : backend(std::make_shared<llm::MockBackend>(std::move(script))),
        gateway(backend),
        pipeline(gateway, engine(), dictionary(), std::move(cfg), store) {}

  std::vector<TemplateId> templates() {
    std::vector<TemplateId> out;
    for (const auto& e : gateway.call_log().entries()) out.push_back(*e.template_id);
    return out;
  }
};

std::vector<llm::MockStep> rst_prefix(TemplateId gen, const std::string& code) {
  return {reply_to(TemplateId::R1, "EDU1 [Because it rained] EDU2 [the match was postponed] CAUSE(EDU1, EDU2)"),
          reply_to(TemplateId::R2, "3"), reply_to(gen, fenced(code))};
}

}  // namespace

TEST_CASE("dot extraction") {
  SUBCASE("tagged fence wins over an untagged one") {
    auto e = extract_dot("```\ndigraph A { x }\n```\ntext\n```dot\ndigraph B { y }\n```");
    CHECK(e.code == "digraph B { y }");
  }
  SUBCASE("untagged fence holding a graph") {
    auto e = extract_dot("Sure.\n```\nstrict graph { a -- b }\n```\nDone.");
    CHECK(e.code == "strict graph { a -- b }");
    CHECK(e.remainder == "Sure.\n\nDone.");
  }
  SUBCASE("bare code with braces inside strings and comments") {
    auto e = extract_dot("The code: digraph { a [label=\"}\"]; /* } */ a -> b } and that is all");
    CHECK(e.code == "digraph { a [label=\"}\"]; /* } */ a -> b }");
    CHECK(e.remainder.find("and that is all") != std::string::npos);
  }
  SUBCASE("longest span") {
    auto e = extract_dot("digraph { a } then digraph { b -> c -> d }");
    CHECK(e.code == "digraph { b -> c -> d }");
  }
  SUBCASE("nothing usable") {
    CHECK_THROWS_AS(extract_dot("no graph here"), ExtractionError);
    CHECK_THROWS_AS(extract_dot("digraph { never closed"), ExtractionError);
  }
  CHECK(count_words("  one two\nthree\t four ") == 4);
  CHECK(count_words("") == 0);
}

TEST_CASE("rst1 runs all seven steps in order") {
  auto script = rst_prefix(TemplateId::R3rst1, kGood);
  script.push_back(reply_to(TemplateId::R4, fenced(kGood, "Nothing needed changing.")));
  Harness h(script);
  auto run = h.pipeline.run(Method::rst1, source());
  CHECK(run.status == core::RunStatus::ok);
  CHECK(h.templates() == std::vector<TemplateId>{TemplateId::R1, TemplateId::R2, TemplateId::R3rst1, TemplateId::R4});
  CHECK(h.backend->exhausted());
  REQUIRE(run.chosen_example);
  CHECK(*run.chosen_example == 3);
  REQUIRE(run.demonstration);
  CHECK(run.demonstration->context == dictionary().at(3).source.body);
  CHECK(run.demonstration->dot == dictionary().at(3).diagram.code);

  auto log = h.gateway.call_log().entries();
  CHECK(log[0].user_message.find(source().body) != std::string::npos);
  const auto step4 = log[2].system_message + log[2].user_message;
  CHECK(step4.find(dictionary().at(3).source.body) != std::string::npos);
  CHECK(step4.find(dictionary().at(3).analysis.text) == std::string::npos);
  CHECK(log[2].user_message.find(source().body) != std::string::npos);
  CHECK(log[3].attachments == 1);
  CHECK(log[3].user_message.find(kGood) != std::string::npos);

  CHECK(run.initial_image.substr(0, 4) == "\x89PNG");
  CHECK(run.final_image.substr(0, 4) == "\x89PNG");
  CHECK(run.refinement_explanation == "Here you go:\n\nNothing needed changing.");
  CHECK(run.repair_log_initial.empty());
  CHECK(run.repair_log_final.empty());
  CHECK(run.flags.empty());
  CHECK(run.timestamps.size() == 7);
  CHECK(core::validate_run(run).empty());
  CHECK(run.settings["backend"] == "mock");
}

TEST_CASE("rst2 builds the demonstration from the example analysis") {
  auto script = rst_prefix(TemplateId::R3rst2, kGood);
  script.push_back(reply_to(TemplateId::R4, fenced(kGood, "Kept as is.")));
  Harness h(script);
  auto run = h.pipeline.run(Method::rst2, source());
  REQUIRE(run.status == core::RunStatus::ok);
  auto log = h.gateway.call_log().entries();
  const auto step4 = log[2].system_message + log[2].user_message;
  CHECK(step4.find(dictionary().at(3).analysis.text) != std::string::npos);
  CHECK(log[2].user_message.find(run.analysis->text) != std::string::npos);
  CHECK(log[2].user_message.find(source().body) == std::string::npos);
}

TEST_CASE("zero-shot skips the analysis steps") {
  Harness h({reply_to(TemplateId::R30, fenced(kGoodNoDisclaimer)),
             reply_to(TemplateId::R4, fenced(kGoodNoDisclaimer, "Fine."))});
  auto run = h.pipeline.run(Method::zero_shot, source());
  REQUIRE(run.status == core::RunStatus::ok);
  CHECK(h.templates() == std::vector<TemplateId>{TemplateId::R30, TemplateId::R4});
  CHECK(!run.analysis);
  CHECK(!run.chosen_example);
  CHECK(!run.demonstration);
  CHECK(run.flags == std::vector<std::string>{kFlagFinalWithoutDisclaimer});
  CHECK(core::validate_run(run).empty());
}

TEST_CASE("a faulty diagram is repaired once") {
  auto script = rst_prefix(TemplateId::R3rst1, kBroken);
  script.push_back(reply_to(TemplateId::R5, fenced(kGood)));
  script.push_back(reply_to(TemplateId::R4, fenced(kGood, "ok")));
  Harness h(script);
  auto run = h.pipeline.run(Method::rst1, source());
  REQUIRE(run.status == core::RunStatus::ok);
  REQUIRE(run.repair_log_initial.size() == 1);
  CHECK(run.repair_log_initial[0].faulty_code == kBroken);
  CHECK(run.repair_log_initial[0].error.find("syntax error") != std::string::npos);
  CHECK(run.repair_log_initial[0].corrected_code == kGood);
  auto log = h.gateway.call_log().entries();
  CHECK(log[3].template_id == TemplateId::R5);
  CHECK(log[3].model_id == "gpt-4o");
  CHECK(log[3].user_message.find(kBroken) != std::string::npos);
  CHECK(log[4].user_message.find(kGood) != std::string::npos);
}

TEST_CASE("repair stops at the iteration cap") {
  PipelineConfig cfg;
  cfg.repair_max_iters = 2;
  auto script = rst_prefix(TemplateId::R3rst1, kBroken);
  script.push_back(reply_to(TemplateId::R5, fenced(kBroken)));
  script.push_back(reply_to(TemplateId::R5, fenced(kBroken)));
  Harness h(script, cfg);
  auto run = h.pipeline.run(Method::rst1, source());
  CHECK(run.status == core::RunStatus::failed);
  CHECK(run.failed_step == "step5");
  CHECK(run.repair_log_initial.size() == 2);
  CHECK(h.backend->exhausted());
  CHECK(core::validate_run(run).empty());
}

TEST_CASE("flags for dropped disclaimers and long explanations") {
  std::string essay;
  for (int i = 0; i < 100; ++i) essay += "word ";
  auto script = rst_prefix(TemplateId::R3rst1, kGood);
  script.push_back(reply_to(TemplateId::R4, fenced(kGoodNoDisclaimer, essay)));
  Harness h(script);
  auto run = h.pipeline.run(Method::rst1, source());
  REQUIRE(run.status == core::RunStatus::ok);
  CHECK(run.explanation_words == 103);  // "Here you go:" adds three
  CHECK(run.flags == std::vector<std::string>{kFlagDroppedDisclaimer, kFlagFinalWithoutDisclaimer, kFlagLongExplanation});
}

TEST_CASE("every run is saved, failed ones included") {
  TempDir dir;
  store::ExperimentStore st(dir.path());
  auto script = rst_prefix(TemplateId::R3rst1, kGood);
  script.push_back(reply_to(TemplateId::R4, "no code this time"));
  Harness h(script, {}, &st);
  auto run = h.pipeline.run(Method::rst1, source());
  CHECK(run.status == core::RunStatus::failed);
  CHECK(run.failed_step == "step6");
  REQUIRE(st.has_run(run.run_id));
  CHECK(st.load_run(run.run_id) == run);
}

TEST_CASE("refusals and bad indices fail the step that made the call") {
  llm::MockStep refusal;
  refusal.outcome = llm::MockStep::Outcome::refusal;
  refusal.response = "no";
  Harness h({reply_to(TemplateId::R1, "analysis"), refusal});
  auto run = h.pipeline.run(Method::rst1, source());
  CHECK(run.failed_step == "step2");

  Harness h2({reply_to(TemplateId::R1, "analysis"), reply_to(TemplateId::R2, "9"), reply_to(TemplateId::R2, "9"),
              reply_to(TemplateId::R2, "9")});
  CHECK(h2.pipeline.run(Method::rst1, source()).failed_step == "step2");
}

TEST_CASE("run ids are unique and directory safe") {
  std::set<std::string> ids;
  for (int i = 0; i < 50; ++i) ids.insert(make_run_id(source(), Method::rst2, core::sha256_hex("x")));
  CHECK(ids.size() == 50);
  for (const auto& id : ids) CHECK(store::valid_run_id(id));
}

#include <doctest.h>

#include <map>

#include "rstdiag/core/encoding.hpp"
#include "rstdiag/llm/prompts.hpp"
#include "rstdiag/llm/structured.hpp"

using namespace rstdiag;
using namespace rstdiag::llm;

namespace {

// Digests of the frozen template texts; any edit to a prompt shows up here.
const std::map<TemplateId, std::pair<const char*, const char*>> kGolden = {
    {TemplateId::R1,
     {"924b9e73c6ef9806e413615165a5e202461189d1f653c9d63eda6a3dbd0a6f6b",
      "ada0db1bcc3bb7d19b34d0911e00ffde1acb4bb632f2f2d6b8b8ced3470ec673"}},
    {TemplateId::R2,
     {"82bb66fe2a26f63e5027c78aea38e857c48f4f8a436189db874c5e6ed641eea9",
      "b7cd8e320df0e530aed19f64c5f9fccfd3a63564acb9702b11b40bfa9a20b337"}},
    {TemplateId::R3rst1,
     {"0c18213cd4d95767057146671c8a81e0cd280ea13603f1f681b5b03e0377b119",
      "b3706eebc574d2051edf878b94c39c057eddcfe0d13778a95295a77fda3bba20"}},
    {TemplateId::R3rst2,
     {"9624cf54bd56950d37c5b172c17a43faa076c17e51e95e8b6470558c0f18d451",
      "499f002306bd59f961da355b66dd8d3e5c3561c4ac0941d366e47662b58b0c8e"}},
    {TemplateId::R30,
     {"4bc463f782cc1f86f5eefe7aa9763c0db09b39a68273c1ce4d9a350e4e1a51a4",
      "b3706eebc574d2051edf878b94c39c057eddcfe0d13778a95295a77fda3bba20"}},
    {TemplateId::R4,
     {"e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855",
      "28a689030ed2ba59fcb9c66d088c2f1a7b97a5a87d2c8248f9c7217f107e7b1f"}},
    {TemplateId::R5,
     {"3f1c8fcab7e88564a5bd9695e9f2361e98ee8b2375435759d2bb41385c6690c9",
      "80ecb9c1d41089164a9071b2ef57248673fbce5c8ae2f656000b97e6f04aa048"}},
    {TemplateId::Ra,
     {"3b911b16bd3a4a9c0f116a54d1e8eb4907559cf9826921bcddab519807f0dd61",
      "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"}},
};

}  // namespace

TEST_CASE("template texts are frozen") {
  REQUIRE(kGolden.size() == kTemplateCount);
  for (auto id : kAllTemplates) {
    CAPTURE(to_string(id));
    const auto& body = template_body(id);
    CHECK(body.id == id);
    CHECK(core::sha256_hex(body.system) == kGolden.at(id).first);
    CHECK(core::sha256_hex(body.user) == kGolden.at(id).second);
  }
}

TEST_CASE("template ids round-trip by name") {
  for (auto id : kAllTemplates) CHECK(parse_template_id(to_string(id)) == id);
  CHECK_THROWS_AS(parse_template_id("R9"), std::invalid_argument);
}

TEST_CASE("slot lists") {
  CHECK(template_slots(TemplateId::R1) == std::vector<std::string>{"text"});
  CHECK(optional_slots(TemplateId::R1) == std::vector<std::string>{"text"});
  CHECK(template_slots(TemplateId::R2) == std::vector<std::string>{"example_analyses", "analyzed_text"});
  CHECK(template_slots(TemplateId::R3rst1) == std::vector<std::string>{"example_1", "text"});
  CHECK(template_slots(TemplateId::R3rst2) == std::vector<std::string>{"example_2", "analyzed_text"});
  CHECK(template_slots(TemplateId::R30) == std::vector<std::string>{"text"});
  CHECK(template_slots(TemplateId::R4) == std::vector<std::string>{"dot"});
  CHECK(template_slots(TemplateId::R5) == std::vector<std::string>{"dot", "error"});
  CHECK(template_slots(TemplateId::Ra).empty());
}

TEST_CASE("rendering substitutes values verbatim and once") {
  auto p = render_prompt(TemplateId::R5, {{"dot", std::string("digraph { {error} }")}, {"error", std::string("E!")}});
  CHECK(p.user_message.find("digraph { {error} }") != std::string::npos);
  CHECK(p.user_message.find("E!") != std::string::npos);
  CHECK(p.user_message.find("{dot}") == std::string::npos);
  CHECK(p.system_message == template_body(TemplateId::R5).system);
}

TEST_CASE("list slots are joined by a blank line") {
  auto p = render_prompt(TemplateId::R3rst1,
                         {{"example_1", std::vector<std::string>{"SOURCE-A", "DOT-A"}}, {"text", std::string("T")}});
  CHECK((p.system_message + p.user_message).find("SOURCE-A\n\nDOT-A") != std::string::npos);
}

TEST_CASE("slot errors") {
  CHECK_THROWS_AS(render_prompt(TemplateId::R5, {{"dot", std::string("x")}}), UnboundSlotError);
  try {
    render_prompt(TemplateId::R30, {});
    FAIL("expected UnboundSlotError");
  } catch (const UnboundSlotError& e) {
    CHECK(e.slot() == "text");
  }
  CHECK_THROWS_AS(render_prompt(TemplateId::R30, {{"text", std::string("t")}, {"bogus", std::string("b")}}),
                  UnknownSlotError);
  // R1's text slot may be left unbound.
  CHECK_NOTHROW(render_prompt(TemplateId::R1, {}));
}

TEST_CASE("structured output parsing") {
  auto t = parse_score_triple("Q1: 4 Q2: 5 Q3: 4");
  REQUIRE(t);
  CHECK(*t == core::ScoreTriple{4, 5, 4});
  CHECK(parse_score_triple("Scores:\nQ1: 1\nQ2: 2\nQ3: 3\n") == core::ScoreTriple{1, 2, 3});
  CHECK(!parse_score_triple("Q1: 4 Q2: 6 Q3: 4"));
  CHECK(!parse_score_triple("Q1: 4 Q3: 4"));
  CHECK(!parse_score_triple("no scores"));
  CHECK(parse_index_choice("3", 4) == 3);
  CHECK(parse_index_choice("Text 2 is the most similar.", 4) == 2);
  CHECK(!parse_index_choice("5", 4));
  CHECK(!parse_index_choice("none", 4));
}

#include <doctest.h>

#include "rstdiag/llm/config.hpp"
#include "rstdiag/llm/gateway.hpp"
#include "rstdiag/llm/mock_backend.hpp"
#include "test_support.hpp"

using namespace rstdiag;
using namespace rstdiag::llm;
using nlohmann::json;
using rstdiag::testing::TempDir;

namespace {

ChatRequest r30(const std::string& text) { return make_request(TemplateId::R30, {{"text", text}}, "m"); }

Gateway gateway_with(std::vector<MockStep> script, GatewayOptions opts = {}) {
  return Gateway(std::make_shared<MockBackend>(std::move(script)), opts);
}

}  // namespace

TEST_CASE("successful call is logged once") {
  auto g = gateway_with({reply_to(TemplateId::R30, "digraph {}")});
  auto req = r30("hello");
  req.purpose = "step4";
  CHECK(g.complete(req) == "digraph {}");
  auto log = g.call_log().entries();
  REQUIRE(log.size() == 1);
  CHECK(log[0].template_id == TemplateId::R30);
  CHECK(log[0].purpose == "step4");
  CHECK(log[0].model_id == "m");
  CHECK(log[0].user_message.find("hello") != std::string::npos);
  CHECK(log[0].response == "digraph {}");
  CHECK(log[0].error_kind.empty());
  CHECK(log[0].seq == 1);
  CHECK(!log[0].is_retry);
}

TEST_CASE("transport errors are retried up to the limit") {
  GatewayOptions opts;
  opts.max_retries = 2;
  auto g = gateway_with({transport_failure(), transport_failure(), reply_to(TemplateId::R30, "ok")}, opts);
  CHECK(g.complete(r30("x")) == "ok");
  auto log = g.call_log().entries();
  REQUIRE(log.size() == 3);
  CHECK(log[0].error_kind == "transport");
  CHECK(log[1].is_retry);
  CHECK(log[2].attempt == 2);
  CHECK(log[0].call_id == log[2].call_id);

  auto g2 = gateway_with({transport_failure(), transport_failure(), transport_failure()}, opts);
  CHECK_THROWS_AS(g2.complete(r30("x")), TransportError);
  CHECK(g2.call_log().size() == 3);
}

TEST_CASE("refusals are not retried") {
  MockStep refusal;
  refusal.outcome = MockStep::Outcome::refusal;
  refusal.response = "cannot help";
  auto g = gateway_with({refusal, reply_to(TemplateId::R30, "never")});
  CHECK_THROWS_AS(g.complete(r30("x")), RefusalError);
  auto log = g.call_log().entries();
  REQUIRE(log.size() == 1);
  CHECK(log[0].error_kind == "refusal");
}

TEST_CASE("structured score triples re-ask on malformed output") {
  auto ra = make_request(TemplateId::Ra, {}, "judge");
  auto g = gateway_with({reply_to(TemplateId::Ra, "looks nice"), reply_to(TemplateId::Ra, "Q1: 4 Q2: 5 Q3: 4")});
  CHECK(g.complete_score_triple(ra) == core::ScoreTriple{4, 5, 4});
  auto log = g.call_log().entries();
  REQUIRE(log.size() == 2);
  CHECK(log[0].error_kind == "structured");
  CHECK(log[0].structured_attempt == 1);
  CHECK(log[1].structured_attempt == 2);

  GatewayOptions opts;
  opts.structured_attempts = 2;
  auto g2 = gateway_with({reply_to(TemplateId::Ra, "?"), reply_to(TemplateId::Ra, "Q1: 9 Q2: 1 Q3: 1")}, opts);
  CHECK_THROWS_AS(g2.complete_score_triple(ra), StructuredOutputError);
}

TEST_CASE("index choice is range checked") {
  auto req = make_request(TemplateId::R2, {{"example_analyses", std::vector<std::string>{"a", "b"}},
                                            {"analyzed_text", std::string("c")}},
                          "m");
  auto g = gateway_with({reply_to(TemplateId::R2, "7"), reply_to(TemplateId::R2, "Text 2")});
  CHECK(g.complete_index(req, 4) == 2);
}

TEST_CASE("mock backend enforces script order") {
  auto backend = std::make_shared<MockBackend>(std::vector<MockStep>{reply_to(TemplateId::R1, "analysis")});
  Gateway g(backend);
  CHECK_THROWS_AS(g.complete(r30("x")), MockScriptError);
  CHECK(backend->remaining() == 1);
  auto g2 = gateway_with({});
  CHECK_THROWS_AS(g2.complete(r30("x")), MockScriptError);
}

TEST_CASE("mock script JSON") {
  auto steps = MockBackend::parse_script(json::parse(R"([
    {"match": {"template": "R1"}, "response": "a"},
    {"match": {"contains": "needle"}, "response": "b"},
    {"match": {}, "error": "transport", "response": "boom"},
    {"response": "c"}
  ])"));
  REQUIRE(steps.size() == 4);
  CHECK(steps[0].template_id == TemplateId::R1);
  CHECK(steps[1].contains == "needle");
  CHECK(steps[2].outcome == MockStep::Outcome::transport_error);
  CHECK(!steps[3].template_id);
  CHECK_THROWS(MockBackend::parse_script(json::parse(R"([{"match": {"template": "R9"}, "response": ""}])")));

  MockBackend m(steps);
  ChatRequest hay = r30("a needle here");
  CHECK_THROWS_AS(m.complete(hay), MockScriptError);  // first step wants R1
}

TEST_CASE("call log is written as JSON lines") {
  TempDir dir;
  auto log = std::make_shared<CallLog>(dir / "calls.jsonl");
  Gateway g(std::make_shared<MockBackend>(std::vector<MockStep>{reply_to(TemplateId::R30, "x"),
                                                                reply_to(TemplateId::R30, "y")}),
            {}, log);
  g.complete(r30("1"));
  g.complete(r30("2"));
  std::ifstream in(dir / "calls.jsonl");
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    auto j = json::parse(line);
    CHECK(j["seq"] == n + 1);
    CHECK(j["template_id"] == "R30");
    ++n;
  }
  CHECK(n == 2);
}

TEST_CASE("config precedence: file, then environment") {
  TempDir dir;
  rstdiag::testing::write_file(dir / "script.json", "[]");
  rstdiag::testing::write_file(dir / "cfg.json",
                               R"({"backend": {"kind": "mock", "mock_script": "script.json"},
                                   "model": "file-model", "repair_model": "file-repair", "jobs": 3})");
  auto c = load_config(dir / "cfg.json");
  CHECK(c.model == "file-model");
  CHECK(c.jobs == 3);
  CHECK(c.backend.mock_script == dir / "script.json");

  std::map<std::string, std::string> env = {{"RSTDIAG_MODEL", "env-model"}, {"RSTDIAG_DOT", "/opt/dot"}};
  apply_env(c, [&](const std::string& k) -> std::optional<std::string> {
    auto it = env.find(k);
    if (it == env.end()) return std::nullopt;
    return it->second;
  });
  CHECK(c.model == "env-model");
  CHECK(c.repair_model == "file-repair");
  CHECK(c.dot_path == "/opt/dot");

  json echoed = c;
  CHECK(echoed["model"] == "env-model");
  CHECK(echoed["backend"]["kind"] == "mock");
}

TEST_CASE("config rejects unknown keys and bad backends") {
  Config c;
  CHECK_THROWS_AS(merge_config(c, json::parse(R"({"modle": "x"})")), ConfigError);
  CHECK_THROWS_AS(merge_config(c, json::parse(R"({"backend": {"kind": "mock", "extra": 1}})")), ConfigError);
  CHECK_THROWS_AS(merge_config(c, json::parse(R"({"jobs": "many"})")), ConfigError);
  Config bad;
  bad.backend.kind = "carrier-pigeon";
  CHECK_THROWS_AS(make_backend(bad), ConfigError);
  Config http;
  http.backend.kind = "http";
  CHECK_THROWS_AS(make_backend(http), ConfigError);
  Config mock;
  CHECK_THROWS_AS(make_backend(mock), ConfigError);  // no script
}

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>

#include "rstdiag/rubric/rubric.hpp"
#include "rstdiag/store/experiment_store.hpp"
#include "test_support.hpp"

using nlohmann::json;
using rstdiag::testing::TempDir;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Result run_cli(const std::vector<std::string>& args, const TempDir& scratch) {
  std::string cmd = "env -u RSTDIAG_MOCK_SCRIPT -u RSTDIAG_BACKEND " + quote(RSTDIAG_CLI);
  for (const auto& a : args) cmd += " " + quote(a);
  const auto out = scratch / "stdout.txt";
  const auto err = scratch / "stderr.txt";
  cmd += " > " + quote(out.string()) + " 2> " + quote(err.string());
  Result r;
  int status = std::system(cmd.c_str());
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = rstdiag::testing::read_file(out);
  r.err = rstdiag::testing::read_file(err);
  return r;
}

json reply(const std::string& tmpl, const std::string& response) {
  return {{"match", {{"template", tmpl}}}, {"response", response}};
}

std::string fenced(const std::string& code) { return "```dot\n" + code + "\n```\n"; }

void two_texts(const TempDir& dir) {
  rstdiag::testing::write_file(dir / "texts" / "a.txt", "Because it rained, the match was postponed.");
  rstdiag::testing::write_file(dir / "texts" / "b.txt", "Although tired, she finished the race.");
}

}  // namespace

TEST_CASE("generate writes one run per text") {
  TempDir dir;
  two_texts(dir);
  json script = json::array();
  for (const auto* code : {"digraph { a -> b }", "digraph { c -> d }"}) {
    script.push_back(reply("R30", fenced(code)));
    script.push_back(reply("R4", fenced(code) + "No changes."));
  }
  rstdiag::testing::write_file(dir / "script.json", script.dump());
  auto r = run_cli({"generate", "--method", "zero-shot", "--texts", (dir / "texts").string(), "--out",
                    (dir / "runs").string(), "--backend", "mock", "--mock-script", (dir / "script.json").string(),
                    "--jobs", "1", "--dot", rstdiag::testing::dot_executable().string()},
                   dir);
  CAPTURE(r.err);
  CHECK(r.code == 0);
  rstdiag::store::ExperimentStore store(dir / "runs");
  auto ids = store.list_runs();
  REQUIRE(ids.size() == 2);
  for (const auto& id : ids) {
    CHECK(r.out.find(id) != std::string::npos);
    auto run = store.load_run(id);
    CHECK(run.status == rstdiag::core::RunStatus::ok);
    CHECK(fs::exists(store.run_dir(id) / "final.png"));
  }
  CHECK(!fs::exists(dir / "runs" / "report.json"));
  auto calls = rstdiag::testing::read_file(dir / "runs" / "calls.jsonl");
  CHECK(std::count(calls.begin(), calls.end(), '\n') == 4);
}

TEST_CASE("a failed run gives exit code 3 and a report") {
  TempDir dir;
  two_texts(dir);
  json script = json::array({reply("R30", fenced("digraph { a -> b }")), reply("R4", fenced("digraph { a -> b }") + "Fine."),
                             {{"match", {{"template", "R30"}}}, {"error", "refusal"}}});
  rstdiag::testing::write_file(dir / "script.json", script.dump());
  auto r = run_cli({"generate", "--method", "zero-shot", "--texts", (dir / "texts").string(), "--out",
                    (dir / "runs").string(), "--backend", "mock", "--mock-script", (dir / "script.json").string(),
                    "--jobs", "1", "--dot", rstdiag::testing::dot_executable().string()},
                   dir);
  CAPTURE(r.err);
  CHECK(r.code == 3);
  auto report = rstdiag::testing::read_json(dir / "runs" / "report.json");
  CHECK(report["total"] == 2);
  REQUIRE(report["failed"].size() == 1);
  CHECK(report["failed"][0]["source_id"] == "b");
  CHECK(report["failed"][0]["failed_step"] == "step4");
}

TEST_CASE("a missing renderer is an environment error") {
  TempDir dir;
  two_texts(dir);
  rstdiag::testing::write_file(dir / "script.json", "[]");
  auto r = run_cli({"generate", "--method", "zero-shot", "--texts", (dir / "texts").string(), "--out",
                    (dir / "runs").string(), "--backend", "mock", "--mock-script", (dir / "script.json").string(),
                    "--dot", (dir / "no-such-dot").string()},
                   dir);
  CHECK(r.code == 2);
  CHECK(r.err.find("graphviz") != std::string::npos);
}

TEST_CASE("usage errors exit with 1") {
  TempDir dir;
  CHECK(run_cli({"generate", "--method", "rst9", "--texts", "x", "--out", "y"}, dir).code == 1);
  CHECK(run_cli({"no-such-command"}, dir).code == 1);
  auto r = run_cli({"autoeval", "--mode", "e1", "--dataset", (rstdiag::testing::fixtures_dir() / "synthetic_150.json").string(),
                    "--backend", "mock", "--mock-script", (dir / "none.json").string()},
                   dir);
  CHECK(r.code == 1);
  CHECK(r.err.find("example") != std::string::npos);
}

TEST_CASE("stats reproduces the summary tables") {
  TempDir dir;
  auto r = run_cli({"stats", "--dataset", (rstdiag::testing::fixtures_dir() / "synthetic_150.json").string(), "--no-irr"},
                   dir);
  CAPTURE(r.err);
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out) == rstdiag::testing::read_json(rstdiag::testing::fixtures_dir() / "synthetic_150_summary.json"));

  auto w = run_cli({"stats", "--dataset", (rstdiag::testing::fixtures_dir() / "synthetic_150.json").string(),
                    "--bootstrap-samples", "100", "--out", (dir / "summary").string()},
                   dir);
  REQUIRE(w.code == 0);
  auto j = rstdiag::testing::read_json(dir / "summary" / "summary.json");
  CHECK(j["overall_irr"].size() == 3);
  CHECK(fs::exists(dir / "summary" / "scores.csv"));
}

TEST_CASE("rubric vectors") {
  TempDir dir;
  auto r = run_cli({"rubric-vectors"}, dir);
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out) == rstdiag::rubric::export_test_vectors());
  CHECK(run_cli({"rubric-vectors", "--out", (dir / "v.json").string()}, dir).code == 0);
  CHECK(rstdiag::testing::read_json(dir / "v.json") == rstdiag::rubric::export_test_vectors());
}

#include <doctest.h>

#include <chrono>
#include <sys/stat.h>

#include "rstdiag/render/dot_parser.hpp"
#include "rstdiag/render/lint.hpp"
#include "rstdiag/render/render_engine.hpp"
#include "test_support.hpp"

using namespace rstdiag;
using namespace rstdiag::render;
using rstdiag::testing::TempDir;

namespace {

RenderEngine real_engine() {
  RenderConfig c;
  c.dot_executable = rstdiag::testing::dot_executable();
  return RenderEngine(c);
}

std::filesystem::path fake_dot(const TempDir& dir, const std::string& body) {
  auto p = dir / "fake-dot";
  rstdiag::testing::write_file(p, "#!/bin/sh\nif [ \"$1\" = \"-V\" ]; then echo 'dot - graphviz version 0.0 (fake)' >&2; exit 0; fi\n" + body);
  ::chmod(p.c_str(), 0755);
  return p;
}

bool has(const std::vector<LintIssue>& issues, LintKind k, const std::string& subject) {
  for (const auto& i : issues)
    if (i.kind == k && i.subject == subject) return true;
  return false;
}

}  // namespace

TEST_CASE("parser: nodes, edges, attributes and scopes") {
  auto g = parse_dot(R"(strict digraph G {
    // comment
    # preprocessor-style line
    rankdir = LR; label = "A " + "title";
    node [shape=box];
    edge [color=red];
    a [label="A \"quoted\""];
    a -> b -> c [style=dashed];
    subgraph cluster_x { d; e }
    c -> { d e };
    f:port1 -> g;
    h [label=<<b>html</b>>];
  })");
  CHECK(g.strict);
  CHECK(g.directed);
  CHECK(g.id == "G");
  CHECK(g.graph_attr("rankdir") == "LR");
  CHECK(g.graph_attr("label") == "A title");
  CHECK(g.declared_nodes == std::vector<std::string>{"a", "d", "e", "h"});
  CHECK(g.nodes == std::vector<std::string>{"a", "b", "c", "d", "e", "f", "g", "h"});
  REQUIRE(g.edges.size() == 5);
  CHECK(g.edges[0].from == "a");
  CHECK(g.edges[0].to == "b");
  CHECK(g.edges[0].attrs.at("color") == "red");
  CHECK(g.edges[1].attrs.at("style") == "dashed");
  CHECK(g.edges[2].to == "d");
  CHECK(g.edges[3].to == "e");
  CHECK(g.edges[4].from == "f");
}

TEST_CASE("parser errors carry a line number") {
  try {
    parse_dot("digraph {\n a -> ;\n}");
    FAIL("expected DotParseError");
  } catch (const DotParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_dot("graph { a -> b }"), DotParseError);
  CHECK_THROWS_AS(parse_dot("digraph { a -- b }"), DotParseError);
  CHECK_THROWS_AS(parse_dot("digraph { a -> b "), DotParseError);
  CHECK_THROWS_AS(parse_dot("digraph { label=\"open }"), DotParseError);
  CHECK_NOTHROW(parse_dot("graph { a -- b }"));
}

TEST_CASE("disclaimer check reads the root label only") {
  CHECK(check_disclaimer(R"(digraph { label="Summary. Generated with an AI model."; a })"));
  CHECK(check_disclaimer(R"(digraph { graph [label="made by an ai MODEL"] })"));
  CHECK(!check_disclaimer(R"(digraph { label="Summary"; a [label="generated with an AI"] })"));
  CHECK(!check_disclaimer(R"(digraph { subgraph cluster_a { label="AI model" } })"));
  CHECK(!check_disclaimer("digraph {"));
  CHECK(check_disclaimer(R"(digraph { label="Beta release" })", {"beta"}));
}

TEST_CASE("static lint") {
  auto issues = static_lint(R"(digraph {
    a; b; lonely;
    a -> b; a -> b;
    c -> d [style=invis];
  })");
  REQUIRE(!issues.empty());
  CHECK(issues[0].kind == LintKind::node_count);
  CHECK(issues[0].subject == "5");
  CHECK(has(issues, LintKind::unused_node, "lonely"));
  CHECK(has(issues, LintKind::orphan_node, "lonely"));
  CHECK(has(issues, LintKind::orphan_node, "c"));
  CHECK(has(issues, LintKind::duplicate_edge, "a -> b"));
  CHECK(!has(issues, LintKind::orphan_node, "a"));

  auto undirected = static_lint("graph { a -- b; b -- a }");
  CHECK(has(undirected, LintKind::duplicate_edge, "a -- b"));

  auto broken = static_lint("digraph { a -> }");
  REQUIRE(broken.size() == 1);
  CHECK(broken[0].kind == LintKind::unparseable);
}

TEST_CASE("renders PNG and SVG with the pinned Graphviz") {
  auto engine = real_engine();
  CHECK(engine.version().find("graphviz version") != std::string::npos);
  auto png = engine.render("digraph { a -> b }", core::ImageFormat::png);
  REQUIRE(png.ok());
  CHECK(png.image().bytes.substr(0, 8) == std::string("\x89PNG\r\n\x1a\n", 8));
  CHECK(png.renderer_version == engine.version());
  auto svg = engine.render("digraph { a -> b }", core::ImageFormat::svg);
  REQUIRE(svg.ok());
  CHECK(svg.image().bytes.find("<svg") != std::string::npos);
}

TEST_CASE("syntax errors come back verbatim") {
  auto engine = real_engine();
  auto out = engine.render("digraph { a -> }");
  REQUIRE(!out.ok());
  CHECK(out.error().exit_status != 0);
  CHECK(out.error().message.find("syntax error in line 1") != std::string::npos);
}

TEST_CASE("bundled example diagrams render") {
  auto engine = real_engine();
  for (int i = 1; i <= 4; ++i) {
    auto code = rstdiag::testing::read_file(rstdiag::testing::data_dir() / "example_dictionary" /
                                            ("d" + std::to_string(i) + ".dot"));
    CAPTURE(i);
    CHECK(engine.render(code).ok());
  }
}

TEST_CASE("a hung renderer is killed at the timeout") {
  TempDir dir;
  RenderConfig c;
  c.dot_executable = fake_dot(dir, "sleep 30\n");
  c.timeout = std::chrono::milliseconds(300);
  RenderEngine engine(c);
  auto t0 = std::chrono::steady_clock::now();
  auto out = engine.render("digraph {}");
  auto elapsed = std::chrono::steady_clock::now() - t0;
  REQUIRE(!out.ok());
  CHECK(out.error().exit_status == kTimeoutExitStatus);
  CHECK(elapsed < std::chrono::seconds(5));
}

TEST_CASE("environmental failures are not render errors") {
  TempDir dir;
  RenderConfig missing;
  missing.dot_executable = dir / "no-such-dot";
  CHECK_THROWS_AS(RenderEngine{missing}, RendererMissingError);

  RenderConfig silent;
  silent.dot_executable = fake_dot(dir, "exit 3\n");
  RenderEngine engine(silent);
  CHECK_THROWS_AS(engine.render("digraph {}"), RendererMissingError);
}

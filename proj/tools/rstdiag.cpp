// rstdiag: batch generation, automated scoring, statistics and the rater
// service behind one command line.
//
// Exit codes: 0 success, 1 usage, 2 environment (renderer, backend, files),
// 3 partial failure (details in the report file named on stderr).

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "rstdiag/autoeval/auto_evaluator.hpp"
#include "rstdiag/core/encoding.hpp"
#include "rstdiag/core/json.hpp"
#include "rstdiag/llm/config.hpp"
#include "rstdiag/pipeline/pipeline.hpp"
#include "rstdiag/render/render_engine.hpp"
#include "rstdiag/rubric/rubric.hpp"
#include "rstdiag/service/http_server.hpp"
#include "rstdiag/service/rater_service.hpp"
#include "rstdiag/stats/summary.hpp"
#include "rstdiag/store/dataset_io.hpp"
#include "rstdiag/store/experiment_store.hpp"

#ifndef RSTDIAG_DOT_EXECUTABLE
#define RSTDIAG_DOT_EXECUTABLE "dot"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rstdiag;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitEnvironment = 2;
constexpr int kExitPartial = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EnvironmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags shared by the commands that talk to a model.
struct BackendFlags {
  std::string config_path;
  std::string backend;
  std::string endpoint;
  std::string api_key_env;
  std::string mock_script;
  std::string model;
  std::string dot;
  int jobs = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--backend", backend, "mock or http")->check(CLI::IsMember({"mock", "http"}));
    cmd->add_option("--endpoint", endpoint, "chat completions URL for the http backend");
    cmd->add_option("--api-key-env", api_key_env, "name of the env var holding the API key");
    cmd->add_option("--mock-script", mock_script, "scripted replies for the mock backend");
    cmd->add_option("--model", model, "model id");
    cmd->add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);
  }

  llm::Config resolve() const {
    llm::Config c;
    try {
      if (!config_path.empty()) c = llm::load_config(config_path);
      llm::apply_env(c, llm::process_env());
    } catch (const llm::ConfigError& e) {
      throw UsageError(e.what());
    } catch (const std::exception& e) {
      throw EnvironmentError(e.what());
    }
    if (!backend.empty()) c.backend.kind = backend;
    if (!endpoint.empty()) c.backend.endpoint = endpoint;
    if (!api_key_env.empty()) c.backend.api_key_env = api_key_env;
    if (!mock_script.empty()) c.backend.mock_script = mock_script;
    if (!model.empty()) c.model = model;
    if (!dot.empty()) c.dot_path = dot;
    if (jobs > 0) c.jobs = jobs;
    return c;
  }
};

std::shared_ptr<llm::ChatBackend> backend_for(const llm::Config& c) {
  try {
    return llm::make_backend(c);
  } catch (const llm::ConfigError& e) {
    throw UsageError(e.what());
  } catch (const std::exception& e) {
    throw EnvironmentError(std::string("backend: ") + e.what());
  }
}

void write_report(const fs::path& path, const json& report) {
  std::ofstream out(path);
  if (!out) throw EnvironmentError("cannot write " + path.string());
  out << report.dump(2) << "\n";
  std::cerr << "partial failure; report written to " << path.string() << "\n";
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw EnvironmentError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

// ---- generate -------------------------------------------------------------

struct GenerateArgs {
  BackendFlags flags;
  std::string method;
  std::string texts;
  std::string repair_model;
  std::string out;
  std::string data;
  std::string format = "png";
};

int cmd_generate(const GenerateArgs& a) {
  llm::Config cfg = a.flags.resolve();
  if (!a.repair_model.empty()) cfg.repair_model = a.repair_model;
  core::Method method = core::parse_method(a.method);

  std::vector<core::SourceText> sources;
  try {
    sources = store::load_source_texts(a.texts);
  } catch (const std::exception& e) {
    throw EnvironmentError("texts: " + std::string(e.what()));
  }
  if (sources.empty()) throw UsageError("no *.txt files in " + a.texts);

  render::RenderConfig rc;
  rc.dot_executable = cfg.dot_path.empty() ? fs::path(RSTDIAG_DOT_EXECUTABLE) : fs::path(cfg.dot_path);
  rc.timeout = std::chrono::seconds(cfg.render_timeout_s);
  std::unique_ptr<render::RenderEngine> renderer;
  try {
    renderer = std::make_unique<render::RenderEngine>(rc);
  } catch (const render::RendererMissingError& e) {
    throw EnvironmentError(std::string("graphviz: ") + e.what());
  }

  core::ExampleDictionary dictionary;
  if (method != core::Method::zero_shot) {
    fs::path dir = a.data.empty() ? store::default_data_dir() / "example_dictionary" : fs::path(a.data);
    try {
      dictionary = store::load_example_dictionary(dir, nullptr);
    } catch (const std::exception& e) {
      throw EnvironmentError("example dictionary: " + std::string(e.what()));
    }
  }

  fs::create_directories(a.out);
  store::ExperimentStore store(a.out);
  auto log = std::make_shared<llm::CallLog>(fs::path(a.out) / "calls.jsonl");
  llm::Gateway gateway(backend_for(cfg), llm::gateway_options(cfg), log);

  pipeline::PipelineConfig pc;
  pc.main_model = cfg.model;
  pc.repair_model = cfg.repair_model;
  pc.repair_max_iters = cfg.repair_max_iters;
  pc.image_format = core::parse_image_format(a.format);
  json settings = cfg;
  settings["method"] = core::to_string(method);
  settings["dot_path"] = rc.dot_executable.string();
  settings["renderer_version"] = renderer->version();
  settings["image_format"] = a.format;
  pc.settings = settings;

  std::vector<core::PipelineRun> runs(sources.size());
  std::atomic<std::size_t> next{0};
  std::mutex env_mu;
  std::string env_failure;
  auto worker = [&] {
    pipeline::Pipeline p(gateway, *renderer, dictionary, pc, &store);
    for (std::size_t i = next++; i < sources.size(); i = next++) {
      try {
        runs[i] = p.run(method, sources[i]);
      } catch (const render::RendererMissingError& e) {
        std::lock_guard lock(env_mu);
        env_failure = e.what();
        next = sources.size();
      }
    }
  };
  int n = std::max(1, std::min<int>(cfg.jobs, int(sources.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (!env_failure.empty()) throw EnvironmentError("graphviz: " + env_failure);

  json failed = json::array();
  for (const auto& r : runs) {
    std::cout << r.run_id << "\n";
    if (r.status == core::RunStatus::failed)
      failed.push_back({{"run_id", r.run_id}, {"source_id", r.source_id}, {"failed_step", r.failed_step},
                        {"error", r.error}});
  }
  if (!failed.empty()) {
    write_report(fs::path(a.out) / "report.json",
                 {{"command", "generate"}, {"total", runs.size()}, {"failed", failed}, {"settings", settings}});
    return kExitPartial;
  }
  return kExitOk;
}

// ---- autoeval -------------------------------------------------------------

struct AutoevalArgs {
  BackendFlags flags;
  std::string mode;
  std::string dataset;
  std::string examples;
  std::string images;
  std::string out;
  int repeats = 2;
};

int cmd_autoeval(const AutoevalArgs& a) {
  autoeval::AutoEvalConfig ac;
  ac.mode = autoeval::parse_mode(a.mode);
  ac.repeats = a.repeats;
  if (!a.examples.empty()) {
    try {
      ac.examples = autoeval::load_icl_examples(a.examples);
    } catch (const std::exception& e) {
      throw EnvironmentError("examples: " + std::string(e.what()));
    }
  }
  llm::Config cfg = a.flags.resolve();
  ac.model_id = cfg.model;
  ac.concurrency = cfg.jobs;
  try {
    ac.validate();
  } catch (const autoeval::AutoEvalConfigError& e) {
    throw UsageError(e.what());
  }

  core::EvaluationDataset ds;
  try {
    ds = store::load_dataset(a.dataset);
  } catch (const std::exception& e) {
    throw EnvironmentError("dataset: " + std::string(e.what()));
  }
  fs::path image_base = a.images.empty() ? fs::path(a.dataset).parent_path() : fs::path(a.images);

  fs::path log_path = a.out.empty() ? fs::path() : fs::path(a.out).replace_extension(".calls.jsonl");
  auto log = log_path.empty() ? std::make_shared<llm::CallLog>() : std::make_shared<llm::CallLog>(log_path);
  llm::Gateway gateway(backend_for(cfg), llm::gateway_options(cfg), log);
  auto result = autoeval::evaluate_dataset(gateway, ac, ds, autoeval::file_image_loader(image_base));
  json settings = cfg;
  settings["mode"] = autoeval::to_string(ac.mode);
  settings["repeats"] = ac.repeats;
  settings["examples"] = a.examples;
  result.metadata["settings"] = settings;

  if (a.out.empty()) {
    autoeval::write_csv(result, std::cout);
  } else {
    std::ofstream out(a.out);
    if (!out) throw EnvironmentError("cannot write " + a.out);
    autoeval::write_csv(result, out);
    write_json_file(fs::path(a.out).replace_extension(".meta.json"),
                    {{"metadata", result.metadata}, {"excluded", result.excluded}});
  }
  for (const auto& id : result.excluded) std::cerr << "excluded (shares example source): " << id << "\n";

  auto failures = result.failures();
  if (!failures.empty()) {
    json failed = json::array();
    for (const auto* f : failures) failed.push_back({{"diagram_id", f->diagram_id}, {"error", f->error}});
    fs::path report = a.out.empty() ? fs::path("autoeval-report.json") : fs::path(a.out).replace_extension(".report.json");
    write_report(report, {{"command", "autoeval"}, {"total", result.items.size()}, {"failed", failed}});
    return kExitPartial;
  }
  return kExitOk;
}

// ---- stats ----------------------------------------------------------------

struct StatsArgs {
  std::string dataset;
  std::string out;
  int bootstrap = 1000;
  std::uint64_t seed = stats::AlphaOptions{}.seed;
  bool no_irr = false;
};

int cmd_stats(const StatsArgs& a) {
  core::EvaluationDataset ds;
  try {
    ds = store::load_dataset(a.dataset);
  } catch (const std::exception& e) {
    throw EnvironmentError("dataset: " + std::string(e.what()));
  }
  stats::SummaryOptions opt;
  opt.alpha.bootstrap_samples = a.bootstrap;
  opt.alpha.seed = a.seed;
  opt.compute_irr = !a.no_irr;
  stats::SummaryTables tables;
  try {
    tables = stats::summarize_dataset(ds, opt);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("dataset is not valid: ") + e.what());
  }
  json j = stats::to_json(tables);
  if (a.out.empty()) {
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }
  fs::create_directories(a.out);
  write_json_file(fs::path(a.out) / "summary.json", j);
  stats::write_summary_csvs(tables, a.out);
  return kExitOk;
}

// ---- serve ----------------------------------------------------------------

struct ServeArgs {
  std::string dataset;
  std::string config;
  std::string host = "127.0.0.1";
  std::string images;
  int port = 8080;
  bool persist = true;
};

std::atomic<service::HttpServer*> g_server{nullptr};

void on_signal(int) {
  if (auto* s = g_server.load()) s->stop();
}

int cmd_serve(const ServeArgs& a) {
  core::EvaluationDataset ds;
  service::RaterServiceConfig sc;
  try {
    ds = store::load_dataset(a.dataset);
    std::ifstream in(a.config);
    if (!in) throw std::runtime_error("cannot read " + a.config);
    sc = service::RaterServiceConfig::from_json(json::parse(in));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const std::exception& e) {
    throw EnvironmentError(e.what());
  }
  sc.image_base = a.images.empty() ? fs::path(a.dataset).parent_path() : fs::path(a.images);
  if (a.persist) sc.persist_path = fs::path(a.dataset);

  std::unique_ptr<service::RaterService> svc;
  try {
    svc = std::make_unique<service::RaterService>(std::move(ds), std::move(sc));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (auto leaks = svc->blinding_leaks(); !leaks.empty())
    std::cerr << "warning: blinding is on but " << leaks.size() << " diagram id(s) name their model or method, e.g. "
              << leaks.front() << "\n";
  service::HttpServer server(*svc);
  int port = server.bind(a.host, a.port);
  if (port < 0) throw EnvironmentError("cannot bind " + a.host + ":" + std::to_string(a.port));
  std::cerr << "listening on http://" << a.host << ":" << port << "\n";
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.listen();
  g_server = nullptr;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RST-guided diagram generation and evaluation workbench"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "generate diagrams for every text in a directory");
  g->add_option("--method", gen.method, "rst1, rst2 or zero-shot")
      ->required()
      ->check(CLI::IsMember({"rst1", "rst2", "zero-shot", "zero_shot", "0-shot"}));
  g->add_option("--texts", gen.texts, "directory of *.txt sources")->required();
  g->add_option("--out", gen.out, "output directory")->required();
  g->add_option("--repair-model", gen.repair_model, "model id for dot repairs");
  g->add_option("--data", gen.data, "example dictionary directory");
  g->add_option("--dot", gen.flags.dot, "Graphviz dot executable");
  g->add_option("--format", gen.format, "image format")->check(CLI::IsMember({"png", "svg"}));
  gen.flags.add_to(g);

  AutoevalArgs ae;
  auto* e = app.add_subcommand("autoeval", "score diagrams with a model judge");
  e->add_option("--mode", ae.mode, "e1, e2 or e3")
      ->required()
      ->check(CLI::IsMember({"e1", "e2", "e3"}, CLI::ignore_case));
  e->add_option("--dataset", ae.dataset, "evaluation dataset JSON")->required();
  e->add_option("--examples", ae.examples, "scored example set directory (e1, e2)");
  e->add_option("--images", ae.images, "base directory for image paths");
  e->add_option("--repeats", ae.repeats, "runs per diagram")->check(CLI::PositiveNumber);
  e->add_option("--out", ae.out, "CSV output (default stdout)");
  ae.flags.add_to(e);

  StatsArgs st;
  auto* s = app.add_subcommand("stats", "summary tables for an evaluation dataset");
  s->add_option("--dataset", st.dataset, "evaluation dataset JSON")->required();
  s->add_option("--out", st.out, "directory for summary.json and CSVs (default: JSON on stdout)");
  s->add_option("--bootstrap-samples", st.bootstrap, "bootstrap resamples for the alpha CI")
      ->check(CLI::PositiveNumber);
  s->add_option("--seed", st.seed, "bootstrap seed");
  s->add_flag("--no-irr", st.no_irr, "skip inter-rater reliability");

  ServeArgs sv;
  auto* r = app.add_subcommand("serve", "run the rater service");
  r->add_option("--dataset", sv.dataset, "evaluation dataset JSON")->required();
  r->add_option("--config", sv.config, "service config (tokens, rater pool)")->required();
  r->add_option("--port", sv.port, "TCP port, 0 for any")->check(CLI::Range(0, 65535));
  r->add_option("--host", sv.host, "bind address");
  r->add_option("--images", sv.images, "base directory for image paths");
  r->add_flag("!--no-persist", sv.persist, "keep submissions in memory only");

  std::string vectors_out;
  auto* v = app.add_subcommand("rubric-vectors", "print the shared rubric test vectors");
  v->add_option("--out", vectors_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    int rc = app.exit(err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*e) return cmd_autoeval(ae);
    if (*s) return cmd_stats(st);
    if (*r) return cmd_serve(sv);
    if (*v) {
      json vec = rubric::export_test_vectors();
      if (vectors_out.empty()) std::cout << vec.dump() << "\n";
      else write_json_file(vectors_out, vec);
      return kExitOk;
    }
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const EnvironmentError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitEnvironment;
  } catch (const core::ParseError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitEnvironment;
  }
  return kExitUsage;
}

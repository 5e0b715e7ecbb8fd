#include "rstdiag/autoeval/auto_evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <sstream>
#include <thread>

#include "rstdiag/core/csv.hpp"
#include "rstdiag/llm/prompts.hpp"

namespace rstdiag::autoeval {

namespace fs = std::filesystem;

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::E1: return "E1";
    case Mode::E2: return "E2";
    case Mode::E3: return "E3";
  }
  return "?";
}

Mode parse_mode(std::string_view s) {
  std::string u(s);
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return std::toupper(c); });
  if (u == "E1") return Mode::E1;
  if (u == "E2") return Mode::E2;
  if (u == "E3") return Mode::E3;
  throw AutoEvalConfigError("unknown evaluation mode '" + std::string(s) + "'");
}

void AutoEvalConfig::validate() const {
  const bool with_examples = mode != Mode::E3;
  if (with_examples && (!examples || examples->empty()))
    throw AutoEvalConfigError(std::string(to_string(mode)) + " requires an ICL example set");
  if (!with_examples && examples) throw AutoEvalConfigError("E3 does not take an ICL example set");
  if (repeats < 1) throw AutoEvalConfigError("repeats must be >= 1");
  if (concurrency < 1) throw AutoEvalConfigError("concurrency must be >= 1");
  if (model_id.empty()) throw AutoEvalConfigError("model id is required");
}

int aggregate_half_up(const std::vector<int>& scores) {
  if (scores.empty()) throw std::invalid_argument("nothing to aggregate");
  long long sum = 0;
  for (int s : scores) sum += s;
  const long long n = static_cast<long long>(scores.size());
  return static_cast<int>((2 * sum + n) / (2 * n));
}

core::ScoreTriple aggregate_half_up(const std::vector<core::ScoreTriple>& runs) {
  std::vector<int> c1, c2, c3;
  for (const auto& r : runs) {
    c1.push_back(r.c1);
    c2.push_back(r.c2);
    c3.push_back(r.c3);
  }
  return {aggregate_half_up(c1), aggregate_half_up(c2), aggregate_half_up(c3)};
}

namespace {

std::string format_scores(const core::ScoreTriple& s) {
  return "Q1: " + std::to_string(s.c1) + " Q2: " + std::to_string(s.c2) + " Q3: " + std::to_string(s.c3);
}

std::string examples_block(const IclExampleSet& set) {
  std::string out;
  for (std::size_t i = 0; i < set.examples.size(); ++i) {
    const auto& ex = set.examples[i];
    if (!out.empty()) out += "\n\n";
    out += "Example " + std::to_string(i + 1) + (ex.image.empty() ? "" : " (image " + std::to_string(i + 1) + ")") + ":\n";
    if (!ex.source_text.empty()) out += "Text: " + ex.source_text + "\n";
    out += "Scores: " + format_scores(ex.scores);
  }
  return out;
}

}  // namespace

llm::ChatRequest build_request(const AutoEvalConfig& config, const std::string& image, const std::string& source_text,
                               const std::string& image_mime) {
  config.validate();
  llm::ChatRequest req;
  if (config.mode == Mode::E1) {
    req.model_id = config.model_id;
    req.system_message = examples_block(*config.examples);
    req.purpose = "autoeval-E1";
  } else {
    req = llm::make_request(llm::TemplateId::Ra, {}, config.model_id);
    if (config.mode == Mode::E2) req.system_message += "\n\n" + examples_block(*config.examples);
    req.purpose = std::string("autoeval-") + std::string(to_string(config.mode));
  }
  req.user_message = "Text: " + source_text;
  if (config.examples) {
    for (const auto& ex : config.examples->examples)
      if (!ex.image.empty()) req.attachments.push_back({ex.image, ex.image_mime});
  }
  req.attachments.push_back({image, image_mime});
  return req;
}

core::ScoreTriple evaluate_diagram(llm::Gateway& gateway, const AutoEvalConfig& config, const std::string& image,
                                   const std::string& source_text) {
  if (image.empty()) throw std::invalid_argument("diagram image is empty");
  return gateway.complete_score_triple(build_request(config, image, source_text));
}

std::vector<const AutoEvalItem*> AutoEvalResult::failures() const {
  std::vector<const AutoEvalItem*> out;
  for (const auto& i : items)
    if (!i.error.empty()) out.push_back(&i);
  return out;
}

ImageLoader file_image_loader(fs::path base) {
  return [base = std::move(base)](const core::EvaluationRecord& r) {
    if (r.image_path.empty()) throw std::runtime_error("record has no image path");
    const fs::path p = fs::path(r.image_path).is_absolute() ? fs::path(r.image_path) : base / r.image_path;
    std::ifstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read image " + p.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
}

bool shares_example_source(const core::EvaluationRecord& record, const IclExampleSet& examples) {
  for (const auto& s : examples.held_out_sources)
    if (record.source_id == s.id || (!record.source_text.empty() && record.source_text == s.body)) return true;
  for (const auto& ex : examples.examples)
    if (ex.source_id && record.source_id == *ex.source_id) return true;
  return false;
}

AutoEvalResult evaluate_dataset(llm::Gateway& gateway, const AutoEvalConfig& config,
                                const core::EvaluationDataset& dataset, const ImageLoader& load_image) {
  config.validate();
  if (dataset.records.empty()) throw std::invalid_argument("dataset is empty");

  AutoEvalResult result;
  result.mode = config.mode;
  result.model_id = config.model_id;
  result.repeats = config.repeats;
  std::vector<const core::EvaluationRecord*> todo;
  for (const auto& r : dataset.records) {
    if (config.examples && shares_example_source(r, *config.examples))
      result.excluded.push_back(r.diagram_id);
    else
      todo.push_back(&r);
  }
  nlohmann::json order = nlohmann::json::array();
  if (config.examples)
    for (const auto& ex : config.examples->examples) order.push_back(ex.id);
  result.metadata = {{"mode", to_string(config.mode)},
                     {"model", config.model_id},
                     {"repeats", config.repeats},
                     {"aggregation", "rounded mean, halves round up"},
                     {"example_order", order},
                     {"evaluated", todo.size()},
                     {"excluded", result.excluded.size()},
                     {"backend", gateway.backend_name()}};

  result.items.resize(todo.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      const auto& rec = *todo[i];
      auto& item = result.items[i];
      item.diagram_id = rec.diagram_id;
      try {
        const std::string image = load_image(rec);
        for (int k = 0; k < config.repeats; ++k) item.runs.push_back(evaluate_diagram(gateway, config, image, rec.source_text));
        item.aggregated = aggregate_half_up(item.runs);
      } catch (const std::exception& e) {
        item.error = e.what();
      }
    }
  };
  const int threads = std::min<int>(config.concurrency, static_cast<int>(std::max<std::size_t>(todo.size(), 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return result;
}

void write_csv(const AutoEvalResult& result, std::ostream& out) {
  core::write_csv_row(out, {"diagram_id", "mode", "model", "run_index", "c1", "c2", "c3", "aggregated"});
  const std::string mode(to_string(result.mode));
  for (const auto& item : result.items) {
    for (std::size_t k = 0; k < item.runs.size(); ++k) {
      const auto& s = item.runs[k];
      core::write_csv_row(out, {item.diagram_id, mode, result.model_id, std::to_string(k + 1), std::to_string(s.c1),
                                std::to_string(s.c2), std::to_string(s.c3), "0"});
    }
    if (item.aggregated) {
      const auto& s = *item.aggregated;
      core::write_csv_row(out, {item.diagram_id, mode, result.model_id, "mean", std::to_string(s.c1),
                                std::to_string(s.c2), std::to_string(s.c3), "1"});
    }
  }
}

}  // namespace rstdiag::autoeval

#include "rstdiag/pipeline/pipeline.hpp"

#include <random>
#include <sstream>

#include "rstdiag/core/encoding.hpp"
#include "rstdiag/pipeline/extract.hpp"

namespace rstdiag::pipeline {

using core::Method;

PipelineError::PipelineError(std::string step, const std::string& message)
    : std::runtime_error(step + ": " + message), step_(std::move(step)) {}

RepairExhaustedError::RepairExhaustedError(std::string step, const std::string& message,
                                           std::vector<core::RepairStep> log)
    : PipelineError(std::move(step), message), log_(std::move(log)) {}

Pipeline::Pipeline(llm::Gateway& gateway, const render::RenderEngine& renderer,
                   const core::ExampleDictionary& dictionary, PipelineConfig config, store::ExperimentStore* store)
    : gateway_(gateway), renderer_(renderer), dictionary_(dictionary), config_(std::move(config)), store_(store) {
  if (config_.repair_max_iters < 1) throw std::invalid_argument("repair_max_iters must be >= 1");
}

namespace {

std::string mime_type(core::ImageFormat f) { return f == core::ImageFormat::png ? "image/png" : "image/svg+xml"; }

std::string sanitize(std::string_view s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') ? c : '_';
  if (out.empty()) out = "source";
  return out.substr(0, 64);
}

}  // namespace

std::string make_run_id(const core::SourceText& source, Method method, const std::string& input_hash) {
  std::string stamp = core::utc_now_iso();  // 2025-01-01T12:00:00.123Z
  std::string compact;
  for (char c : stamp)
    if (std::isdigit(static_cast<unsigned char>(c)) || c == 'T') compact += c;
  static thread_local std::mt19937 rng{std::random_device{}()};
  std::ostringstream salt;
  salt << std::hex << (rng() & 0xffff);
  return sanitize(source.id) + "-" + std::string(core::to_string(method)) + "-" + compact + "-" +
         input_hash.substr(0, 8) + salt.str();
}

core::RstAnalysis Pipeline::run_rst_analysis(const core::SourceText& source) {
  if (source.body.empty()) throw std::invalid_argument("source text '" + source.id + "' is empty");
  auto req = llm::make_request(llm::TemplateId::R1, {{"text", source.body}}, config_.main_model);
  req.purpose = "step1";
  core::RstAnalysis a;
  a.source_id = source.id;
  a.text = gateway_.complete(req);
  a.producer_model = config_.main_model;
  if (a.text.empty()) throw std::runtime_error("empty analysis");
  return a;
}

int Pipeline::select_similar_example(const core::RstAnalysis& analysis) {
  if (dictionary_.empty()) throw std::invalid_argument("example dictionary is empty");
  std::vector<std::string> items;
  for (const auto& e : dictionary_.entries())
    items.push_back("Text " + std::to_string(e.index) + ":\n" + e.analysis.text);
  auto req = llm::make_request(llm::TemplateId::R2, {{"example_analyses", items}, {"analyzed_text", analysis.text}},
                               config_.main_model);
  req.purpose = "step2";
  const int z = gateway_.complete_index(req, dictionary_.size());
  dictionary_.at(z);  // indices are 1..M by construction; fails loudly otherwise
  return z;
}

core::Demonstration Pipeline::construct_demonstration(Method method, int z) const {
  if (method == Method::zero_shot) throw std::invalid_argument("the zero-shot method uses no demonstration");
  const auto& e = dictionary_.at(z);
  core::Demonstration d;
  d.kind = method;
  d.context = method == Method::rst1 ? e.source.body : e.analysis.text;
  d.dot = e.diagram.code;
  return d;
}

core::DotSource Pipeline::generate_diagram(Method method, const core::SourceText& source,
                                           const std::optional<core::RstAnalysis>& analysis,
                                           const std::optional<core::Demonstration>& demonstration) {
  llm::ChatRequest req;
  switch (method) {
    case Method::rst1:
      if (!demonstration || demonstration->kind != Method::rst1)
        throw std::invalid_argument("rst1 generation needs an rst1 demonstration");
      req = llm::make_request(
          llm::TemplateId::R3rst1,
          {{"example_1", std::vector<std::string>{demonstration->context, demonstration->dot}}, {"text", source.body}},
          config_.main_model);
      break;
    case Method::rst2:
      if (!demonstration || demonstration->kind != Method::rst2)
        throw std::invalid_argument("rst2 generation needs an rst2 demonstration");
      if (!analysis) throw std::invalid_argument("rst2 generation needs an analysis");
      req = llm::make_request(llm::TemplateId::R3rst2,
                              {{"example_2", std::vector<std::string>{demonstration->context, demonstration->dot}},
                               {"analyzed_text", analysis->text}},
                              config_.main_model);
      break;
    case Method::zero_shot:
      req = llm::make_request(llm::TemplateId::R30, {{"text", source.body}}, config_.main_model);
      break;
  }
  req.purpose = "step4";
  return {extract_dot(gateway_.complete(req)).code, core::DotStage::initial};
}

RepairResult Pipeline::repair_until_renderable(const core::DotSource& code, const std::string& step) {
  RepairResult r;
  r.code = code;
  auto outcome = renderer_.render(r.code, config_.image_format);
  while (!outcome.ok()) {
    const std::string error = outcome.error().message;
    if (static_cast<int>(r.log.size()) >= config_.repair_max_iters) {
      throw RepairExhaustedError(step,
                                 "code still fails to render after " + std::to_string(r.log.size()) +
                                     " repair attempt(s); last error: " + error,
                                 std::move(r.log));
    }
    auto req = llm::make_request(llm::TemplateId::R5, {{"dot", r.code.code}, {"error", error}}, config_.repair_model);
    req.purpose = step;
    std::string corrected;
    try {
      corrected = extract_dot(gateway_.complete(req)).code;
    } catch (const std::exception& e) {
      throw RepairExhaustedError(step, std::string("repair call failed: ") + e.what(), std::move(r.log));
    }
    r.log.push_back({r.code.code, error, corrected});
    r.code = {corrected, step == "step7" ? core::DotStage::final : core::DotStage::repaired};
    outcome = renderer_.render(r.code, config_.image_format);
  }
  r.image = outcome.image().bytes;
  return r;
}

Refinement Pipeline::refine_diagram(const core::DotSource& code, const std::string& image) {
  if (image.empty()) throw std::invalid_argument("refinement needs the rendered image");
  auto req = llm::make_request(llm::TemplateId::R4, {{"dot", code.code}}, config_.main_model);
  req.purpose = "step6";
  req.attachments.push_back({image, mime_type(config_.image_format)});
  const auto extracted = extract_dot(gateway_.complete(req));
  if (extracted.remainder.empty()) throw ExtractionError("refinement response has no explanation");
  Refinement out;
  out.code = {extracted.code, core::DotStage::refined};
  out.explanation = extracted.remainder;
  out.explanation_words = count_words(out.explanation);
  return out;
}

core::PipelineRun Pipeline::run(Method method, const core::SourceText& source) {
  core::PipelineRun run;
  run.method = method;
  run.source_id = source.id;
  run.model_id = config_.main_model;
  run.repair_model_id = config_.repair_model;
  run.image_format = config_.image_format;
  run.renderer_version = renderer_.version();
  run.settings = config_.settings;
  run.settings["repair_max_iters"] = config_.repair_max_iters;
  run.settings["backend"] = gateway_.backend_name();
  run.settings["sampling"] = gateway_.options().sampling;

  std::string hash_input = std::string(core::to_string(method)) + '\0' + source.body + '\0' + config_.main_model +
                           '\0' + config_.repair_model;
  if (method != Method::zero_shot)
    for (const auto& e : dictionary_.entries()) hash_input += '\0' + e.analysis.text + '\0' + e.diagram.code;
  run.input_hash = core::sha256_hex(hash_input);
  run.run_id = make_run_id(source, method, run.input_hash);

  auto step = [&](const char* tag, auto&& fn) {
    core::StepTiming t{tag, core::utc_now_iso(), ""};
    try {
      fn();
    } catch (const render::RendererMissingError&) {
      throw;
    } catch (const RepairExhaustedError& e) {
      (std::string(tag) == "step5" ? run.repair_log_initial : run.repair_log_final) = e.log();
      t.finished = core::utc_now_iso();
      run.timestamps.push_back(t);
      throw PipelineError(tag, e.what());
    } catch (const PipelineError& e) {
      throw;
    } catch (const std::exception& e) {
      t.finished = core::utc_now_iso();
      run.timestamps.push_back(t);
      throw PipelineError(tag, e.what());
    }
    t.finished = core::utc_now_iso();
    run.timestamps.push_back(t);
  };

  try {
    if (method != Method::zero_shot) {
      step("step1", [&] { run.analysis = run_rst_analysis(source); });
      step("step2", [&] { run.chosen_example = select_similar_example(*run.analysis); });
      step("step3", [&] { run.demonstration = construct_demonstration(method, *run.chosen_example); });
    }
    step("step4", [&] { run.initial_code = generate_diagram(method, source, run.analysis, run.demonstration); });
    core::DotSource renderable;
    step("step5", [&] {
      auto r = repair_until_renderable(*run.initial_code, "step5");
      run.repair_log_initial = std::move(r.log);
      run.initial_image = std::move(r.image);
      renderable = std::move(r.code);
    });
    step("step6", [&] {
      auto r = refine_diagram(renderable, run.initial_image);
      run.refined_code = std::move(r.code);
      run.refinement_explanation = std::move(r.explanation);
      run.explanation_words = r.explanation_words;
    });
    step("step7", [&] {
      auto r = repair_until_renderable(*run.refined_code, "step7");
      run.repair_log_final = std::move(r.log);
      run.final_image = std::move(r.image);
      run.final_code = core::DotSource{r.code.code, core::DotStage::final};
    });
    if (render::check_disclaimer(renderable, config_.disclaimer_phrases) &&
        !render::check_disclaimer(*run.refined_code, config_.disclaimer_phrases))
      run.flags.push_back(kFlagDroppedDisclaimer);
    if (!render::check_disclaimer(*run.final_code, config_.disclaimer_phrases))
      run.flags.push_back(kFlagFinalWithoutDisclaimer);
    if (run.explanation_words >= 100) run.flags.push_back(kFlagLongExplanation);
    run.status = core::RunStatus::ok;
  } catch (const PipelineError& e) {
    run.status = core::RunStatus::failed;
    run.failed_step = e.step();
    run.error = e.what();
  }
  if (store_) store_->save_run(run);
  return run;
}

}  // namespace rstdiag::pipeline

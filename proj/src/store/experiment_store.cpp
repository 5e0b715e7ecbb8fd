#include "rstdiag/store/experiment_store.hpp"

#include <fcntl.h>
#include <stdio.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "rstdiag/core/encoding.hpp"
#include "rstdiag/core/json.hpp"

namespace rstdiag::store {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file(const fs::path& p, std::string_view bytes) {
  std::ofstream f(p, std::ios::binary);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw StoreError("cannot write " + p.string());
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw StoreError("cannot read " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_json(const fs::path& p, const json& j) { write_file(p, j.dump(2) + "\n"); }

std::string random_suffix() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::ostringstream ss;
  ss << std::hex << rng();
  return ss.str();
}

}  // namespace

bool valid_run_id(std::string_view id) {
  if (id.empty() || id.size() > 200 || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-';
  });
}

ExperimentStore::ExperimentStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / "runs");
  fs::create_directories(root_ / ".staging");
}

fs::path ExperimentStore::run_dir(const std::string& run_id) const {
  if (!valid_run_id(run_id)) throw StoreError("invalid run id '" + run_id + "'");
  return root_ / "runs" / run_id;
}

bool ExperimentStore::has_run(const std::string& run_id) const { return fs::exists(run_dir(run_id)); }

std::vector<std::string> ExperimentStore::list_runs() const {
  std::vector<std::string> ids;
  for (const auto& e : fs::directory_iterator(root_ / "runs"))
    if (e.is_directory()) ids.push_back(e.path().filename().string());
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::string ExperimentStore::save_run(const core::PipelineRun& run) {
  const fs::path target = run_dir(run.run_id);
  if (fs::exists(target)) throw RunExistsError("run '" + run.run_id + "' already exists");

  const fs::path stage = root_ / ".staging" / (run.run_id + "." + random_suffix());
  fs::create_directories(stage);
  try {
    const std::string ext(core::to_string(run.image_format));
    json doc = run;
    doc.erase("initial_image");
    doc.erase("final_image");
    doc["initial_image_file"] = nullptr;
    doc["final_image_file"] = nullptr;
    if (!run.initial_image.empty()) {
      write_file(stage / ("initial." + ext), run.initial_image);
      doc["initial_image_file"] = "initial." + ext;
    }
    if (!run.final_image.empty()) {
      write_file(stage / ("final." + ext), run.final_image);
      doc["final_image_file"] = "final." + ext;
    }
    if (run.initial_code) write_file(stage / "initial.dot", run.initial_code->code);
    if (run.refined_code) write_file(stage / "refined.dot", run.refined_code->code);
    if (run.final_code) write_file(stage / "final.dot", run.final_code->code);

    if (run.analysis) write_json(stage / "step1.json", {{"analysis", *run.analysis}});
    if (run.chosen_example) write_json(stage / "step2.json", {{"chosen_example", *run.chosen_example}});
    if (run.demonstration) write_json(stage / "step3.json", {{"demonstration", *run.demonstration}});
    if (run.initial_code) write_json(stage / "step4.json", {{"initial_code", *run.initial_code}});
    if (run.initial_code)
      write_json(stage / "step5.json",
                 {{"repair_log", run.repair_log_initial}, {"image_file", doc["initial_image_file"]}});
    if (run.refined_code)
      write_json(stage / "step6.json", {{"refined_code", *run.refined_code},
                                        {"explanation", run.refinement_explanation},
                                        {"explanation_words", run.explanation_words}});
    if (run.refined_code)
      write_json(stage / "step7.json", {{"repair_log", run.repair_log_final},
                                        {"final_code", run.final_code ? json(*run.final_code) : json(nullptr)},
                                        {"image_file", doc["final_image_file"]}});
    write_json(stage / "run.json", doc);

    // renameat2 with RENAME_NOREPLACE: the directory appears atomically and
    // concurrent writers of the same id cannot clobber each other.
    if (::renameat2(AT_FDCWD, stage.c_str(), AT_FDCWD, target.c_str(), RENAME_NOREPLACE) != 0) {
      const int err = errno;
      if (err == EEXIST || err == ENOTEMPTY) throw RunExistsError("run '" + run.run_id + "' already exists");
      throw StoreError("cannot publish run '" + run.run_id + "': " + std::strerror(err));
    }
  } catch (...) {
    std::error_code ec;
    fs::remove_all(stage, ec);
    throw;
  }
  return run.run_id;
}

core::PipelineRun ExperimentStore::load_run(const std::string& run_id) const {
  const fs::path dir = run_dir(run_id);
  if (!fs::exists(dir / "run.json")) throw StoreError("no run '" + run_id + "'");
  json doc;
  try {
    doc = json::parse(read_file(dir / "run.json"));
  } catch (const json::exception& e) {
    throw StoreError("run '" + run_id + "': " + e.what());
  }
  for (const char* key : {"initial_image", "final_image"}) {
    const std::string file_key = std::string(key) + "_file";
    std::string bytes;
    if (doc.contains(file_key) && doc[file_key].is_string())
      bytes = read_file(dir / doc[file_key].get<std::string>());
    doc[key] = core::base64_encode(bytes);
  }
  try {
    return doc.get<core::PipelineRun>();
  } catch (const std::exception& e) {
    throw StoreError("run '" + run_id + "': " + e.what());
  }
}

std::string ExperimentStore::save_correction(core::PipelineRun corrected, const std::string& original_id) {
  if (!has_run(original_id)) throw StoreError("cannot correct unknown run '" + original_id + "'");
  if (corrected.run_id == original_id) throw RunExistsError("a correction needs a new run id");
  corrected.supersedes = original_id;
  return save_run(corrected);
}

}  // namespace rstdiag::store

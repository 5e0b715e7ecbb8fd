#include "rstdiag/autoeval/icl_examples.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rstdiag/core/json.hpp"
#include "rstdiag/store/experiment_store.hpp"

namespace rstdiag::autoeval {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw store::StoreError("cannot read " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

IclExampleSet load_icl_examples(const fs::path& dir) {
  json manifest;
  try {
    manifest = json::parse(read_file(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw store::StoreError("ICL manifest: " + std::string(e.what()));
  }
  if (manifest.value("schema_version", 0) != core::kSchemaVersion)
    throw store::StoreError("unsupported ICL manifest schema_version");
  IclExampleSet set;
  try {
    for (const auto& s : manifest.value("held_out_sources", json::array())) {
      core::SourceText t;
      t.id = s.at("id").get<std::string>();
      t.body = read_file(dir / s.at("file").get<std::string>());
      while (!t.body.empty() && (t.body.back() == '\n' || t.body.back() == '\r')) t.body.pop_back();
      t.difficulty = core::parse_difficulty(s.value("difficulty", "medium"));
      t.license_note = s.value("license_note", "");
      set.held_out_sources.push_back(std::move(t));
    }
    for (const auto& e : manifest.at("examples")) {
      IclExample ex;
      ex.id = e.at("id").get<std::string>();
      if (e.contains("image") && e["image"].is_string()) {
        const fs::path img = dir / e["image"].get<std::string>();
        ex.image = read_file(img);
        if (img.extension() == ".svg") ex.image_mime = "image/svg+xml";
      }
      if (e.contains("source_id") && e["source_id"].is_string()) {
        ex.source_id = e["source_id"].get<std::string>();
        bool found = false;
        for (const auto& s : set.held_out_sources) {
          if (s.id == *ex.source_id) {
            ex.source_text = s.body;
            found = true;
          }
        }
        if (!found) throw store::StoreError("example " + ex.id + " names unknown source '" + *ex.source_id + "'");
      }
      ex.scores = core::make_score_triple(e.at("c1").get<int>(), e.at("c2").get<int>(), e.at("c3").get<int>());
      set.examples.push_back(std::move(ex));
    }
  } catch (const json::exception& e) {
    throw store::StoreError("ICL manifest: " + std::string(e.what()));
  }
  return set;
}

}  // namespace rstdiag::autoeval

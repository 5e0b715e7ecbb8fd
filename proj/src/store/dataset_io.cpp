#include "rstdiag/store/dataset_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "rstdiag/core/csv.hpp"
#include "rstdiag/core/json.hpp"
#include "rstdiag/store/experiment_store.hpp"

#ifndef RSTDIAG_DATA_DIR
#define RSTDIAG_DATA_DIR "data"
#endif

namespace rstdiag::store {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_text(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw StoreError("cannot read " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) {
  try {
    return json::parse(read_text(p));
  } catch (const json::exception& e) {
    throw StoreError(p.string() + ": " + e.what());
  }
}

// Asset files end with a newline that is not part of the text.
std::string strip_final_newline(std::string s) {
  if (!s.empty() && s.back() == '\n') s.pop_back();
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

const std::vector<std::string> kCsvHeader = {
    "row_kind", "diagram_id", "source_id", "difficulty", "method", "model", "c1", "c2", "c3",
    "rater_id", "L1", "L2", "L3", "C1", "C2", "k1", "k2", "k3", "k4", "k5", "k6", "k7", "C3",
    "h_fact", "h_ae", "h_c", "h_log"};

std::string b(bool v) { return v ? "1" : "0"; }

}  // namespace

fs::path default_data_dir() { return RSTDIAG_DATA_DIR; }

core::ExampleDictionary load_example_dictionary(const fs::path& dir, const render::RenderEngine* smoke_renderer) {
  const json manifest = read_json(dir / "manifest.json");
  if (manifest.value("schema_version", 0) != core::kSchemaVersion)
    throw StoreError("unsupported example dictionary schema_version");
  std::vector<core::ExampleEntry> entries;
  try {
    for (const auto& e : manifest.at("entries")) {
      core::ExampleEntry entry;
      entry.index = e.at("index").get<int>();
      const auto& s = e.at("source");
      entry.source.id = s.at("id").get<std::string>();
      entry.source.body = strip_final_newline(read_text(dir / s.at("file").get<std::string>()));
      entry.source.difficulty = core::parse_difficulty(s.value("difficulty", "basic"));
      entry.source.license_note = s.value("license_note", "");
      const auto& a = e.at("analysis");
      entry.analysis.source_id = entry.source.id;
      entry.analysis.text = strip_final_newline(read_text(dir / a.at("file").get<std::string>()));
      entry.analysis.producer_model = a.value("producer_model", "");
      entry.diagram.code = strip_final_newline(read_text(dir / e.at("diagram").at("file").get<std::string>()));
      entry.diagram.stage = core::DotStage::final;
      if (entry.source.body.empty() || entry.analysis.text.empty() || entry.diagram.code.empty())
        throw StoreError("example " + std::to_string(entry.index) + " has an empty part");
      entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw StoreError("example dictionary manifest: " + std::string(e.what()));
  }
  core::ExampleDictionary dict(std::move(entries));
  if (smoke_renderer) {
    for (const auto& e : dict.entries()) {
      const auto outcome = smoke_renderer->render(e.diagram);
      if (!outcome.ok())
        throw StoreError("example " + std::to_string(e.index) + " diagram does not render: " + outcome.error().message);
    }
  }
  return dict;
}

std::vector<core::SourceText> load_source_texts(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw StoreError("not a directory: " + dir.string());
  json meta = json::object();
  if (fs::exists(dir / "sources.json")) meta = read_json(dir / "sources.json");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<core::SourceText> out;
  for (const auto& f : files) {
    core::SourceText s;
    s.id = f.stem().string();
    s.body = strip_final_newline(read_text(f));
    if (meta.contains(s.id)) {
      const auto& m = meta[s.id];
      s.difficulty = core::parse_difficulty(m.value("difficulty", "medium"));
      s.license_note = m.value("license_note", "");
    }
    out.push_back(std::move(s));
  }
  return out;
}

core::EvaluationDataset load_dataset(const fs::path& path) {
  try {
    return read_json(path).get<core::EvaluationDataset>();
  } catch (const StoreError&) {
    throw;
  } catch (const std::exception& e) {
    throw StoreError(path.string() + ": " + e.what());
  }
}

void save_dataset(const core::EvaluationDataset& dataset, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    f << json(dataset).dump(2) << "\n";
    if (!f) throw StoreError("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

void export_dataset_csv(const core::EvaluationDataset& dataset, std::ostream& out) {
  core::write_csv_row(out, kCsvHeader);
  for (const auto& r : dataset.records) {
    const std::vector<std::string> lead = {r.diagram_id,
                                           r.source_id,
                                           std::string(core::to_string(r.difficulty)),
                                           std::string(core::to_string(r.method)),
                                           r.model,
                                           std::to_string(r.scores.c1),
                                           std::to_string(r.scores.c2),
                                           std::to_string(r.scores.c3)};
    for (const auto& a : r.annotations) {
      std::vector<std::string> row = {"rater"};
      row.insert(row.end(), lead.begin(), lead.end());
      row.insert(row.end(), {a.rater_id, std::to_string(a.L1), std::to_string(a.L2), std::to_string(a.L3),
                             std::to_string(a.C1), std::to_string(a.C2)});
      for (bool k : a.layout_flags.flags) row.push_back(b(k));
      row.push_back(std::to_string(a.C3));
      const auto& h = a.hallucination;
      row.insert(row.end(), {b(h.h_fact), b(h.h_ae), b(h.h_c), b(h.h_log)});
      core::write_csv_row(out, row);
    }
    std::vector<std::string> row = {"consensus"};
    row.insert(row.end(), lead.begin(), lead.end());
    row.resize(kCsvHeader.size() - 4);
    if (r.consensus_hallucination) {
      const auto& h = *r.consensus_hallucination;
      row.insert(row.end(), {b(h.h_fact), b(h.h_ae), b(h.h_c), b(h.h_log)});
    } else {
      row.resize(kCsvHeader.size());
    }
    core::write_csv_row(out, row);
  }
}

void export_dataset_csv(const core::EvaluationDataset& dataset, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw StoreError("cannot write " + path.string());
  export_dataset_csv(dataset, f);
}

ImportResult import_annotations_text(std::string_view csv_text) {
  ImportResult result;
  std::vector<std::vector<std::string>> rows;
  try {
    rows = core::parse_csv(csv_text);
  } catch (const core::ParseError& e) {
    result.errors.push_back({0, e.what()});
    return result;
  }
  if (rows.empty()) {
    result.errors.push_back({0, "empty file"});
    return result;
  }
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].size(); ++i) col[rows[0][i]] = i;
  const std::vector<std::string> required = {"diagram_id", "rater_id", "L1", "L2", "L3", "C2", "k1", "k2", "k3",
                                             "k4", "k5", "k6", "k7", "h_fact", "h_ae", "h_c", "h_log"};
  for (const auto& name : required) {
    if (!col.count(name)) {
      result.errors.push_back({0, "missing column '" + name + "'"});
      return result;
    }
  }

  for (std::size_t i = 1; i < rows.size(); ++i) {
    const int row_no = static_cast<int>(i);
    const auto& row = rows[i];
    auto cell = [&](const std::string& name) -> std::string {
      const auto c = col.at(name);
      return c < row.size() ? row[c] : std::string();
    };
    try {
      if (row.size() != rows[0].size())
        throw std::invalid_argument("expected " + std::to_string(rows[0].size()) + " fields, got " +
                                    std::to_string(row.size()));
      if (col.count("row_kind") && cell("row_kind") != "rater") continue;
      auto integer = [&](const std::string& name) {
        const std::string v = cell(name);
        std::size_t used = 0;
        int x = 0;
        try {
          x = std::stoi(v, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (v.empty() || used != v.size()) throw std::invalid_argument(name + " is not an integer: '" + v + "'");
        return x;
      };
      auto flag = [&](const std::string& name) {
        const std::string v = cell(name);
        if (v == "1" || v == "true") return true;
        if (v == "0" || v == "false") return false;
        throw std::invalid_argument(name + " is not a boolean: '" + v + "'");
      };
      rubric::LayoutChecklist flags;
      for (int k = 0; k < rubric::kLayoutFlagCount; ++k) flags.flags[k] = flag("k" + std::to_string(k + 1));
      core::HallucinationTags tags{flag("h_fact"), flag("h_ae"), flag("h_c"), flag("h_log")};
      if (cell("diagram_id").empty() || cell("rater_id").empty())
        throw std::invalid_argument("diagram_id and rater_id are required");
      auto a = core::make_annotation(cell("diagram_id"), cell("rater_id"), integer("L1"), integer("L2"),
                                     integer("L3"), integer("C2"), flags, tags);
      if (col.count("C1") && !cell("C1").empty() && integer("C1") != a.C1)
        throw std::invalid_argument("C1=" + cell("C1") + " is inconsistent with L1..L3 (expected " +
                                    std::to_string(a.C1) + ")");
      if (col.count("C3") && !cell("C3").empty() && integer("C3") != a.C3)
        throw std::invalid_argument("C3=" + cell("C3") + " is inconsistent with k1..k7 (expected " +
                                    std::to_string(a.C3) + ")");
      result.annotations.push_back(std::move(a));
    } catch (const std::exception& e) {
      result.errors.push_back({row_no, e.what()});
    }
  }
  return result;
}

ImportResult import_annotations(const fs::path& path) { return import_annotations_text(read_text(path)); }

}  // namespace rstdiag::store

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rstdiag/core/types.hpp"

namespace rstdiag::autoeval {

struct IclExample {
  std::string id;
  std::string image;  // raw bytes; empty when the set ships scores only
  std::string image_mime = "image/png";
  std::optional<std::string> source_id;
  std::string source_text;  // empty when source_id is unknown
  core::ScoreTriple scores;
};

/// Scored examples plus the texts they were drawn from. Diagrams generated
/// from these texts must not be evaluated with the examples in the prompt.
struct IclExampleSet {
  std::vector<IclExample> examples;
  std::vector<core::SourceText> held_out_sources;

  bool empty() const { return examples.empty(); }
};

/// Reads <dir>/manifest.json:
///   held_out_sources: [{id, file, license_note}]
///   examples: [{id, image: file|null, source_id: id|null, c1, c2, c3}]
IclExampleSet load_icl_examples(const std::filesystem::path& dir);

}  // namespace rstdiag::autoeval

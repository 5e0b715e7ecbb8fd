#pragma once

#include <chrono>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "rstdiag/core/types.hpp"

namespace rstdiag::render {

/// The renderer could not be started or misbehaved in a way unrelated to
/// the submitted code. Not repairable by editing the dot source.
class RendererMissingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RenderConfig {
  std::filesystem::path dot_executable = "dot";
  std::chrono::milliseconds timeout{30'000};
  std::string layout_engine = "dot";
};

/// Exit status recorded for a render that hit the timeout.
inline constexpr int kTimeoutExitStatus = -1;

class RenderEngine {
 public:
  /// Runs `dot -V` and throws RendererMissingError if it fails.
  explicit RenderEngine(RenderConfig config = {});

  /// Success holds non-empty image bytes. A nonzero exit with stderr output
  /// or a timeout yields RenderError carrying stderr verbatim.
  core::RenderOutcome render(std::string_view code, core::ImageFormat format = core::ImageFormat::png) const;
  core::RenderOutcome render(const core::DotSource& code, core::ImageFormat format = core::ImageFormat::png) const {
    return render(code.code, format);
  }

  const std::string& version() const { return version_; }
  const RenderConfig& config() const { return config_; }

 private:
  RenderConfig config_;
  std::string version_;
};

}  // namespace rstdiag::render

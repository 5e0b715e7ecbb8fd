#include "rstdiag/render/render_engine.hpp"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

extern char** environ;

namespace rstdiag::render {

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "rstdiag-render-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw RendererMissingError("cannot create render workspace");
    path = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct ProcessResult {
  int exit_status = 0;
  bool timed_out = false;
  bool signaled = false;
  std::string stderr_text;
};

// stdin from `in`, stdout to `out`, stderr to `err`.
ProcessResult run_process(const std::vector<std::string>& argv, const fs::path& in, const fs::path& out,
                          const fs::path& err, std::chrono::milliseconds timeout) {
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, 0, in.c_str(), O_RDONLY, 0);
  posix_spawn_file_actions_addopen(&actions, 1, out.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
  posix_spawn_file_actions_addopen(&actions, 2, err.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);

  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  pid_t pid = 0;
  const int rc = posix_spawnp(&pid, args[0], &actions, &attr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  if (rc != 0) throw RendererMissingError("cannot start " + argv[0] + ": " + std::strerror(rc));

  ProcessResult result;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  int status = 0;
  auto delay = std::chrono::milliseconds(1);
  while (true) {
    const pid_t w = waitpid(pid, &status, WNOHANG);
    if (w == pid) break;
    if (w < 0 && errno != EINTR) throw RendererMissingError("waitpid failed");
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(-pid, SIGKILL);
      waitpid(pid, &status, 0);
      result.timed_out = true;
      break;
    }
    std::this_thread::sleep_for(delay);
    delay = std::min(delay * 2, std::chrono::milliseconds(20));
  }
  if (!result.timed_out) {
    if (WIFEXITED(status)) {
      result.exit_status = WEXITSTATUS(status);
    } else {
      result.signaled = true;
      result.exit_status = 128 + WTERMSIG(status);
    }
  }
  result.stderr_text = slurp(err);
  return result;
}

std::string trim(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

}  // namespace

RenderEngine::RenderEngine(RenderConfig config) : config_(std::move(config)) {
  TempDir dir;
  std::ofstream(dir.path / "empty").close();
  ProcessResult r;
  try {
    r = run_process({config_.dot_executable.string(), "-V"}, dir.path / "empty", dir.path / "out", dir.path / "err",
                    std::max(config_.timeout, std::chrono::milliseconds(30'000)));
  } catch (const RendererMissingError& e) {
    throw RendererMissingError("Graphviz not available (" + config_.dot_executable.string() + "): " + e.what());
  }
  std::string text = trim(r.stderr_text);
  if (text.empty()) text = trim(slurp(dir.path / "out"));
  if (r.timed_out || r.exit_status != 0 || text.find("graphviz") == std::string::npos)
    throw RendererMissingError("Graphviz not available (" + config_.dot_executable.string() + "): " +
                               (text.empty() ? "no version output" : text));
  version_ = text.substr(0, text.find('\n'));
}

core::RenderOutcome RenderEngine::render(std::string_view code, core::ImageFormat format) const {
  TempDir dir;
  const auto in = dir.path / "input.dot";
  const auto out = dir.path / (std::string("output.") + std::string(core::to_string(format)));
  {
    std::ofstream f(in, std::ios::binary);
    f.write(code.data(), static_cast<std::streamsize>(code.size()));
  }
  std::vector<std::string> argv = {config_.dot_executable.string(), "-K" + config_.layout_engine,
                                   "-T" + std::string(core::to_string(format)), "-o" + out.string()};
  const auto r = run_process(argv, in, dir.path / "stdout", dir.path / "stderr", config_.timeout);

  core::RenderOutcome outcome;
  outcome.renderer_version = version_;
  if (r.timed_out) {
    outcome.result = core::RenderError{
        "render timed out after " + std::to_string(config_.timeout.count()) + " ms", kTimeoutExitStatus};
    return outcome;
  }
  if (r.exit_status != 0) {
    if (r.stderr_text.empty() || r.signaled)
      throw RendererMissingError("renderer exited with status " + std::to_string(r.exit_status) +
                                 " without a diagnostic");
    outcome.result = core::RenderError{r.stderr_text, r.exit_status};
    return outcome;
  }
  std::string bytes = fs::exists(out) ? slurp(out) : std::string();
  if (bytes.empty()) {
    // dot exits 0 on some unrenderable inputs; still a code problem if it explained itself
    if (r.stderr_text.empty()) throw RendererMissingError("renderer produced no output and no diagnostic");
    outcome.result = core::RenderError{r.stderr_text, r.exit_status};
    return outcome;
  }
  outcome.result = core::RenderedImage{std::move(bytes), format};
  return outcome;
}

}  // namespace rstdiag::render

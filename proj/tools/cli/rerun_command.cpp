#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "apisift/error.hpp"
#include "apisift/text.hpp"
#include "cli.hpp"
#include "context.hpp"

namespace apisift::cli {

namespace {

namespace fs = std::filesystem;

// Options whose value is a path the command writes to.
bool is_output_option(const std::string& arg) { return arg == "-o" || arg == "--output" || arg == "--reduced"; }

struct Redirect {
  fs::path original;
  fs::path replacement;
};

std::optional<fs::path> redirect(const fs::path& p, const std::vector<Redirect>& redirects) {
  for (const auto& r : redirects) {
    const auto orig = r.original.lexically_normal();
    const auto path = p.lexically_normal();
    if (path == orig) return r.replacement;
    const auto rel = path.lexically_relative(orig);
    if (!rel.empty() && *rel.begin() != "..") return r.replacement / rel;
  }
  return std::nullopt;
}

class ScopedCwd {
 public:
  explicit ScopedCwd(const fs::path& p) : saved_(fs::current_path()) { fs::current_path(p); }
  ~ScopedCwd() {
    std::error_code ec;
    fs::current_path(saved_, ec);
  }

 private:
  fs::path saved_;
};

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const std::optional<std::string>& value) : name_(name) {
    if (const char* v = std::getenv(name)) saved_ = v;
    if (value)
      setenv(name, value->c_str(), 1);
    else
      unsetenv(name);
  }
  ~ScopedEnv() {
    if (saved_)
      setenv(name_, saved_->c_str(), 1);
    else
      unsetenv(name_);
  }

 private:
  const char* name_;
  std::optional<std::string> saved_;
};

fs::path fresh_temp_dir() {
  static std::atomic<unsigned> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  auto dir = fs::temp_directory_path() /
             ("apisift-rerun-" + std::to_string(stamp) + "-" + std::to_string(counter.fetch_add(1)));
  fs::create_directories(dir);
  return dir;
}

void run_rerun(Context& ctx, const std::string& manifest_file, bool keep) {
  const auto m = RunManifest::from_json(nlohmann::json::parse(read_file(manifest_file)));
  const fs::path cwd = m.cwd;
  if (!fs::is_directory(cwd)) throw FormatError("recorded working directory is gone: " + m.cwd);

  nlohmann::json inputs = nlohmann::json::array();
  bool inputs_ok = true;
  for (const auto& [path, digest] : m.inputs) {
    const fs::path full = fs::path(path).is_absolute() ? fs::path(path) : cwd / path;
    const std::string actual = fs::is_regular_file(full) ? sha256_file(full) : "";
    inputs_ok = inputs_ok && actual == digest;
    inputs.push_back({{"path", path}, {"expected", digest}, {"actual", actual}, {"match", actual == digest}});
  }
  if (!inputs_ok) {
    ctx.out() << nlohmann::json{{"identical", false}, {"inputs", inputs}}.dump(2) << '\n';
    throw FormatError("inputs changed since the recorded run");
  }

  const fs::path tmp = fresh_temp_dir();
  std::vector<std::string> argv = m.argv;
  std::vector<Redirect> redirects;
  for (std::size_t i = 0; i + 1 < argv.size(); ++i) {
    if (!is_output_option(argv[i])) continue;
    const fs::path replacement = tmp / std::to_string(redirects.size()) / fs::path(argv[i + 1]).filename();
    redirects.push_back({argv[i + 1], replacement});
    argv[i + 1] = replacement.string();
  }

  // The recorded seeds already include any environment override.
  std::optional<std::string> seed_env;
  if (m.seeds.size() == 1) seed_env = std::to_string(m.seeds.begin()->second);

  std::ostringstream out, err;
  int code = 0;
  {
    ScopedCwd in_cwd(cwd);
    ScopedEnv env("APISIFT_SEED", seed_env);
    code = run(argv, out, err);
  }
  if (code != 0) {
    if (!keep) fs::remove_all(tmp);
    throw Error("RerunFailed", "re-execution exited with " + std::to_string(code) + ": " + trim(err.str()));
  }

  nlohmann::json outputs = nlohmann::json::array();
  bool identical = true;
  for (const auto& [path, digest] : m.outputs) {
    const auto target = redirect(path, redirects);
    const fs::path full = target ? *target : (fs::path(path).is_absolute() ? fs::path(path) : cwd / path);
    const std::string actual = fs::is_regular_file(full) ? sha256_file(full) : "";
    identical = identical && actual == digest;
    outputs.push_back({{"path", path}, {"expected", digest}, {"actual", actual}, {"match", actual == digest}});
  }
  nlohmann::json report{{"identical", identical}, {"inputs", inputs}, {"outputs", outputs}};
  if (m.version != kToolVersion) report["versionChanged"] = {{"recorded", m.version}, {"current", kToolVersion}};
  if (keep) report["rerunDirectory"] = tmp.string();
  else fs::remove_all(tmp);
  ctx.out() << report.dump(2) << '\n';
  if (!identical) throw Error("RerunMismatch", "outputs differ from the recorded run");
}

}  // namespace

void register_rerun_command(CLI::App& app, Context& ctx) {
  auto manifest = std::make_shared<std::string>();
  auto keep = std::make_shared<bool>(false);
  auto* sub = app.add_subcommand("rerun", "Re-execute a recorded run and compare output digests");
  sub->add_option("manifest", *manifest, "A *.manifest.json file")->required();
  sub->add_flag("--keep", *keep, "Keep the re-run outputs and print their directory");
  sub->callback([&ctx, manifest, keep] { run_rerun(ctx, *manifest, *keep); });
}

}  // namespace apisift::cli

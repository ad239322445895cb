#include "cli.hpp"

#include <filesystem>
#include <iostream>

#include "apisift/error.hpp"
#include "apisift/text.hpp"
#include "apisift/vector_store.hpp"
#include "context.hpp"

namespace apisift::cli {

namespace {

void report_error(std::ostream& err, const std::string& kind, const std::string& message, ExitCode code) {
  const nlohmann::json j{{"error", kind}, {"message", message}, {"exitCode", static_cast<int>(code)}};
  err << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
}

}  // namespace

Context::Context(std::vector<std::string> argv, std::ostream& out, std::ostream& err) : out_(out), err_(err) {
  manifest_.argv = std::move(argv);
  manifest_.cwd = std::filesystem::current_path().string();
  manifest_.started = utc_timestamp();
}

std::string Context::read_input(const std::filesystem::path& p) {
  if (!std::filesystem::is_regular_file(p)) throw FormatError("cannot read " + p.string());
  std::string text = read_file(p.string());
  manifest_.inputs[p.string()] = sha256_hex(text);
  return text;
}

void Context::write_output(const std::filesystem::path& p, const std::string& content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  write_file_atomic(p, content);
  written_.push_back(p);
  manifest_.outputs[p.string()] = sha256_hex(content);
}

std::uint64_t Context::seed(const std::string& name, std::uint64_t cli_value) {
  std::uint64_t v = cli_value;
  if (const char* env = std::getenv("APISIFT_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      v = std::stoull(env, &used);
      if (env[used] != '\0') throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw ConfigError(std::string("APISIFT_SEED is not an unsigned integer: '") + env + "'");
    }
  }
  manifest_.seeds[name] = v;
  return v;
}

void Context::finish() {
  if (!output_root_ || written_.empty()) return;
  manifest_.output_root = output_root_->string();
  manifest_.finished = utc_timestamp();
  write_file_atomic(manifest_path(*output_root_), manifest_.to_json().dump(2) + "\n");
}

void Context::discard_outputs() {
  std::error_code ec;
  for (const auto& p : written_) std::filesystem::remove(p, ec);
  written_.clear();
}

std::vector<MethodRecord> load_corpus(Context& ctx, const std::string& path) { return read_corpus(ctx.read_input(path)); }

std::map<std::string, std::vector<double>> load_vectors(Context& ctx, const std::string& path,
                                                        std::optional<std::size_t> dim) {
  try {
    return to_map(parse_vectors(ctx.read_input(path), dim));
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

codoc::Dataset build_dataset(const std::map<std::string, Label>& labels,
                             const std::map<std::string, std::vector<double>>& doc,
                             const std::map<std::string, std::vector<double>>& code) {
  std::size_t only_doc = 0, only_code = 0;
  std::string first;
  for (const auto& [sig, v] : doc)
    if (!code.contains(sig)) ++only_doc, first = first.empty() ? sig : first;
  for (const auto& [sig, v] : code)
    if (!doc.contains(sig)) ++only_code, first = first.empty() ? sig : first;
  if (only_doc + only_code > 0)
    throw FormatError("doc and code vectors cover different signatures (" + std::to_string(only_doc) +
                      " only in doc, " + std::to_string(only_code) + " only in code, e.g. '" + first + "')");
  codoc::Dataset d;
  for (const auto& [sig, label] : labels) {
    const auto it = doc.find(sig);
    if (it == doc.end()) throw FormatError("no vectors for labelled signature '" + sig + "'");
    const auto& c = code.at(sig);
    d.examples.push_back({sig, Eigen::Map<const nn::Vector>(it->second.data(), static_cast<Eigen::Index>(it->second.size())),
                          Eigen::Map<const nn::Vector>(c.data(), static_cast<Eigen::Index>(c.size())), label});
  }
  return d;
}

std::string signature_set_digest(const std::map<std::string, std::vector<double>>& vectors) {
  std::string joined;
  for (const auto& [sig, v] : vectors) joined += sig + "\n";
  return sha256_hex(joined);
}

void write_json(Context& ctx, const std::string& output, const nlohmann::json& j) {
  const std::string text = j.dump(2) + "\n";
  if (output.empty() || output == "-") {
    ctx.out() << text;
  } else {
    ctx.set_output_root(output);
    ctx.write_output(output, text);
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx(args, out, err);
  CLI::App app{"Source/sink classification workbench for framework API methods", "apisift"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  register_pipeline_commands(app, ctx);
  register_model_commands(app, ctx);
  register_analysis_commands(app, ctx);
  register_serve_command(app, ctx);
  register_rerun_command(app, ctx);
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    ctx.finish();
    return 0;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    ctx.discard_outputs();
    report_error(err, "UsageError", e.what(), ExitCode::Usage);
    return static_cast<int>(ExitCode::Usage);
  } catch (const Error& e) {
    ctx.discard_outputs();
    report_error(err, e.kind(), e.what(), e.exit_code());
    return static_cast<int>(e.exit_code());
  } catch (const nlohmann::json::exception& e) {
    ctx.discard_outputs();
    report_error(err, "FormatError", e.what(), ExitCode::Data);
    return static_cast<int>(ExitCode::Data);
  } catch (const std::filesystem::filesystem_error& e) {
    ctx.discard_outputs();
    report_error(err, "IoError", e.what(), ExitCode::Data);
    return static_cast<int>(ExitCode::Data);
  } catch (const std::exception& e) {
    ctx.discard_outputs();
    report_error(err, "InternalError", e.what(), ExitCode::Internal);
    return static_cast<int>(ExitCode::Internal);
  }
}

}  // namespace apisift::cli

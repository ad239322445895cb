#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "apisift/codoc.hpp"
#include "apisift/extractor.hpp"
#include "apisift/manifest.hpp"

namespace apisift::cli {

/// Per-invocation state shared by every command: streams, the manifest
/// being assembled and the outputs written so far.
class Context {
 public:
  Context(std::vector<std::string> argv, std::ostream& out, std::ostream& err);

  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }

  /// Reads an input file and records its digest.
  std::string read_input(const std::filesystem::path& p);

  /// Atomic write; the digest goes into the manifest.
  void write_output(const std::filesystem::path& p, const std::string& content);

  /// The -o value of the command; the manifest is written next to it.
  void set_output_root(const std::filesystem::path& p) { output_root_ = p; }

  void set_command(std::string name) { manifest_.command = std::move(name); }
  void set_config(nlohmann::json config) { manifest_.config = std::move(config); }

  /// APISIFT_SEED, when set, wins over the command-line value.
  std::uint64_t seed(const std::string& name, std::uint64_t cli_value);

  /// Writes the manifest when the command produced outputs.
  void finish();
  /// Deletes every output written by this invocation.
  void discard_outputs();

 private:
  std::ostream& out_;
  std::ostream& err_;
  RunManifest manifest_;
  std::optional<std::filesystem::path> output_root_;
  std::vector<std::filesystem::path> written_;
};

/// Registers every subcommand on `app`; callbacks run against `ctx`.
void register_pipeline_commands(CLI::App& app, Context& ctx);
void register_model_commands(CLI::App& app, Context& ctx);
void register_analysis_commands(CLI::App& app, Context& ctx);
void register_serve_command(CLI::App& app, Context& ctx);
void register_rerun_command(CLI::App& app, Context& ctx);

// Helpers shared by the command files.
std::vector<MethodRecord> load_corpus(Context& ctx, const std::string& path);
std::map<std::string, std::vector<double>> load_vectors(Context& ctx, const std::string& path,
                                                        std::optional<std::size_t> dim = std::nullopt);

/// Joins labels with doc and code vectors. Throws FormatError when the doc
/// and code files cover different signatures or a labelled signature has
/// no vectors.
codoc::Dataset build_dataset(const std::map<std::string, Label>& labels,
                             const std::map<std::string, std::vector<double>>& doc,
                             const std::map<std::string, std::vector<double>>& code);

/// Digest of the sorted signature list, used to tie models to their data.
std::string signature_set_digest(const std::map<std::string, std::vector<double>>& vectors);

void write_json(Context& ctx, const std::string& output, const nlohmann::json& j);

}  // namespace apisift::cli

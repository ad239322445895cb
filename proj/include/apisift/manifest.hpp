#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace apisift {

inline constexpr std::string_view kToolVersion = "0.1.0";

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& p);

/// Writes to a sibling temporary file and renames it into place, so a
/// failed command never leaves a partial output behind.
void write_file_atomic(const std::filesystem::path& p, std::string_view content);

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;  // without the program name
  std::string cwd;
  std::string output_root;        // the -o value
  nlohmann::json config = nlohmann::json::object();
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, std::string> inputs;   // path -> sha256
  std::map<std::string, std::string> outputs;  // path -> sha256
  std::string version{kToolVersion};
  std::string started;   // UTC ISO-8601
  std::string finished;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

/// "<output>.manifest.json"
std::filesystem::path manifest_path(const std::filesystem::path& output);
std::string utc_timestamp();

}  // namespace apisift

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "apisift/extractor.hpp"
#include "apisift/label.hpp"
#include "apisift/tables.hpp"

namespace httplib {
class Server;
}

namespace apisift::serve {

struct Decision {
  std::uint64_t seq = 0;
  std::string rater;
  std::string signature;
  Label label = Label::Neither;
  std::string timestamp;
};

/// Append-only JSON Lines log of rater decisions. A later decision by the
/// same rater on the same signature supersedes the earlier one; both stay
/// in the log. One writer at a time, concurrent readers.
class LabelStore {
 public:
  /// Loads an existing log. Throws FormatError naming the bad line.
  explicit LabelStore(std::filesystem::path file, std::function<std::string()> clock = {});

  Decision append(const std::string& rater, const std::string& signature, Label label);
  std::size_t history_length(const std::string& rater, const std::string& signature) const;
  std::set<std::string> raters() const;
  /// Latest decision per (signature, rater), ordered by signature then rater.
  std::vector<Decision> latest() const;
  std::size_t size() const;

 private:
  std::filesystem::path file_;
  std::function<std::string()> clock_;
  mutable std::shared_mutex mu_;
  std::vector<Decision> log_;
};

/// HTTP API for the labelling client:
///   GET  /api/methods?cursor=&mode=labeling|triage&limit=
///   POST /api/labels {rater, signature, label}
///   GET  /api/agreement[?raters=a,b]
///   GET  /api/export
class LabelServer {
 public:
  LabelServer(std::vector<MethodRecord> corpus, std::optional<std::vector<PredictionRow>> predictions,
              LabelStore& store, const std::string& static_dir = {});
  ~LabelServer();

  /// Binds to an ephemeral port and returns it.
  int bind_any_port(const std::string& host);
  bool bind(const std::string& host, int port);
  /// Blocks until stop().
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  void routes();

  std::vector<MethodRecord> corpus_;  // sorted by signature
  std::map<std::string, std::size_t> index_;
  std::optional<std::map<std::string, PredictionRow>> predictions_;
  LabelStore& store_;
  std::unique_ptr<httplib::Server> http_;
};

}  // namespace apisift::serve

#include "serve.hpp"

// Eigen must precede httplib: <resolv.h> defines a _res macro.
#include "context.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <mutex>

#include "apisift/error.hpp"
#include "apisift/evalkit.hpp"
#include "apisift/manifest.hpp"
#include "apisift/text.hpp"

namespace apisift::serve {

namespace {

nlohmann::json to_json(const Decision& d) {
  return {{"seq", d.seq},
          {"rater", d.rater},
          {"signature", d.signature},
          {"label", std::string(to_string(d.label))},
          {"timestamp", d.timestamp}};
}

void send_json(httplib::Response& res, int status, const nlohmann::json& j) {
  res.status = status;
  res.set_content(j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

constexpr std::size_t kDefaultPage = 50;
constexpr std::size_t kMaxPage = 500;

std::optional<std::size_t> parse_count(const std::string& s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

LabelStore::LabelStore(std::filesystem::path file, std::function<std::string()> clock)
    : file_(std::move(file)), clock_(clock ? std::move(clock) : std::function<std::string()>(utc_timestamp)) {
  if (!std::filesystem::exists(file_)) return;
  const auto lines = split_lines(read_file(file_.string()));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(lines[i]);
      const auto label = parse_label(j.at("label").get<std::string>());
      if (!label) throw FormatError("invalid label");
      log_.push_back({j.at("seq").get<std::uint64_t>(), j.at("rater").get<std::string>(),
                      j.at("signature").get<std::string>(), *label, j.at("timestamp").get<std::string>()});
    } catch (const std::exception& e) {
      throw FormatError(file_.string() + " line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
}

Decision LabelStore::append(const std::string& rater, const std::string& signature, Label label) {
  std::unique_lock lock(mu_);
  Decision d{log_.empty() ? 1 : log_.back().seq + 1, rater, signature, label, clock_()};
  std::ofstream out(file_, std::ios::app | std::ios::binary);
  out << to_json(d).dump() << '\n';
  out.flush();
  if (!out) throw FormatError("cannot append to " + file_.string());
  log_.push_back(d);
  return d;
}

std::size_t LabelStore::history_length(const std::string& rater, const std::string& signature) const {
  std::shared_lock lock(mu_);
  return static_cast<std::size_t>(std::count_if(log_.begin(), log_.end(), [&](const Decision& d) {
    return d.rater == rater && d.signature == signature;
  }));
}

std::set<std::string> LabelStore::raters() const {
  std::shared_lock lock(mu_);
  std::set<std::string> out;
  for (const auto& d : log_) out.insert(d.rater);
  return out;
}

std::vector<Decision> LabelStore::latest() const {
  std::shared_lock lock(mu_);
  std::map<std::pair<std::string, std::string>, Decision> m;
  for (const auto& d : log_) m[{d.signature, d.rater}] = d;
  std::vector<Decision> out;
  for (auto& [k, d] : m) out.push_back(std::move(d));
  return out;
}

std::size_t LabelStore::size() const {
  std::shared_lock lock(mu_);
  return log_.size();
}

LabelServer::LabelServer(std::vector<MethodRecord> corpus, std::optional<std::vector<PredictionRow>> predictions,
                         LabelStore& store, const std::string& static_dir)
    : corpus_(std::move(corpus)), store_(store), http_(std::make_unique<httplib::Server>()) {
  std::sort(corpus_.begin(), corpus_.end(), [](const auto& a, const auto& b) { return a.signature < b.signature; });
  for (std::size_t i = 0; i < corpus_.size(); ++i) index_[corpus_[i].signature] = i;
  if (predictions) {
    predictions_.emplace();
    for (auto& p : *predictions) predictions_->emplace(p.signature, std::move(p));
  }
  if (!static_dir.empty() && !http_->set_mount_point("/", static_dir))
    throw FormatError("static directory not found: " + static_dir);
  routes();
}

LabelServer::~LabelServer() = default;

void LabelServer::routes() {
  http_->Get("/api/methods", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string mode = req.has_param("mode") ? req.get_param_value("mode") : "labeling";
    if (mode != "labeling" && mode != "triage") return send_error(res, 400, "mode must be labeling or triage");
    if (mode == "triage" && !predictions_) return send_error(res, 409, "triage mode needs a predictions file");
    std::size_t cursor = 0, limit = kDefaultPage;
    if (req.has_param("cursor")) {
      const auto c = parse_count(req.get_param_value("cursor"));
      if (!c || *c > corpus_.size()) return send_error(res, 400, "bad cursor");
      cursor = *c;
    }
    if (req.has_param("limit")) {
      const auto l = parse_count(req.get_param_value("limit"));
      if (!l || *l == 0 || *l > kMaxPage) return send_error(res, 400, "limit must be in [1, 500]");
      limit = *l;
    }
    const std::size_t end = std::min(corpus_.size(), cursor + limit);
    nlohmann::json items = nlohmann::json::array();
    for (std::size_t i = cursor; i < end; ++i) {
      const auto& r = corpus_[i];
      nlohmann::json item{{"signature", r.signature}, {"docText", r.doc ? nlohmann::json(*r.doc) : nlohmann::json()},
                          {"bodyText", r.body}};
      if (mode == "triage") {
        const auto it = predictions_->find(r.signature);
        if (it == predictions_->end()) {
          item["prediction"] = nullptr;
        } else {
          const auto& p = it->second;
          item["prediction"] = {{"label", std::string(to_string(p.label))},
                                {"probs", {{"SOURCE", p.probs[0]}, {"SINK", p.probs[1]}, {"NEITHER", p.probs[2]}}}};
        }
      }
      items.push_back(std::move(item));
    }
    send_json(res, 200,
              {{"items", items},
               {"total", corpus_.size()},
               {"nextCursor", end < corpus_.size() ? nlohmann::json(std::to_string(end)) : nlohmann::json()}});
  });

  http_->Post("/api/labels", [this](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception&) {
      return send_error(res, 400, "body is not JSON");
    }
    if (!body.is_object()) return send_error(res, 400, "body must be an object");
    for (const char* k : {"rater", "signature", "label"})
      if (!body.contains(k) || !body[k].is_string()) return send_error(res, 400, std::string("missing string field ") + k);
    const auto rater = trim(body["rater"].get<std::string>());
    const auto signature = body["signature"].get<std::string>();
    if (rater.empty()) return send_error(res, 400, "rater must not be empty");
    if (!index_.contains(signature)) return send_error(res, 404, "unknown signature");
    const auto label = parse_label(body["label"].get<std::string>());
    if (!label) return send_error(res, 422, "label must be SOURCE, SINK or NEITHER");
    const auto d = store_.append(rater, signature, *label);
    auto j = to_json(d);
    j["historyLength"] = store_.history_length(rater, signature);
    send_json(res, 201, j);
  });

  http_->Get("/api/agreement", [this](const httplib::Request& req, httplib::Response& res) {
    std::string a, b;
    if (req.has_param("raters")) {
      const auto v = req.get_param_value("raters");
      const auto comma = v.find(',');
      if (comma == std::string::npos) return send_error(res, 400, "raters must be 'a,b'");
      a = v.substr(0, comma);
      b = v.substr(comma + 1);
    } else {
      const auto raters = store_.raters();
      if (raters.size() < 2) return send_error(res, 409, "fewer than two raters");
      if (raters.size() > 2) return send_error(res, 400, "more than two raters; pass raters=a,b");
      a = *raters.begin();
      b = *raters.rbegin();
    }
    std::map<std::string, Label> la, lb;
    for (const auto& d : store_.latest()) {
      if (d.rater == a) la[d.signature] = d.label;
      if (d.rater == b) lb[d.signature] = d.label;
    }
    std::vector<Label> ya, yb;
    for (const auto& [sig, l] : la)
      if (auto it = lb.find(sig); it != lb.end()) ya.push_back(l), yb.push_back(it->second);
    if (ya.empty()) return send_error(res, 409, "no signature labelled by both raters");
    const auto k = eval::cohen_kappa(ya, yb);
    eval::ConfusionMatrix table;
    for (std::size_t i = 0; i < ya.size(); ++i) table.add(ya[i], yb[i]);
    send_json(res, 200,
              {{"raters", {a, b}},
               {"n", ya.size()},
               {"kappa", k.kappa},
               {"observed", k.observed},
               {"expected", k.expected},
               {"degenerate", k.degenerate},
               {"perLabelConfusion", table.counts}});
  });

  http_->Get("/api/export", [this](const httplib::Request&, httplib::Response& res) {
    std::vector<LabelRow> rows;
    for (const auto& d : store_.latest()) rows.push_back({d.signature, d.label, d.rater});
    res.status = 200;
    res.set_content(format_labels_csv(rows), "text/csv");
  });
}

int LabelServer::bind_any_port(const std::string& host) { return http_->bind_to_any_port(host); }
bool LabelServer::bind(const std::string& host, int port) { return http_->bind_to_port(host, port); }
bool LabelServer::listen_after_bind() { return http_->listen_after_bind(); }
void LabelServer::stop() { http_->stop(); }
void LabelServer::wait_until_ready() const { http_->wait_until_ready(); }

}  // namespace apisift::serve

namespace apisift::cli {

namespace {

struct ServeCmd {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string corpus;
  std::string preds;
  std::string store = "labels.jsonl";
  std::string static_dir;
};

void run_serve(Context& ctx, const ServeCmd& a) {
  ctx.set_command("serve");
  auto corpus = load_corpus(ctx, a.corpus);
  std::optional<std::vector<PredictionRow>> preds;
  if (!a.preds.empty()) preds = parse_predictions_csv(ctx.read_input(a.preds));
  serve::LabelStore store(a.store);
  serve::LabelServer server(std::move(corpus), std::move(preds), store, a.static_dir);
  if (!server.bind(a.host, a.port)) throw ConfigError("cannot bind " + a.host + ":" + std::to_string(a.port));
  ctx.out() << nlohmann::json{{"listening", a.host + ":" + std::to_string(a.port)}, {"decisions", store.size()}}.dump()
            << std::endl;
  server.listen_after_bind();
}

}  // namespace

void register_serve_command(CLI::App& app, Context& ctx) {
  auto a = std::make_shared<ServeCmd>();
  auto* sub = app.add_subcommand("serve", "HTTP API for labelling and triage");
  sub->add_option("--host", a->host);
  sub->add_option("--port", a->port)->check(CLI::Range(1, 65535));
  sub->add_option("--corpus", a->corpus)->required();
  sub->add_option("--preds", a->preds, "Predictions CSV for triage mode");
  sub->add_option("--store", a->store, "Append-only decision log (JSON Lines)");
  sub->add_option("--static", a->static_dir, "Directory of UI assets served at /");
  sub->callback([&ctx, a] { run_serve(ctx, *a); });
}

}  // namespace apisift::cli

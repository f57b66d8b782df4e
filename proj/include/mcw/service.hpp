#ifndef MCW_SERVICE_HPP
#define MCW_SERVICE_HPP

#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcw/corrections.hpp"
#include "mcw/coverage.hpp"
#include "mcw/edit_log.hpp"
#include "mcw/errors.hpp"
#include "mcw/lexicon.hpp"
#include "mcw/review.hpp"
#include "mcw/screening.hpp"
#include "mcw/wordnet.hpp"

#include <httplib.h>

namespace mcw {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

struct ListenAddress {
  std::string host = "127.0.0.1";
  int port = 8080;
};

/// Parses "host:port" or ":port"; falls back to the default for empty input.
inline ListenAddress parse_listen(std::string_view spec) {
  ListenAddress a;
  if (spec.empty()) return a;
  auto colon = spec.rfind(':');
  if (colon == std::string_view::npos) throw ConfigError("listen address must be host:port");
  if (colon > 0) a.host = std::string(spec.substr(0, colon));
  auto port = spec.substr(colon + 1);
  int p = 0;
  auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), p);
  if (ec != std::errc{} || ptr != port.data() + port.size() || p < 0 || p > 65535) throw ConfigError("bad port in listen address");
  a.port = p;
  return a;
}

/// Listen address from MCW_LISTEN, else 127.0.0.1:8080.
inline ListenAddress listen_from_env() {
  const char* v = std::getenv("MCW_LISTEN");
  return parse_listen(v ? v : "");
}

/// Review service state and the JSON handlers behind /api.
///
/// Persistence is the base lexicon snapshot, the append-only edit log and the review queue
/// file. The served lexicon is the snapshot with every edit after its edit_tip replayed.
/// Readers share a lock; decisions take it exclusively, so the log has a single writer.
class ReviewService {
 public:
  ReviewService(WordnetDb db, BilingualLexicon base, const std::filesystem::path& edit_log, std::filesystem::path queue_file,
                std::vector<ScreeningOutcome> screening = {})
      : db_(std::move(db)), log_(edit_log), queue_path_(std::move(queue_file)), queue_(ReviewQueue::load(queue_path_)) {
    lexicon_ = apply_edits(base, pending_edits(base.meta.edit_tip));
    for (auto& o : screening) outcomes_.emplace(o.synset, std::move(o));
    reconcile();
  }

  /// Closes open items whose candidate already carries a human decision in the log. This
  /// repairs a crash between the log append and the queue write.
  std::size_t reconcile() {
    std::map<std::string, const CorrectionEdit*> by_id;
    for (const auto& e : log_.log().records()) by_id[e.id] = &e;
    std::size_t fixed = 0;
    for (const auto& item : queue_.items()) {
      if (item.status != ReviewStatus::open) continue;
      const auto* c = lexicon_.find(item.synset, item.candidate);
      if (!c || !is_human(c->status)) continue;
      auto it = by_id.find(c->edit);
      if (it == by_id.end()) continue;
      auto* mutable_item = queue_.find(item.id);
      mutable_item->edit = it->second->id;
      mutable_item->status = it->second->kind == EditKind::retag_note    ? ReviewStatus::accepted
                             : it->second->kind == EditKind::delete_lemma ? ReviewStatus::rejected
                                                                          : ReviewStatus::edited;
      ++fixed;
    }
    if (fixed) io::write_file_atomic(queue_path_, queue_.serialize());
    return fixed;
  }

  ApiResponse get_queue(std::string_view status, std::string_view pos, std::string_view reason, std::size_t offset,
                        std::size_t limit) const {
    std::shared_lock lock(mutex_);
    const bool all = status == "all";
    ReviewStatus st = ReviewStatus::open;
    if (!all && !status.empty()) {
      auto parsed = review_status_from_name(status);
      if (!parsed) return error(400, "unknown status '" + std::string(status) + "'");
      st = *parsed;
    }
    std::optional<Pos> p;
    if (!pos.empty() && !(p = pos_from_name(pos))) return error(400, "unknown pos '" + std::string(pos) + "'");
    std::optional<ReviewReason> r;
    if (!reason.empty() && !(r = review_reason_from_name(reason))) return error(400, "unknown reason '" + std::string(reason) + "'");
    if (limit == 0 || limit > 1000) return error(400, "limit must be in 1..1000");

    nlohmann::json items = nlohmann::json::array();
    std::size_t total = 0;
    for (const auto& item : queue_.items()) {
      if ((!all && item.status != st) || (p && item.synset.pos != *p) || (r && item.reason != *r)) continue;
      if (total++ < offset || items.size() >= limit) continue;
      items.push_back(item_view(item));
    }
    return {200, {{"items", items}, {"total", total}, {"offset", offset}, {"limit", limit}}};
  }

  /// Body: {"decision": "accept"|"reject"|"edit", "newText"?, "author"?, "rule"?, "rationale"?}.
  /// The author may come from the body or the X-Author header.
  ApiResponse post_decision(std::string_view id_text, std::string_view body, std::string_view author_header) {
    std::uint64_t id = 0;
    auto [ptr, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
    if (ec != std::errc{} || ptr != id_text.data() + id_text.size()) return error(400, "bad item id");

    nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return error(400, "body must be a JSON object");
    Decision d;
    auto kind = j.value("decision", "");
    if (kind == "accept") d = Decision::accept();
    else if (kind == "reject") d = Decision::reject();
    else if (kind == "edit") d = Decision::edit(j.value("newText", ""));
    else return error(400, "decision must be accept, reject or edit");
    if (d.kind == Decision::Kind::edit && d.new_text.empty()) return error(400, "edit needs newText");
    if (j.contains("rule")) {
      auto rule = j.value("rule", "");
      if (!is_edit_rule(rule)) return error(400, "unknown rule '" + rule + "'");
      d.rule = rule;
    }
    d.rationale = j.value("rationale", "");
    std::string author = j.value("author", std::string(author_header));
    if (author.empty()) return error(400, "author is required");

    std::unique_lock lock(mutex_);
    auto* item = queue_.find(id);
    if (!item) return error(404, "review item " + std::to_string(id) + " not found");
    if (item->status != ReviewStatus::open) {
      auto r = error(409, "review item " + std::to_string(id) + " is already " + std::string(review_status_name(item->status)));
      r.body["item"] = to_json(*item);
      return r;
    }
    ReviewItem draft = *item;
    CorrectionEdit edit = log_.log().seal(decide(draft, d, author));
    BilingualLexicon next;
    try {
      next = apply_edits(lexicon_, std::vector<CorrectionEdit>{edit});
    } catch (const ApplyError& e) {
      return error(422, e.what());
    }
    const auto& sealed = log_.append(std::move(edit));
    lexicon_ = std::move(next);
    draft.edit = sealed.id;
    *item = draft;
    io::write_file_atomic(queue_path_, queue_.serialize());
    return {200, {{"edit", to_json(sealed)}, {"item", to_json(draft)}}};
  }

  ApiResponse get_synset(std::string_view id_text) const {
    auto id = SynsetId::parse(id_text);
    if (!id) return error(400, "bad synset id '" + std::string(id_text) + "'");
    std::shared_lock lock(mutex_);
    const auto* s = db_.find(*id);
    if (!s) return error(404, "synset " + id->str() + " not found");
    nlohmann::json candidates = nlohmann::json::array();
    for (const auto& c : lexicon_.candidates(*id)) candidates.push_back(to_json(c));
    nlohmann::json history = nlohmann::json::array();
    for (const auto& e : log_.log().records())
      if (e.synset == *id) history.push_back(to_json(e));
    nlohmann::json body{{"synset", synset_view(*s)}, {"candidates", candidates}, {"history", history}};
    if (auto it = outcomes_.find(*id); it != outcomes_.end()) body["magnitudes"] = it->second.magnitudes;
    return {200, body};
  }

  ApiResponse get_stats() const {
    std::shared_lock lock(mutex_);
    nlohmann::json queue{{"total", queue_.size()}};
    for (auto s : {ReviewStatus::open, ReviewStatus::accepted, ReviewStatus::rejected, ReviewStatus::edited})
      queue[std::string(review_status_name(s))] = queue_.count(s);
    nlohmann::json screening = nullptr;
    if (!outcomes_.empty()) {
      std::vector<ScreeningOutcome> all;
      for (const auto& [id, o] : outcomes_) all.push_back(o);
      screening = to_json(summarize(all));
    }
    return {200,
            {{"coverage", to_json(coverage_report(db_, lexicon_))},
             {"screening", screening},
             {"queue", queue},
             {"edits", log_.log().size()},
             {"edit_tip", log_.log().tip_id()}}};
  }

  /// English lemma lookup in the index plus Chinese lemma lookup in the lexicon.
  ApiResponse search(std::string_view lemma) const {
    if (io::trim(lemma).empty()) return error(400, "lemma is required");
    std::shared_lock lock(mutex_);
    nlohmann::json english = nlohmann::json::array();
    for (auto p : kAllPos)
      for (auto id : db_.lookup(lemma, p)) english.push_back(synset_view(db_.at(id)));
    nlohmann::json chinese = nlohmann::json::array();
    for (const auto& [id, list] : lexicon_.entries)
      for (const auto& c : list)
        if (c.text == lemma) {
          auto view = db_.contains(id) ? synset_view(db_.at(id)) : nlohmann::json{{"id", id.str()}};
          view["status"] = std::string(status_name(c.status));
          chinese.push_back(view);
        }
    return {200, {{"lemma", lemma}, {"english", english}, {"chinese", chinese}}};
  }

  /// Registers the /api routes, plus a static mount for a browser client when `static_dir`
  /// is non-empty.
  void mount(httplib::Server& server, const std::filesystem::path& static_dir = {}) {
    auto send = [](httplib::Response& res, const ApiResponse& r) {
      res.status = r.status;
      res.set_content(r.body.dump(), "application/json");
    };
    auto param = [](const httplib::Request& req, const char* key) { return req.has_param(key) ? req.get_param_value(key) : std::string{}; };
    auto number = [&](const httplib::Request& req, const char* key, std::size_t fallback) -> std::optional<std::size_t> {
      auto v = param(req, key);
      if (v.empty()) return fallback;
      std::size_t n = 0;
      auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
      if (ec != std::errc{} || ptr != v.data() + v.size()) return std::nullopt;
      return n;
    };
    server.Get("/api/queue", [=, this](const httplib::Request& req, httplib::Response& res) {
      auto offset = number(req, "offset", 0);
      auto limit = number(req, "limit", 50);
      if (!offset || !limit) return send(res, error(400, "offset and limit must be non-negative integers"));
      send(res, get_queue(param(req, "status"), param(req, "pos"), param(req, "reason"), *offset, *limit));
    });
    server.Post(R"(/api/queue/([^/]+)/decision)", [=, this](const httplib::Request& req, httplib::Response& res) {
      send(res, post_decision(req.matches[1].str(), req.body, req.get_header_value("X-Author")));
    });
    server.Get(R"(/api/synset/([^/]+))", [=, this](const httplib::Request& req, httplib::Response& res) {
      send(res, get_synset(req.matches[1].str()));
    });
    server.Get("/api/stats", [=, this](const httplib::Request&, httplib::Response& res) { send(res, get_stats()); });
    server.Get("/api/search", [=, this](const httplib::Request& req, httplib::Response& res) { send(res, search(param(req, "lemma"))); });
    server.set_exception_handler([=](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string what = "internal error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      send(res, error(500, what));
    });
    if (!static_dir.empty() && !server.set_mount_point("/", static_dir.string()))
      throw ConfigError("static directory not found: " + static_dir.string());
  }

  BilingualLexicon lexicon() const {
    std::shared_lock lock(mutex_);
    return lexicon_;
  }
  const EditLog& edits() const { return log_.log(); }

 private:
  static ApiResponse error(int status, const std::string& message) { return {status, {{"error", message}}}; }

  std::vector<CorrectionEdit> pending_edits(const std::string& applied_tip) const {
    const auto& all = log_.log().records();
    if (applied_tip.empty()) return all;
    for (std::size_t i = 0; i < all.size(); ++i)
      if (all[i].id == applied_tip) return {all.begin() + static_cast<std::ptrdiff_t>(i) + 1, all.end()};
    throw ConsistencyError("lexicon snapshot was produced by edit " + applied_tip + ", which is not in the edit log", {applied_tip});
  }

  nlohmann::json synset_view(const Synset& s) const {
    return {{"id", s.id.str()}, {"pos", std::string(pos_file_suffix(s.id.pos))}, {"lemmas", s.lemmas()}, {"gloss", s.gloss},
            {"chinese", lexicon_.active_lemmas(s.id)}};
  }

  nlohmann::json item_view(const ReviewItem& item) const {
    auto j = to_json(item);
    if (const auto* s = db_.find(item.synset)) {
      j["english"] = s->lemmas();
      j["gloss"] = s->gloss;
    }
    j["magnitude"] = nullptr;
    if (auto it = outcomes_.find(item.synset); it != outcomes_.end())
      if (auto m = it->second.magnitudes.find(item.candidate); m != it->second.magnitudes.end()) j["magnitude"] = m->second;
    return j;
  }

  WordnetDb db_;
  EditLogFile log_;
  std::filesystem::path queue_path_;
  ReviewQueue queue_;
  BilingualLexicon lexicon_;
  std::map<SynsetId, ScreeningOutcome> outcomes_;
  mutable std::shared_mutex mutex_;
};

}  // namespace mcw

#endif  // MCW_SERVICE_HPP

#ifndef MCW_EDIT_LOG_HPP
#define MCW_EDIT_LOG_HPP

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <fcntl.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "mcw/digest.hpp"
#include "mcw/errors.hpp"
#include "mcw/io.hpp"
#include "mcw/synset_id.hpp"

namespace mcw {

enum class EditKind { delete_lemma, replace_lemma, add_lemma, retag_note, normalize };

inline std::string_view edit_kind_name(EditKind k) {
  switch (k) {
    case EditKind::delete_lemma: return "delete-lemma";
    case EditKind::replace_lemma: return "replace-lemma";
    case EditKind::add_lemma: return "add-lemma";
    case EditKind::retag_note: return "retag-note";
    case EditKind::normalize: return "normalize";
  }
  return "";
}

inline std::optional<EditKind> edit_kind_from_name(std::string_view s) {
  for (auto k : {EditKind::delete_lemma, EditKind::replace_lemma, EditKind::add_lemma, EditKind::retag_note, EditKind::normalize})
    if (edit_kind_name(k) == s) return k;
  return std::nullopt;
}

inline constexpr std::string_view kEditRules[] = {
    "wrong-meaning",   "pos-mismatch",       "polysemy-split",   "unify-place-language", "unify-affix",
    "unify-single-sense", "unify-name-dots", "unify-multiword", "hard-translation",      "other"};

inline bool is_edit_rule(std::string_view r) {
  for (auto k : kEditRules)
    if (k == r) return true;
  return false;
}

/// One auditable human decision on a candidate lemma.
struct CorrectionEdit {
  std::string id;
  SynsetId synset;
  EditKind kind = EditKind::retag_note;
  std::string old_text;
  std::string new_text;
  std::string author;
  std::string timestamp;
  std::string rationale;
  std::string rule = "other";
  std::string prev;  // digest of the previous record
  std::string hash;  // digest of this record without the hash field

  friend bool operator==(const CorrectionEdit&, const CorrectionEdit&) = default;
};

inline std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline nlohmann::json edit_body_json(const CorrectionEdit& e) {
  return {{"id", e.id},
          {"synset", e.synset.str()},
          {"kind", std::string(edit_kind_name(e.kind))},
          {"old", e.old_text},
          {"new", e.new_text},
          {"author", e.author},
          {"timestamp", e.timestamp},
          {"rationale", e.rationale},
          {"rule", e.rule},
          {"prev", e.prev}};
}

inline std::string edit_digest(const CorrectionEdit& e) { return sha256_hex(edit_body_json(e).dump()); }

inline nlohmann::json to_json(const CorrectionEdit& e) {
  auto j = edit_body_json(e);
  j["hash"] = e.hash;
  return j;
}

/// Canonical record line (sorted keys, compact, no newline).
inline std::string edit_record_line(const CorrectionEdit& e) { return to_json(e).dump(); }

inline CorrectionEdit edit_from_json(const nlohmann::json& j) {
  CorrectionEdit e;
  e.id = j.at("id").get<std::string>();
  e.synset = SynsetId::parse_or_throw(j.at("synset").get<std::string>());
  auto kind = edit_kind_from_name(j.at("kind").get<std::string>());
  if (!kind) throw Error("unknown edit kind");
  e.kind = *kind;
  e.old_text = j.at("old").get<std::string>();
  e.new_text = j.at("new").get<std::string>();
  e.author = j.at("author").get<std::string>();
  e.timestamp = j.at("timestamp").get<std::string>();
  e.rationale = j.at("rationale").get<std::string>();
  e.rule = j.at("rule").get<std::string>();
  if (!is_edit_rule(e.rule)) throw Error("unknown edit rule '" + e.rule + "'");
  e.prev = j.at("prev").get<std::string>();
  e.hash = j.at("hash").get<std::string>();
  return e;
}

inline const std::string kGenesisDigest(64, '0');

/// Append-only, hash-chained sequence of edits. Log order is authoritative.
class EditLog {
 public:
  const std::vector<CorrectionEdit>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::string& tip_hash() const { return records_.empty() ? kGenesisDigest : records_.back().hash; }
  std::string tip_id() const { return records_.empty() ? std::string{} : records_.back().id; }

  /// Seals `edit` into the chain (assigns id when blank, prev and hash) and returns it.
  const CorrectionEdit& append(CorrectionEdit edit) { return push_sealed(seal(std::move(edit))); }

  /// The record `edit` would become if appended now; the log is unchanged.
  CorrectionEdit seal(CorrectionEdit edit) const {
    if (edit.id.empty()) edit.id = next_id();
    if (ids_.count(edit.id)) throw Error("duplicate edit id " + edit.id);
    if (!is_edit_rule(edit.rule)) throw Error("unknown edit rule '" + edit.rule + "'");
    if (edit.timestamp.empty()) edit.timestamp = utc_timestamp();
    edit.prev = tip_hash();
    edit.hash = edit_digest(edit);
    return edit;
  }

  /// Appends a record produced by seal() against the current tip.
  const CorrectionEdit& push_sealed(CorrectionEdit sealed) {
    if (sealed.prev != tip_hash() || sealed.hash != edit_digest(sealed)) throw Error("record was not sealed against the current tip");
    ids_.insert(sealed.id);
    records_.push_back(std::move(sealed));
    return records_.back();
  }

  std::string next_id() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "e%06zu", records_.size() + 1);
    return buf;
  }

  std::string serialize() const {
    std::string out;
    for (const auto& r : records_) out += edit_record_line(r) + '\n';
    return out;
  }

  /// Parses and verifies a log: every line must be the canonical rendering of its record,
  /// every digest must recompute, and every prev must equal the previous digest.
  static EditLog parse(std::string_view content) {
    EditLog log;
    std::size_t index = 0;
    if (!content.empty() && content.back() != '\n') throw AuditError("truncated final record", count_lines(content) - 1);
    io::for_each_line(content, [&](const io::Line& line) {
      CorrectionEdit e;
      try {
        e = edit_from_json(nlohmann::json::parse(line.text));
      } catch (const std::exception& ex) {
        throw AuditError(std::string("unreadable record: ") + ex.what(), index);
      }
      if (edit_record_line(e) != line.text) throw AuditError("record is not in canonical form", index);
      if (e.prev != log.tip_hash()) throw AuditError("hash chain broken", index);
      if (edit_digest(e) != e.hash) throw AuditError("record digest mismatch", index);
      if (log.ids_.count(e.id)) throw AuditError("duplicate edit id " + e.id, index);
      log.ids_.insert(e.id);
      log.records_.push_back(std::move(e));
      ++index;
    });
    return log;
  }

  static bool verify(std::string_view content) {
    try {
      parse(content);
      return true;
    } catch (const AuditError&) {
      return false;
    }
  }

 private:
  static std::size_t count_lines(std::string_view s) {
    std::size_t n = 1;
    for (char c : s) n += c == '\n';
    return n;
  }

  std::vector<CorrectionEdit> records_;
  std::set<std::string> ids_;
};

/// An edit log persisted as a JSONL file, one fsync'd line per append.
///
/// Opening recovers from a crash mid-append: a trailing record without its newline is cut
/// off the file before the chain is verified, so a partial record is never visible.
class EditLogFile {
 public:
  explicit EditLogFile(std::filesystem::path path) : path_(std::move(path)) {
    std::string content;
    if (std::filesystem::exists(path_)) content = io::read_file(path_);
    auto last_newline = content.rfind('\n');
    std::size_t keep = last_newline == std::string::npos ? 0 : last_newline + 1;
    if (keep != content.size()) {
      recovered_bytes_ = content.size() - keep;
      content.resize(keep);
      std::filesystem::resize_file(path_, keep);
    }
    log_ = EditLog::parse(content);
  }

  const EditLog& log() const { return log_; }
  std::size_t recovered_bytes() const { return recovered_bytes_; }

  const CorrectionEdit& append(CorrectionEdit edit) {
    CorrectionEdit sealed = log_.seal(std::move(edit));
    std::string line = edit_record_line(sealed) + '\n';
    int fd = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT, 0644);
    if (fd < 0) throw ConfigError("cannot open edit log " + path_.string());
    const off_t before = ::lseek(fd, 0, SEEK_END);
    std::size_t written = 0;
    while (written < line.size()) {
      auto n = ::write(fd, line.data() + written, line.size() - written);
      if (n <= 0) {
        [[maybe_unused]] int rc = before >= 0 ? ::ftruncate(fd, before) : 0;
        ::close(fd);
        throw Error("write to edit log failed");
      }
      written += static_cast<std::size_t>(n);
    }
    ::fsync(fd);
    ::close(fd);
    return log_.push_sealed(std::move(sealed));
  }

 private:
  std::filesystem::path path_;
  EditLog log_;
  std::size_t recovered_bytes_ = 0;
};

}  // namespace mcw

#endif  // MCW_EDIT_LOG_HPP

#ifndef MCW_REVIEW_HPP
#define MCW_REVIEW_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcw/corrections.hpp"
#include "mcw/edit_log.hpp"
#include "mcw/errors.hpp"
#include "mcw/io.hpp"
#include "mcw/screening.hpp"
#include "mcw/synset_id.hpp"

namespace mcw {

enum class ReviewReason { screening_deferred, rule_flagged, conflict };
enum class ReviewStatus { open, accepted, rejected, edited };

inline std::string_view review_reason_name(ReviewReason r) {
  switch (r) {
    case ReviewReason::screening_deferred: return "screening-deferred";
    case ReviewReason::rule_flagged: return "rule-flagged";
    case ReviewReason::conflict: return "conflict";
  }
  return "";
}

inline std::optional<ReviewReason> review_reason_from_name(std::string_view s) {
  for (auto r : {ReviewReason::screening_deferred, ReviewReason::rule_flagged, ReviewReason::conflict})
    if (review_reason_name(r) == s) return r;
  return std::nullopt;
}

inline std::string_view review_status_name(ReviewStatus s) {
  switch (s) {
    case ReviewStatus::open: return "open";
    case ReviewStatus::accepted: return "accepted";
    case ReviewStatus::rejected: return "rejected";
    case ReviewStatus::edited: return "edited";
  }
  return "";
}

inline std::optional<ReviewStatus> review_status_from_name(std::string_view s) {
  for (auto r : {ReviewStatus::open, ReviewStatus::accepted, ReviewStatus::rejected, ReviewStatus::edited})
    if (review_status_name(r) == s) return r;
  return std::nullopt;
}

struct ReviewItem {
  std::uint64_t id = 0;
  SynsetId synset;
  std::string candidate;
  ReviewReason reason = ReviewReason::screening_deferred;
  ReviewStatus status = ReviewStatus::open;
  std::string note;  // e.g. the matched hard-translation pattern
  std::string edit;  // id of the deciding edit once closed

  friend bool operator==(const ReviewItem&, const ReviewItem&) = default;
};

struct Decision {
  enum class Kind { accept, reject, edit };
  Kind kind = Kind::accept;
  std::string new_text;                // for edit
  std::optional<std::string> rule;     // overrides the default rule tag
  std::string rationale;

  static Decision accept() { return {Kind::accept, {}, {}, {}}; }
  static Decision reject() { return {Kind::reject, {}, {}, {}}; }
  static Decision edit(std::string text) { return {Kind::edit, std::move(text), {}, {}}; }
};

/// Closes `item` and returns the unsealed edit that records the decision:
/// accept -> retag-note, reject -> delete-lemma, edit -> replace-lemma.
inline CorrectionEdit decide(ReviewItem& item, const Decision& decision, const std::string& author) {
  if (item.status != ReviewStatus::open)
    throw ConflictError("review item " + std::to_string(item.id) + " is already " + std::string(review_status_name(item.status)));
  if (decision.kind == Decision::Kind::edit && decision.new_text.empty()) throw Error("edit decision needs new text");
  CorrectionEdit e;
  e.synset = item.synset;
  e.old_text = item.candidate;
  e.author = author;
  e.rationale = decision.rationale;
  std::string fallback_rule = item.reason == ReviewReason::rule_flagged ? "hard-translation" : "wrong-meaning";
  switch (decision.kind) {
    case Decision::Kind::accept:
      e.kind = EditKind::retag_note;
      e.rule = decision.rule.value_or("other");
      item.status = ReviewStatus::accepted;
      break;
    case Decision::Kind::reject:
      e.kind = EditKind::delete_lemma;
      e.rule = decision.rule.value_or(fallback_rule);
      item.status = ReviewStatus::rejected;
      break;
    case Decision::Kind::edit:
      e.kind = EditKind::replace_lemma;
      e.new_text = decision.new_text;
      e.rule = decision.rule.value_or(fallback_rule);
      item.status = ReviewStatus::edited;
      break;
  }
  return e;
}

inline nlohmann::json to_json(const ReviewItem& r) {
  return {{"id", r.id},
          {"synset", r.synset.str()},
          {"candidate", r.candidate},
          {"reason", std::string(review_reason_name(r.reason))},
          {"status", std::string(review_status_name(r.status))},
          {"note", r.note},
          {"edit", r.edit}};
}

inline ReviewItem review_item_from_json(const nlohmann::json& j) {
  ReviewItem r;
  r.id = j.at("id").get<std::uint64_t>();
  r.synset = SynsetId::parse_or_throw(j.at("synset").get<std::string>());
  r.candidate = j.at("candidate").get<std::string>();
  auto reason = review_reason_from_name(j.at("reason").get<std::string>());
  auto status = review_status_from_name(j.value("status", "open"));
  if (!reason || !status) throw Error("bad review item reason or status");
  r.reason = *reason;
  r.status = *status;
  r.note = j.value("note", "");
  r.edit = j.value("edit", "");
  return r;
}

/// Review items keyed by id, in insertion order.
class ReviewQueue {
 public:
  const std::vector<ReviewItem>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }

  /// Adds an open item unless one for the same (synset, candidate, reason) is already open.
  const ReviewItem& add(SynsetId synset, std::string candidate, ReviewReason reason, std::string note = {}) {
    for (const auto& it : items_)
      if (it.synset == synset && it.candidate == candidate && it.reason == reason && it.status == ReviewStatus::open) return it;
    ReviewItem item;
    item.id = next_id_++;
    item.synset = synset;
    item.candidate = std::move(candidate);
    item.reason = reason;
    item.note = std::move(note);
    items_.push_back(std::move(item));
    return items_.back();
  }

  ReviewItem* find(std::uint64_t id) {
    auto it = std::find_if(items_.begin(), items_.end(), [&](const ReviewItem& r) { return r.id == id; });
    return it == items_.end() ? nullptr : &*it;
  }
  const ReviewItem* find(std::uint64_t id) const { return const_cast<ReviewQueue*>(this)->find(id); }

  std::vector<ReviewItem> with_status(std::optional<ReviewStatus> status, std::size_t offset = 0, std::size_t limit = SIZE_MAX) const {
    std::vector<ReviewItem> out;
    std::size_t skipped = 0;
    for (const auto& it : items_) {
      if (status && it.status != *status) continue;
      if (skipped++ < offset) continue;
      if (out.size() >= limit) break;
      out.push_back(it);
    }
    return out;
  }

  std::size_t count(std::optional<ReviewStatus> status) const {
    return static_cast<std::size_t>(
        std::count_if(items_.begin(), items_.end(), [&](const ReviewItem& r) { return !status || r.status == *status; }));
  }

  /// Decides item `id` and appends the resulting edit to `log` (any type with append()).
  template <typename Log>
  const CorrectionEdit& decide(std::uint64_t id, const Decision& decision, const std::string& author, Log& log) {
    auto* item = find(id);
    if (!item) throw NotFoundError("review item " + std::to_string(id) + " not found");
    ReviewItem draft = *item;
    auto edit = mcw::decide(draft, decision, author);
    const auto& sealed = log.append(std::move(edit));
    draft.edit = sealed.id;
    *item = std::move(draft);
    return sealed;
  }

  std::string serialize() const {
    std::string out;
    for (const auto& it : items_) out += to_json(it).dump() + '\n';
    return out;
  }

  static ReviewQueue parse(std::string_view content, std::string_view name = "queue") {
    ReviewQueue q;
    io::for_each_line(content, [&](const io::Line& line) {
      if (io::trim(line.text).empty()) return;
      ReviewItem item;
      try {
        item = review_item_from_json(nlohmann::json::parse(line.text));
      } catch (const std::exception& e) {
        throw ParseError(std::string(name) + ": " + e.what(), line.number, line.offset);
      }
      if (q.find(item.id)) throw ParseError(std::string(name) + ": duplicate item id", line.number, line.offset);
      q.next_id_ = std::max(q.next_id_, item.id + 1);
      q.items_.push_back(std::move(item));
    });
    return q;
  }

  static ReviewQueue load(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) return {};
    return parse(io::read_file(path), path.string());
  }

 private:
  std::vector<ReviewItem> items_;
  std::uint64_t next_id_ = 1;
};

/// Queues the candidates screening could not judge and the kept candidates that look like
/// hard translations. Returns the number of items added.
inline std::size_t enqueue_screening(ReviewQueue& queue, const std::vector<ScreeningOutcome>& outcomes,
                                     const std::vector<HardTranslationPattern>& patterns) {
  std::size_t before = queue.size();
  for (const auto& o : outcomes) {
    for (const auto& t : o.deferred) queue.add(o.synset, t, ReviewReason::screening_deferred);
    for (const auto& t : o.kept)
      if (auto f = flag_hard_translation(t, patterns); f.flagged) queue.add(o.synset, t, ReviewReason::rule_flagged, f.pattern);
  }
  return queue.size() - before;
}

}  // namespace mcw

#endif  // MCW_REVIEW_HPP

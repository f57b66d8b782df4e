#ifndef MCW_CORRECTIONS_HPP
#define MCW_CORRECTIONS_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcw/edit_log.hpp"
#include "mcw/errors.hpp"
#include "mcw/lexicon.hpp"
#include "mcw/utf8.hpp"

namespace mcw {

namespace detail {

inline CandidateLemma& require_live(BilingualLexicon& lex, const CorrectionEdit& e, const std::string& text) {
  auto* c = lex.find(e.synset, text);
  if (!c) throw ApplyError(e.id, "lemma '" + text + "' not found in " + e.synset.str());
  if (c->status == Status::human_dropped) throw ApplyError(e.id, "lemma '" + text + "' in " + e.synset.str() + " was already deleted");
  return *c;
}

inline void keep_by_human(BilingualLexicon& lex, const CorrectionEdit& e, const std::string& text, const std::string& source) {
  if (auto* c = lex.find(e.synset, text)) {
    c->status = Status::human_kept;
    c->edit = e.id;
  } else {
    lex.add({e.synset, text, source, Status::human_kept, e.id});
  }
}

inline void apply_one(BilingualLexicon& lex, const CorrectionEdit& e) {
  switch (e.kind) {
    case EditKind::delete_lemma: {
      auto& c = require_live(lex, e, e.old_text);
      c.status = Status::human_dropped;
      c.edit = e.id;
      break;
    }
    case EditKind::replace_lemma:
    case EditKind::normalize: {
      if (e.new_text.empty()) throw ApplyError(e.id, "replacement text is empty");
      auto& c = require_live(lex, e, e.old_text);
      if (e.new_text == e.old_text) {
        c.status = Status::human_kept;
        c.edit = e.id;
        break;
      }
      c.status = Status::human_dropped;
      c.edit = e.id;
      keep_by_human(lex, e, e.new_text, "manual");
      break;
    }
    case EditKind::add_lemma: {
      if (e.new_text.empty()) throw ApplyError(e.id, "added text is empty");
      if (auto* c = lex.find(e.synset, e.new_text); c && is_active(c->status) && is_human(c->status))
        throw ApplyError(e.id, "lemma '" + e.new_text + "' already kept in " + e.synset.str());
      keep_by_human(lex, e, e.new_text, "manual");
      break;
    }
    case EditKind::retag_note: {
      auto* c = lex.find(e.synset, e.old_text);
      if (!c) throw ApplyError(e.id, "lemma '" + e.old_text + "' not found in " + e.synset.str());
      c->status = Status::human_kept;
      c->edit = e.id;
      break;
    }
  }
}

}  // namespace detail

/// Replays `edits` in order over a copy of `lex`. Any failing edit rejects the whole log.
inline BilingualLexicon apply_edits(const BilingualLexicon& lex, const std::vector<CorrectionEdit>& edits) {
  BilingualLexicon out = lex;
  for (const auto& e : edits) detail::apply_one(out, e);
  if (!edits.empty()) out.meta.edit_tip = edits.back().id;
  return out;
}

inline BilingualLexicon apply_edits(const BilingualLexicon& lex, const EditLog& log) { return apply_edits(lex, log.records()); }

/// Human-* candidates whose edit id is missing from the log or names a different target.
inline std::vector<std::string> audit_provenance(const BilingualLexicon& lex, const EditLog& log) {
  std::map<std::string, const CorrectionEdit*> by_id;
  for (const auto& e : log.records()) by_id[e.id] = &e;
  std::vector<std::string> problems;
  for (const auto& [id, list] : lex.entries)
    for (const auto& c : list) {
      if (!is_human(c.status)) continue;
      auto it = by_id.find(c.edit);
      if (it == by_id.end()) {
        problems.push_back(id.str() + " " + c.text + ": no edit '" + c.edit + "'");
        continue;
      }
      const auto& e = *it->second;
      if (e.synset != id || (e.old_text != c.text && e.new_text != c.text))
        problems.push_back(id.str() + " " + c.text + ": edit " + e.id + " targets another lemma");
    }
  return problems;
}

struct NameNormalization {
  std::string text;
  bool noop = false;
};

/// Joins the given/family segments of a transliterated person name with U+00B7.
inline NameNormalization normalize_name(std::string_view lemma, const std::vector<std::string>& segments) {
  static const std::string kDot = "·";
  if (segments.size() < 2) return {std::string(lemma), true};
  std::string bare(lemma), joined, concatenated;
  for (std::size_t p; (p = bare.find(kDot)) != std::string::npos;) bare.erase(p, kDot.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].empty()) throw Error("empty name segment");
    if (i) joined += kDot;
    joined += segments[i];
    concatenated += segments[i];
  }
  if (concatenated != bare) throw Error("segments do not spell the lemma '" + std::string(lemma) + "'");
  return {joined, false};
}

/// Inserts '+' before verb 于 / after verb 使, before adverb 地 and adjective 的. Idempotent.
inline std::string mark_affix(std::string_view lemma, Pos pos) {
  std::string s(lemma);
  auto mark_suffix = [&](std::string_view suffix) {
    if (s.size() > suffix.size() && utf8::ends_with(s, suffix) && s.compare(s.size() - suffix.size() - 1, 1, "+") != 0)
      s.insert(s.size() - suffix.size(), "+");
  };
  switch (pos) {
    case Pos::verb: {
      constexpr std::string_view kShi = "使";
      if (s.size() > kShi.size() && utf8::starts_with(s, kShi) && s[kShi.size()] != '+') s.insert(kShi.size(), "+");
      mark_suffix("于");
      break;
    }
    case Pos::adv: mark_suffix("地"); break;
    case Pos::adj: mark_suffix("的"); break;
    case Pos::noun: break;
  }
  return s;
}

/// A surface heuristic for translations that are phrases rather than words.
struct HardTranslationPattern {
  std::string name;
  std::size_t min_length = 0;  // code points
  std::string interior;        // must occur strictly inside the lemma when non-empty
};

inline std::vector<HardTranslationPattern> default_hard_translation_patterns() {
  return {{"verb+noun+verb+noun", 7, ""}, {"noun+noun", 5, "的"}};
}

struct HardTranslationFlag {
  bool flagged = false;
  std::string pattern;
};

inline HardTranslationFlag flag_hard_translation(std::string_view lemma, const std::vector<HardTranslationPattern>& patterns) {
  auto chars = utf8::chars(lemma);
  for (const auto& p : patterns) {
    if (chars.size() < p.min_length) continue;
    if (!p.interior.empty()) {
      auto at = lemma.find(p.interior);
      bool inside = false;
      while (at != std::string_view::npos) {
        if (at > 0 && at + p.interior.size() < lemma.size()) {
          inside = true;
          break;
        }
        at = lemma.find(p.interior, at + 1);
      }
      if (!inside) continue;
    }
    return {true, p.name};
  }
  return {};
}

}  // namespace mcw

#endif  // MCW_CORRECTIONS_HPP

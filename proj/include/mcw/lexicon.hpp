#ifndef MCW_LEXICON_HPP
#define MCW_LEXICON_HPP

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcw/errors.hpp"
#include "mcw/io.hpp"
#include "mcw/synset_id.hpp"
#include "mcw/wordnet.hpp"

namespace mcw {

/// Lifecycle of a candidate. Statuses only move forward: proposed -> machine-* -> human-*.
enum class Status { proposed, machine_kept, machine_dropped, human_kept, human_dropped };

inline std::string_view status_name(Status s) {
  switch (s) {
    case Status::proposed: return "proposed";
    case Status::machine_kept: return "machine-kept";
    case Status::machine_dropped: return "machine-dropped";
    case Status::human_kept: return "human-kept";
    case Status::human_dropped: return "human-dropped";
  }
  return "";
}

inline std::optional<Status> status_from_name(std::string_view name) {
  for (auto s : {Status::proposed, Status::machine_kept, Status::machine_dropped, Status::human_kept, Status::human_dropped})
    if (status_name(s) == name) return s;
  return std::nullopt;
}

inline int status_stage(Status s) {
  switch (s) {
    case Status::proposed: return 0;
    case Status::machine_kept:
    case Status::machine_dropped: return 1;
    default: return 2;
  }
}

inline bool is_human(Status s) { return status_stage(s) == 2; }
inline bool is_active(Status s) { return s != Status::machine_dropped && s != Status::human_dropped; }
inline bool can_transition(Status from, Status to) { return status_stage(to) >= status_stage(from); }

struct CandidateLemma {
  SynsetId synset;
  std::string text;
  std::string source;
  Status status = Status::proposed;
  std::string edit;  // id of the edit that set a human-* status

  friend bool operator==(const CandidateLemma&, const CandidateLemma&) = default;
};

struct LexiconMeta {
  std::string version;                    // target wordnet version
  std::string label;                      // e.g. "sew", "dict", "mcw"
  std::vector<std::string> dictionaries;  // dictionary source labels
  std::vector<std::string> inputs;        // labels of merged lexicons
  std::string run;                        // run id of the producing pipeline step
  std::string edit_tip;                   // id of the last applied edit

  friend bool operator==(const LexiconMeta&, const LexiconMeta&) = default;
};

/// Chinese candidate lemmas per synset. (synset, text) pairs are unique.
struct BilingualLexicon {
  LexiconMeta meta;
  std::map<SynsetId, std::vector<CandidateLemma>> entries;

  /// Adds a candidate; returns false (and changes nothing) when (synset, text) exists.
  bool add(CandidateLemma c) {
    auto& list = entries[c.synset];
    if (std::any_of(list.begin(), list.end(), [&](const CandidateLemma& x) { return x.text == c.text; })) return false;
    list.push_back(std::move(c));
    return true;
  }

  CandidateLemma* find(SynsetId id, std::string_view text) {
    auto it = entries.find(id);
    if (it == entries.end()) return nullptr;
    for (auto& c : it->second)
      if (c.text == text) return &c;
    return nullptr;
  }

  const CandidateLemma* find(SynsetId id, std::string_view text) const {
    return const_cast<BilingualLexicon*>(this)->find(id, text);
  }

  const std::vector<CandidateLemma>& candidates(SynsetId id) const {
    static const std::vector<CandidateLemma> kEmpty;
    auto it = entries.find(id);
    return it == entries.end() ? kEmpty : it->second;
  }

  /// Texts of candidates that are not dropped, in insertion order.
  std::vector<std::string> active_lemmas(SynsetId id) const {
    std::vector<std::string> out;
    for (const auto& c : candidates(id))
      if (is_active(c.status)) out.push_back(c.text);
    return out;
  }

  std::size_t candidate_count() const {
    std::size_t n = 0;
    for (const auto& [id, list] : entries) n += list.size();
    return n;
  }

  std::size_t active_count() const {
    std::size_t n = 0;
    for (const auto& [id, list] : entries)
      for (const auto& c : list) n += is_active(c.status) ? 1 : 0;
    return n;
  }

  /// Synsets with at least one active candidate.
  std::size_t concept_count() const {
    std::size_t n = 0;
    for (const auto& [id, list] : entries)
      n += std::any_of(list.begin(), list.end(), [](const CandidateLemma& c) { return is_active(c.status); }) ? 1 : 0;
    return n;
  }

  /// Active Chinese lemma -> synsets carrying it.
  std::unordered_map<std::string, std::vector<SynsetId>> reverse_index() const {
    std::unordered_map<std::string, std::vector<SynsetId>> out;
    for (const auto& [id, list] : entries)
      for (const auto& c : list)
        if (is_active(c.status)) out[c.text].push_back(id);
    return out;
  }

  /// Ids that do not resolve against `db`.
  std::vector<SynsetId> unresolved(const WordnetDb& db) const {
    std::vector<SynsetId> out;
    for (const auto& [id, list] : entries)
      if (!list.empty() && !db.contains(id)) out.push_back(id);
    return out;
  }

  /// Drops synsets whose candidate list is empty.
  void compact() {
    std::erase_if(entries, [](const auto& kv) { return kv.second.empty(); });
  }

  friend bool operator==(const BilingualLexicon&, const BilingualLexicon&) = default;
};

inline nlohmann::json to_json(const LexiconMeta& m) {
  return {{"version", m.version}, {"label", m.label},       {"dictionaries", m.dictionaries},
          {"inputs", m.inputs},   {"run", m.run},           {"edit_tip", m.edit_tip}};
}

inline nlohmann::json to_json(const CandidateLemma& c) {
  return {{"synset", c.synset.str()}, {"text", c.text}, {"source", c.source},
          {"status", std::string(status_name(c.status))}, {"edit", c.edit}};
}

/// JSON-lines: a leading {"meta": ...} record, then one candidate per line in synset order.
inline std::string write_lexicon_jsonl(const BilingualLexicon& lex) {
  std::string out = nlohmann::json{{"meta", to_json(lex.meta)}}.dump() + '\n';
  for (const auto& [id, list] : lex.entries)
    for (const auto& c : list) out += to_json(c).dump() + '\n';
  return out;
}

inline BilingualLexicon parse_lexicon_jsonl(std::string_view content, std::string_view name = "lexicon") {
  io::require_utf8(content, std::string(name));
  BilingualLexicon lex;
  io::for_each_line(content, [&](const io::Line& line) {
    if (io::trim(line.text).empty()) return;
    auto fail = [&](const std::string& msg) -> void { throw ParseError(std::string(name) + ": " + msg, line.number, line.offset); };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line.text);
    } catch (const nlohmann::json::exception& e) {
      fail(e.what());
    }
    try {
      if (j.contains("meta")) {
        const auto& m = j.at("meta");
        lex.meta.version = m.value("version", "");
        lex.meta.label = m.value("label", "");
        lex.meta.dictionaries = m.value("dictionaries", std::vector<std::string>{});
        lex.meta.inputs = m.value("inputs", std::vector<std::string>{});
        lex.meta.run = m.value("run", "");
        lex.meta.edit_tip = m.value("edit_tip", "");
        return;
      }
      CandidateLemma c;
      auto id = SynsetId::parse(j.at("synset").get<std::string>());
      if (!id) fail("bad synset id");
      c.synset = *id;
      c.text = j.at("text").get<std::string>();
      if (c.text.empty() || c.text.find_first_of("\t\n") != std::string::npos) fail("bad lemma text");
      c.source = j.value("source", "");
      auto st = status_from_name(j.value("status", "proposed"));
      if (!st) fail("unknown status");
      c.status = *st;
      c.edit = j.value("edit", "");
      if (!lex.add(std::move(c))) fail("duplicate (synset, text) pair");
    } catch (const nlohmann::json::exception& e) {
      fail(e.what());
    }
  });
  return lex;
}

inline BilingualLexicon load_lexicon(const std::filesystem::path& path) {
  return parse_lexicon_jsonl(io::read_file(path), path.string());
}

}  // namespace mcw

#endif  // MCW_LEXICON_HPP

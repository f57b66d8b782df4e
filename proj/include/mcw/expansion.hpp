#ifndef MCW_EXPANSION_HPP
#define MCW_EXPANSION_HPP

#include <algorithm>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mcw/errors.hpp"
#include "mcw/io.hpp"
#include "mcw/lexicon.hpp"
#include "mcw/version_map.hpp"
#include "mcw/wordnet.hpp"

namespace mcw {

struct DictionaryEntry {
  std::string english;
  std::vector<std::string> chinese;
  std::string source;
};

/// Parses `english<TAB>chinese1|chinese2|...<TAB>source` lines ('#' comments allowed).
inline std::vector<DictionaryEntry> parse_dictionary_tsv(std::string_view content, std::string_view name = "dictionary") {
  io::require_utf8(content, std::string(name));
  std::vector<DictionaryEntry> out;
  io::for_each_line(content, [&](const io::Line& line) {
    if (io::trim(line.text).empty() || line.text.front() == '#') return;
    auto fail = [&](const std::string& msg) { throw ParseError(std::string(name) + ": " + msg, line.number, line.offset); };
    auto fields = io::split(line.text, '\t');
    if (fields.size() != 3) fail("expected 3 tab-separated fields");
    DictionaryEntry e;
    e.english = std::string(io::trim(fields[0]));
    if (e.english.empty()) fail("empty English lemma");
    for (auto zh : io::split(fields[1], '|')) {
      zh = io::trim(zh);
      if (zh.empty()) fail("empty Chinese lemma");
      e.chinese.emplace_back(zh);
    }
    e.source = std::string(io::trim(fields[2]));
    if (e.source.empty()) fail("empty source label");
    out.push_back(std::move(e));
  });
  return out;
}

inline std::vector<DictionaryEntry> load_dictionary(const std::filesystem::path& path) {
  return parse_dictionary_tsv(io::read_file(path), path.string());
}

/// An English lemma that no dictionary translates.
struct TranslationMiss {
  SynsetId synset;
  std::string english;
};

struct TranslationResult {
  BilingualLexicon lexicon;
  std::vector<TranslationMiss> misses;
};

/// Proposes, for every synset, the deduplicated union of the translations of its English
/// lemmas across all dictionaries. Lookup is exact first, then with underscores as spaces.
inline TranslationResult translate_synsets(const WordnetDb& db, const std::vector<DictionaryEntry>& dicts) {
  std::unordered_map<std::string, std::vector<const DictionaryEntry*>> by_english;
  TranslationResult result;
  result.lexicon.meta.version = db.version();
  result.lexicon.meta.label = "dict";
  for (const auto& e : dicts) {
    by_english[e.english].push_back(&e);
    auto& sources = result.lexicon.meta.dictionaries;
    if (std::find(sources.begin(), sources.end(), e.source) == sources.end()) sources.push_back(e.source);
  }
  for (const auto& [id, synset] : db.synsets()) {
    for (const auto& word : synset.words) {
      auto it = by_english.find(word.lemma);
      if (it == by_english.end()) {
        std::string spaced = word.lemma;
        std::replace(spaced.begin(), spaced.end(), '_', ' ');
        it = by_english.find(spaced);
      }
      if (it == by_english.end()) {
        result.misses.push_back({id, word.lemma});
        continue;
      }
      for (const auto* entry : it->second)
        for (const auto& zh : entry->chinese) result.lexicon.add({id, zh, entry->source, Status::proposed, {}});
    }
  }
  result.lexicon.compact();
  return result;
}

inline std::string write_miss_report(const std::vector<TranslationMiss>& misses) {
  std::string out;
  for (const auto& m : misses) out += m.synset.str() + '\t' + m.english + '\n';
  return out;
}

enum class Category { uncategorized = 0, one = 1, two = 2, three = 3 };

struct SynsetCategory {
  SynsetId synset;
  Category category = Category::uncategorized;
  friend bool operator==(const SynsetCategory&, const SynsetCategory&) = default;
};

/// Category from counts alone: 1 = one English lemma and one candidate, 2 = one English
/// lemma and several candidates, 3 = several of both. Anything else is uncategorized.
inline Category categorize(std::size_t english_lemmas, std::size_t chinese_candidates) {
  if (english_lemmas == 1 && chinese_candidates == 1) return Category::one;
  if (english_lemmas == 1 && chinese_candidates >= 2) return Category::two;
  if (english_lemmas >= 2 && chinese_candidates >= 2) return Category::three;
  return Category::uncategorized;
}

/// One entry per synset of `db` with at least one active candidate, in id order.
inline std::vector<SynsetCategory> classify(const WordnetDb& db, const BilingualLexicon& lex) {
  std::vector<SynsetCategory> out;
  for (const auto& [id, list] : lex.entries) {
    const auto* synset = db.find(id);
    if (!synset) continue;
    auto active = lex.active_lemmas(id);
    if (active.empty()) continue;
    out.push_back({id, categorize(synset->words.size(), active.size())});
  }
  return out;
}

inline std::string write_category_report(const std::vector<SynsetCategory>& cats) {
  std::string out;
  for (const auto& c : cats)
    out += c.synset.str() + '\t' +
           (c.category == Category::uncategorized ? std::string("uncategorized") : std::to_string(static_cast<int>(c.category))) +
           '\n';
  return out;
}

struct RemapResult {
  BilingualLexicon lexicon;
  std::vector<SynsetId> unmapped;  // source synsets dropped for lack of a mapping
};

/// Moves a lexicon onto another wordnet version. Unmapped synsets are reported, not guessed.
inline RemapResult remap_lexicon(const BilingualLexicon& lex, const VersionMap& map) {
  if (!lex.meta.version.empty() && !map.from_version.empty() && lex.meta.version != map.from_version)
    throw VersionMismatchError("lexicon is for wordnet " + lex.meta.version + ", map starts at " + map.from_version);
  RemapResult r;
  r.lexicon.meta = lex.meta;
  r.lexicon.meta.version = map.to_version;
  for (const auto& [id, list] : lex.entries) {
    auto to = map.map(id);
    if (!to) {
      r.unmapped.push_back(id);
      continue;
    }
    for (auto c : list) {
      c.synset = *to;
      r.lexicon.add(std::move(c));
    }
  }
  r.lexicon.compact();
  return r;
}

/// Per-synset union of candidates. On a (synset, text) collision the base entry wins.
inline BilingualLexicon merge(const BilingualLexicon& base, const BilingualLexicon& added) {
  if (!base.meta.version.empty() && !added.meta.version.empty() && base.meta.version != added.meta.version)
    throw VersionMismatchError("cannot merge lexicons for wordnet " + base.meta.version + " and " + added.meta.version);
  BilingualLexicon out = base;
  if (out.meta.version.empty()) out.meta.version = added.meta.version;
  for (const auto& [id, list] : added.entries)
    for (const auto& c : list) out.add(c);
  out.compact();
  if (!added.entries.empty() && added.meta.label != base.meta.label) {
    auto& inputs = out.meta.inputs;
    if (!added.meta.label.empty() && std::find(inputs.begin(), inputs.end(), added.meta.label) == inputs.end())
      inputs.push_back(added.meta.label);
    for (const auto& d : added.meta.dictionaries)
      if (std::find(out.meta.dictionaries.begin(), out.meta.dictionaries.end(), d) == out.meta.dictionaries.end())
        out.meta.dictionaries.push_back(d);
  }
  return out;
}

}  // namespace mcw

#endif  // MCW_EXPANSION_HPP

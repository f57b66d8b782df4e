#ifndef MCW_WORDNET_HPP
#define MCW_WORDNET_HPP

// Princeton WordNet 3.0 database files (data.<pos>, index.<pos>), see wndb(5WN).

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mcw/errors.hpp"
#include "mcw/io.hpp"
#include "mcw/synset_id.hpp"

namespace mcw {

enum class RelationKind { hypernym, instance_hypernym, hyponym, instance_hyponym, other };

inline RelationKind relation_kind(std::string_view symbol) {
  if (symbol == "@") return RelationKind::hypernym;
  if (symbol == "@i") return RelationKind::instance_hypernym;
  if (symbol == "~") return RelationKind::hyponym;
  if (symbol == "~i") return RelationKind::instance_hyponym;
  return RelationKind::other;
}

struct Word {
  std::string lemma;       // underscores preserved, original case
  int lex_id = 0;
  std::string marker;      // adjective syntactic marker: "", "(a)", "(p)" or "(ip)"

  friend bool operator==(const Word&, const Word&) = default;
};

struct Relation {
  std::string symbol;
  SynsetId target;
  char target_letter = 'n';         // letter as written in the file ('s' for satellites)
  std::uint16_t source_target = 0;  // 0 for semantic pointers

  RelationKind kind() const { return relation_kind(symbol); }
  friend bool operator==(const Relation&, const Relation&) = default;
};

struct Frame {
  int number = 0;
  int word = 0;  // 0 = applies to all words
  friend bool operator==(const Frame&, const Frame&) = default;
};

struct Synset {
  SynsetId id;
  int lex_filenum = 0;
  char ss_type = 'n';
  std::vector<Word> words;
  std::vector<Relation> relations;
  std::vector<Frame> frames;
  std::string gloss;

  std::vector<std::string> lemmas() const {
    std::vector<std::string> out;
    out.reserve(words.size());
    for (const auto& w : words) out.push_back(w.lemma);
    return out;
  }

  friend bool operator==(const Synset&, const Synset&) = default;
};

struct IndexEntry {
  std::string lemma;
  Pos pos = Pos::noun;
  std::vector<std::string> ptr_symbols;
  int tagsense_cnt = 0;
  std::vector<SynsetId> synsets;  // sense order

  friend bool operator==(const IndexEntry&, const IndexEntry&) = default;
};

/// Index key form: ASCII-lowercased, spaces as underscores.
inline std::string normalize_index_lemma(std::string_view lemma) {
  std::string out(lemma);
  for (auto& c : out) {
    if (c == ' ') c = '_';
    else if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

namespace detail {

class FieldReader {
 public:
  FieldReader(const io::Line& line, std::string_view file) : line_(line), file_(file) {}

  std::string_view next(const char* what) {
    while (pos_ < line_.text.size() && line_.text[pos_] == ' ') ++pos_;
    if (pos_ >= line_.text.size()) fail(std::string("missing ") + what);
    std::size_t start = pos_;
    while (pos_ < line_.text.size() && line_.text[pos_] != ' ') ++pos_;
    last_ = start;
    return line_.text.substr(start, pos_ - start);
  }

  template <typename T>
  T number(const char* what, int base = 10) {
    auto tok = next(what);
    T value{};
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value, base);
    if (ec != std::errc{} || p != tok.data() + tok.size()) fail(std::string("bad ") + what + " '" + std::string(tok) + "'");
    return value;
  }

  std::string_view rest() const { return pos_ < line_.text.size() ? line_.text.substr(pos_) : std::string_view{}; }
  bool at_end() const { return io::trim(rest()).empty(); }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(std::string(file_) + ": " + msg, line_.number, line_.offset + last_);
  }

 private:
  const io::Line& line_;
  std::string_view file_;
  std::size_t pos_ = 0;
  std::size_t last_ = 0;
};

inline bool is_header_line(std::string_view text) { return text.size() >= 2 && text[0] == ' ' && text[1] == ' '; }

inline std::string format_fixed(unsigned value, int width, bool hex) {
  char buf[16];
  std::snprintf(buf, sizeof buf, hex ? "%0*x" : "%0*u", width, value);
  return buf;
}

inline bool is_taxonomy_edge(RelationKind k) {
  return k == RelationKind::hypernym || k == RelationKind::instance_hypernym || k == RelationKind::hyponym ||
         k == RelationKind::instance_hyponym;
}

inline RelationKind inverse_kind(RelationKind k) {
  switch (k) {
    case RelationKind::hypernym: return RelationKind::hyponym;
    case RelationKind::hyponym: return RelationKind::hypernym;
    case RelationKind::instance_hypernym: return RelationKind::instance_hyponym;
    case RelationKind::instance_hyponym: return RelationKind::instance_hypernym;
    default: return RelationKind::other;
  }
}

}  // namespace detail

/// Parses one data.<pos> file. Same-POS relation targets must resolve inside the file;
/// cross-POS targets are resolved by WordnetDb.
inline std::vector<Synset> parse_data_file(std::string_view content, Pos pos, std::string_view name = "data") {
  io::require_utf8(content, std::string(name));
  std::vector<Synset> out;
  io::for_each_line(content, [&](const io::Line& line) {
    if (line.text.empty() || detail::is_header_line(line.text)) return;
    detail::FieldReader r(line, name);
    Synset s;
    auto off_tok = r.next("synset offset");
    if (off_tok.size() != 8) r.fail("synset offset must have 8 digits");
    std::uint32_t off = 0;
    auto [p, ec] = std::from_chars(off_tok.data(), off_tok.data() + 8, off);
    if (ec != std::errc{} || p != off_tok.data() + 8) r.fail("bad synset offset");
    s.lex_filenum = r.number<int>("lex_filenum");
    auto ss = r.next("ss_type");
    if (ss.size() != 1 || pos_from_letter(ss[0]) != pos) r.fail("ss_type '" + std::string(ss) + "' does not match file");
    s.ss_type = ss[0];
    s.id = SynsetId{off, pos};
    int w_cnt = r.number<int>("w_cnt", 16);
    if (w_cnt < 1) r.fail("synset has no words");
    for (int i = 0; i < w_cnt; ++i) {
      Word w;
      std::string_view lemma = r.next("word");
      if (pos == Pos::adj && lemma.back() == ')') {
        auto open = lemma.rfind('(');
        if (open != std::string_view::npos && open > 0) {
          w.marker = std::string(lemma.substr(open));
          lemma = lemma.substr(0, open);
        }
      }
      w.lemma = std::string(lemma);
      w.lex_id = r.number<int>("lex_id", 16);
      s.words.push_back(std::move(w));
    }
    int p_cnt = r.number<int>("p_cnt");
    for (int i = 0; i < p_cnt; ++i) {
      Relation rel;
      rel.symbol = std::string(r.next("pointer symbol"));
      auto toff = r.number<std::uint32_t>("pointer offset");
      auto tpos = r.next("pointer pos");
      if (tpos.size() != 1 || !pos_from_letter(tpos[0])) r.fail("bad pointer pos '" + std::string(tpos) + "'");
      rel.target_letter = tpos[0];
      rel.target = SynsetId{toff, *pos_from_letter(tpos[0])};
      rel.source_target = r.number<std::uint16_t>("source/target", 16);
      s.relations.push_back(std::move(rel));
    }
    auto tok = r.next("'|'");
    if (tok != "|") {
      if (pos != Pos::verb) r.fail("expected '|' before gloss");
      std::string_view f_tok = tok;
      int f_cnt = 0;
      auto [fp, fec] = std::from_chars(f_tok.data(), f_tok.data() + f_tok.size(), f_cnt);
      if (fec != std::errc{} || fp != f_tok.data() + f_tok.size()) r.fail("bad frame count");
      for (int i = 0; i < f_cnt; ++i) {
        if (r.next("'+'") != "+") r.fail("expected '+' before frame");
        Frame f;
        f.number = r.number<int>("frame number");
        f.word = r.number<int>("frame word", 16);
        s.frames.push_back(f);
      }
      if (r.next("'|'") != "|") r.fail("expected '|' before gloss");
    }
    s.gloss = std::string(io::trim(r.rest()));
    if (s.gloss.empty()) r.fail("empty gloss");
    out.push_back(std::move(s));
  });

  std::set<std::uint32_t> offsets;
  for (const auto& s : out) offsets.insert(s.id.offset);
  std::vector<std::string> unresolved;
  for (const auto& s : out)
    for (const auto& rel : s.relations)
      if (rel.target.pos == pos && !offsets.count(rel.target.offset)) unresolved.push_back(rel.target.str());
  if (!unresolved.empty()) {
    std::sort(unresolved.begin(), unresolved.end());
    unresolved.erase(std::unique(unresolved.begin(), unresolved.end()), unresolved.end());
    throw LinkError(std::move(unresolved));
  }
  return out;
}

/// Renders one synset in data-file line grammar (with the trailing two spaces PWN uses).
inline std::string serialize_synset(const Synset& s) {
  using detail::format_fixed;
  std::string line = format_fixed(s.id.offset, 8, false) + ' ' + format_fixed(s.lex_filenum, 2, false) + ' ' + s.ss_type +
                     ' ' + format_fixed(static_cast<unsigned>(s.words.size()), 2, true);
  for (const auto& w : s.words) line += ' ' + w.lemma + w.marker + ' ' + format_fixed(w.lex_id, 1, true);
  line += ' ' + format_fixed(static_cast<unsigned>(s.relations.size()), 3, false);
  for (const auto& r : s.relations)
    line += ' ' + r.symbol + ' ' + format_fixed(r.target.offset, 8, false) + ' ' + r.target_letter + ' ' +
            format_fixed(r.source_target, 4, true);
  if (!s.frames.empty()) {
    line += ' ' + format_fixed(static_cast<unsigned>(s.frames.size()), 2, false);
    for (const auto& f : s.frames) line += " + " + format_fixed(f.number, 2, false) + ' ' + format_fixed(f.word, 2, true);
  }
  line += " | " + s.gloss + "  ";
  return line;
}

inline std::string serialize_data_file(const std::vector<Synset>& synsets) {
  std::string out;
  for (const auto& s : synsets) out += serialize_synset(s) + '\n';
  return out;
}

inline std::vector<IndexEntry> parse_index_file(std::string_view content, Pos pos, std::string_view name = "index") {
  io::require_utf8(content, std::string(name));
  std::vector<IndexEntry> out;
  io::for_each_line(content, [&](const io::Line& line) {
    if (line.text.empty() || detail::is_header_line(line.text)) return;
    detail::FieldReader r(line, name);
    IndexEntry e;
    e.lemma = std::string(r.next("lemma"));
    auto p = r.next("pos");
    if (p.size() != 1 || pos_from_letter(p[0]) != pos) r.fail("pos '" + std::string(p) + "' does not match file");
    e.pos = pos;
    int synset_cnt = r.number<int>("synset_cnt");
    int p_cnt = r.number<int>("p_cnt");
    for (int i = 0; i < p_cnt; ++i) e.ptr_symbols.emplace_back(r.next("ptr_symbol"));
    int sense_cnt = r.number<int>("sense_cnt");
    if (sense_cnt != synset_cnt) r.fail("sense_cnt differs from synset_cnt");
    e.tagsense_cnt = r.number<int>("tagsense_cnt");
    for (int i = 0; i < synset_cnt; ++i) e.synsets.push_back(SynsetId{r.number<std::uint32_t>("synset_offset"), pos});
    if (!r.at_end()) r.fail("trailing fields");
    out.push_back(std::move(e));
  });
  return out;
}

inline std::string serialize_index_entry(const IndexEntry& e) {
  std::string line = e.lemma + ' ' + pos_letter(e.pos) + ' ' + std::to_string(e.synsets.size()) + ' ' +
                     std::to_string(e.ptr_symbols.size());
  for (const auto& s : e.ptr_symbols) line += ' ' + s;
  line += ' ' + std::to_string(e.synsets.size()) + ' ' + std::to_string(e.tagsense_cnt);
  for (const auto& id : e.synsets) line += ' ' + detail::format_fixed(id.offset, 8, false);
  return line + "  ";
}

/// Immutable, fully linked synset graph for one wordnet version.
class WordnetDb {
 public:
  using IndexKey = std::pair<std::string, Pos>;

  WordnetDb() = default;

  /// Links the synsets and derives the lemma index (senses ordered by offset).
  /// Throws LinkError for dangling targets and ConsistencyError for duplicate ids or
  /// hypernym/hyponym edges without their inverse.
  static WordnetDb from_synsets(std::string version, std::vector<Synset> synsets) {
    WordnetDb db;
    db.version_ = std::move(version);
    std::vector<std::string> dupes;
    for (auto& s : synsets) {
      auto id = s.id;
      if (!db.synsets_.emplace(id, std::move(s)).second) dupes.push_back(id.str());
    }
    if (!dupes.empty()) throw ConsistencyError("duplicate synset ids", dupes);

    std::set<std::string> unresolved;
    for (const auto& [id, s] : db.synsets_)
      for (const auto& rel : s.relations)
        if (!db.synsets_.count(rel.target)) unresolved.insert(rel.target.str());
    if (!unresolved.empty()) throw LinkError({unresolved.begin(), unresolved.end()});

    std::vector<std::string> one_way;
    for (const auto& [id, s] : db.synsets_) {
      for (const auto& rel : s.relations) {
        auto kind = rel.kind();
        if (!detail::is_taxonomy_edge(kind)) continue;
        const auto& other = db.synsets_.at(rel.target);
        bool found = std::any_of(other.relations.begin(), other.relations.end(), [&](const Relation& back) {
          return back.target == id && back.kind() == detail::inverse_kind(kind);
        });
        if (!found) one_way.push_back(id.str() + " " + rel.symbol + " " + rel.target.str());
      }
    }
    if (!one_way.empty()) throw ConsistencyError("hypernym/hyponym edges without inverse", one_way);

    for (const auto& [id, s] : db.synsets_) {
      ++db.counts_[static_cast<std::size_t>(id.pos)];
      for (const auto& w : s.words) {
        auto& entry = db.index_[{normalize_index_lemma(w.lemma), id.pos}];
        if (entry.synsets.empty()) {
          entry.lemma = normalize_index_lemma(w.lemma);
          entry.pos = id.pos;
        }
        if (std::find(entry.synsets.begin(), entry.synsets.end(), id) == entry.synsets.end()) entry.synsets.push_back(id);
      }
    }
    for (auto& [key, entry] : db.index_) {
      std::set<std::string> symbols;
      for (const auto& id : entry.synsets)
        for (const auto& rel : db.synsets_.at(id).relations) symbols.insert(rel.symbol);
      entry.ptr_symbols.assign(symbols.begin(), symbols.end());
    }
    return db;
  }

  const std::string& version() const { return version_; }
  const std::map<SynsetId, Synset>& synsets() const { return synsets_; }
  const std::map<IndexKey, IndexEntry>& index() const { return index_; }
  std::size_t size() const { return synsets_.size(); }
  std::size_t count(Pos p) const { return counts_[static_cast<std::size_t>(p)]; }

  bool contains(SynsetId id) const { return synsets_.count(id) != 0; }

  const Synset* find(SynsetId id) const {
    auto it = synsets_.find(id);
    return it == synsets_.end() ? nullptr : &it->second;
  }

  const Synset& at(SynsetId id) const {
    if (auto* s = find(id)) return *s;
    throw NotFoundError("synset not found: " + id.str());
  }

  /// Synsets containing `lemma` (case-insensitive, spaces or underscores) in sense order.
  std::vector<SynsetId> lookup(std::string_view lemma, Pos pos) const {
    auto it = index_.find({normalize_index_lemma(lemma), pos});
    return it == index_.end() ? std::vector<SynsetId>{} : it->second.synsets;
  }

  std::vector<SynsetId> lookup(std::string_view lemma) const {
    std::vector<SynsetId> out;
    for (auto p : kAllPos) {
      auto ids = lookup(lemma, p);
      out.insert(out.end(), ids.begin(), ids.end());
    }
    return out;
  }

  std::vector<Synset> synsets_of(Pos p) const {
    std::vector<Synset> out;
    for (const auto& [id, s] : synsets_)
      if (id.pos == p) out.push_back(s);
    return out;
  }

  /// Replaces the derived index with entries read from index files, after checking that
  /// both describe the same (lemma, pos) -> synset membership.
  void adopt_index(const std::vector<IndexEntry>& entries) {
    std::vector<std::string> offenders;
    std::map<IndexKey, IndexEntry> from_file;
    for (const auto& e : entries) {
      IndexKey key{normalize_index_lemma(e.lemma), e.pos};
      if (!from_file.emplace(key, e).second) offenders.push_back(e.lemma + "/" + pos_letter(e.pos) + " (duplicate)");
    }
    for (const auto& [key, e] : from_file) {
      auto it = index_.find(key);
      std::set<SynsetId> a(e.synsets.begin(), e.synsets.end());
      if (it == index_.end() || a != std::set<SynsetId>(it->second.synsets.begin(), it->second.synsets.end()) ||
          a.size() != e.synsets.size())
        offenders.push_back(e.lemma + "/" + pos_letter(e.pos));
    }
    for (const auto& [key, e] : index_)
      if (!from_file.count(key)) offenders.push_back(e.lemma + "/" + pos_letter(e.pos) + " (missing from index)");
    if (!offenders.empty()) throw ConsistencyError("index and data files disagree", offenders);
    index_ = std::move(from_file);
  }

  friend bool operator==(const WordnetDb&, const WordnetDb&) = default;

 private:
  std::string version_;
  std::map<SynsetId, Synset> synsets_;
  std::map<IndexKey, IndexEntry> index_;
  std::array<std::size_t, 4> counts_{};
};

/// Loads data.{noun,verb,adj,adv} and index.{noun,verb,adj,adv} from `dir`.
inline WordnetDb load_db(const std::filesystem::path& dir, std::string version = "3.0") {
  for (auto p : kAllPos)
    for (const char* kind : {"data.", "index."}) {
      auto path = dir / (std::string(kind) + std::string(pos_file_suffix(p)));
      if (!std::filesystem::is_regular_file(path)) throw ConfigError("missing wordnet file: " + path.string());
    }
  std::vector<Synset> all;
  std::vector<IndexEntry> index;
  for (auto p : kAllPos) {
    auto data_path = dir / ("data." + std::string(pos_file_suffix(p)));
    auto data = parse_data_file(io::read_file(data_path), p, data_path.string());
    all.insert(all.end(), std::make_move_iterator(data.begin()), std::make_move_iterator(data.end()));
    auto index_path = dir / ("index." + std::string(pos_file_suffix(p)));
    auto entries = parse_index_file(io::read_file(index_path), p, index_path.string());
    index.insert(index.end(), entries.begin(), entries.end());
  }
  auto db = WordnetDb::from_synsets(std::move(version), std::move(all));
  db.adopt_index(index);
  return db;
}

/// Writes the database back out in data/index grammar (no license header).
inline void write_db(const WordnetDb& db, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (auto p : kAllPos) {
    io::write_file_atomic(dir / ("data." + std::string(pos_file_suffix(p))), serialize_data_file(db.synsets_of(p)));
    std::string index;
    for (const auto& [key, e] : db.index())
      if (key.second == p) index += serialize_index_entry(e) + '\n';
    io::write_file_atomic(dir / ("index." + std::string(pos_file_suffix(p))), index);
  }
}

}  // namespace mcw

#endif  // MCW_WORDNET_HPP

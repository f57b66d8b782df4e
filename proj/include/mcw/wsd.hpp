#ifndef MCW_WSD_HPP
#define MCW_WSD_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcw/embedding.hpp"
#include "mcw/errors.hpp"
#include "mcw/io.hpp"
#include "mcw/lexicon.hpp"
#include "mcw/relatedness.hpp"
#include "mcw/tokenize.hpp"
#include "mcw/utf8.hpp"
#include "mcw/wordnet.hpp"

namespace mcw {

/// One sentence with an ambiguous target word. The span is in code points, [begin, end).
struct WsdInstance {
  std::string id;
  std::string sentence;
  std::string target;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string word_type;
  std::string gold;
};

struct Sense {
  std::string id;  // synset id or a task-native sense key
  std::string english_lemma;
  std::string gloss;
};

struct SenseInventory {
  std::map<std::string, std::vector<Sense>> words;

  const std::vector<Sense>* find(std::string_view word) const {
    auto it = words.find(std::string(word));
    return it == words.end() ? nullptr : &it->second;
  }
};

/// `word<TAB>sense-id<TAB>english-lemma<TAB>gloss`; sense order is file order.
inline SenseInventory parse_inventory_tsv(std::string_view content, std::string_view name = "inventory") {
  io::require_utf8(content, std::string(name));
  SenseInventory inv;
  io::for_each_line(content, [&](const io::Line& line) {
    if (io::trim(line.text).empty() || line.text.front() == '#') return;
    auto fail = [&](const std::string& msg) { throw ParseError(std::string(name) + ": " + msg, line.number, line.offset); };
    auto f = io::split(line.text, '\t');
    if (f.size() != 4) fail("expected word<TAB>sense-id<TAB>english-lemma<TAB>gloss");
    std::string word(io::trim(f[0]));
    Sense s{std::string(io::trim(f[1])), std::string(io::trim(f[2])), std::string(io::trim(f[3]))};
    if (word.empty() || s.id.empty()) fail("empty word or sense id");
    auto& list = inv.words[word];
    for (const auto& other : list)
      if (other.id == s.id) fail("duplicate sense id " + s.id + " for " + word);
    list.push_back(std::move(s));
  });
  return inv;
}

inline SenseInventory load_inventory(const std::filesystem::path& path) { return parse_inventory_tsv(io::read_file(path), path.string()); }

inline WsdInstance wsd_instance_from_json(const nlohmann::json& j) {
  WsdInstance in;
  in.id = j.at("id").get<std::string>();
  in.sentence = j.at("sentence").get<std::string>();
  in.target = j.at("target").get<std::string>();
  const auto& span = j.at("span");
  in.begin = span.at(0).get<std::size_t>();
  in.end = span.at(1).get<std::size_t>();
  in.word_type = j.value("word_type", in.target);
  in.gold = j.at("gold").get<std::string>();
  return in;
}

inline nlohmann::json to_json(const WsdInstance& in) {
  return {{"id", in.id}, {"sentence", in.sentence}, {"target", in.target}, {"span", {in.begin, in.end}}, {"word_type", in.word_type}, {"gold", in.gold}};
}

/// Checks that the span selects the target inside the sentence.
inline void validate_span(const WsdInstance& in) {
  auto b = utf8::byte_offset(in.sentence, in.begin);
  auto e = utf8::byte_offset(in.sentence, in.end);
  if (in.begin >= in.end || e > in.sentence.size() || in.sentence.substr(b, e - b) != in.target)
    throw Error("instance " + in.id + ": span does not select the target '" + in.target + "'");
}

inline std::vector<WsdInstance> parse_instances_jsonl(std::string_view content, std::string_view name = "instances") {
  io::require_utf8(content, std::string(name));
  std::vector<WsdInstance> out;
  io::for_each_line(content, [&](const io::Line& line) {
    if (io::trim(line.text).empty()) return;
    try {
      out.push_back(wsd_instance_from_json(nlohmann::json::parse(line.text)));
      validate_span(out.back());
    } catch (const std::exception& e) {
      throw ParseError(std::string(name) + ": " + e.what(), line.number, line.offset);
    }
  });
  return out;
}

inline std::vector<WsdInstance> load_instances(const std::filesystem::path& path) {
  return parse_instances_jsonl(io::read_file(path), path.string());
}

/// SemEval-2007 lexical-sample layout: <lexelt item="W"> blocks holding
/// <instance id="I"><context>... <head>W</head> ...</context></instance>, plus a key file
/// with "item instance-id sense-id" lines. Instances without a key are skipped.
inline std::vector<WsdInstance> import_semeval2007(std::string_view xml, std::string_view key) {
  std::map<std::string, std::string> gold;
  io::for_each_line(key, [&](const io::Line& line) {
    std::vector<std::string_view> f;
    for (auto part : io::split(io::trim(line.text), ' '))
      if (!part.empty()) f.push_back(part);
    if (f.size() >= 3) gold[std::string(f[1])] = std::string(f[2]);
  });
  std::vector<WsdInstance> out;
  static const std::regex lexelt_re(R"re(<lexelt\s+item="([^"]*)"[^>]*>([\s\S]*?)</lexelt>)re");
  static const std::regex instance_re(R"re(<instance\s+id="([^"]*)"[^>]*>[\s\S]*?<context>([\s\S]*?)</context>)re");
  static const std::regex head_re(R"re(<head>([\s\S]*?)</head>)re");
  static const std::regex tag_re(R"re(<[^>]*>)re");
  std::string doc(xml);
  for (std::sregex_iterator lx(doc.begin(), doc.end(), lexelt_re), end; lx != end; ++lx) {
    std::string item = (*lx)[1];
    std::string body = (*lx)[2];
    for (std::sregex_iterator ins(body.begin(), body.end(), instance_re); ins != end; ++ins) {
      std::string id = (*ins)[1];
      auto g = gold.find(id);
      if (g == gold.end()) continue;
      std::string context = (*ins)[2];
      std::smatch head;
      if (!std::regex_search(context, head, head_re)) throw Error("semeval instance " + id + " has no <head>");
      std::string before = std::regex_replace(context.substr(0, static_cast<std::size_t>(head.position(0))), tag_re, "");
      std::string target = head[1];
      std::string after = std::regex_replace(context.substr(static_cast<std::size_t>(head.position(0) + head.length(0))), tag_re, "");
      before = std::string(io::trim(before));
      after = std::string(io::trim(after));
      WsdInstance in;
      in.id = id;
      in.sentence = before + target + after;
      in.target = target;
      in.begin = utf8::length(before);
      in.end = in.begin + utf8::length(target);
      in.word_type = item;
      in.gold = g->second;
      out.push_back(std::move(in));
    }
  }
  return out;
}

/// Segmentation with stopwords removed.
inline std::vector<std::string> preprocess(std::string_view sentence, const Tokenizer& tokenize, const Stoplist& stop) {
  if (io::trim(sentence).empty()) throw Error("preprocess: empty sentence");
  return remove_stopwords(tokenize(sentence), stop);
}

/// Segmenter whose vocabulary is every lexicon lemma, inventory word and stopword.
inline GreedyTokenizer sentence_tokenizer(const BilingualLexicon& lex, const SenseInventory& inventory, const Stoplist& stop) {
  GreedyTokenizer t;
  for (const auto& [id, list] : lex.entries)
    for (const auto& c : list) t.add(c.text);
  for (const auto& [word, senses] : inventory.words) t.add(word);
  for (const auto& word : stop) t.add(word);
  return t;
}

/// Up to `width` tokens on each side of `target`, target excluded.
inline std::vector<std::string> context_window(const std::vector<std::string>& tokens, std::size_t target, std::size_t width = 2) {
  if (target >= tokens.size()) throw Error("context_window: target position out of range");
  std::vector<std::string> out;
  std::size_t from = target >= width ? target - width : 0;
  std::size_t to = std::min(tokens.size(), target + width + 1);
  for (std::size_t i = from; i < to; ++i)
    if (i != target) out.push_back(tokens[i]);
  return out;
}

enum class SenseRepresentation { gloss, chinese_lemmas };

struct WsdConfig {
  std::size_t window = 2;
  SenseRepresentation representation = SenseRepresentation::gloss;
};

struct Prediction {
  std::string sense;
  bool fallback = false;  // empty context or no scorable sense: first listed sense
  std::vector<std::optional<double>> scores;
};

/// Gloss-vector word sense disambiguation.
///
/// Context words are mapped to synsets through the bilingual lexicon; the English glosses
/// of those synsets are embedded (mean of token vectors) and summed into a context vector.
/// The sense whose gloss vector has the highest cosine with it wins; ties and empty contexts
/// go to the first listed sense.
class WsdEngine {
 public:
  WsdEngine(const WordnetDb& db, const BilingualLexicon& lex, const EmbeddingTable& table, Tokenizer sentence_tokenizer,
            Stoplist sentence_stop, Tokenizer gloss_tokenizer, Stoplist gloss_stop, WsdConfig cfg = {})
      : db_(db),
        lex_(lex),
        table_(table),
        senses_(lex.reverse_index()),
        sentence_tokenizer_(std::move(sentence_tokenizer)),
        sentence_stop_(std::move(sentence_stop)),
        gloss_tokenizer_(std::move(gloss_tokenizer)),
        gloss_stop_(std::move(gloss_stop)),
        cfg_(cfg) {}

  const WsdConfig& config() const { return cfg_; }

  /// Tokens of the sentence with the target forced to a single token; sets `target_pos`.
  std::vector<std::string> tokens_around(const WsdInstance& in, std::size_t& target_pos) const {
    validate_span(in);
    auto b = utf8::byte_offset(in.sentence, in.begin);
    auto e = utf8::byte_offset(in.sentence, in.end);
    std::string_view s = in.sentence;
    auto left = remove_stopwords(sentence_tokenizer_(s.substr(0, b)), sentence_stop_);
    auto right = remove_stopwords(sentence_tokenizer_(s.substr(e)), sentence_stop_);
    target_pos = left.size();
    left.push_back(in.target);
    left.insert(left.end(), right.begin(), right.end());
    return left;
  }

  std::optional<Vector> synset_gloss_vector(SynsetId id) const {
    const auto* s = db_.find(id);
    if (!s) return std::nullopt;
    return gloss_vector(s->gloss, table_, gloss_tokenizer_, gloss_stop_);
  }

  /// Sum of the gloss vectors of every synset of every window token; nullopt when nothing
  /// contributes.
  std::optional<Vector> context_vector(const std::vector<std::string>& window) const {
    std::vector<Vector> parts;
    for (const auto& tok : window) {
      auto it = senses_.find(tok);
      if (it == senses_.end()) continue;
      for (auto id : it->second)
        if (auto v = synset_gloss_vector(id)) parts.push_back(std::move(*v));
    }
    if (parts.empty()) return std::nullopt;
    return compose(parts, ComposeMode::sum);
  }

  std::optional<Vector> sense_vector(const Sense& sense) const {
    if (cfg_.representation == SenseRepresentation::chinese_lemmas) {
      auto id = SynsetId::parse(sense.id);
      if (!id) return std::nullopt;
      std::vector<std::span<const double>> found;
      for (const auto& text : lex_.active_lemmas(*id))
        if (auto v = table_.find(text)) found.push_back(*v);
      if (found.empty()) return std::nullopt;
      return compose(found, ComposeMode::mean);
    }
    if (!io::trim(sense.gloss).empty()) return gloss_vector(sense.gloss, table_, gloss_tokenizer_, gloss_stop_);
    if (auto id = SynsetId::parse(sense.id)) return synset_gloss_vector(*id);
    return std::nullopt;
  }

  Prediction disambiguate(const WsdInstance& in, const SenseInventory& inventory) const {
    const auto* senses = inventory.find(in.target);
    if (!senses || senses->empty()) throw NotFoundError("target '" + in.target + "' is not in the sense inventory");
    Prediction p;
    p.sense = senses->front().id;
    std::size_t target_pos = 0;
    auto tokens = tokens_around(in, target_pos);
    auto ctx = context_vector(context_window(tokens, target_pos, cfg_.window));
    if (!ctx) {
      p.fallback = true;
      p.scores.assign(senses->size(), std::nullopt);
      return p;
    }
    std::optional<double> best;
    for (const auto& sense : *senses) {
      auto v = sense_vector(sense);
      if (!v) {
        p.scores.push_back(std::nullopt);
        continue;
      }
      double c = cosine(*ctx, *v).value;
      p.scores.push_back(c);
      if (!best || c > *best) {
        best = c;
        p.sense = sense.id;
      }
    }
    p.fallback = !best.has_value();
    return p;
  }

 private:
  const WordnetDb& db_;
  const BilingualLexicon& lex_;
  const EmbeddingTable& table_;
  std::unordered_map<std::string, std::vector<SynsetId>> senses_;
  Tokenizer sentence_tokenizer_;
  Stoplist sentence_stop_;
  Tokenizer gloss_tokenizer_;
  Stoplist gloss_stop_;
  WsdConfig cfg_;
};

struct InstanceOutcome {
  std::string instance;
  std::string word_type;
  std::string predicted;
  std::string gold;
  bool correct = false;
  bool fallback = false;
};

struct TypeCounts {
  std::size_t correct = 0;  // m_i
  std::size_t total = 0;    // n_i
  friend bool operator==(const TypeCounts&, const TypeCounts&) = default;
};

struct WsdResult {
  std::vector<InstanceOutcome> instances;
  std::map<std::string, TypeCounts> per_type;
  double micro = 0.0;  // sum m_i / sum n_i
  double macro = 0.0;  // mean of m_i / n_i over word types
  std::size_t word_types = 0;
  std::vector<std::string> warnings;
};

/// Micro and macro precision from per-word-type counts. Types with n_i = 0 are excluded.
inline WsdResult score_counts(const std::map<std::string, TypeCounts>& counts) {
  WsdResult r;
  std::size_t m = 0, n = 0;
  double sum_p = 0.0;
  for (const auto& [type, c] : counts) {
    if (c.total == 0) {
      r.warnings.push_back("word type '" + type + "' has no instances; excluded");
      continue;
    }
    if (c.correct > c.total) throw Error("word type '" + type + "' has more correct than total instances");
    r.per_type[type] = c;
    m += c.correct;
    n += c.total;
    sum_p += static_cast<double>(c.correct) / static_cast<double>(c.total);
  }
  r.word_types = r.per_type.size();
  r.micro = n ? static_cast<double>(m) / static_cast<double>(n) : 0.0;
  r.macro = r.word_types ? sum_p / static_cast<double>(r.word_types) : 0.0;
  return r;
}

inline WsdResult score(const std::vector<InstanceOutcome>& outcomes) {
  std::map<std::string, TypeCounts> counts;
  for (const auto& o : outcomes) {
    if (o.word_type.empty()) throw Error("instance " + o.instance + " has no word type");
    auto& c = counts[o.word_type];
    ++c.total;
    c.correct += o.correct ? 1 : 0;
  }
  auto r = score_counts(counts);
  r.instances = outcomes;
  return r;
}

inline std::vector<InstanceOutcome> run_wsd(const WsdEngine& engine, const std::vector<WsdInstance>& instances, const SenseInventory& inventory) {
  std::vector<InstanceOutcome> out;
  for (const auto& in : instances) {
    auto p = engine.disambiguate(in, inventory);
    out.push_back({in.id, in.word_type, p.sense, in.gold, p.sense == in.gold, p.fallback});
  }
  return out;
}

/// First listed sense for every instance (the comparator labelled "first-sense baseline").
inline std::vector<InstanceOutcome> first_sense_baseline(const std::vector<WsdInstance>& instances, const SenseInventory& inventory) {
  std::vector<InstanceOutcome> out;
  for (const auto& in : instances) {
    const auto* senses = inventory.find(in.target);
    if (!senses || senses->empty()) throw NotFoundError("target '" + in.target + "' is not in the sense inventory");
    out.push_back({in.id, in.word_type, senses->front().id, in.gold, senses->front().id == in.gold, true});
  }
  return out;
}

inline nlohmann::json to_json(const WsdResult& r) {
  nlohmann::json types = nlohmann::json::object();
  for (const auto& [t, c] : r.per_type) types[t] = {{"m", c.correct}, {"n", c.total}};
  nlohmann::json inst = nlohmann::json::array();
  for (const auto& o : r.instances)
    inst.push_back({{"id", o.instance}, {"word_type", o.word_type}, {"predicted", o.predicted}, {"gold", o.gold}, {"correct", o.correct},
                    {"fallback", o.fallback}});
  return {{"micro", r.micro}, {"macro", r.macro}, {"word_types", r.word_types}, {"per_type", types}, {"instances", inst}, {"warnings", r.warnings}};
}

inline std::string format_wsd_table(const WsdResult& r) {
  std::string out = "word_type\tm\tn\tp\n";
  char buf[64];
  for (const auto& [t, c] : r.per_type) {
    std::snprintf(buf, sizeof buf, "\t%zu\t%zu\t%.4f\n", c.correct, c.total, static_cast<double>(c.correct) / static_cast<double>(c.total));
    out += t + buf;
  }
  std::snprintf(buf, sizeof buf, "micro\t%.4f\nmacro\t%.4f\n", r.micro, r.macro);
  return out + buf;
}

}  // namespace mcw

#endif  // MCW_WSD_HPP

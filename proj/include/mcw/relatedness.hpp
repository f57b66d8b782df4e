#ifndef MCW_RELATEDNESS_HPP
#define MCW_RELATEDNESS_HPP

#include <array>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcw/embedding.hpp"
#include "mcw/errors.hpp"
#include "mcw/io.hpp"
#include "mcw/lexicon.hpp"
#include "mcw/tokenize.hpp"

namespace mcw {

/// F = 2PR / (P + R), 0 when P + R = 0.
inline double f_score(double precision, double recall) {
  return precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

struct GlossEntry {
  SynsetId synset;
  std::string gloss;
};

/// Reference glosses (e.g. C_gloss180) for the lemma-gloss relatedness task.
struct GlossStandard {
  std::string label;
  std::vector<GlossEntry> entries;
};

/// `synset-id<TAB>chinese-gloss` per line. Synset ids must be unique.
inline GlossStandard parse_gloss_standard(std::string_view content, std::string label, std::string_view name = "standard") {
  io::require_utf8(content, std::string(name));
  GlossStandard std_;
  std_.label = std::move(label);
  std::set<SynsetId> seen;
  io::for_each_line(content, [&](const io::Line& line) {
    if (io::trim(line.text).empty() || line.text.front() == '#') return;
    auto fail = [&](const std::string& msg) { throw ParseError(std::string(name) + ": " + msg, line.number, line.offset); };
    auto tab = line.text.find('\t');
    if (tab == std::string_view::npos) fail("expected synset-id<TAB>gloss");
    auto id = SynsetId::parse(io::trim(line.text.substr(0, tab)));
    if (!id) fail("bad synset id");
    auto gloss = io::trim(line.text.substr(tab + 1));
    if (gloss.empty()) fail("empty gloss");
    if (!seen.insert(*id).second) fail("duplicate synset " + id->str());
    std_.entries.push_back({*id, std::string(gloss)});
  });
  return std_;
}

inline GlossStandard load_gloss_standard(const std::filesystem::path& path, std::string label) {
  return parse_gloss_standard(io::read_file(path), std::move(label), path.string());
}

/// Problems with a set claimed to be canonical: size 180 or 240 and a 3:1:1:1
/// noun/verb/adj/adv mix (each count within 1 of its share).
inline std::vector<std::string> check_canonical(const GlossStandard& s) {
  std::vector<std::string> problems;
  const std::size_t n = s.entries.size();
  if (n != 180 && n != 240) problems.push_back("size " + std::to_string(n) + " is neither 180 nor 240");
  std::array<std::size_t, 4> counts{};
  for (const auto& e : s.entries) ++counts[static_cast<std::size_t>(e.synset.pos)];
  const std::array<double, 4> share = {3.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6};
  for (auto p : kAllPos) {
    double expected = share[static_cast<std::size_t>(p)] * static_cast<double>(n);
    if (std::abs(static_cast<double>(counts[static_cast<std::size_t>(p)]) - expected) > 1.0)
      problems.push_back(std::string(pos_file_suffix(p)) + " count " + std::to_string(counts[static_cast<std::size_t>(p)]) +
                         " off the 3:1:1:1 mix");
  }
  return problems;
}

/// Mean of the in-vocabulary token vectors of `gloss` after stopword removal;
/// nullopt when no token has a vector.
inline std::optional<Vector> gloss_vector(std::string_view gloss, const EmbeddingTable& table, const Tokenizer& tokenize,
                                          const Stoplist& stop) {
  if (io::trim(gloss).empty()) throw Error("gloss_vector: empty gloss");
  std::vector<std::span<const double>> found;
  for (const auto& tok : remove_stopwords(tokenize(gloss), stop))
    if (auto v = table.find(tok)) found.push_back(*v);
  if (found.empty()) return std::nullopt;
  return compose(found, ComposeMode::mean);
}

struct LemmaScore {
  std::string text;
  bool oov = false;
  bool right = false;
  std::optional<std::size_t> best;  // index of the argmax gloss
  double best_score = 0.0;
};

struct ConceptScore {
  SynsetId synset;
  bool gloss_oov = false;
  bool missing = false;  // no active lemmas in the lexicon
  bool right = false;
  std::vector<LemmaScore> lemmas;
};

struct RelatednessReport {
  std::string label;
  std::string relatedness = "cosine(lemma vector, mean gloss-token vector)";
  std::size_t ng = 0;  // glosses
  std::size_t E = 0;   // right concepts
  std::size_t S = 0;   // lemmas
  std::size_t L = 0;   // right lemmas
  double R = 0, P = 0, F = 0;
  std::size_t oov_lemmas = 0;
  std::size_t oov_glosses = 0;
  std::size_t missing_concepts = 0;
  std::vector<ConceptScore> concepts;
};

/// Each lemma of each standard synset is compared with every gloss; it is right when its
/// most related gloss (lowest index on ties) is its own synset's. A concept is right when
/// it has lemmas and all of them are right. R = E/ng, P = L/S.
inline RelatednessReport evaluate_relatedness(const BilingualLexicon& lex, const GlossStandard& standard, const EmbeddingTable& table,
                                              const Tokenizer& tokenize, const Stoplist& stop) {
  if (standard.entries.empty()) throw Error("relatedness: empty standard");
  RelatednessReport rep;
  rep.label = standard.label;
  rep.ng = standard.entries.size();
  std::vector<std::optional<Vector>> glosses;
  for (const auto& e : standard.entries) {
    glosses.push_back(gloss_vector(e.gloss, table, tokenize, stop));
    if (!glosses.back()) ++rep.oov_glosses;
  }
  for (std::size_t gi = 0; gi < standard.entries.size(); ++gi) {
    ConceptScore cs;
    cs.synset = standard.entries[gi].synset;
    cs.gloss_oov = !glosses[gi].has_value();
    auto lemmas = lex.active_lemmas(cs.synset);
    cs.missing = lemmas.empty();
    if (cs.missing) ++rep.missing_concepts;
    bool all_right = !lemmas.empty();
    for (const auto& text : lemmas) {
      LemmaScore ls;
      ls.text = text;
      auto v = table.find(text);
      if (!v) {
        ls.oov = true;
        ++rep.oov_lemmas;
      } else {
        for (std::size_t k = 0; k < glosses.size(); ++k) {
          if (!glosses[k]) continue;
          double c = cosine(*v, *glosses[k]).value;
          if (!ls.best || c > ls.best_score) {
            ls.best = k;
            ls.best_score = c;
          }
        }
        ls.right = ls.best && *ls.best == gi;
      }
      ++rep.S;
      if (ls.right) ++rep.L;
      all_right = all_right && ls.right;
      cs.lemmas.push_back(std::move(ls));
    }
    cs.right = all_right;
    if (cs.right) ++rep.E;
    rep.concepts.push_back(std::move(cs));
  }
  rep.R = static_cast<double>(rep.E) / static_cast<double>(rep.ng);
  rep.P = rep.S ? static_cast<double>(rep.L) / static_cast<double>(rep.S) : 0.0;
  rep.F = f_score(rep.P, rep.R);
  return rep;
}

inline nlohmann::json to_json(const RelatednessReport& r) {
  nlohmann::json concepts = nlohmann::json::array();
  for (const auto& c : r.concepts) {
    nlohmann::json lemmas = nlohmann::json::array();
    for (const auto& l : c.lemmas)
      lemmas.push_back({{"text", l.text}, {"oov", l.oov}, {"right", l.right}, {"best", l.best ? nlohmann::json(*l.best) : nlohmann::json()},
                        {"score", l.best_score}});
    concepts.push_back({{"synset", c.synset.str()}, {"right", c.right}, {"gloss_oov", c.gloss_oov}, {"missing", c.missing}, {"lemmas", lemmas}});
  }
  return {{"label", r.label}, {"relatedness", r.relatedness}, {"ng", r.ng}, {"E", r.E}, {"S", r.S}, {"L", r.L}, {"R", r.R},
          {"P", r.P}, {"F", r.F}, {"oov_lemmas", r.oov_lemmas}, {"oov_glosses", r.oov_glosses},
          {"missing_concepts", r.missing_concepts}, {"concepts", concepts}};
}

inline std::string format_relatedness_table(const RelatednessReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s\tR=%.4f\tP=%.4f\tF=%.4f\t(E=%zu/ng=%zu, L=%zu/S=%zu, oov lemmas %zu, oov glosses %zu)\n",
                r.label.c_str(), r.R, r.P, r.F, r.E, r.ng, r.L, r.S, r.oov_lemmas, r.oov_glosses);
  return buf;
}

}  // namespace mcw

#endif  // MCW_RELATEDNESS_HPP

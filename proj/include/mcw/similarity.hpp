#ifndef MCW_SIMILARITY_HPP
#define MCW_SIMILARITY_HPP

#include <algorithm>
#include <charconv>
#include <memory>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcw/errors.hpp"
#include "mcw/io.hpp"
#include "mcw/lexicon.hpp"
#include "mcw/taxonomy.hpp"
#include "mcw/wordnet.hpp"

namespace mcw {

struct IcParams {
  double k = 0.5;
  std::size_t max_nodes = 1;
  std::size_t max_depth = 1;

  static IcParams for_taxonomy(const Taxonomy& t, double k = 0.5) { return {k, t.node_count(), t.max_depth()}; }

  void validate() const {
    if (!(k >= 0.0 && k <= 1.0)) throw ConfigError("IC weight k must lie in [0, 1]");
    // log(max_nodes) and log(max_depth) are denominators
    if (max_nodes < 2) throw DegenerateInputError("IC needs a taxonomy with at least 2 nodes");
    if (max_depth < 2) throw DegenerateInputError("IC needs a taxonomy of depth at least 2");
  }
};

/// Depth-aware information content:
///   k (1 - log(hypo + 1) / log(max_nodes)) + (1 - k) log(depth + 1) / log(max_depth)
inline double zhou_ic(std::size_t hyponyms, std::size_t depth, const IcParams& p) {
  const double hypo_term = 1.0 - std::log(static_cast<double>(hyponyms) + 1.0) / std::log(static_cast<double>(p.max_nodes));
  const double depth_term = std::log(static_cast<double>(depth) + 1.0) / std::log(static_cast<double>(p.max_depth));
  return p.k * hypo_term + (1.0 - p.k) * depth_term;
}

inline double zhou_ic(const Taxonomy& t, SynsetId id, const IcParams& p) {
  p.validate();
  return zhou_ic(t.hyponym_count(id), t.depth(id), p);
}

struct LinResult {
  double value = 0.0;
  bool degenerate = false;  // IC(c1) + IC(c2) = 0; value set to 1 by convention
};

/// IC-based similarity over one taxonomy, with IC precomputed for every node.
class IcSimilarity {
 public:
  IcSimilarity(const Taxonomy& taxonomy, double k = 0.5) : IcSimilarity(taxonomy, IcParams::for_taxonomy(taxonomy, k)) {}

  IcSimilarity(const Taxonomy& taxonomy, IcParams params) : tax_(taxonomy), params_(params) {
    params_.validate();
    for (auto id : tax_.nodes()) ic_.emplace(id, zhou_ic(tax_.hyponym_count(id), tax_.depth(id), params_));
  }

  const Taxonomy& taxonomy() const { return tax_; }
  const IcParams& params() const { return params_; }

  double ic(SynsetId id) const {
    auto it = ic_.find(id);
    if (it == ic_.end()) {
      tax_.depth(id);  // raises the precise not-found / unsupported-POS error
      throw NotFoundError("synset not found: " + id.str());
    }
    return it->second;
  }

  /// Lowest common subsumer: among the common ancestors (inclusive) that have no common
  /// ancestor below them, the one with the highest IC; ties go to the smaller offset.
  /// On a tree this is the unique deepest shared ancestor, and lcs(c, c) = c on any DAG.
  SynsetId lcs(SynsetId a, SynsetId b) const {
    auto up_a = tax_.ancestors(a);
    std::unordered_set<SynsetId> in_a(up_a.begin(), up_a.end());
    std::unordered_set<SynsetId> common;
    for (auto c : tax_.ancestors(b))
      if (in_a.count(c)) common.insert(c);
    std::optional<SynsetId> best;
    double best_ic = 0.0;
    for (auto c : common) {
      auto below = tax_.hyponyms(c);
      if (std::any_of(below.begin(), below.end(), [&](SynsetId h) { return common.count(h) != 0; })) continue;
      double v = ic(c);
      if (!best || v > best_ic || (v == best_ic && c.offset < best->offset)) {
        best = c;
        best_ic = v;
      }
    }
    if (!best) throw Error("no common ancestor for " + a.str() + " and " + b.str());
    return *best;
  }

  /// 2 IC(lcs) / (IC(a) + IC(b)).
  LinResult lin(SynsetId a, SynsetId b) const {
    double denom = ic(a) + ic(b);
    if (denom == 0.0) return {1.0, true};
    return {2.0 * ic(lcs(a, b)) / denom, false};
  }

  /// Max lin over the cross product of two sense lists (senses outside the taxonomy are
  /// ignored); nullopt when either list is empty after filtering.
  std::optional<double> max_lin(const std::vector<SynsetId>& senses1, const std::vector<SynsetId>& senses2) const {
    std::optional<double> best;
    for (auto a : senses1) {
      if (!tax_.contains(a)) continue;
      for (auto b : senses2) {
        if (!tax_.contains(b)) continue;
        double v = lin(a, b).value;
        if (!best || v > *best) best = v;
      }
    }
    return best;
  }

 private:
  const Taxonomy& tax_;
  IcParams params_;
  std::unordered_map<SynsetId, double> ic_;
};

/// Word -> candidate synsets.
using SenseLookup = std::function<std::vector<SynsetId>(std::string_view)>;

/// Chinese word -> synsets carrying it as an active lemma.
inline SenseLookup lexicon_senses(const BilingualLexicon& lex) {
  auto index = std::make_shared<const std::unordered_map<std::string, std::vector<SynsetId>>>(lex.reverse_index());
  return [index](std::string_view w) {
    auto it = index->find(std::string(w));
    return it == index->end() ? std::vector<SynsetId>{} : it->second;
  };
}

/// English word -> synsets through the wordnet index.
inline SenseLookup english_senses(const WordnetDb& db, Pos pos) {
  return [&db, pos](std::string_view w) { return db.lookup(w, pos); };
}

/// Best lin similarity over all sense pairs of two words; nullopt is a miss.
inline std::optional<double> msim(const IcSimilarity& sim, const SenseLookup& senses, std::string_view w1, std::string_view w2) {
  return sim.max_lin(senses(w1), senses(w2));
}

/// Spearman rank correlation (average ranks for ties). nullopt when either input is constant.
inline std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error("spearman: length mismatch");
  if (x.size() < 2) throw Error("spearman: need at least 2 values");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

struct WordPair {
  std::string word1;
  std::string word2;
  double human = 0.0;
};

struct WordPairSet {
  std::string label;
  std::vector<WordPair> pairs;
  std::optional<std::pair<double, double>> scale;
};

/// `word1<TAB>word2<TAB>human-score` per line. Pairs (unordered) must be unique.
inline WordPairSet parse_word_pairs(std::string_view content, std::string label, std::optional<std::pair<double, double>> scale = {},
                                    std::string_view name = "pairs") {
  io::require_utf8(content, std::string(name));
  WordPairSet set{std::move(label), {}, scale};
  std::set<std::pair<std::string, std::string>> seen;
  io::for_each_line(content, [&](const io::Line& line) {
    if (io::trim(line.text).empty() || line.text.front() == '#') return;
    auto fail = [&](const std::string& msg) { throw ParseError(std::string(name) + ": " + msg, line.number, line.offset); };
    auto f = io::split(line.text, '\t');
    if (f.size() != 3) fail("expected word1<TAB>word2<TAB>score");
    WordPair p{std::string(io::trim(f[0])), std::string(io::trim(f[1])), 0.0};
    auto s = io::trim(f[2]);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), p.human);
    if (ec != std::errc{} || ptr != s.data() + s.size()) fail("bad score");
    if (p.word1.empty() || p.word2.empty()) fail("empty word");
    if (scale && (p.human < scale->first || p.human > scale->second)) fail("score outside the declared scale");
    if (!seen.insert(std::minmax(p.word1, p.word2)).second) fail("duplicate pair");
    set.pairs.push_back(std::move(p));
  });
  return set;
}

inline WordPairSet load_word_pairs(const std::filesystem::path& path, std::string label,
                                   std::optional<std::pair<double, double>> scale = {}) {
  return parse_word_pairs(io::read_file(path), std::move(label), scale, path.string());
}

struct PairScore {
  WordPair pair;
  double msim = 0.0;
  bool miss = false;
};

struct SimilarityReport {
  std::string label;
  std::vector<PairScore> rows;
  std::size_t scored = 0;
  std::size_t misses = 0;
  std::optional<double> spearman;                  // misses scored 0
  std::optional<double> spearman_excluding_misses;
};

/// msim for every pair (misses scored 0 and flagged) and the Spearman correlation with the
/// human scores, over all pairs and over the scored pairs only.
inline SimilarityReport evaluate_pairs(const IcSimilarity& sim, const SenseLookup& senses, const WordPairSet& set) {
  if (set.pairs.empty()) throw Error("similarity: empty pair set");
  SimilarityReport rep;
  rep.label = set.label;
  std::vector<double> machine, human, machine_hit, human_hit;
  for (const auto& p : set.pairs) {
    PairScore row{p, 0.0, false};
    if (auto v = msim(sim, senses, p.word1, p.word2)) {
      row.msim = *v;
      ++rep.scored;
      machine_hit.push_back(*v);
      human_hit.push_back(p.human);
    } else {
      row.miss = true;
      ++rep.misses;
    }
    machine.push_back(row.msim);
    human.push_back(p.human);
    rep.rows.push_back(std::move(row));
  }
  if (machine.size() >= 2) rep.spearman = spearman(machine, human);
  if (machine_hit.size() >= 2) rep.spearman_excluding_misses = spearman(machine_hit, human_hit);
  return rep;
}

inline nlohmann::json to_json(const SimilarityReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"word1", row.pair.word1}, {"word2", row.pair.word2}, {"human", row.pair.human}, {"msim", row.msim}, {"miss", row.miss}});
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
  return {{"label", r.label},       {"scored", r.scored},
          {"misses", r.misses},     {"spearman", opt(r.spearman)},
          {"spearman_excluding_misses", opt(r.spearman_excluding_misses)}, {"pairs", rows}};
}

}  // namespace mcw

#endif  // MCW_SIMILARITY_HPP

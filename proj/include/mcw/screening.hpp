#ifndef MCW_SCREENING_HPP
#define MCW_SCREENING_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcw/embedding.hpp"
#include "mcw/errors.hpp"
#include "mcw/io.hpp"
#include "mcw/lexicon.hpp"

namespace mcw {

enum class OovPolicy { review, keep, drop };

inline std::optional<OovPolicy> oov_policy_from_name(std::string_view s) {
  if (s == "review") return OovPolicy::review;
  if (s == "keep") return OovPolicy::keep;
  if (s == "drop") return OovPolicy::drop;
  return std::nullopt;
}

inline std::string_view oov_policy_name(OovPolicy p) {
  switch (p) {
    case OovPolicy::review: return "review";
    case OovPolicy::keep: return "keep";
    case OovPolicy::drop: return "drop";
  }
  return "";
}

struct ScreeningConfig {
  double threshold = 0.21;
  std::size_t min_candidates_to_filter = 3;
  OovPolicy oov_policy = OovPolicy::review;

  void validate() const {
    if (!(threshold > 0)) throw ConfigError("screening threshold must be > 0");
    if (min_candidates_to_filter < 2) throw ConfigError("min candidates to filter must be >= 2");
  }
};

struct ScreeningOutcome {
  SynsetId synset;
  std::vector<std::string> kept;      // sorted
  std::vector<std::string> dropped;   // sorted
  std::vector<std::string> deferred;  // out of vocabulary, routed to review
  std::map<std::string, double> magnitudes;

  friend bool operator==(const ScreeningOutcome&, const ScreeningOutcome&) = default;
};

/// Distance of a projected lemma from the origin; nullopt signals out-of-vocabulary.
inline std::optional<double> magnitude(const Projection2D& projection, std::string_view lemma) {
  auto p = projection.find(lemma);
  if (!p) return std::nullopt;
  return std::hypot((*p)[0], (*p)[1]);
}

/// Keeps the coherent group of one synset's candidates.
///
/// With fewer than `min_candidates_to_filter` in-vocabulary candidates everything is kept.
/// Otherwise two candidates are linked when their magnitudes differ by less than the
/// threshold, and the largest connected component survives (equal sizes: the component
/// holding the smallest lemma by code point).
inline ScreeningOutcome select_lemmas(const std::vector<CandidateLemma>& candidates, const Projection2D& projection,
                                      const ScreeningConfig& cfg) {
  cfg.validate();
  if (candidates.empty()) throw Error("select_lemmas: empty candidate list");
  ScreeningOutcome out;
  out.synset = candidates.front().synset;
  std::vector<std::pair<double, std::string>> in_vocab;
  for (const auto& c : candidates) {
    if (auto m = magnitude(projection, c.text)) {
      out.magnitudes[c.text] = *m;
      in_vocab.emplace_back(*m, c.text);
      continue;
    }
    switch (cfg.oov_policy) {
      case OovPolicy::review: out.deferred.push_back(c.text); break;
      case OovPolicy::keep: out.kept.push_back(c.text); break;
      case OovPolicy::drop: out.dropped.push_back(c.text); break;
    }
  }
  if (in_vocab.size() < cfg.min_candidates_to_filter) {
    for (auto& [m, t] : in_vocab) out.kept.push_back(t);
  } else {
    // On the magnitude line, components are maximal runs with consecutive gaps below threshold.
    std::sort(in_vocab.begin(), in_vocab.end());
    std::size_t best_begin = 0, best_end = 0;
    std::string best_min;
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= in_vocab.size(); ++i) {
      bool split = i == in_vocab.size() || !(std::abs(in_vocab[i].first - in_vocab[i - 1].first) < cfg.threshold);
      if (!split) continue;
      std::string run_min = in_vocab[begin].second;
      for (std::size_t j = begin; j < i; ++j) run_min = std::min(run_min, in_vocab[j].second);
      std::size_t size = i - begin, best_size = best_end - best_begin;
      if (size > best_size || (size == best_size && run_min < best_min)) {
        best_begin = begin;
        best_end = i;
        best_min = run_min;
      }
      begin = i;
    }
    for (std::size_t j = 0; j < in_vocab.size(); ++j)
      (j >= best_begin && j < best_end ? out.kept : out.dropped).push_back(in_vocab[j].second);
  }
  std::sort(out.kept.begin(), out.kept.end());
  std::sort(out.dropped.begin(), out.dropped.end());
  std::sort(out.deferred.begin(), out.deferred.end());
  return out;
}

/// Writes machine statuses for an outcome; human-decided candidates are left untouched.
inline void apply_outcome(BilingualLexicon& lex, const ScreeningOutcome& outcome) {
  auto set = [&](const std::vector<std::string>& texts, Status s) {
    for (const auto& t : texts)
      if (auto* c = lex.find(outcome.synset, t); c && !is_human(c->status)) c->status = s;
  };
  set(outcome.kept, Status::machine_kept);
  set(outcome.dropped, Status::machine_dropped);
  set(outcome.deferred, Status::proposed);
}

struct ScreeningCounts {
  std::size_t synsets = 0, kept = 0, dropped = 0, deferred = 0;
  friend bool operator==(const ScreeningCounts&, const ScreeningCounts&) = default;
};

struct ScreeningSummary {
  std::array<ScreeningCounts, 4> by_pos{};
  ScreeningCounts total;
  friend bool operator==(const ScreeningSummary&, const ScreeningSummary&) = default;
};

struct ScreeningRun {
  BilingualLexicon lexicon;
  std::vector<ScreeningOutcome> outcomes;  // synset id order
  ScreeningSummary summary;
  std::vector<std::string> warnings;
};

inline ScreeningSummary summarize(const std::vector<ScreeningOutcome>& outcomes) {
  ScreeningSummary s;
  for (const auto& o : outcomes) {
    for (auto* c : {&s.by_pos[static_cast<std::size_t>(o.synset.pos)], &s.total}) {
      ++c->synsets;
      c->kept += o.kept.size();
      c->dropped += o.dropped.size();
      c->deferred += o.deferred.size();
    }
  }
  return s;
}

/// Screens every synset. PCA is fitted once over all in-vocabulary candidate tokens of the
/// run (human-decided candidates excluded, they are frozen).
inline ScreeningRun screen_all(const BilingualLexicon& lex, const EmbeddingTable& table, const ScreeningConfig& cfg) {
  cfg.validate();
  ScreeningRun run;
  run.lexicon = lex;
  std::vector<std::string> tokens;
  for (const auto& [id, list] : lex.entries)
    for (const auto& c : list)
      if (!is_human(c.status) && table.contains(c.text)) tokens.push_back(c.text);
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());

  Projection2D projection;
  if (tokens.size() >= 3) {
    projection = pca_fit_project(table, tokens);
    run.warnings.insert(run.warnings.end(), projection.warnings.begin(), projection.warnings.end());
  } else {
    // too few points to fit; every synset takes the small-set path
    for (const auto& t : tokens) projection.points[t] = {0.0, 0.0};
    if (!tokens.empty()) run.warnings.push_back("fewer than 3 in-vocabulary candidates; PCA skipped");
  }

  for (const auto& [id, list] : lex.entries) {
    std::vector<CandidateLemma> open;
    for (const auto& c : list)
      if (!is_human(c.status)) open.push_back(c);
    if (open.empty()) continue;
    auto outcome = select_lemmas(open, projection, cfg);
    apply_outcome(run.lexicon, outcome);
    run.outcomes.push_back(std::move(outcome));
  }
  run.summary = summarize(run.outcomes);
  return run;
}

inline nlohmann::json to_json(const ScreeningOutcome& o) {
  return {{"synset", o.synset.str()}, {"kept", o.kept}, {"dropped", o.dropped}, {"deferred", o.deferred}, {"magnitudes", o.magnitudes}};
}

inline std::string write_screening_report(const std::vector<ScreeningOutcome>& outcomes) {
  std::string out;
  for (const auto& o : outcomes) out += to_json(o).dump() + '\n';
  return out;
}

inline ScreeningOutcome screening_outcome_from_json(const nlohmann::json& j) {
  ScreeningOutcome o;
  o.synset = SynsetId::parse_or_throw(j.at("synset").get<std::string>());
  o.kept = j.at("kept").get<std::vector<std::string>>();
  o.dropped = j.at("dropped").get<std::vector<std::string>>();
  o.deferred = j.at("deferred").get<std::vector<std::string>>();
  o.magnitudes = j.at("magnitudes").get<std::map<std::string, double>>();
  return o;
}

inline std::vector<ScreeningOutcome> parse_screening_report(std::string_view content, std::string_view name = "screening report") {
  std::vector<ScreeningOutcome> out;
  io::for_each_line(content, [&](const io::Line& line) {
    if (io::trim(line.text).empty()) return;
    try {
      out.push_back(screening_outcome_from_json(nlohmann::json::parse(line.text)));
    } catch (const std::exception& e) {
      throw ParseError(std::string(name) + ": " + e.what(), line.number, line.offset);
    }
  });
  return out;
}

inline std::string write_screening_summary(const ScreeningSummary& s) {
  std::string out = "pos\tsynsets\tkept\tdropped\tdeferred\n";
  auto row = [&](std::string_view label, const ScreeningCounts& c) {
    out += std::string(label) + '\t' + std::to_string(c.synsets) + '\t' + std::to_string(c.kept) + '\t' +
           std::to_string(c.dropped) + '\t' + std::to_string(c.deferred) + '\n';
  };
  for (auto p : kAllPos) row(pos_file_suffix(p), s.by_pos[static_cast<std::size_t>(p)]);
  row("total", s.total);
  return out;
}

inline nlohmann::json to_json(const ScreeningSummary& s) {
  auto counts = [](const ScreeningCounts& c) {
    return nlohmann::json{{"synsets", c.synsets}, {"kept", c.kept}, {"dropped", c.dropped}, {"deferred", c.deferred}};
  };
  nlohmann::json j;
  for (auto p : kAllPos) j[std::string(pos_file_suffix(p))] = counts(s.by_pos[static_cast<std::size_t>(p)]);
  j["total"] = counts(s.total);
  return j;
}

}  // namespace mcw

#endif  // MCW_SCREENING_HPP

#ifndef MCW_CONFIG_HPP
#define MCW_CONFIG_HPP

#include <charconv>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcw/corrections.hpp"
#include "mcw/errors.hpp"
#include "mcw/io.hpp"
#include "mcw/screening.hpp"
#include "mcw/synset_id.hpp"
#include "mcw/taxonomy.hpp"
#include "mcw/wsd.hpp"

namespace mcw {

inline std::string_view sense_representation_name(SenseRepresentation r) {
  return r == SenseRepresentation::gloss ? "gloss" : "chinese-lemmas";
}

/// Every tunable default of the pipeline.
///
/// File format: one `key = value` per line, `#` starts a comment line. Keys:
///
///     screening.threshold        = 0.21
///     screening.min_candidates   = 3
///     screening.oov_policy       = review        # review | keep | drop
///     ic.k                       = 0.5
///     similarity.pos             = noun          # noun | verb
///     wsd.window                 = 2             # tokens per side
///     wsd.sense_representation   = gloss         # gloss | chinese-lemmas
///     hard_translation.<name>    = <min-length> [<interior>]
///
/// Any `hard_translation.*` key replaces the whole default pattern set.
struct Config {
  ScreeningConfig screening;
  double ic_k = 0.5;
  Pos similarity_pos = Pos::noun;
  WsdConfig wsd;
  std::vector<HardTranslationPattern> hard_translation = default_hard_translation_patterns();

  void validate() const {
    screening.validate();
    if (!(ic_k >= 0.0 && ic_k <= 1.0)) throw ConfigError("ic.k must lie in [0,1]");
    if (!has_taxonomy(similarity_pos)) throw ConfigError("similarity.pos must be noun or verb");
    if (wsd.window == 0) throw ConfigError("wsd.window must be >= 1");
    for (const auto& p : hard_translation)
      if (p.min_length == 0) throw ConfigError("hard_translation." + p.name + ": min length must be >= 1");
  }

  /// Canonical key = value text, stable across runs.
  std::string snapshot() const {
    std::string out;
    auto put = [&](std::string_view k, std::string_view v) { out.append(k).append(" = ").append(v).append("\n"); };
    auto real = [](double x) {
      char buf[32];
      return std::string(buf, std::to_chars(buf, buf + sizeof buf, x).ptr);
    };
    put("screening.threshold", real(screening.threshold));
    put("screening.min_candidates", std::to_string(screening.min_candidates_to_filter));
    put("screening.oov_policy", oov_policy_name(screening.oov_policy));
    put("ic.k", real(ic_k));
    put("similarity.pos", pos_file_suffix(similarity_pos));
    put("wsd.window", std::to_string(wsd.window));
    put("wsd.sense_representation", sense_representation_name(wsd.representation));
    for (const auto& p : hard_translation)
      put("hard_translation." + p.name, std::to_string(p.min_length) + (p.interior.empty() ? "" : " " + p.interior));
    return out;
  }
};

namespace detail {

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) throw ConfigError("bad value for " + std::string(key) + ": '" + std::string(v) + "'");
  return out;
}

}  // namespace detail

inline Config parse_config(std::string_view content, std::string_view name = "config") {
  io::require_utf8(content, std::string(name));
  Config cfg;
  bool patterns_reset = false;
  io::for_each_line(content, [&](const io::Line& line) {
    auto text = io::trim(line.text);
    if (text.empty() || text.front() == '#') return;
    for (std::size_t i = 1; i < text.size(); ++i)
      if (text[i] == '#' && (text[i - 1] == ' ' || text[i - 1] == '\t')) {
        text = io::trim(text.substr(0, i));
        break;
      }
    auto eq = text.find('=');
    auto where = std::string(name) + ":" + std::to_string(line.number) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    auto key = io::trim(text.substr(0, eq));
    auto value = io::trim(text.substr(eq + 1));
    if (key == "screening.threshold") {
      cfg.screening.threshold = detail::parse_number<double>(key, value);
    } else if (key == "screening.min_candidates") {
      cfg.screening.min_candidates_to_filter = detail::parse_number<std::size_t>(key, value);
    } else if (key == "screening.oov_policy") {
      auto p = oov_policy_from_name(value);
      if (!p) throw ConfigError(where + "unknown oov policy '" + std::string(value) + "'");
      cfg.screening.oov_policy = *p;
    } else if (key == "ic.k") {
      cfg.ic_k = detail::parse_number<double>(key, value);
    } else if (key == "similarity.pos") {
      auto p = pos_from_name(value);
      if (!p) throw ConfigError(where + "unknown part of speech '" + std::string(value) + "'");
      cfg.similarity_pos = *p;
    } else if (key == "wsd.window") {
      cfg.wsd.window = detail::parse_number<std::size_t>(key, value);
    } else if (key == "wsd.sense_representation") {
      if (value == "gloss") cfg.wsd.representation = SenseRepresentation::gloss;
      else if (value == "chinese-lemmas") cfg.wsd.representation = SenseRepresentation::chinese_lemmas;
      else throw ConfigError(where + "unknown sense representation '" + std::string(value) + "'");
    } else if (key.starts_with("hard_translation.")) {
      if (!patterns_reset) {
        cfg.hard_translation.clear();
        patterns_reset = true;
      }
      HardTranslationPattern p;
      p.name = std::string(key.substr(17));
      if (p.name.empty()) throw ConfigError(where + "empty pattern name");
      auto sp = value.find(' ');
      p.min_length = detail::parse_number<std::size_t>(key, value.substr(0, sp));
      if (sp != std::string_view::npos) p.interior = std::string(io::trim(value.substr(sp + 1)));
      cfg.hard_translation.push_back(std::move(p));
    } else {
      throw ConfigError(where + "unknown key '" + std::string(key) + "'");
    }
  });
  cfg.validate();
  return cfg;
}

inline Config load_config(const std::filesystem::path& path) { return parse_config(io::read_file(path), path.string()); }

}  // namespace mcw

#endif  // MCW_CONFIG_HPP

#ifndef MCW_COVERAGE_HPP
#define MCW_COVERAGE_HPP

#include <array>
#include <cstdio>
#include <string>

#include <nlohmann/json.hpp>

#include "mcw/lexicon.hpp"
#include "mcw/wordnet.hpp"

namespace mcw {

struct CoverageRow {
  std::size_t concepts = 0;
  std::size_t translated = 0;
  double ratio = 0.0;
  std::size_t lemmas = 0;
};

/// Per-POS translation coverage of a lexicon over a wordnet, Table-1/Table-2 style.
struct CoverageReport {
  std::array<CoverageRow, 4> by_pos{};
  CoverageRow total;
  std::size_t unresolved_synsets = 0;
  std::size_t unresolved_lemmas = 0;

  const CoverageRow& row(Pos p) const { return by_pos[static_cast<std::size_t>(p)]; }
};

inline CoverageReport coverage_report(const WordnetDb& db, const BilingualLexicon& lex) {
  CoverageReport r;
  for (auto p : kAllPos) r.by_pos[static_cast<std::size_t>(p)].concepts = db.count(p);
  for (const auto& [id, list] : lex.entries) {
    std::size_t active = 0;
    for (const auto& c : list) active += is_active(c.status) ? 1 : 0;
    if (active == 0) continue;
    if (!db.contains(id)) {
      ++r.unresolved_synsets;
      r.unresolved_lemmas += active;
      continue;
    }
    auto& row = r.by_pos[static_cast<std::size_t>(id.pos)];
    ++row.translated;
    row.lemmas += active;
  }
  for (auto& row : r.by_pos) {
    row.ratio = row.concepts ? static_cast<double>(row.translated) / static_cast<double>(row.concepts) : 0.0;
    r.total.concepts += row.concepts;
    r.total.translated += row.translated;
    r.total.lemmas += row.lemmas;
  }
  r.total.ratio = r.total.concepts ? static_cast<double>(r.total.translated) / static_cast<double>(r.total.concepts) : 0.0;
  return r;
}

inline nlohmann::json to_json(const CoverageRow& row) {
  return {{"concepts", row.concepts}, {"translated", row.translated}, {"ratio", row.ratio}, {"lemmas", row.lemmas}};
}

inline nlohmann::json to_json(const CoverageReport& r) {
  nlohmann::json j;
  for (auto p : kAllPos) j[std::string(pos_file_suffix(p))] = to_json(r.row(p));
  j["total"] = to_json(r.total);
  j["unresolved_synsets"] = r.unresolved_synsets;
  j["unresolved_lemmas"] = r.unresolved_lemmas;
  return j;
}

inline std::string format_coverage_table(const CoverageReport& r) {
  std::string out = "POS\tC-N\tW\tT\tlemmas\n";
  auto line = [&](const char* label, const CoverageRow& row) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s\t%zu\t%zu\t%.3f\t%zu\n", label, row.translated, row.concepts, row.ratio, row.lemmas);
    out += buf;
  };
  for (auto p : kAllPos) line(std::string(pos_file_suffix(p)).c_str(), r.row(p));
  line("Total", r.total);
  if (r.unresolved_synsets)
    out += "unresolved\t" + std::to_string(r.unresolved_synsets) + " synsets\t" + std::to_string(r.unresolved_lemmas) + " lemmas\n";
  return out;
}

}  // namespace mcw

#endif  // MCW_COVERAGE_HPP

#ifndef MCW_VERSION_MAP_HPP
#define MCW_VERSION_MAP_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcw/errors.hpp"
#include "mcw/io.hpp"
#include "mcw/synset_id.hpp"

namespace mcw {

/// Synset id correspondence between two wordnet versions (e.g. 1.6 -> 3.0).
struct VersionMap {
  std::string from_version;
  std::string to_version;
  std::map<SynsetId, SynsetId> pairs;

  /// nullopt is the explicit "unmapped" marker.
  std::optional<SynsetId> map(SynsetId id) const {
    auto it = pairs.find(id);
    if (it == pairs.end()) return std::nullopt;
    return it->second;
  }

  /// Ids from `ids` that have no mapping, in input order.
  std::vector<SynsetId> unmapped(const std::vector<SynsetId>& ids) const {
    std::vector<SynsetId> out;
    for (auto id : ids)
      if (!pairs.count(id)) out.push_back(id);
    return out;
  }
};

inline std::optional<SynsetId> map_id(const VersionMap& m, SynsetId id) { return m.map(id); }

/// Parses "from<TAB>to" lines. Blank lines and lines starting with '#' are ignored.
/// A source mapped twice, or two sources sharing a target, is a consistency error.
inline VersionMap parse_version_map(std::string_view content, std::string from_version, std::string to_version,
                                    std::string_view name = "version map") {
  io::require_utf8(content, std::string(name));
  VersionMap m{std::move(from_version), std::move(to_version), {}};
  std::map<SynsetId, SynsetId> inverse;
  std::vector<std::string> offenders;
  io::for_each_line(content, [&](const io::Line& line) {
    auto text = io::trim(line.text);
    if (text.empty() || text.front() == '#') return;
    auto fields = io::split(text, '\t');
    if (fields.size() != 2) throw ParseError(std::string(name) + ": expected 2 tab-separated fields", line.number, line.offset);
    auto from = SynsetId::parse(io::trim(fields[0]));
    auto to = SynsetId::parse(io::trim(fields[1]));
    if (!from || !to) throw ParseError(std::string(name) + ": bad synset id", line.number, line.offset);
    if (!m.pairs.emplace(*from, *to).second) offenders.push_back(from->str() + " mapped twice");
    if (auto [it, fresh] = inverse.emplace(*to, *from); !fresh)
      offenders.push_back(it->second.str() + " and " + from->str() + " -> " + to->str());
  });
  if (!offenders.empty()) throw ConsistencyError("version map is not injective", offenders);
  return m;
}

inline VersionMap load_version_map(const std::filesystem::path& path, std::string from_version, std::string to_version) {
  return parse_version_map(io::read_file(path), std::move(from_version), std::move(to_version), path.string());
}

}  // namespace mcw

#endif  // MCW_VERSION_MAP_HPP

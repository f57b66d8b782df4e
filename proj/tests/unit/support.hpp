#ifndef MCW_TEST_SUPPORT_HPP
#define MCW_TEST_SUPPORT_HPP

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mcw/synset_id.hpp"
#include "mcw/wordnet.hpp"

namespace test {

inline std::filesystem::path fixture(const std::string& rel) { return std::filesystem::path(MCW_FIXTURES) / rel; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("mcw-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline mcw::SynsetId nid(std::uint32_t offset) { return {offset, mcw::Pos::noun}; }
inline mcw::SynsetId vid(std::uint32_t offset) { return {offset, mcw::Pos::verb}; }

/// Builds linked noun synsets from child -> parents edges (both directions written).
inline std::vector<mcw::Synset> noun_graph(const std::vector<std::uint32_t>& nodes,
                                           const std::vector<std::pair<std::uint32_t, std::uint32_t>>& child_parent,
                                           mcw::Pos pos = mcw::Pos::noun) {
  std::map<std::uint32_t, mcw::Synset> by;
  for (auto n : nodes) {
    mcw::Synset s;
    s.id = {n, pos};
    s.ss_type = mcw::pos_letter(pos);
    s.lex_filenum = 3;
    s.words = {{"w" + std::to_string(n), 0, ""}};
    s.gloss = "gloss of " + std::to_string(n);
    by[n] = s;
  }
  const char letter = mcw::pos_letter(pos);
  for (auto [c, p] : child_parent) {
    by[c].relations.push_back({"@", {p, pos}, letter, 0});
    by[p].relations.push_back({"~", {c, pos}, letter, 0});
  }
  std::vector<mcw::Synset> out;
  for (auto& [k, s] : by) out.push_back(s);
  return out;
}

/// Brute-force taxonomy facts computed from raw child -> parent edges.
struct GraphOracle {
  std::set<std::uint32_t> nodes;
  std::map<std::uint32_t, std::vector<std::uint32_t>> parents, children;

  GraphOracle(const std::vector<std::uint32_t>& ns, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges)
      : nodes(ns.begin(), ns.end()) {
    for (auto [c, p] : edges) {
      parents[c].push_back(p);
      children[p].push_back(c);
    }
  }

  std::vector<std::uint32_t> roots() const {
    std::vector<std::uint32_t> r;
    for (auto n : nodes)
      if (!parents.count(n)) r.push_back(n);
    return r;
  }

  void descend(std::uint32_t n, std::set<std::uint32_t>& seen) const {
    auto it = children.find(n);
    if (it == children.end()) return;
    for (auto c : it->second)
      if (seen.insert(c).second) descend(c, seen);
  }

  std::size_t hyponyms(std::uint32_t n) const {
    std::set<std::uint32_t> seen;
    descend(n, seen);
    seen.erase(n);
    return seen.size();
  }

  /// Every ancestor (including n) with its shortest upward distance.
  std::map<std::uint32_t, std::size_t> ancestors(std::uint32_t n) const {
    std::map<std::uint32_t, std::size_t> dist{{n, 0}};
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto [a, d] : std::map<std::uint32_t, std::size_t>(dist)) {
        auto it = parents.find(a);
        if (it == parents.end()) continue;
        for (auto p : it->second) {
          auto f = dist.find(p);
          if (f == dist.end() || f->second > d + 1) {
            dist[p] = d + 1;
            changed = true;
          }
        }
      }
    }
    return dist;
  }

  /// Shortest distance to any root.
  std::size_t depth(std::uint32_t n) const {
    std::size_t best = SIZE_MAX;
    for (auto [a, d] : ancestors(n))
      if (!parents.count(a)) best = std::min(best, d);
    return best;
  }
};

}  // namespace test

#endif

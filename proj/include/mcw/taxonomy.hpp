#ifndef MCW_TAXONOMY_HPP
#define MCW_TAXONOMY_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "mcw/errors.hpp"
#include "mcw/synset_id.hpp"
#include "mcw/wordnet.hpp"

namespace mcw {

inline bool has_taxonomy(Pos p) { return p == Pos::noun || p == Pos::verb; }

/// The is-a hierarchy of one part of speech: hypernym and instance-hypernym edges.
///
/// When the POS has more than one root, a virtual root (SynsetId::virtual_root) is placed
/// above all of them, so depth and common ancestors are defined for every pair. Root depth
/// is 0. Cycles are broken by visited sets and reported through warnings().
/// All per-node quantities are computed once at construction.
class Taxonomy {
 public:
  Taxonomy(const WordnetDb& db, Pos pos) : pos_(pos) {
    if (!has_taxonomy(pos)) throw UnsupportedPosError(std::string("no hypernym taxonomy for pos '") + pos_letter(pos) + "'");
    for (const auto& [id, s] : db.synsets())
      if (id.pos == pos) {
        index_.emplace(id, static_cast<std::uint32_t>(ids_.size()));
        ids_.push_back(id);
      }
    const std::size_t n = ids_.size();
    parents_.resize(n);
    children_.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      for (const auto& rel : db.at(ids_[i]).relations) {
        auto k = rel.kind();
        if (k != RelationKind::hypernym && k != RelationKind::instance_hypernym) continue;
        auto it = index_.find(rel.target);
        if (it == index_.end()) continue;
        auto& ps = parents_[i];
        if (std::find(ps.begin(), ps.end(), it->second) == ps.end()) {
          ps.push_back(it->second);
          children_[it->second].push_back(i);
        }
      }
    }
    detect_cycles();
    compute_depths();
    compute_hyponym_counts();
  }

  Pos pos() const { return pos_; }
  bool has_virtual_root() const { return virtual_root_; }

  /// Number of nodes including the virtual root, if any.
  std::size_t node_count() const { return ids_.size() + (virtual_root_ ? 1 : 0); }
  std::size_t max_depth() const { return max_depth_; }

  /// The single taxonomy root: the virtual root when the POS is multi-rooted.
  SynsetId root() const { return virtual_root_ ? SynsetId::virtual_root(pos_) : ids_.at(roots_.front()); }
  std::vector<SynsetId> real_roots() const {
    std::vector<SynsetId> out;
    for (auto r : roots_) out.push_back(ids_[r]);
    return out;
  }

  bool contains(SynsetId id) const { return (id.is_virtual_root() && virtual_root_ && id.pos == pos_) || index_.count(id); }

  std::size_t hyponym_count(SynsetId id) const { return hypo_[node(id)]; }
  std::size_t depth(SynsetId id) const { return depth_[node(id)]; }

  /// All ancestors including `id` itself and the virtual root.
  std::vector<SynsetId> ancestors(SynsetId id) const {
    std::vector<SynsetId> out;
    for (auto n : ancestor_nodes(node(id))) out.push_back(id_of(n));
    return out;
  }

  std::vector<SynsetId> hypernyms(SynsetId id) const {
    std::vector<SynsetId> out;
    auto n = node(id);
    if (n == virtual_node()) return out;
    for (auto p : parents_[n]) out.push_back(ids_[p]);
    if (out.empty() && virtual_root_) out.push_back(SynsetId::virtual_root(pos_));
    return out;
  }

  std::vector<SynsetId> hyponyms(SynsetId id) const {
    std::vector<SynsetId> out;
    auto n = node(id);
    if (n == virtual_node()) {
      for (auto r : roots_) out.push_back(ids_[r]);
      return out;
    }
    for (auto c : children_[n]) out.push_back(ids_[c]);
    return out;
  }

  /// Every node, virtual root last.
  std::vector<SynsetId> nodes() const {
    auto out = ids_;
    if (virtual_root_) out.push_back(SynsetId::virtual_root(pos_));
    return out;
  }

  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::uint32_t virtual_node() const { return static_cast<std::uint32_t>(ids_.size()); }

  SynsetId id_of(std::uint32_t n) const { return n == virtual_node() ? SynsetId::virtual_root(pos_) : ids_[n]; }

  std::uint32_t node(SynsetId id) const {
    if (id.is_virtual_root() && virtual_root_ && id.pos == pos_) return virtual_node();
    auto it = index_.find(id);
    if (it == index_.end()) {
      if (id.pos != pos_) throw UnsupportedPosError("synset " + id.str() + " is not in the " + std::string(pos_file_suffix(pos_)) + " taxonomy");
      throw NotFoundError("synset not found: " + id.str());
    }
    return it->second;
  }

  std::vector<std::uint32_t> ancestor_nodes(std::uint32_t start) const {
    std::vector<std::uint32_t> out{start};
    if (start == virtual_node()) return out;
    std::vector<char> seen(ids_.size(), 0);
    seen[start] = 1;
    for (std::size_t i = 0; i < out.size(); ++i)
      for (auto p : parents_[out[i]])
        if (!seen[p]) {
          seen[p] = 1;
          out.push_back(p);
        }
    if (virtual_root_) out.push_back(virtual_node());
    return out;
  }

  void detect_cycles() {
    // iterative DFS over parent edges; a grey target closes a cycle
    const std::size_t n = ids_.size();
    std::vector<std::uint8_t> color(n, 0);
    std::vector<std::uint32_t> stack_nodes;
    for (std::uint32_t s = 0; s < n; ++s) {
      if (color[s]) continue;
      std::vector<std::pair<std::uint32_t, std::size_t>> stack{{s, 0}};
      color[s] = 1;
      stack_nodes.assign(1, s);
      while (!stack.empty()) {
        auto& [v, next] = stack.back();
        if (next < parents_[v].size()) {
          auto p = parents_[v][next++];
          if (color[p] == 0) {
            color[p] = 1;
            stack.emplace_back(p, 0);
            stack_nodes.push_back(p);
          } else if (color[p] == 1) {
            std::string msg = "hypernym cycle:";
            auto from = std::find(stack_nodes.begin(), stack_nodes.end(), p);
            for (auto it = from; it != stack_nodes.end(); ++it) msg += " " + ids_[*it].str();
            warnings_.push_back(msg);
          }
        } else {
          color[v] = 2;
          stack.pop_back();
          stack_nodes.pop_back();
        }
      }
    }
  }

  void compute_depths() {
    const std::size_t n = ids_.size();
    constexpr auto kUnset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> d(n, kUnset);
    for (std::uint32_t i = 0; i < n; ++i)
      if (parents_[i].empty()) roots_.push_back(i);
    auto bfs = [&](std::uint32_t root, std::size_t base) {
      std::deque<std::uint32_t> q;
      if (d[root] != kUnset) return;
      d[root] = base;
      q.push_back(root);
      while (!q.empty()) {
        auto v = q.front();
        q.pop_front();
        for (auto c : children_[v])
          if (d[c] == kUnset) {
            d[c] = d[v] + 1;
            q.push_back(c);
          }
      }
    };
    // multi-source BFS: min distance from any root
    {
      std::deque<std::uint32_t> q;
      for (auto r : roots_) {
        d[r] = 0;
        q.push_back(r);
      }
      while (!q.empty()) {
        auto v = q.front();
        q.pop_front();
        for (auto c : children_[v])
          if (d[c] == kUnset) {
            d[c] = d[v] + 1;
            q.push_back(c);
          }
      }
    }
    // components reachable from no root are pure cycles: root them at their smallest id
    for (std::uint32_t i = 0; i < n; ++i)
      if (d[i] == kUnset) {
        warnings_.push_back("rootless cycle component rooted at " + ids_[i].str());
        roots_.push_back(i);
        bfs(i, 0);
      }
    virtual_root_ = roots_.size() > 1;
    max_depth_ = 0;
    depth_.assign(n + 1, 0);
    for (std::uint32_t i = 0; i < n; ++i) {
      depth_[i] = d[i] + (virtual_root_ ? 1 : 0);
      max_depth_ = std::max(max_depth_, depth_[i]);
    }
  }

  void compute_hyponym_counts() {
    const std::size_t n = ids_.size();
    hypo_.assign(n + 1, 0);
    std::vector<std::uint32_t> stamp(n, 0);
    std::vector<std::uint32_t> frontier;
    for (std::uint32_t i = 0; i < n; ++i) {
      const std::uint32_t mark = i + 1;
      stamp[i] = mark;
      frontier.assign(children_[i].begin(), children_[i].end());
      std::size_t count = 0;
      while (!frontier.empty()) {
        auto v = frontier.back();
        frontier.pop_back();
        if (stamp[v] == mark) continue;
        stamp[v] = mark;
        ++count;
        for (auto c : children_[v])
          if (stamp[c] != mark) frontier.push_back(c);
      }
      hypo_[i] = count;
    }
    hypo_[n] = n;  // virtual root sits above every real node
  }

  Pos pos_;
  std::vector<SynsetId> ids_;
  std::unordered_map<SynsetId, std::uint32_t> index_;
  std::vector<std::vector<std::uint32_t>> parents_;
  std::vector<std::vector<std::uint32_t>> children_;
  std::vector<std::uint32_t> roots_;
  bool virtual_root_ = false;
  std::vector<std::size_t> depth_;
  std::vector<std::size_t> hypo_;
  std::size_t max_depth_ = 0;
  std::vector<std::string> warnings_;
};

namespace detail {
inline const Synset& require_taxonomy_synset(const WordnetDb& db, SynsetId id) {
  const auto& s = db.at(id);
  if (!has_taxonomy(id.pos)) throw UnsupportedPosError("no hypernym taxonomy for " + id.str());
  return s;
}
}  // namespace detail

/// Distinct descendants of `id` through hyponym edges, excluding `id`.
/// Builds the taxonomy on each call; hold a Taxonomy for repeated queries.
inline std::size_t hyponym_count(const WordnetDb& db, SynsetId id) {
  detail::require_taxonomy_synset(db, id);
  return Taxonomy(db, id.pos).hyponym_count(id);
}

/// Minimum number of hypernym edges from `id` up to the root (root = 0).
inline std::size_t depth(const WordnetDb& db, SynsetId id) {
  detail::require_taxonomy_synset(db, id);
  return Taxonomy(db, id.pos).depth(id);
}

}  // namespace mcw

#endif  // MCW_TAXONOMY_HPP

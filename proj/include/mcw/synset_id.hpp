#ifndef MCW_SYNSET_ID_HPP
#define MCW_SYNSET_ID_HPP

#include <array>
#include <charconv>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "mcw/errors.hpp"

namespace mcw {

enum class Pos : std::uint8_t { noun = 0, verb = 1, adj = 2, adv = 3 };

inline constexpr std::array<Pos, 4> kAllPos = {Pos::noun, Pos::verb, Pos::adj, Pos::adv};

inline char pos_letter(Pos p) {
  switch (p) {
    case Pos::noun: return 'n';
    case Pos::verb: return 'v';
    case Pos::adj: return 'a';
    case Pos::adv: return 'r';
  }
  return '?';
}

/// File-name suffix used by the PWN database (data.noun, index.adv, ...).
inline std::string_view pos_file_suffix(Pos p) {
  switch (p) {
    case Pos::noun: return "noun";
    case Pos::verb: return "verb";
    case Pos::adj: return "adj";
    case Pos::adv: return "adv";
  }
  return "";
}

/// Accepts the PWN ss_type letters; 's' (adjective satellite) maps to adj.
inline std::optional<Pos> pos_from_letter(char c) {
  switch (c) {
    case 'n': return Pos::noun;
    case 'v': return Pos::verb;
    case 'a':
    case 's': return Pos::adj;
    case 'r': return Pos::adv;
    default: return std::nullopt;
  }
}

inline std::optional<Pos> pos_from_name(std::string_view name) {
  if (name == "noun" || name == "n") return Pos::noun;
  if (name == "verb" || name == "v") return Pos::verb;
  if (name == "adj" || name == "adjective" || name == "a" || name == "s") return Pos::adj;
  if (name == "adv" || name == "adverb" || name == "r") return Pos::adv;
  return std::nullopt;
}

/// Offsets above this are reserved; kVirtualRootOffset marks the synthetic taxonomy root.
inline constexpr std::uint32_t kMaxOffset = 99999999;
inline constexpr std::uint32_t kVirtualRootOffset = kMaxOffset + 1;

/// Concept identifier: 8-digit offset plus part of speech, rendered "08272961-n".
struct SynsetId {
  std::uint32_t offset = 0;
  Pos pos = Pos::noun;

  static SynsetId virtual_root(Pos p) { return {kVirtualRootOffset, p}; }
  bool is_virtual_root() const { return offset == kVirtualRootOffset; }

  std::string str() const {
    if (is_virtual_root()) return std::string("ROOT-") + pos_letter(pos);
    std::string digits = std::to_string(offset);
    return std::string(8 - std::min<std::size_t>(8, digits.size()), '0') + digits + '-' + pos_letter(pos);
  }

  /// Parses "<8-digit offset>-<letter>". Returns nullopt for anything else.
  static std::optional<SynsetId> parse(std::string_view s) {
    auto dash = s.find('-');
    if (dash == std::string_view::npos || dash == 0 || dash + 2 != s.size()) return std::nullopt;
    auto pos = pos_from_letter(s[dash + 1]);
    if (!pos) return std::nullopt;
    std::uint32_t off = 0;
    auto digits = s.substr(0, dash);
    if (digits.size() != 8) return std::nullopt;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), off);
    if (ec != std::errc{} || p != digits.data() + digits.size()) return std::nullopt;
    return SynsetId{off, *pos};
  }

  static SynsetId parse_or_throw(std::string_view s) {
    auto id = parse(s);
    if (!id) throw Error("invalid synset id '" + std::string(s) + "'");
    return *id;
  }

  friend auto operator<=>(const SynsetId&, const SynsetId&) = default;
  friend bool operator==(const SynsetId&, const SynsetId&) = default;
};

}  // namespace mcw

template <>
struct std::hash<mcw::SynsetId> {
  std::size_t operator()(const mcw::SynsetId& id) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(id.pos) << 32) | id.offset);
  }
};

#endif  // MCW_SYNSET_ID_HPP

#ifndef MCW_UTF8_HPP
#define MCW_UTF8_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mcw::utf8 {

/// Decodes one code point starting at `pos`; advances `pos`. Returns nullopt on invalid input.
inline std::optional<char32_t> decode(std::string_view s, std::size_t& pos) {
  if (pos >= s.size()) return std::nullopt;
  auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
  unsigned char c = byte(pos);
  std::size_t len;
  char32_t cp;
  if (c < 0x80) {
    ++pos;
    return c;
  } else if ((c & 0xE0) == 0xC0) {
    len = 2;
    cp = c & 0x1F;
  } else if ((c & 0xF0) == 0xE0) {
    len = 3;
    cp = c & 0x0F;
  } else if ((c & 0xF8) == 0xF0) {
    len = 4;
    cp = c & 0x07;
  } else {
    return std::nullopt;
  }
  if (pos + len > s.size()) return std::nullopt;
  for (std::size_t i = 1; i < len; ++i) {
    unsigned char cc = byte(pos + i);
    if ((cc & 0xC0) != 0x80) return std::nullopt;
    cp = (cp << 6) | (cc & 0x3F);
  }
  // overlong forms, surrogates, out of range
  if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
      (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF)
    return std::nullopt;
  pos += len;
  return cp;
}

/// Byte offset of the first invalid sequence, or nullopt when `s` is valid UTF-8.
inline std::optional<std::size_t> first_invalid(std::string_view s) {
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t at = pos;
    if (!decode(s, pos)) return at;
  }
  return std::nullopt;
}

inline bool valid(std::string_view s) { return !first_invalid(s).has_value(); }

inline std::string encode(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return out;
}

/// Number of code points; invalid bytes count as one each.
inline std::size_t length(std::string_view s) {
  std::size_t n = 0, pos = 0;
  while (pos < s.size()) {
    if (!decode(s, pos)) ++pos;
    ++n;
  }
  return n;
}

/// Splits into one string per code point.
inline std::vector<std::string> chars(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t at = pos;
    if (!decode(s, pos)) pos = at + 1;
    out.emplace_back(s.substr(at, pos - at));
  }
  return out;
}

/// Byte offset of code point index `cp_index` (or s.size() past the end).
inline std::size_t byte_offset(std::string_view s, std::size_t cp_index) {
  std::size_t pos = 0;
  for (std::size_t i = 0; i < cp_index && pos < s.size(); ++i) {
    std::size_t at = pos;
    if (!decode(s, pos)) pos = at + 1;
  }
  return pos;
}

inline bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace mcw::utf8

#endif  // MCW_UTF8_HPP

#ifndef MCW_IO_HPP
#define MCW_IO_HPP

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mcw/errors.hpp"
#include "mcw/utf8.hpp"

namespace mcw::io {

/// Reads a whole file. Missing or unreadable files raise ConfigError naming the path.
inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Rejects content that is not UTF-8, reporting the line and byte offset of the first bad byte.
inline void require_utf8(std::string_view content, const std::string& name) {
  if (auto bad = utf8::first_invalid(content)) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < *bad; ++i)
      if (content[i] == '\n') ++line;
    throw ParseError(name + ": not valid UTF-8", line, *bad);
  }
}

inline std::string read_utf8_file(const std::filesystem::path& path) {
  std::string content = read_file(path);
  require_utf8(content, path.string());
  return content;
}

struct Line {
  std::string_view text;  // without the trailing newline (and '\r')
  std::size_t number;     // 1-based
  std::size_t offset;     // byte offset of the first character
};

/// Calls `fn` for every line of `content`. A final line without newline is included.
inline void for_each_line(std::string_view content, const std::function<void(const Line&)>& fn) {
  std::size_t start = 0, number = 1;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view text = content.substr(start, end - start);
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    fn(Line{text, number, start});
    start = end + 1;
    ++number;
  }
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t end = s.find(sep, start);
    if (end == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

/// Writes via a temporary file and rename so readers never see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write file: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw ConfigError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace mcw::io

#endif  // MCW_IO_HPP

#ifndef MCW_TOKENIZE_HPP
#define MCW_TOKENIZE_HPP

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "mcw/io.hpp"
#include "mcw/utf8.hpp"

namespace mcw {

/// Text -> tokens. Any callable works; GreedyTokenizer is the default.
using Tokenizer = std::function<std::vector<std::string>(std::string_view)>;
using Stoplist = std::unordered_set<std::string>;

inline Stoplist parse_stoplist(std::string_view content) {
  Stoplist out;
  io::for_each_line(content, [&](const io::Line& line) {
    auto w = io::trim(line.text);
    if (!w.empty() && w.front() != '#') out.emplace(w);
  });
  return out;
}

inline Stoplist load_stoplist(const std::filesystem::path& path) { return parse_stoplist(io::read_utf8_file(path)); }

inline std::vector<std::string> remove_stopwords(std::vector<std::string> tokens, const Stoplist& stop) {
  std::erase_if(tokens, [&](const std::string& t) { return stop.count(t) != 0; });
  return tokens;
}

namespace detail {
inline bool is_separator(char32_t c) {
  if (c < 0x80) return !(std::isalnum(static_cast<int>(c)) || c == '_' || c == '\'');
  return (c >= 0x2000 && c <= 0x206F) ||  // general punctuation, quotes, ellipsis
         (c >= 0x3000 && c <= 0x303F) ||                  // CJK symbols and punctuation
         (c >= 0xFF00 && c <= 0xFF0F) || (c >= 0xFF1A && c <= 0xFF20) || (c >= 0xFF3B && c <= 0xFF40) ||
         (c >= 0xFF5B && c <= 0xFF65) || c == 0x00A0;
}
}  // namespace detail

/// Splits on whitespace and punctuation. ASCII runs become one lowercased token; other runs
/// are segmented by greedy longest match against a vocabulary, falling back to single
/// characters.
class GreedyTokenizer {
 public:
  GreedyTokenizer() = default;

  template <typename Range>
  explicit GreedyTokenizer(const Range& vocabulary) {
    for (const auto& w : vocabulary) add(w);
  }

  void add(std::string_view word) {
    if (word.empty()) return;
    vocab_.emplace(word);
    max_len_ = std::max(max_len_, utf8::length(word));
  }

  std::vector<std::string> operator()(std::string_view text) const {
    std::vector<std::string> out;
    std::size_t pos = 0;
    std::string ascii;
    std::vector<std::string> run;  // non-ASCII code points of the current run
    auto flush = [&] {
      if (!ascii.empty()) {
        out.push_back(std::move(ascii));
        ascii.clear();
      }
      segment(run, out);
      run.clear();
    };
    while (pos < text.size()) {
      std::size_t at = pos;
      auto cp = utf8::decode(text, pos);
      if (!cp) {
        pos = at + 1;
        continue;
      }
      if (detail::is_separator(*cp)) {
        flush();
      } else if (*cp < 0x80) {
        if (!run.empty()) flush();
        ascii += static_cast<char>(std::tolower(static_cast<int>(*cp)));
      } else {
        if (!ascii.empty()) flush();
        run.emplace_back(text.substr(at, pos - at));
      }
    }
    flush();
    return out;
  }

 private:
  void segment(const std::vector<std::string>& run, std::vector<std::string>& out) const {
    std::size_t i = 0;
    while (i < run.size()) {
      std::size_t take = 1;
      for (std::size_t len = std::min(max_len_, run.size() - i); len >= 2; --len) {
        std::string cand;
        for (std::size_t k = 0; k < len; ++k) cand += run[i + k];
        if (vocab_.count(cand)) {
          take = len;
          break;
        }
      }
      std::string tok;
      for (std::size_t k = 0; k < take; ++k) tok += run[i + k];
      out.push_back(std::move(tok));
      i += take;
    }
  }

  std::unordered_set<std::string> vocab_;
  std::size_t max_len_ = 1;
};

}  // namespace mcw

#endif  // MCW_TOKENIZE_HPP

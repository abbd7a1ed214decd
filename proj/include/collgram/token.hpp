#ifndef COLLGRAM_TOKEN_HPP
#define COLLGRAM_TOKEN_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <istream>
#include <optional>
#include <ranges>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "collgram/error.hpp"

namespace collgram {

enum class TokenKind { word, punctuation, non_word, sentence_break };

inline std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::word: return "word";
    case TokenKind::punctuation: return "punctuation";
    case TokenKind::non_word: return "non-word";
    case TokenKind::sentence_break: return "sentence-break";
  }
  return "?";
}

struct Token {
  std::string surface;
  std::string folded;  // simple lowercase fold of surface
  std::optional<std::string> tag;
  TokenKind kind = TokenKind::word;

  const std::string& form(bool fold_case) const { return fold_case ? folded : surface; }
  bool is_word() const { return kind == TokenKind::word; }

  friend bool operator==(const Token&, const Token&) = default;
};

// ---------------------------------------------------------------------------
// UTF-8 helpers

namespace utf8 {

inline constexpr char32_t replacement = 0xFFFD;

/// Decodes one code point starting at `pos`; invalid sequences consume one
/// byte and yield U+FFFD.
inline std::pair<char32_t, std::size_t> decode(std::string_view s, std::size_t pos) {
  auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
  const unsigned char b0 = byte(pos);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {replacement, 1};
  }
  if (pos + len > s.size()) return {replacement, 1};
  for (std::size_t i = 1; i < len; ++i) {
    const unsigned char b = byte(pos + i);
    if ((b & 0xC0) != 0x80) return {replacement, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr char32_t min_for_len[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
    return {replacement, 1};
  return {cp, len};
}

inline void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline bool is_space(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' ||
         c == 0x85 || c == 0xA0 || c == 0x1680 || (c >= 0x2000 && c <= 0x200A) ||
         c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000 ||
         c == 0xFEFF;
}

inline bool is_digit(char32_t c) {
  return (c >= '0' && c <= '9') || (c >= 0xFF10 && c <= 0xFF19) ||
         (c >= 0x0660 && c <= 0x0669) || (c >= 0x06F0 && c <= 0x06F9) ||
         (c >= 0x0966 && c <= 0x096F);
}

/// Letter test without a full Unicode database: ASCII letters plus every
/// non-ASCII code point outside the common symbol, punctuation and digit
/// blocks.
inline bool is_letter(char32_t c) {
  if (c < 0x80) return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  if (c <= 0xBF) return c == 0xAA || c == 0xB5 || c == 0xBA;
  if (c == 0xD7 || c == 0xF7) return false;
  if (is_space(c) || is_digit(c)) return false;
  if (c >= 0x2000 && c <= 0x2BFF) return false;  // punctuation, symbols, arrows, math
  if (c >= 0x3000 && c <= 0x303F) return false;
  if (c >= 0xFE30 && c <= 0xFE4F) return false;
  if ((c >= 0xFF00 && c <= 0xFF0F) || (c >= 0xFF1A && c <= 0xFF20) ||
      (c >= 0xFF3B && c <= 0xFF40) || (c >= 0xFF5B && c <= 0xFF65))
    return false;
  if (c == replacement || (c >= 0xE000 && c <= 0xF8FF)) return false;
  if (c >= 0x1F000) return false;  // emoji and pictographs
  return true;
}

inline bool is_apostrophe(char32_t c) { return c == '\'' || c == 0x2019; }
inline bool is_hyphen(char32_t c) { return c == '-' || c == 0x2010 || c == 0x2011; }

inline char32_t to_lower(char32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 0x20;
  if (c < 0xC0) return c;
  if (c <= 0xDE) return c == 0xD7 ? c : c + 0x20;
  if (c >= 0x100 && c <= 0x17F) {
    if (c == 0x130) return 'i';
    if (c == 0x178) return 0xFF;
    const bool even_upper = (c <= 0x137) || (c >= 0x14A && c <= 0x177);
    const bool odd_upper = (c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E);
    if (even_upper && c % 2 == 0) return c + 1;
    if (odd_upper && c % 2 == 1) return c + 1;
    return c;
  }
  if (c == 0x386) return 0x3AC;
  if (c >= 0x388 && c <= 0x38A) return c + 0x25;
  if (c == 0x38C) return 0x3CC;
  if (c == 0x38E || c == 0x38F) return c + 0x3F;
  if (c >= 0x391 && c <= 0x3AB && c != 0x3A2) return c + 0x20;
  if (c >= 0x410 && c <= 0x42F) return c + 0x20;
  if (c >= 0x400 && c <= 0x40F) return c + 0x50;
  return c;
}

}  // namespace utf8

/// Simple (one-to-one) lowercase fold. Idempotent.
inline std::string fold_case(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t pos = 0; pos < text.size();) {
    const auto [cp, len] = utf8::decode(text, pos);
    if (cp == utf8::replacement && len == 1)
      out.push_back(text[pos]);  // keep invalid bytes untouched
    else if (cp < 0x80)
      out.push_back(static_cast<char>(utf8::to_lower(cp)));
    else
      utf8::append(out, utf8::to_lower(cp));
    pos += len;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tag patterns

/// Tag classification tables. Defaults follow CLAWS7: proper nouns start
/// with NP, numbers with MC, and punctuation is tagged with the punctuation
/// character itself (or a Y-series / C5 PU* name in some outputs).
struct TagPatterns {
  std::set<std::string, std::less<>> punctuation_tags{
      "!", "\"", "'", "(", ")", ",", "-", ".", "...", ":", ";", "?",
      "YBL", "YBR", "YCOL", "YCOM", "YDSH", "YEX", "YLIP", "YQUE", "YQUO", "YSCOL", "YSTP",
      "PUN", "PUL", "PUR", "PUQ"};
  std::vector<std::string> proper_name_prefixes{"NP"};
  std::vector<std::string> number_prefixes{"MC"};

  /// Listed tags, plus any tag made only of non-alphanumeric characters.
  bool is_punctuation(std::string_view tag) const {
    if (punctuation_tags.contains(tag)) return true;
    return !tag.empty() && std::none_of(tag.begin(), tag.end(), [](char c) {
      const auto u = static_cast<unsigned char>(c);
      return std::isalnum(u) || u >= 0x80;
    });
  }
};

// ---------------------------------------------------------------------------
// Plain-text tokenizer

namespace detail {

inline Token make_token(std::string surface, std::optional<std::string> tag, TokenKind kind) {
  Token t;
  t.folded = fold_case(surface);
  t.surface = std::move(surface);
  t.tag = std::move(tag);
  t.kind = kind;
  return t;
}

inline Token sentence_break() {
  Token t;
  t.kind = TokenKind::sentence_break;
  return t;
}

}  // namespace detail

/// Splits untagged text into tokens.
///
/// Words are maximal runs of letters with optional internal apostrophes or
/// hyphens ("don't", "eight-hour"). A run that also contains a digit
/// ("8", "mp3", "1990s") becomes a single non-word token. Every other
/// non-space code point is its own punctuation token. A blank line (two or
/// more line breaks inside one whitespace run) yields a sentence break.
inline std::vector<Token> tokenize_plain(std::string_view text) {
  std::vector<Token> out;
  std::size_t pos = 0;
  const std::size_t size = text.size();

  auto peek = [&](std::size_t at) -> std::pair<char32_t, std::size_t> {
    if (at >= size) return {0, 0};
    return utf8::decode(text, at);
  };
  auto alnum = [](char32_t c) { return utf8::is_letter(c) || utf8::is_digit(c); };

  while (pos < size) {
    auto [cp, len] = peek(pos);
    if (utf8::is_space(cp)) {
      int newlines = 0;
      while (pos < size) {
        std::tie(cp, len) = peek(pos);
        if (!utf8::is_space(cp)) break;
        if (cp == '\n') ++newlines;
        pos += len;
      }
      if (newlines >= 2 && !out.empty() && out.back().kind != TokenKind::sentence_break)
        out.push_back(detail::sentence_break());
      continue;
    }
    if (alnum(cp)) {
      const std::size_t start = pos;
      bool has_digit = false;
      while (pos < size) {
        std::tie(cp, len) = peek(pos);
        if (alnum(cp)) {
          has_digit = has_digit || utf8::is_digit(cp);
          pos += len;
          continue;
        }
        if (utf8::is_apostrophe(cp) || utf8::is_hyphen(cp)) {
          const auto [next, next_len] = peek(pos + len);
          if (next_len > 0 && alnum(next)) {
            pos += len;
            continue;
          }
        }
        break;
      }
      out.push_back(detail::make_token(std::string(text.substr(start, pos - start)), std::nullopt,
                                       has_digit ? TokenKind::non_word : TokenKind::word));
      continue;
    }
    out.push_back(detail::make_token(std::string(text.substr(pos, len)), std::nullopt,
                                     TokenKind::punctuation));
    pos += len;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tagged input

enum class TaggedFormat { vertical, underscore };

/// Parses POS-tagged lines.
///
/// vertical:   one `surface<TAB>tag` per line (extra TAB fields ignored),
///             blank line = sentence break.
/// underscore: whitespace-separated `surface_TAG` items, split at the last
///             underscore; a blank line is also a sentence break.
///
/// Line numbers in errors are 1-based.
template <std::ranges::input_range Lines>
std::vector<Token> parse_tagged(const Lines& lines, TaggedFormat format,
                                const TagPatterns& tags = {}) {
  std::vector<Token> out;
  auto emit = [&](std::string surface, std::string tag) {
    const TokenKind kind = tags.is_punctuation(tag) ? TokenKind::punctuation : TokenKind::word;
    out.push_back(detail::make_token(std::move(surface), std::move(tag), kind));
  };
  auto emit_break = [&] {
    if (!out.empty() && out.back().kind != TokenKind::sentence_break)
      out.push_back(detail::sentence_break());
  };

  std::size_t line_no = 0;
  for (const auto& raw : lines) {
    ++line_no;
    std::string_view line(raw);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const bool blank = std::all_of(line.begin(), line.end(), [](char c) {
      return c == ' ' || c == '\t';
    });
    if (blank) {
      emit_break();
      continue;
    }

    if (format == TaggedFormat::vertical) {
      const auto tab = line.find('\t');
      if (tab == std::string_view::npos)
        throw ParseError(line_no, "missing TAB separator in '" + std::string(line) + "'");
      const std::string_view surface = line.substr(0, tab);
      std::string_view tag = line.substr(tab + 1);
      if (const auto next = tag.find('\t'); next != std::string_view::npos)
        tag = tag.substr(0, next);
      if (surface.empty() || tag.empty())
        throw ParseError(line_no, "empty surface or tag in '" + std::string(line) + "'");
      emit(std::string(surface), std::string(tag));
      continue;
    }

    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
      if (pos >= line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
      const std::string_view item = line.substr(pos, end - pos);
      const auto sep = item.rfind('_');
      if (sep == std::string_view::npos || sep == 0 || sep + 1 == item.size())
        throw ParseError(line_no, "item '" + std::string(item) + "' is not surface_TAG");
      emit(std::string(item.substr(0, sep)), std::string(item.substr(sep + 1)));
      pos = end;
    }
  }
  return out;
}

inline std::vector<Token> parse_tagged(std::istream& in, TaggedFormat format,
                                       const TagPatterns& tags = {}) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
  return parse_tagged(lines, format, tags);
}

}  // namespace collgram

#endif  // COLLGRAM_TOKEN_HPP

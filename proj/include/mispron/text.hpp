#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mispron {

struct Token {
  std::string surface;
  std::string norm;
  std::size_t index = 0;

  bool operator==(const Token&) const = default;
};

namespace detail {

// Decodes one UTF-8 code point starting at `pos`. Invalid sequences decode
// byte-wise as U+FFFD with length 1.
inline char32_t decode_utf8(std::string_view s, std::size_t pos, std::size_t& len) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  auto cont = [&](std::size_t k) -> int {
    if (pos + k >= s.size()) return -1;
    const auto b = static_cast<unsigned char>(s[pos + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) {
    len = 1;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0) {
    const int c1 = cont(1);
    if (c1 >= 0) {
      len = 2;
      return static_cast<char32_t>(((b0 & 0x1F) << 6) | c1);
    }
  } else if ((b0 & 0xF0) == 0xE0) {
    const int c1 = cont(1), c2 = c1 >= 0 ? cont(2) : -1;
    if (c2 >= 0) {
      len = 3;
      return static_cast<char32_t>(((b0 & 0x0F) << 12) | (c1 << 6) | c2);
    }
  } else if ((b0 & 0xF8) == 0xF0) {
    const int c1 = cont(1), c2 = c1 >= 0 ? cont(2) : -1, c3 = c2 >= 0 ? cont(3) : -1;
    if (c3 >= 0) {
      len = 4;
      return static_cast<char32_t>(((b0 & 0x07) << 18) | (c1 << 12) | (c2 << 6) | c3);
    }
  }
  len = 1;
  return 0xFFFD;
}

inline void append_utf8(std::string& out, char32_t cp) {
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
}

inline bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Non-ASCII code points kept as word characters: Latin-1/Extended letters and
// the alphabetic blocks up to General Punctuation. Everything from U+2000
// (punctuation, arrows, math, box drawing) through U+2BFF is dropped.
inline bool is_word_codepoint(char32_t cp) {
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0xC0 && cp < 0x2000) return true;
  if (cp >= 0x2C00 && cp < 0xFFF0 && !(cp >= 0x3000 && cp < 0x3040) &&
      !(cp >= 0xFE30 && cp < 0xFE70) && !(cp >= 0xFF00 && cp < 0xFF10))
    return true;
  return cp >= 0x10000;
}

}  // namespace detail

/// Folds typographic quotes, dashes, ellipses and no-break spaces to ASCII.
/// The arrow U+2192 is left alone; label parsing treats it specially.
inline std::string fold_to_ascii(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    std::size_t len = 1;
    const char32_t cp = detail::decode_utf8(text, i, len);
    switch (cp) {
      case 0x2018: case 0x2019: case 0x201A: case 0x201B:
      case 0x02BC: case 0x2032: case 0x00B4: case 0x0060:
        out += '\'';
        break;
      case 0x201C: case 0x201D: case 0x201E: case 0x201F: case 0x2033:
      case 0x00AB: case 0x00BB:
        out += '"';
        break;
      case 0x2010: case 0x2011: case 0x2012: case 0x2013:
      case 0x2014: case 0x2015: case 0x2212:
        out += '-';
        break;
      case 0x2026:
        out += "...";
        break;
      case 0x00A0: case 0x2007: case 0x202F: case 0x2009: case 0x200A:
        out += ' ';
        break;
      default:
        out.append(text.substr(i, len));
    }
    i += len;
  }
  return out;
}

/// Normalizes a single whitespace-free chunk: lowercase, keep letters, digits
/// and internal apostrophes/hyphens, drop everything else. Empty result means
/// the chunk carried no word content.
inline std::string normalize_word(std::string_view chunk) {
  std::string folded = fold_to_ascii(chunk);
  std::string kept;
  kept.reserve(folded.size());
  for (std::size_t i = 0; i < folded.size();) {
    std::size_t len = 1;
    char32_t cp = detail::decode_utf8(folded, i, len);
    i += len;
    if (cp < 0x80) {
      const char c = static_cast<char>(cp);
      if (c >= 'A' && c <= 'Z') {
        kept += static_cast<char>(c - 'A' + 'a');
      } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'' || c == '-') {
        kept += c;
      }
    } else if (detail::is_word_codepoint(cp)) {
      if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) cp += 0x20;  // Latin-1 upper
      detail::append_utf8(kept, cp);
    }
  }
  const auto first = kept.find_first_not_of("'-");
  if (first == std::string::npos) return {};
  const auto last = kept.find_last_not_of("'-");
  return kept.substr(first, last - first + 1);
}

/// Splits on whitespace and normalizes each chunk; chunks that normalize to
/// nothing are dropped before indices are assigned.
inline std::vector<Token> tokenize(std::string_view text) {
  const std::string folded = fold_to_ascii(text);
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < folded.size()) {
    while (i < folded.size() && detail::is_ascii_space(folded[i])) ++i;
    std::size_t j = i;
    while (j < folded.size() && !detail::is_ascii_space(folded[j])) ++j;
    if (j > i) {
      std::string surface = folded.substr(i, j - i);
      std::string norm = normalize_word(surface);
      if (!norm.empty()) {
        const std::size_t index = tokens.size();
        tokens.push_back(Token{std::move(surface), std::move(norm), index});
      }
    }
    i = j;
  }
  return tokens;
}

/// Space-joined normalized forms.
inline std::string join_norms(const std::vector<Token>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t.norm;
  }
  return out;
}

/// Convenience: tokenize then join, i.e. the canonical comparison form of a
/// free-text phrase.
inline std::string normalize_phrase(std::string_view text) { return join_norms(tokenize(text)); }

}  // namespace mispron

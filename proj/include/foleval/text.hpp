#ifndef FOLEVAL_TEXT_HPP
#define FOLEVAL_TEXT_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace foleval::text {

// ---------------------------------------------------------------------------
// UTF-8 <-> codepoints
// ---------------------------------------------------------------------------

inline std::vector<char32_t> decode_utf8(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    char32_t cp = 0;
    size_t len = 1;
    if (c < 0x80) {
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      cp = c & 0x1F;
      len = 2;
    } else if ((c & 0xF0) == 0xE0) {
      cp = c & 0x0F;
      len = 3;
    } else if ((c & 0xF8) == 0xF0) {
      cp = c & 0x07;
      len = 4;
    } else {
      cp = 0xFFFD;  // stray continuation byte
    }
    if (i + len > s.size()) {
      out.push_back(0xFFFD);
      break;
    }
    bool ok = true;
    for (size_t k = 1; k < len; ++k) {
      unsigned char cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    out.push_back(ok ? cp : 0xFFFD);
    i += len;
  }
  return out;
}

inline void append_utf8(std::string& out, char32_t cp) {
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

inline std::string encode_utf8(const std::vector<char32_t>& cps) {
  std::string out;
  out.reserve(cps.size() * 2);
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

// ---------------------------------------------------------------------------
// NFC normalization (composition of the common combining marks over Latin
// bases; precomposed input passes through unchanged)
// ---------------------------------------------------------------------------

inline char32_t compose_pair(char32_t base, char32_t mark) {
  struct Entry {
    char32_t base, mark, composed;
  };
  static const Entry table[] = {
      // combining grave U+0300
      {U'a', 0x300, 0xE0}, {U'e', 0x300, 0xE8}, {U'i', 0x300, 0xEC},
      {U'o', 0x300, 0xF2}, {U'u', 0x300, 0xF9}, {U'A', 0x300, 0xC0},
      {U'E', 0x300, 0xC8}, {U'I', 0x300, 0xCC}, {U'O', 0x300, 0xD2},
      {U'U', 0x300, 0xD9},
      // combining acute U+0301
      {U'a', 0x301, 0xE1}, {U'e', 0x301, 0xE9}, {U'i', 0x301, 0xED},
      {U'o', 0x301, 0xF3}, {U'u', 0x301, 0xFA}, {U'y', 0x301, 0xFD},
      {U'n', 0x301, 0x144}, {U'A', 0x301, 0xC1}, {U'E', 0x301, 0xC9},
      {U'I', 0x301, 0xCD}, {U'O', 0x301, 0xD3}, {U'U', 0x301, 0xDA},
      // combining circumflex U+0302
      {U'a', 0x302, 0xE2}, {U'e', 0x302, 0xEA}, {U'i', 0x302, 0xEE},
      {U'o', 0x302, 0xF4}, {U'u', 0x302, 0xFB},
      // combining tilde U+0303
      {U'a', 0x303, 0xE3}, {U'n', 0x303, 0xF1}, {U'o', 0x303, 0xF5},
      {U'N', 0x303, 0xD1},
      // combining diaeresis U+0308
      {U'a', 0x308, 0xE4}, {U'e', 0x308, 0xEB}, {U'i', 0x308, 0xEF},
      {U'o', 0x308, 0xF6}, {U'u', 0x308, 0xFC},
      // combining cedilla U+0327
      {U'c', 0x327, 0xE7}, {U'C', 0x327, 0xC7},
  };
  for (const auto& e : table) {
    if (e.base == base && e.mark == mark) return e.composed;
  }
  return 0;
}

inline std::string nfc(std::string_view s) {
  std::vector<char32_t> cps = decode_utf8(s);
  std::vector<char32_t> out;
  out.reserve(cps.size());
  for (char32_t cp : cps) {
    if (!out.empty()) {
      char32_t composed = compose_pair(out.back(), cp);
      if (composed != 0) {
        out.back() = composed;
        continue;
      }
    }
    out.push_back(cp);
  }
  return encode_utf8(out);
}

// ---------------------------------------------------------------------------
// Character classes
// ---------------------------------------------------------------------------

inline bool is_ascii_letter(char32_t cp) {
  return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z');
}

inline bool is_ascii_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }

// Latin script including the precomposed Latin-1/Extended ranges.
inline bool is_latin_letter(char32_t cp) {
  if (is_ascii_letter(cp)) return true;
  if (cp >= 0xC0 && cp <= 0xFF && cp != 0xD7 && cp != 0xF7) return true;
  if (cp >= 0x100 && cp <= 0x24F) return true;
  return false;
}

// Scripts tokenized one character per token.
inline bool is_cjk(char32_t cp) {
  return (cp >= 0x3040 && cp <= 0x309F) ||   // hiragana
         (cp >= 0x30A0 && cp <= 0x30FF) ||   // katakana
         (cp >= 0x3400 && cp <= 0x4DBF) ||   // CJK ext A
         (cp >= 0x4E00 && cp <= 0x9FFF) ||   // CJK unified
         (cp >= 0xF900 && cp <= 0xFAFF) ||   // CJK compat
         (cp >= 0x20000 && cp <= 0x2A6DF);   // CJK ext B
}

// BMP approximation of "letter", sufficient for the shipped corpora.
inline bool is_letter(char32_t cp) {
  if (is_latin_letter(cp) || is_cjk(cp)) return true;
  if (cp >= 0x370 && cp <= 0x3FF) return true;    // Greek
  if (cp >= 0x400 && cp <= 0x4FF) return true;    // Cyrillic
  if (cp >= 0x590 && cp <= 0x5FF) return true;    // Hebrew
  if (cp >= 0x600 && cp <= 0x6FF) return true;    // Arabic
  if (cp >= 0x900 && cp <= 0x97F) return true;    // Devanagari
  if (cp >= 0xAC00 && cp <= 0xD7AF) return true;  // Hangul
  return false;
}

inline char32_t to_lower(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;  // Latin-1 caps
  return cp;
}

inline char32_t to_upper(char32_t cp) {
  if (cp >= U'a' && cp <= U'z') return cp - 32;
  if (cp >= 0xE0 && cp <= 0xFE && cp != 0xF7) return cp - 32;
  return cp;
}

inline std::string lowercase(std::string_view s) {
  std::vector<char32_t> cps = decode_utf8(s);
  for (auto& cp : cps) cp = to_lower(cp);
  return encode_utf8(cps);
}

inline std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && (static_cast<unsigned char>(s[b]) <= ' ')) ++b;
  while (e > b && (static_cast<unsigned char>(s[e - 1]) <= ' ')) --e;
  return std::string(s.substr(b, e - b));
}

// ---------------------------------------------------------------------------
// Tokenization: NFC, lowercase Latin, split on whitespace/punctuation,
// CJK one token per character, order preserved.
// ---------------------------------------------------------------------------

inline std::vector<std::string> tokenize(std::string_view raw) {
  std::vector<char32_t> cps = decode_utf8(nfc(raw));
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  };
  for (char32_t cp : cps) {
    if (is_cjk(cp)) {
      flush();
      std::string one;
      append_utf8(one, cp);
      tokens.push_back(std::move(one));
    } else if (is_letter(cp) || is_ascii_digit(cp)) {
      append_utf8(current, to_lower(cp));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

// ---------------------------------------------------------------------------
// FNV-1a 64-bit
// ---------------------------------------------------------------------------

inline uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string to_hex(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return s;
}

}  // namespace foleval::text

#endif  // FOLEVAL_TEXT_HPP

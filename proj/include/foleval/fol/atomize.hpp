#ifndef FOLEVAL_FOL_ATOMIZE_HPP
#define FOLEVAL_FOL_ATOMIZE_HPP

#include <string>
#include <string_view>
#include <vector>

#include "foleval/errors.hpp"
#include "foleval/text.hpp"

namespace foleval::fol {

// "social media campaign" -> "SocialMediaCampaign".
// Latin words are split on whitespace/punctuation and capitalized; digits
// survive; non-Latin scripts pass through with separators removed.
inline std::string atomize(std::string_view phrase) {
  std::vector<char32_t> cps = text::decode_utf8(text::nfc(phrase));
  std::string out;
  bool word_start = true;
  for (char32_t cp : cps) {
    if (text::is_latin_letter(cp)) {
      text::append_utf8(out, word_start ? text::to_upper(cp) : cp);
      word_start = false;
    } else if (text::is_ascii_digit(cp)) {
      text::append_utf8(out, cp);
      word_start = false;
    } else if (text::is_letter(cp)) {
      // non-Latin: pass through unchanged
      text::append_utf8(out, cp);
      word_start = false;
    } else {
      word_start = true;  // separator
    }
  }
  if (out.empty()) {
    throw Error(Errc::empty_atom, "no identifier characters in phrase");
  }
  // identifiers must start with a letter
  if (text::is_ascii_digit(static_cast<char32_t>(static_cast<unsigned char>(out[0])))) {
    out = "N" + out;
  }
  return out;
}

// Inverse direction for gloss generation: "SocialMediaCampaign" -> "social media campaign".
inline std::string de_atomize(std::string_view identifier) {
  std::vector<char32_t> cps = text::decode_utf8(identifier);
  std::string out;
  for (size_t i = 0; i < cps.size(); ++i) {
    char32_t cp = cps[i];
    bool upper = text::is_latin_letter(cp) && text::to_lower(cp) != cp;
    if (upper && i > 0) out += ' ';
    if (cp == U'_') {
      out += ' ';
      continue;
    }
    text::append_utf8(out, text::to_lower(cp));
  }
  return out;
}

}  // namespace foleval::fol

#endif  // FOLEVAL_FOL_ATOMIZE_HPP

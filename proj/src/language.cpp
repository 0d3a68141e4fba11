#include "collage/language.hpp"

namespace collage::metrics {

namespace {

bool is_space(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\v' || cp == U'\f' ||
         cp == 0x00A0 || cp == 0x3000 || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 ||
         cp == 0x2029 || cp == 0x202F || cp == 0x205F;
}

}  // namespace

std::string_view language_tag(Language lang) {
  switch (lang) {
    case Language::English: return "en";
    case Language::Mandarin: return "zh";
    case Language::Arabic: return "ar";
    case Language::Other: break;
  }
  return "other";
}

std::optional<Language> parse_language_tag(std::string_view tag) {
  if (tag == "en") return Language::English;
  if (tag == "zh") return Language::Mandarin;
  if (tag == "ar") return Language::Arabic;
  if (tag == "other") return Language::Other;
  return std::nullopt;
}

std::vector<char32_t> decode_utf8(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    int extra = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      extra = 1;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      extra = 2;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      extra = 3;
      cp = b0 & 0x07;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    bool ok = i + static_cast<std::size_t>(extra) < text.size();
    for (int k = 1; ok && k <= extra; ++k) {
      const auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    // Reject overlong forms and surrogates.
    if (ok && ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) ||
               (extra == 3 && (cp < 0x10000 || cp > 0x10FFFF)) || (cp >= 0xD800 && cp <= 0xDFFF))) {
      ok = false;
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += 1 + static_cast<std::size_t>(extra);
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
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

bool is_cjk_ideograph(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) ||
         (cp >= 0xF900 && cp <= 0xFAFF) || (cp >= 0x20000 && cp <= 0x2A6DF) ||
         (cp >= 0x2A700 && cp <= 0x2EBEF) || (cp >= 0x2F800 && cp <= 0x2FA1F) ||
         (cp >= 0x30000 && cp <= 0x3134F) || cp == 0x3007;
}

bool is_arabic_letter(char32_t cp) {
  const bool in_block = (cp >= 0x0600 && cp <= 0x06FF) || (cp >= 0x0750 && cp <= 0x077F) ||
                        (cp >= 0x08A0 && cp <= 0x08FF) || (cp >= 0xFB50 && cp <= 0xFDFF) ||
                        (cp >= 0xFE70 && cp <= 0xFEFF);
  if (!in_block) return false;
  // digits, punctuation and number signs inside the blocks
  if (cp <= 0x061F && !(cp >= 0x0610 && cp <= 0x061A)) return false;
  if (cp >= 0x0660 && cp <= 0x066D) return false;
  if (cp == 0x06D4 || (cp >= 0x06F0 && cp <= 0x06F9) || (cp >= 0x06DD && cp <= 0x06DE)) return false;
  if (cp == 0xFD3E || cp == 0xFD3F) return false;
  return true;
}

bool is_latin_letter(char32_t cp) {
  if ((cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z')) return true;
  if (cp == 0xAA || cp == 0xBA) return true;
  if (cp >= 0xC0 && cp <= 0x24F) return cp != 0xD7 && cp != 0xF7;
  return (cp >= 0x1E00 && cp <= 0x1EFF) || (cp >= 0x2C60 && cp <= 0x2C7F) ||
         (cp >= 0xA720 && cp <= 0xA7FF) || (cp >= 0xFF21 && cp <= 0xFF3A) ||
         (cp >= 0xFF41 && cp <= 0xFF5A);
}

Language classify_token(std::string_view token) {
  for (char32_t cp : decode_utf8(token)) {
    if (is_cjk_ideograph(cp)) return Language::Mandarin;
    if (is_arabic_letter(cp)) return Language::Arabic;
    if (is_latin_letter(cp)) return Language::English;
  }
  return Language::Other;
}

std::vector<std::string> tokenize_mixed(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  };
  for (char32_t cp : decode_utf8(text)) {
    if (is_space(cp)) {
      flush();
    } else if (is_cjk_ideograph(cp)) {
      flush();
      std::string single;
      append_utf8(single, cp);
      tokens.push_back(std::move(single));
    } else {
      append_utf8(current, cp);
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char32_t cp : decode_utf8(text)) {
    if (is_space(cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      append_utf8(current, cp);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<std::string> split_characters(std::string_view text) {
  std::vector<std::string> tokens;
  for (char32_t cp : decode_utf8(text)) {
    if (is_space(cp)) continue;
    std::string single;
    append_utf8(single, cp);
    tokens.push_back(std::move(single));
  }
  return tokens;
}

}  // namespace collage::metrics

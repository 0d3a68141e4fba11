#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace collage::metrics {

enum class Language { Other, English, Mandarin, Arabic };

// Short tags used in text files: "other", "en", "zh", "ar".
std::string_view language_tag(Language lang);
std::optional<Language> parse_language_tag(std::string_view tag);

// Decodes UTF-8; invalid bytes come back as U+FFFD, one per byte.
std::vector<char32_t> decode_utf8(std::string_view text);
void append_utf8(std::string& out, char32_t cp);

bool is_cjk_ideograph(char32_t cp);
bool is_arabic_letter(char32_t cp);
bool is_latin_letter(char32_t cp);

// Script rule: the first letter (CJK ideograph, Arabic letter or Latin
// letter) decides the language; tokens without such a letter are Other.
Language classify_token(std::string_view token);

// Whitespace split, then every CJK ideograph becomes its own token while
// maximal runs of other non-space characters stay whole.
std::vector<std::string> tokenize_mixed(std::string_view text);

// Whitespace split only.
std::vector<std::string> split_words(std::string_view text);

// Every non-whitespace codepoint is a token.
std::vector<std::string> split_characters(std::string_view text);

}  // namespace collage::metrics

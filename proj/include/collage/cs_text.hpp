#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "collage/language.hpp"
#include "collage/rng.hpp"

namespace collage::cstext {

// One code-switched utterance: tokens with a language tag each.
struct CsUtterance {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<metrics::Language> tags;

  bool operator==(const CsUtterance&) const = default;
};

using CsText = std::vector<CsUtterance>;

// CS text file: `id<TAB>text[<TAB>tags]`, UTF-8. Text is split with
// tokenize_mixed, so Mandarin may be given unsplit. The optional third
// column holds one language tag per token ("en", "zh", "ar", "other");
// without it tags come from classify_token. Ids must be unique, non-empty
// and usable as file names.
CsText read_cs_text(std::istream& in, std::string_view source_name = "<cs-text>");
CsText load_cs_text(const std::filesystem::path& path);
void write_cs_text(const CsText& text, std::ostream& out);

struct ParallelSentence {
  std::string id;
  std::vector<std::string> source_tokens;  // matrix language
  std::vector<std::string> target_tokens;  // embedded language
  std::vector<std::pair<std::size_t, std::size_t>> alignment;  // (source index, target index)
};

struct ReplacementPolicy {
  double rate = 0.2;
  std::uint64_t seed = 0;
  metrics::Language source_language = metrics::Language::Arabic;
  metrics::Language target_language = metrics::Language::English;
};

struct ReplacementResult {
  CsUtterance utterance;
  std::size_t eligible = 0;  // source tokens with at least one aligned target
  std::size_t replaced = 0;
};

// Each eligible source token is replaced with probability `rate` (one draw
// per eligible token, in source order) by its aligned target tokens in
// target order. Within a run of consecutive replaced tokens a target index
// is emitted once. Unaligned tokens are never replaced.
ReplacementResult random_replace(const ParallelSentence& sent, const ReplacementPolicy& policy, RandomStream& rng);

struct SynthesisResult {
  CsText text;
  std::size_t eligible = 0;
  std::size_t replaced = 0;
};

// random_replace over a corpus; sentence i uses derive_stream(seed, i).
SynthesisResult synthesize_corpus(std::span<const ParallelSentence> pairs, const ReplacementPolicy& policy);

// Parallel text `id<TAB>source<TAB>target` plus Pharaoh alignments
// (`i-j` pairs, 0-based, one line per sentence in the same order).
std::vector<ParallelSentence> read_parallel(std::istream& text, std::istream& alignments,
                                            std::string_view text_name = "<parallel>",
                                            std::string_view alignment_name = "<alignment>");

}  // namespace collage::cstext

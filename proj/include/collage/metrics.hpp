#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "collage/language.hpp"

namespace collage::metrics {

struct TaggedUtterance {
  std::vector<std::string> tokens;
  std::vector<Language> tags;  // parallel to tokens

  static TaggedUtterance from_tokens(std::vector<std::string> tokens);
};

// Code-Mixing Index on a 0..100 scale. Other-tagged tokens are dropped before
// counting, and alternation points are counted between consecutive remaining
// tokens. Empty after dropping -> nullopt.
std::optional<double> cmi(std::span<const Language> tags);
inline std::optional<double> cmi(const TaggedUtterance& utt) { return cmi(utt.tags); }

struct CorpusCmi {
  std::optional<double> mean;  // nullopt when no utterance has a defined CMI
  std::size_t counted = 0;     // utterances contributing to the mean
};

CorpusCmi corpus_cmi(std::span<const TaggedUtterance> utterances);

struct ErrorRateResult {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t reference_length = 0;

  std::size_t errors() const { return substitutions + deletions + insertions; }
  double rate() const { return static_cast<double>(errors()) / static_cast<double>(reference_length); }
  ErrorRateResult& operator+=(const ErrorRateResult& other);
};

// Unit-cost Levenshtein alignment. Among the minimum-cost alignments the one
// with the most substitutions is chosen (equivalently, fewest insertions and
// deletions), which fixes the counts uniquely. An empty reference is an
// error (the rate would be undefined).
ErrorRateResult error_rate(std::span<const std::string> ref, std::span<const std::string> hyp);

// Same alignment without the empty-reference check; used for corpus totals.
ErrorRateResult edit_counts(std::span<const std::string> ref, std::span<const std::string> hyp);

enum class ScoreMode { Wer, Cer, Mer };

std::optional<ScoreMode> parse_score_mode(std::string_view name);
std::vector<std::string> tokenize_for(ScoreMode mode, std::string_view text);

struct ScoredPair {
  std::string id;
  std::string reference;
  std::string hypothesis;
};

struct FilteredCmi {
  std::optional<double> mean;  // nullopt: no hypothesis passed the filter
  std::size_t retained = 0;    // utterances whose MER <= threshold
  std::size_t total = 0;
};

// Mean CMI of the hypotheses whose mixed error rate is <= threshold.
// Pairs with an empty reference are never retained.
FilteredCmi filtered_corpus_cmi(std::span<const ScoredPair> pairs, double threshold = 0.20);

}  // namespace collage::metrics

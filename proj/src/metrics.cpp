#include "collage/metrics.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "collage/errors.hpp"

namespace collage::metrics {

TaggedUtterance TaggedUtterance::from_tokens(std::vector<std::string> tokens) {
  TaggedUtterance utt;
  utt.tags.reserve(tokens.size());
  for (const auto& t : tokens) utt.tags.push_back(classify_token(t));
  utt.tokens = std::move(tokens);
  return utt;
}

std::optional<double> cmi(std::span<const Language> tags) {
  std::array<std::size_t, 4> counts{};
  std::size_t n = 0;
  std::size_t alternations = 0;
  std::optional<Language> previous;
  for (Language tag : tags) {
    if (tag == Language::Other) continue;
    ++counts[static_cast<std::size_t>(tag)];
    ++n;
    if (previous && *previous != tag) ++alternations;
    previous = tag;
  }
  if (n == 0) return std::nullopt;
  const std::size_t dominant = *std::max_element(counts.begin(), counts.end());
  const double num = 0.5 * static_cast<double>(n - dominant) + 0.5 * static_cast<double>(alternations);
  return 100.0 * num / static_cast<double>(n);
}

CorpusCmi corpus_cmi(std::span<const TaggedUtterance> utterances) {
  CorpusCmi result;
  double sum = 0.0;
  for (const auto& utt : utterances) {
    if (auto value = cmi(utt)) {
      sum += *value;
      ++result.counted;
    }
  }
  if (result.counted > 0) result.mean = sum / static_cast<double>(result.counted);
  return result;
}

ErrorRateResult& ErrorRateResult::operator+=(const ErrorRateResult& other) {
  substitutions += other.substitutions;
  deletions += other.deletions;
  insertions += other.insertions;
  reference_length += other.reference_length;
  return *this;
}

ErrorRateResult edit_counts(std::span<const std::string> ref, std::span<const std::string> hyp) {
  const std::size_t m = ref.size();
  const std::size_t n = hyp.size();
  // (edits, deletions) compared lexicographically. For a fixed cell the
  // difference insertions - deletions is constant, so minimizing deletions
  // among minimal-edit paths maximizes substitutions.
  using Cost = std::pair<std::size_t, std::size_t>;
  std::vector<Cost> table((m + 1) * (n + 1));
  auto at = [&](std::size_t i, std::size_t j) -> Cost& { return table[i * (n + 1) + j]; };

  for (std::size_t i = 0; i <= m; ++i) at(i, 0) = {i, i};
  for (std::size_t j = 0; j <= n; ++j) at(0, j) = {j, 0};
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const Cost& d = at(i - 1, j - 1);
      Cost best{d.first + (ref[i - 1] == hyp[j - 1] ? 0 : 1), d.second};
      const Cost& l = at(i, j - 1);
      best = std::min(best, Cost{l.first + 1, l.second});
      const Cost& u = at(i - 1, j);
      best = std::min(best, Cost{u.first + 1, u.second + 1});
      at(i, j) = best;
    }
  }

  const auto [edits, deletions] = at(m, n);
  ErrorRateResult result;
  result.reference_length = m;
  result.deletions = deletions;
  result.insertions = deletions + n - m;  // n - m may be negative; unsigned wrap cancels
  result.substitutions = edits - result.deletions - result.insertions;
  return result;
}

ErrorRateResult error_rate(std::span<const std::string> ref, std::span<const std::string> hyp) {
  if (ref.empty()) throw ValidationError("error rate undefined: empty reference");
  return edit_counts(ref, hyp);
}

std::optional<ScoreMode> parse_score_mode(std::string_view name) {
  if (name == "wer") return ScoreMode::Wer;
  if (name == "cer") return ScoreMode::Cer;
  if (name == "mer") return ScoreMode::Mer;
  return std::nullopt;
}

std::vector<std::string> tokenize_for(ScoreMode mode, std::string_view text) {
  switch (mode) {
    case ScoreMode::Wer: return split_words(text);
    case ScoreMode::Cer: return split_characters(text);
    case ScoreMode::Mer: break;
  }
  return tokenize_mixed(text);
}

FilteredCmi filtered_corpus_cmi(std::span<const ScoredPair> pairs, double threshold) {
  FilteredCmi result;
  result.total = pairs.size();
  double sum = 0.0;
  std::size_t defined = 0;
  for (const auto& pair : pairs) {
    const auto ref = tokenize_mixed(pair.reference);
    if (ref.empty()) continue;
    auto hyp = tokenize_mixed(pair.hypothesis);
    if (edit_counts(ref, hyp).rate() > threshold) continue;
    ++result.retained;
    if (auto value = cmi(TaggedUtterance::from_tokens(std::move(hyp)))) {
      sum += *value;
      ++defined;
    }
  }
  if (defined > 0) result.mean = sum / static_cast<double>(defined);
  return result;
}

}  // namespace collage::metrics

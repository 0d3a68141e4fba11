#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "collage/corpus.hpp"
#include "collage/rng.hpp"

namespace collage::units {

// A sequence of 1..n consecutive unit tokens.
struct UnitKey {
  std::vector<std::string> tokens;

  std::size_t size() const { return tokens.size(); }
  std::span<const std::string> view() const { return tokens; }
  std::string to_string() const;  // tokens joined by single spaces
  auto operator<=>(const UnitKey&) const = default;
  bool operator==(const UnitKey&) const = default;
};

// Orders keys lexicographically and allows lookup by a token span without
// building a UnitKey.
struct KeyLess {
  using is_transparent = void;
  bool operator()(std::span<const std::string> a, std::span<const std::string> b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
  bool operator()(const UnitKey& a, const UnitKey& b) const { return (*this)(a.view(), b.view()); }
  bool operator()(const UnitKey& a, std::span<const std::string> b) const { return (*this)(a.view(), b); }
  bool operator()(std::span<const std::string> a, const UnitKey& b) const { return (*this)(a, b.view()); }
};

// An audio span realizing a key: first token start to last token end.
struct CutRef {
  std::string recording_id;
  int channel = 1;  // CTM channel of the tokens
  double start = 0.0;
  double end = 0.0;
  UnitKey key;

  double duration() const { return end - start; }
  bool operator==(const CutRef&) const = default;
};

inline constexpr int kDefaultNgram = 2;
inline constexpr double kDefaultGapTolerance = 0.2;

class Inventory {
public:
  using Entries = std::map<UnitKey, std::vector<CutRef>, KeyLess>;

  explicit Inventory(int n_max = kDefaultNgram, double gap_tolerance = kDefaultGapTolerance);

  int n_max() const { return n_max_; }
  double gap_tolerance() const { return gap_tolerance_; }

  // Indexes every contiguous run of 1..n_max tokens whose inter-token gaps
  // are all <= gap_tolerance. Throws ValidationError if the set does not
  // validate. Existing entries are kept, so growth is monotone.
  void add(const ingest::SupervisionSet& set);

  // Appends one cut under cut.key (key length must be 1..n_max).
  void add_cut(CutRef cut);

  const std::vector<CutRef>* find(std::span<const std::string> tokens) const;
  const std::vector<CutRef>* find(const UnitKey& key) const { return find(key.view()); }

  const Entries& entries() const { return entries_; }
  std::size_t key_count() const { return entries_.size(); }
  std::size_t cut_count() const;
  // Number of distinct keys for each key length 1..n_max.
  std::vector<std::size_t> keys_per_length() const;

  bool operator==(const Inventory&) const = default;

private:
  int n_max_;
  double gap_tolerance_;
  Entries entries_;
};

Inventory build_inventory(const ingest::SupervisionSet& set, int n = kDefaultNgram,
                          double gap_tolerance = kDefaultGapTolerance);

struct MatchResult {
  std::vector<UnitKey> units;     // greedy longest-match segmentation
  std::vector<std::string> oov;   // tokens without a unigram entry, first-seen order

  bool ok() const { return oov.empty(); }
};

// Greedy left-to-right segmentation: at each position take the longest key
// (length <= n_max) present in the inventory, backing off to shorter keys.
// Tokens with no unigram are collected in `oov` and skipped.
MatchResult get_consec_units(std::span<const std::string> utterance, const Inventory& inv);

// Uniform draw over the key's cuts using exactly one draw from `rng`.
// Throws LookupError when the key is absent.
const CutRef& sample_unit(const Inventory& inv, const UnitKey& key, RandomStream& rng);

// Text dump, one cut per line after a header:
//   # collage-inventory v1 n_max=<n> gap_tolerance=<seconds>
//   <space-joined key tokens> TAB <recording_id> TAB <ctm channel> TAB <start> TAB <end>
// Records are ordered by key, cuts in insertion order.
void dump_inventory(const Inventory& inv, std::ostream& out);
Inventory load_inventory(std::istream& in, std::string_view source_name = "<inventory>");

}  // namespace collage::units

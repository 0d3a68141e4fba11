#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

namespace collage::toy {

// A small synthetic corpus: three 16 kHz recordings (~10 s each) in which
// every "word" is a short enveloped tone, a CTM aligning them, and a CS text
// mixing English words with Mandarin characters.
struct ToyCorpusFiles {
  std::filesystem::path corpus_manifest;
  std::filesystem::path ctm;
  std::filesystem::path cs_text;
};

inline constexpr int kToySampleRate = 16000;

ToyCorpusFiles write_toy_corpus(const std::filesystem::path& dir, std::size_t sentences = 20,
                                std::uint64_t seed = 7);

}  // namespace collage::toy

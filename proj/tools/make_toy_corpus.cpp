// Writes the synthetic demo corpus used by the end-to-end tests.
#include <cstdlib>
#include <iostream>
#include <string>

#include "collage/errors.hpp"
#include "collage/toy_corpus.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_toy_corpus <dir> [sentences] [seed]\n";
    return 1;
  }
  const std::size_t sentences = argc > 2 ? std::stoul(argv[2]) : 20;
  const std::uint64_t seed = argc > 3 ? std::stoull(argv[3]) : 7;
  try {
    const auto files = collage::toy::write_toy_corpus(argv[1], sentences, seed);
    std::cout << files.corpus_manifest.string() << '\n' << files.ctm.string() << '\n' << files.cs_text.string() << '\n';
  } catch (const collage::Error& e) {
    std::cerr << e.what() << '\n';
    return 3;
  }
  return 0;
}

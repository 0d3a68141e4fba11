#include "collage/toy_corpus.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "collage/corpus.hpp"
#include "collage/errors.hpp"
#include "collage/rng.hpp"
#include "collage/wav.hpp"

namespace collage::toy {

namespace {

namespace fs = std::filesystem;

const std::array<const char*, 8> kEnglish = {"hello", "world", "good", "morning", "thank", "you", "very", "much"};
const std::array<const char*, 8> kMandarin = {"你", "好", "谢", "早", "上", "很", "多", "们"};

double tone_frequency(std::size_t vocab_index, bool mandarin) {
  return 220.0 + 55.0 * static_cast<double>(vocab_index) + (mandarin ? 27.5 : 0.0);
}

struct Word {
  std::string token;
  double start;
  double duration;
};

// Renders `words` as tones into a recording of `seconds` length and returns
// the alignment.
std::vector<Word> render_recording(const fs::path& wav_path, double seconds, bool english, bool mandarin,
                                   RandomStream& rng) {
  const int rate = kToySampleRate;
  std::vector<float> samples(static_cast<std::size_t>(seconds * rate), 0.0f);
  std::vector<Word> words;
  double t = 0.20;
  std::size_t count = 0;
  while (true) {
    const bool pick_mandarin = mandarin && (!english || uniform_index(rng, 2) == 1);
    const std::size_t v = uniform_index(rng, 8);
    const double duration = 0.30 + 0.05 * static_cast<double>(uniform_index(rng, 4));
    if (t + duration + 0.2 > seconds) break;
    words.push_back({pick_mandarin ? kMandarin[v] : kEnglish[v], t, duration});

    const double freq = tone_frequency(v, pick_mandarin);
    const double amplitude = 0.15 + 0.05 * static_cast<double>(uniform_index(rng, 4));
    const auto first = static_cast<std::size_t>(std::llround(t * rate));
    const auto n = static_cast<std::size_t>(std::llround(duration * rate));
    for (std::size_t i = 0; i < n && first + i < samples.size(); ++i) {
      const double phase = 2.0 * std::numbers::pi * freq * static_cast<double>(i) / rate;
      const double envelope = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / (n - 1));
      samples[first + i] += static_cast<float>(amplitude * envelope * std::sin(phase));
    }
    // Mostly tight gaps (bigram-eligible), every fourth one too wide.
    ++count;
    t = std::round((t + duration + (count % 4 == 0 ? 0.35 : 0.10)) * 1000.0) / 1000.0;
  }
  // Low noise floor so no window is digitally silent.
  for (auto& s : samples) s += static_cast<float>((uniform_unit(rng) - 0.5) * 2e-3);
  wav::write_mono16(wav_path, std::span<const float>(samples), rate);
  return words;
}

}  // namespace

ToyCorpusFiles write_toy_corpus(const fs::path& dir, std::size_t sentences, std::uint64_t seed) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create toy corpus directory: " + dir.string());

  RandomStream rng = derive_stream(seed, 0);
  ToyCorpusFiles files{dir / "corpus.jsonl", dir / "alignments.ctm", dir / "cs_text.tsv"};

  struct Spec {
    const char* id;
    double seconds;
    bool english;
    bool mandarin;
  };
  const std::array<Spec, 3> specs = {{{"en_rec", 10.0, true, false},
                                      {"zh_rec", 10.0, false, true},
                                      {"mix_rec", 10.0, true, true}}};

  std::ofstream manifest(files.corpus_manifest);
  std::ofstream ctm(files.ctm);
  if (!manifest || !ctm) throw IoError("cannot write toy corpus files in " + dir.string());
  for (const auto& spec : specs) {
    const std::string wav_name = std::string(spec.id) + ".wav";
    const auto words = render_recording(dir / wav_name, spec.seconds, spec.english, spec.mandarin, rng);
    manifest << nlohmann::json{{"id", spec.id},
                               {"audio", wav_name},
                               {"sample_rate", kToySampleRate},
                               {"duration", spec.seconds}}
                    .dump()
             << '\n';
    for (const auto& w : words) {
      ctm << spec.id << " 1 " << ingest::format_seconds(w.start) << ' ' << ingest::format_seconds(w.duration) << ' '
          << w.token << " 1.00\n";
    }
  }

  std::ofstream text(files.cs_text);
  if (!text) throw IoError("cannot write toy CS text in " + dir.string());
  for (std::size_t s = 0; s < sentences; ++s) {
    text << "cs_" << (s < 10 ? "00" : "0") << s << '\t';
    const std::size_t length = 3 + uniform_index(rng, 6);
    for (std::size_t i = 0; i < length; ++i) {
      // Mandarin characters are written unsplit inside a run.
      const bool mandarin = uniform_index(rng, 2) == 1;
      if (i > 0 && !mandarin) text << ' ';
      if (i > 0 && mandarin && uniform_index(rng, 2) == 0) text << ' ';
      text << (mandarin ? kMandarin[uniform_index(rng, 8)] : kEnglish[uniform_index(rng, 8)]);
    }
    // One sentence carries a token no recording contains.
    if (s == sentences / 2) text << " xylophone";
    text << '\n';
  }
  return files;
}

}  // namespace collage::toy

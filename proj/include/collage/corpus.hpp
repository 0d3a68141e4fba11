#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "collage/language.hpp"
#include "collage/waveform.hpp"

namespace collage::ingest {

struct Recording {
  std::string id;
  std::filesystem::path audio_path;
  int sample_rate = 0;
  std::int64_t num_samples = 0;
  int channel = 0;  // default source channel for reads (0-based)

  double duration() const { return static_cast<double>(num_samples) / sample_rate; }
  bool operator==(const Recording&) const = default;
};

struct AlignedToken {
  std::string recording_id;
  int channel = 1;  // as written in the CTM
  double start = 0.0;
  double duration = 0.0;
  std::string token;
  metrics::Language language = metrics::Language::Other;

  double end() const { return start + duration; }
  bool operator==(const AlignedToken&) const = default;
};

// CTM channels are 1-based; 0 is accepted as an alias for the first channel.
inline int audio_channel_index(int ctm_channel) { return ctm_channel >= 1 ? ctm_channel - 1 : 0; }

// Recordings plus their tokens, grouped by recording (same order as
// `recordings`) and sorted by start time.
struct SupervisionSet {
  std::vector<Recording> recordings;
  std::vector<std::vector<AlignedToken>> tokens;

  const Recording* find(std::string_view id) const;
  std::size_t token_count() const;
  bool operator==(const SupervisionSet&) const = default;
};

// Reads the JSON-lines corpus manifest. Each record:
//   {"id": str, "audio": path, "sample_rate": int, "duration": seconds, "channel": int?}
// Relative audio paths resolve against the manifest's directory. With
// probe_audio the WAV header is checked (file present, PCM16, same rate,
// length within one sample of `duration`) and num_samples comes from it.
std::vector<Recording> load_corpus_manifest(const std::filesystem::path& path, bool probe_audio = true);
std::vector<Recording> parse_corpus_manifest(std::istream& in, const std::filesystem::path& base_dir,
                                             bool probe_audio, std::string_view source_name = "<corpus>");

// The common sample rate of a corpus. Throws RateMismatchError if rates differ
// and ValidationError for an empty corpus.
int corpus_sample_rate(std::span<const Recording> corpus);

// Parses `<rec> <channel> <begin> <duration> <token> [<conf>]` lines.
// Blank lines and lines starting with ';;' or '#' are skipped.
SupervisionSet parse_ctm(std::istream& in, std::span<const Recording> corpus,
                         std::string_view source_name = "<ctm>");

// Writes every token as a CTM line; times use the shortest exact decimal form
// so parse_ctm(serialize_ctm(set)) == set.
void serialize_ctm(const SupervisionSet& set, std::ostream& out);

enum class FindingKind { OutOfBounds, Overlap, DuplicateRecording };

struct Finding {
  FindingKind kind;
  std::string recording_id;
  std::size_t first = 0;   // token index within the recording
  std::size_t second = 0;  // other token for Overlap
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;
  bool accepted() const { return findings.empty(); }
  std::size_t count(FindingKind kind) const;
};

// Slack for comparing interval endpoints written as decimal seconds.
inline constexpr double kTimeEpsilon = 1e-6;

ValidationReport validate(const SupervisionSet& set);

struct SampleWindow {
  std::int64_t first = 0;
  std::int64_t count = 0;
  double clipped_start = 0.0;
  double clipped_end = 0.0;
};

// Clips [start, end] to the recording and converts it to samples:
// first = round(clipped_start * rate), count = round((clipped_end - clipped_start) * rate),
// count trimmed so the window never runs past the last sample.
SampleWindow window_samples(const Recording& rec, double start, double end);

// Reads samples [first, first + count) of one audio channel.
dsp::Waveform read_samples(const Recording& rec, std::int64_t first, std::int64_t count,
                           std::optional<int> channel = std::nullopt);

// Reads the clipped window. `channel` is 0-based and defaults to rec.channel.
dsp::Waveform read_window(const Recording& rec, double start, double end,
                          std::optional<int> channel = std::nullopt);

// Shortest decimal string that parses back to exactly `value`.
std::string format_seconds(double value);

}  // namespace collage::ingest

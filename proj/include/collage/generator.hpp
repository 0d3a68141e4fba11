#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "collage/corpus.hpp"
#include "collage/cs_text.hpp"
#include "collage/dsp.hpp"
#include "collage/inventory.hpp"
#include "collage/rng.hpp"

namespace collage::gen {

enum class OutputLevel {
  UnitRms,        // final utterance RMS = 1
  SourceMeanRms,  // final utterance RMS = mean RMS of the raw segments
};

std::string_view output_level_name(OutputLevel level);
std::optional<OutputLevel> parse_output_level(std::string_view name);

inline constexpr float kPeakLimit = 0.999f;

struct CollageRequest {
  std::uint64_t seed = 0;
  dsp::CrossfadeSpec crossfade;
  double context = dsp::kDefaultContext;  // seconds, must be >= crossfade.overlap
  std::filesystem::path output_dir;
  OutputLevel output_level = OutputLevel::SourceMeanRms;
  unsigned workers = 1;
};

// One spliced segment and how it joins the previous one.
struct SegmentProvenance {
  units::UnitKey key;
  units::CutRef cut;
  std::int64_t first_sample = 0;  // extracted window in the source recording
  std::int64_t num_samples = 0;
  double head_ext = 0.0;          // context obtained before / after the cut (s)
  double tail_ext = 0.0;
  std::int64_t joint_overlap_samples = 0;  // overlap with the previous segment; 0 for the first

  bool operator==(const SegmentProvenance&) const = default;
};

// Everything needed to render an utterance from the source audio.
struct RenderPlan {
  int sample_rate = 0;
  dsp::CrossfadeMode crossfade_mode = dsp::CrossfadeMode::NormalizedHamming;
  OutputLevel output_level = OutputLevel::SourceMeanRms;
  std::vector<SegmentProvenance> segments;

  std::int64_t output_samples() const;  // sum of segment lengths minus joint overlaps
  bool operator==(const RenderPlan&) const = default;
};

struct GeneratedUtterance {
  std::string utterance_id;
  std::size_t index = 0;
  std::vector<std::string> text;
  dsp::Waveform waveform;
  RenderPlan plan;
  double target_rms = 0.0;
  bool peak_limited = false;

  double duration() const { return waveform.duration(); }
};

struct SkippedUtterance {
  std::string utterance_id;
  std::size_t index = 0;
  std::string reason;                  // "oov", "silent segment" or "error: ..."
  std::vector<std::string> missing_tokens;
};

using UtteranceOutcome = std::variant<GeneratedUtterance, SkippedUtterance>;

// Recording lookup by id.
class RecordingIndex {
public:
  explicit RecordingIndex(std::span<const ingest::Recording> corpus);
  const ingest::Recording& at(const std::string& id) const;  // ReferenceError if unknown
  const ingest::Recording* find(const std::string& id) const;
  std::span<const ingest::Recording> recordings() const { return corpus_; }

private:
  std::vector<ingest::Recording> corpus_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

struct RenderResult {
  dsp::Waveform waveform;
  double target_rms = 0.0;
  bool peak_limited = false;
};

// Steps after unit selection: read each window, equalize it to unit RMS,
// left-fold the overlap-adds, level the result and apply the peak guard.
// Throws DegenerateInputError if a segment (or the result) is silent.
RenderResult render_plan(const RenderPlan& plan, const RecordingIndex& recordings);

struct GenerationReport {
  std::size_t utterance_count = 0;
  std::size_t generated_count = 0;
  std::vector<SkippedUtterance> skipped;
  std::int64_t total_samples = 0;
  int sample_rate = 0;
  std::size_t joint_count = 0;
  std::size_t peak_limited_count = 0;
  std::vector<std::size_t> unit_length_histogram;  // [k-1] = units of length k used

  double total_audio_seconds() const;
  double total_audio_hours() const { return total_audio_seconds() / 3600.0; }
  nlohmann::json to_json() const;
};

inline constexpr std::string_view kManifestName = "manifest.jsonl";
inline constexpr std::string_view kReportName = "report.json";

class CollageGenerator {
public:
  // Checks the request invariants, the corpus sample rate, and that every
  // cut in the inventory names a known recording.
  CollageGenerator(const units::Inventory& inventory, std::span<const ingest::Recording> corpus,
                   CollageRequest request);

  const CollageRequest& request() const { return request_; }
  int sample_rate() const { return sample_rate_; }

  // Unit matching, cut sampling and joint sizes; no audio is read. OOV
  // utterances come back as SkippedUtterance.
  std::variant<RenderPlan, SkippedUtterance> plan_utterance(const cstext::CsUtterance& utt, std::size_t index,
                                                            RandomStream& rng) const;

  UtteranceOutcome generate_utterance(const cstext::CsUtterance& utt, std::size_t index, RandomStream& rng) const;

  // Renders every utterance (stream derive_stream(seed, i) for utterance i),
  // writes <output_dir>/<id>.wav, manifest.jsonl (sorted by index) and
  // report.json. Fails with IoError before any work if the directory is not
  // writable.
  GenerationReport generate_collage(std::span<const cstext::CsUtterance> utterances) const;

  const RecordingIndex& recordings() const { return recordings_; }

private:
  const units::Inventory& inventory_;
  RecordingIndex recordings_;
  CollageRequest request_;
  int sample_rate_ = 0;
};

// Manifest record for one generated utterance.
nlohmann::json manifest_record(const GeneratedUtterance& utt, std::string_view audio_path);

// Reads back the plan stored in a manifest record.
RenderPlan plan_from_record(const nlohmann::json& record);

// First floor(n * percent / 100) utterances, in order.
std::span<const cstext::CsUtterance> first_percent(std::span<const cstext::CsUtterance> utterances, double percent);

}  // namespace collage::gen

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "collage/corpus.hpp"
#include "collage/inventory.hpp"
#include "collage/waveform.hpp"

namespace collage::dsp {

inline constexpr double kDefaultOverlap = 0.05;  // seconds
inline constexpr double kDefaultContext = 0.05;  // seconds
inline constexpr double kSilenceRms = 1e-8;

enum class CrossfadeMode {
  // Rising half of a Hamming window, divided by its sum with the mirrored
  // falling half so the two weights add up to exactly one.
  NormalizedHamming,
  // Plain Hamming halves; the weights do not sum to one.
  RawHamming,
};

std::string_view crossfade_mode_name(CrossfadeMode mode);
std::optional<CrossfadeMode> parse_crossfade_mode(std::string_view name);

struct CrossfadeSpec {
  double overlap = kDefaultOverlap;  // seconds
  CrossfadeMode mode = CrossfadeMode::NormalizedHamming;
};

// Symmetric Hamming window w(m) = 0.54 - 0.46 cos(2 pi m / (M - 1)).
double hamming(std::size_t m, std::size_t window_length);

struct CrossfadeWeights {
  std::vector<double> fade_in;   // applied to the head of the incoming segment
  std::vector<double> fade_out;  // applied to the tail of the accumulated signal
};

// Weights for an overlap of L samples, built from the rising half (length L)
// of a Hamming window of length 2L.
CrossfadeWeights crossfade_weights(std::size_t overlap_samples, CrossfadeMode mode);

// Joins a and b, cross-fading the last L samples of a with the first L of b,
// L = round(spec.overlap * rate). Result length is len(a) + len(b) - L.
Waveform overlap_add(const Waveform& a, const Waveform& b, const CrossfadeSpec& spec);
Waveform overlap_add(const Waveform& a, const Waveform& b, std::size_t overlap_samples, CrossfadeMode mode);

// In-place form of overlap_add used for left folds: acc <- overlap_add(acc, b).
void append_overlap_add(Waveform& acc, const Waveform& b, std::size_t overlap_samples, CrossfadeMode mode);

// Root mean square, accumulated in double.
double rms(std::span<const float> samples);
inline double rms(const Waveform& x) { return rms(x.samples); }

// x / rms(x). Throws DegenerateInputError when x is empty or rms < 1e-8.
Waveform normalize_energy(const Waveform& x);

// x * target_rms / rms(x). Same silence guard as normalize_energy.
Waveform rescale(const Waveform& x, double target_rms);

// A cut read with surrounding context.
struct ExtractedSegment {
  Waveform wave;
  std::int64_t first_sample = 0;  // window start in the recording
  double head = 0.0;              // context actually obtained before the cut (s)
  double tail = 0.0;              // ... and after it
};

// Reads [cut.start - context, cut.end + context] clipped to the recording.
ExtractedSegment extract_with_context(const ingest::Recording& rec, const units::CutRef& cut,
                                      double context = kDefaultContext);

}  // namespace collage::dsp

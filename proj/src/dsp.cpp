#include "collage/dsp.hpp"

#include <cmath>
#include <numbers>

#include "collage/errors.hpp"
#include "collage/time_base.hpp"

namespace collage::dsp {

namespace {

void check_rates(const Waveform& a, const Waveform& b) {
  if (a.sample_rate != b.sample_rate) {
    throw RateMismatchError("overlap_add: sample rates differ (" + std::to_string(a.sample_rate) + " vs " +
                            std::to_string(b.sample_rate) + " Hz)");
  }
}

void check_overlap(const Waveform& a, const Waveform& b, std::size_t overlap_samples) {
  if (overlap_samples > a.size() || overlap_samples > b.size()) {
    throw ValidationError("overlap_add: overlap of " + std::to_string(overlap_samples) +
                          " samples exceeds operand length (" + std::to_string(a.size()) + ", " +
                          std::to_string(b.size()) + ")");
  }
}

void check_silence(double value) {
  if (!(value >= kSilenceRms)) {
    throw DegenerateInputError("signal is silent (rms below " + std::to_string(kSilenceRms) + ")");
  }
}

}  // namespace

std::string_view crossfade_mode_name(CrossfadeMode mode) {
  return mode == CrossfadeMode::RawHamming ? "raw-hamming" : "normalized-hamming";
}

std::optional<CrossfadeMode> parse_crossfade_mode(std::string_view name) {
  if (name == "normalized-hamming") return CrossfadeMode::NormalizedHamming;
  if (name == "raw-hamming") return CrossfadeMode::RawHamming;
  return std::nullopt;
}

double hamming(std::size_t m, std::size_t window_length) {
  if (window_length < 2) return 1.0;
  return 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(m) /
                                static_cast<double>(window_length - 1));
}

CrossfadeWeights crossfade_weights(std::size_t overlap_samples, CrossfadeMode mode) {
  const std::size_t L = overlap_samples;
  CrossfadeWeights w;
  w.fade_in.resize(L);
  w.fade_out.resize(L);
  for (std::size_t k = 0; k < L; ++k) {
    const double rising = hamming(k, 2 * L);
    const double mirrored = hamming(L - 1 - k, 2 * L);
    if (mode == CrossfadeMode::NormalizedHamming) {
      w.fade_in[k] = rising / (rising + mirrored);
      w.fade_out[k] = 1.0 - w.fade_in[k];
    } else {
      w.fade_in[k] = rising;
      w.fade_out[k] = mirrored;
    }
  }
  return w;
}

void append_overlap_add(Waveform& acc, const Waveform& b, std::size_t overlap_samples, CrossfadeMode mode) {
  if (acc.sample_rate == 0 && acc.empty()) acc.sample_rate = b.sample_rate;
  check_rates(acc, b);
  check_overlap(acc, b, overlap_samples);
  const std::size_t L = overlap_samples;
  const auto weights = crossfade_weights(L, mode);
  const std::size_t base = acc.size() - L;
  for (std::size_t k = 0; k < L; ++k) {
    const double mixed = weights.fade_out[k] * static_cast<double>(acc.samples[base + k]) +
                         weights.fade_in[k] * static_cast<double>(b.samples[k]);
    acc.samples[base + k] = static_cast<float>(mixed);
  }
  acc.samples.insert(acc.samples.end(), b.samples.begin() + static_cast<std::ptrdiff_t>(L), b.samples.end());
}

Waveform overlap_add(const Waveform& a, const Waveform& b, std::size_t overlap_samples, CrossfadeMode mode) {
  check_rates(a, b);
  check_overlap(a, b, overlap_samples);
  Waveform out = a;
  out.samples.reserve(a.size() + b.size() - overlap_samples);
  append_overlap_add(out, b, overlap_samples, mode);
  return out;
}

Waveform overlap_add(const Waveform& a, const Waveform& b, const CrossfadeSpec& spec) {
  if (!(spec.overlap >= 0.0)) throw ValidationError("overlap must be >= 0");
  check_rates(a, b);
  const auto L = to_samples(spec.overlap, a.sample_rate);
  return overlap_add(a, b, static_cast<std::size_t>(L), spec.mode);
}

double rms(std::span<const float> samples) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (float s : samples) sum += static_cast<double>(s) * static_cast<double>(s);
  return std::sqrt(sum / static_cast<double>(samples.size()));
}

Waveform rescale(const Waveform& x, double target_rms) {
  if (!(target_rms > 0.0)) throw ValidationError("target rms must be positive");
  const double current = rms(x);
  check_silence(current);
  const double gain = target_rms / current;
  Waveform out;
  out.sample_rate = x.sample_rate;
  out.samples.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.samples[i] = static_cast<float>(static_cast<double>(x.samples[i]) * gain);
  }
  return out;
}

Waveform normalize_energy(const Waveform& x) { return rescale(x, 1.0); }

ExtractedSegment extract_with_context(const ingest::Recording& rec, const units::CutRef& cut, double context) {
  if (!(context >= 0.0)) throw ValidationError("context must be >= 0");
  if (!(cut.start >= 0.0 && cut.start < cut.end &&
        cut.end <= rec.duration() + 1.0 / rec.sample_rate + ingest::kTimeEpsilon)) {
    throw ValidationError("cut [" + ingest::format_seconds(cut.start) + ", " + ingest::format_seconds(cut.end) +
                          "] does not lie within recording " + rec.id);
  }
  const auto window = ingest::window_samples(rec, cut.start - context, cut.end + context);
  ExtractedSegment seg;
  seg.first_sample = window.first;
  seg.head = std::max(0.0, cut.start - window.clipped_start);
  seg.tail = std::max(0.0, window.clipped_end - cut.end);
  seg.wave = ingest::read_samples(rec, window.first, window.count, ingest::audio_channel_index(cut.channel));
  return seg;
}

}  // namespace collage::dsp

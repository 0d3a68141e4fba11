#pragma once

#include <cstddef>
#include <vector>

namespace collage::dsp {

// Mono sample buffer. Samples are nominally in [-1, 1]; clipping only
// happens when writing PCM.
struct Waveform {
  std::vector<float> samples;
  int sample_rate = 0;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
  bool operator==(const Waveform&) const = default;
};

}  // namespace collage::dsp

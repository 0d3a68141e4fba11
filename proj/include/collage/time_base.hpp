#pragma once

#include <cmath>
#include <cstdint>

namespace collage {

// The single seconds -> sample-index rule used throughout: round half to even.
inline std::int64_t to_samples(double seconds, int sample_rate) {
  return static_cast<std::int64_t>(std::nearbyint(seconds * static_cast<double>(sample_rate)));
}

inline double to_seconds(std::int64_t samples, int sample_rate) {
  return static_cast<double>(samples) / static_cast<double>(sample_rate);
}

}  // namespace collage

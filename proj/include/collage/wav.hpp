#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace collage::wav {

// Layout of a 16-bit PCM RIFF/WAVE file.
struct WavInfo {
  int sample_rate = 0;
  int channels = 0;
  std::int64_t frames = 0;
  std::uint64_t data_offset = 0;  // byte offset of the first frame
};

// Parses the header chunks. Throws IoError for unreadable or non-PCM16 files.
WavInfo read_info(const std::filesystem::path& path);

// Reads `count` frames starting at `first_frame` from one channel, mapped to
// floats by division by 32768. The range must lie inside the file.
std::vector<float> read_frames(const std::filesystem::path& path, const WavInfo& info,
                               std::int64_t first_frame, std::int64_t count, int channel);

// Float -> PCM16: round(x * 32768) clamped to the int16 range.
std::int16_t quantize(float x);

// Writes a mono 16-bit PCM file.
void write_mono16(const std::filesystem::path& path, std::span<const float> samples, int sample_rate);
void write_mono16(const std::filesystem::path& path, std::span<const std::int16_t> pcm, int sample_rate);

// Decodes a whole mono-or-multichannel file as raw int16, interleaved.
std::vector<std::int16_t> read_all_pcm(const std::filesystem::path& path, WavInfo* info = nullptr);

}  // namespace collage::wav

#include "collage/wav.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>

#include "collage/errors.hpp"

namespace collage::wav {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                              static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(b.data(), 4);
}

void put16(std::ostream& out, std::uint16_t v) {
  const std::array<char, 2> b{static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF)};
  out.write(b.data(), 2);
}

std::string describe(const std::filesystem::path& path) { return path.string(); }

}  // namespace

WavInfo read_info(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open audio file: " + describe(path));

  std::array<unsigned char, 12> riff{};
  if (!in.read(reinterpret_cast<char*>(riff.data()), riff.size()) ||
      std::memcmp(riff.data(), "RIFF", 4) != 0 || std::memcmp(riff.data() + 8, "WAVE", 4) != 0) {
    throw IoError("not a RIFF/WAVE file: " + describe(path));
  }

  WavInfo info;
  bool have_fmt = false;
  std::uint64_t offset = 12;
  while (true) {
    std::array<unsigned char, 8> header{};
    if (!in.read(reinterpret_cast<char*>(header.data()), header.size())) {
      throw IoError("missing data chunk: " + describe(path));
    }
    offset += 8;
    const std::uint32_t size = le32(header.data() + 4);
    if (std::memcmp(header.data(), "fmt ", 4) == 0) {
      if (size < 16) throw IoError("short fmt chunk: " + describe(path));
      std::vector<unsigned char> fmt(size);
      if (!in.read(reinterpret_cast<char*>(fmt.data()), size)) {
        throw IoError("truncated fmt chunk: " + describe(path));
      }
      std::uint16_t format = le16(fmt.data());
      if (format == kFormatExtensible && size >= 26) format = le16(fmt.data() + 24);
      const std::uint16_t bits = le16(fmt.data() + 14);
      if (format != kFormatPcm || bits != 16) {
        throw IoError("unsupported encoding (need 16-bit PCM): " + describe(path));
      }
      info.channels = le16(fmt.data() + 2);
      info.sample_rate = static_cast<int>(le32(fmt.data() + 4));
      if (info.channels <= 0 || info.sample_rate <= 0) {
        throw IoError("invalid fmt chunk: " + describe(path));
      }
      have_fmt = true;
      if (size % 2) in.ignore(1);
      offset += size + (size % 2);
    } else if (std::memcmp(header.data(), "data", 4) == 0) {
      if (!have_fmt) throw IoError("data chunk before fmt chunk: " + describe(path));
      info.data_offset = offset;
      const std::uint64_t frame_bytes = 2ULL * static_cast<std::uint64_t>(info.channels);
      // Streaming writers sometimes leave the size field at 0 or 0xFFFFFFFF.
      std::uint64_t bytes = size;
      in.seekg(0, std::ios::end);
      const auto file_size = static_cast<std::uint64_t>(in.tellg());
      if (size == 0 || size == 0xFFFFFFFFu || offset + bytes > file_size) {
        if (offset + bytes > file_size && size != 0 && size != 0xFFFFFFFFu) {
          throw IoError("truncated data chunk: " + describe(path));
        }
        bytes = file_size - offset;
      }
      info.frames = static_cast<std::int64_t>(bytes / frame_bytes);
      return info;
    } else {
      in.seekg(size + (size % 2), std::ios::cur);
      offset += size + (size % 2);
      if (!in) throw IoError("corrupt chunk list: " + describe(path));
    }
  }
}

std::vector<float> read_frames(const std::filesystem::path& path, const WavInfo& info,
                               std::int64_t first_frame, std::int64_t count, int channel) {
  if (first_frame < 0 || count < 0 || first_frame + count > info.frames) {
    throw IoError("frame range outside audio file: " + describe(path));
  }
  if (channel < 0 || channel >= info.channels) {
    throw IoError("channel " + std::to_string(channel) + " not present in " + describe(path));
  }
  std::vector<float> out(static_cast<std::size_t>(count));
  if (count == 0) return out;

  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open audio file: " + describe(path));
  const std::uint64_t frame_bytes = 2ULL * static_cast<std::uint64_t>(info.channels);
  in.seekg(static_cast<std::streamoff>(info.data_offset + static_cast<std::uint64_t>(first_frame) * frame_bytes));
  std::vector<unsigned char> raw(static_cast<std::size_t>(count) * frame_bytes);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
    throw IoError("short read from audio file: " + describe(path));
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const unsigned char* p = raw.data() + i * frame_bytes + 2 * static_cast<std::size_t>(channel);
    out[i] = static_cast<float>(static_cast<std::int16_t>(le16(p))) / 32768.0f;
  }
  return out;
}

std::int16_t quantize(float x) {
  const double scaled = std::nearbyint(static_cast<double>(x) * 32768.0);
  if (scaled >= 32767.0) return 32767;
  if (scaled <= -32768.0) return -32768;
  return static_cast<std::int16_t>(scaled);
}

void write_mono16(const std::filesystem::path& path, std::span<const std::int16_t> pcm, int sample_rate) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write audio file: " + describe(path));
  const auto data_bytes = static_cast<std::uint32_t>(pcm.size() * 2);
  out.write("RIFF", 4);
  put32(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put32(out, 16);
  put16(out, kFormatPcm);
  put16(out, 1);
  put32(out, static_cast<std::uint32_t>(sample_rate));
  put32(out, static_cast<std::uint32_t>(sample_rate) * 2);
  put16(out, 2);
  put16(out, 16);
  out.write("data", 4);
  put32(out, data_bytes);
  std::vector<char> bytes(pcm.size() * 2);
  for (std::size_t i = 0; i < pcm.size(); ++i) {
    const auto v = static_cast<std::uint16_t>(pcm[i]);
    bytes[2 * i] = static_cast<char>(v & 0xFF);
    bytes[2 * i + 1] = static_cast<char>(v >> 8);
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing audio file: " + describe(path));
}

void write_mono16(const std::filesystem::path& path, std::span<const float> samples, int sample_rate) {
  std::vector<std::int16_t> pcm(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) pcm[i] = quantize(samples[i]);
  write_mono16(path, std::span<const std::int16_t>(pcm), sample_rate);
}

std::vector<std::int16_t> read_all_pcm(const std::filesystem::path& path, WavInfo* info_out) {
  const WavInfo info = read_info(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open audio file: " + describe(path));
  in.seekg(static_cast<std::streamoff>(info.data_offset));
  const auto n = static_cast<std::size_t>(info.frames) * static_cast<std::size_t>(info.channels);
  std::vector<unsigned char> raw(n * 2);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
    throw IoError("short read from audio file: " + describe(path));
  }
  std::vector<std::int16_t> pcm(n);
  for (std::size_t i = 0; i < n; ++i) pcm[i] = static_cast<std::int16_t>(le16(raw.data() + 2 * i));
  if (info_out) *info_out = info;
  return pcm;
}

}  // namespace collage::wav

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "collage/dsp.hpp"
#include "collage/errors.hpp"
#include "collage/wav.hpp"
#include "test_support.hpp"

using namespace collage;
using dsp::CrossfadeMode;
using dsp::Waveform;

namespace {

Waveform wave(std::vector<float> samples, int rate = 16000) { return Waveform{std::move(samples), rate}; }

Waveform random_wave(std::mt19937& gen, std::size_t n, int rate = 16000) {
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  Waveform w{{}, rate};
  w.samples.resize(n);
  for (auto& s : w.samples) s = u(gen);
  return w;
}

}  // namespace

TEST(CrossfadeWeights, NormalizedSumToOne) {
  for (std::size_t L : {1u, 2u, 3u, 7u, 64u, 800u, 4096u}) {
    const auto w = dsp::crossfade_weights(L, CrossfadeMode::NormalizedHamming);
    ASSERT_EQ(w.fade_in.size(), L);
    for (std::size_t k = 0; k < L; ++k) {
      EXPECT_NEAR(w.fade_in[k] + w.fade_out[k], 1.0, 1e-12);
      EXPECT_GE(w.fade_in[k], 0.0);
      EXPECT_LE(w.fade_in[k], 1.0);
      if (k > 0) EXPECT_GE(w.fade_in[k], w.fade_in[k - 1]);
    }
  }
}

TEST(CrossfadeWeights, RawHammingHalves) {
  for (std::size_t L : {1u, 2u, 5u, 100u}) {
    const auto w = dsp::crossfade_weights(L, CrossfadeMode::RawHamming);
    const double M = 2.0 * static_cast<double>(L);
    for (std::size_t k = 0; k < L; ++k) {
      const double kk = static_cast<double>(k);
      const double mirrored = static_cast<double>(L - 1 - k);
      const double expected_in = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * kk / (M - 1.0));
      const double expected_out = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * mirrored / (M - 1.0));
      EXPECT_NEAR(w.fade_in[k], expected_in, 1e-12);
      EXPECT_NEAR(w.fade_out[k], expected_out, 1e-12);
      // Sum of the rising half and its mirror, written out.
      const double sum = 1.08 - 0.46 * (std::cos(2.0 * std::numbers::pi * kk / (M - 1.0)) +
                                        std::cos(2.0 * std::numbers::pi * mirrored / (M - 1.0)));
      EXPECT_NEAR(w.fade_in[k] + w.fade_out[k], sum, 1e-12);
    }
  }
  // L = 2, k = 0: 0.08 + 0.77 = 0.85, so raw mode does not preserve constants.
  const auto w2 = dsp::crossfade_weights(2, CrossfadeMode::RawHamming);
  EXPECT_NEAR(w2.fade_in[0] + w2.fade_out[0], 0.85, 1e-12);
}

TEST(OverlapAdd, ZeroOverlapConcatenates) {
  const auto out = dsp::overlap_add(wave({1, 2}), wave({3}), 0, CrossfadeMode::NormalizedHamming);
  EXPECT_EQ(out.samples, (std::vector<float>{1, 2, 3}));
}

TEST(OverlapAdd, ConstantSignalIsPreserved) {
  const auto out = dsp::overlap_add(wave(std::vector<float>(100, 1.0f)), wave(std::vector<float>(100, 1.0f)), 40,
                                    CrossfadeMode::NormalizedHamming);
  ASSERT_EQ(out.size(), 160u);
  for (float s : out.samples) EXPECT_NEAR(s, 1.0f, 1e-6f);
}

TEST(OverlapAdd, SplitAndRejoinReconstructs) {
  std::mt19937 gen(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 16 + gen() % (16384 - 16 + 1);
    const std::size_t L = 1 + gen() % 256;
    const auto x = random_wave(gen, n + L);
    const std::size_t cut = L + gen() % (n + 1);
    // a = x[0, cut), b = x[cut - L, end): the overlap region is shared.
    const Waveform a = wave(std::vector<float>(x.samples.begin(), x.samples.begin() + static_cast<long>(cut)));
    const Waveform b = wave(std::vector<float>(x.samples.begin() + static_cast<long>(cut - L), x.samples.end()));
    const auto y = dsp::overlap_add(a, b, L, CrossfadeMode::NormalizedHamming);
    ASSERT_EQ(y.size(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i) ASSERT_NEAR(y.samples[i], x.samples[i], 1e-6) << i;
  }
}

TEST(OverlapAdd, LengthLaw) {
  std::mt19937 gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t la = 1 + gen() % 500, lb = 1 + gen() % 500;
    const std::size_t L = gen() % (std::min(la, lb) + 1);
    const auto out = dsp::overlap_add(random_wave(gen, la), random_wave(gen, lb), L, CrossfadeMode::RawHamming);
    EXPECT_EQ(out.size(), la + lb - L);
  }
}

TEST(OverlapAdd, SecondsOverload) {
  const Waveform a = wave(std::vector<float>(1000, 0.5f)), b = wave(std::vector<float>(1000, 0.5f));
  const auto out = dsp::overlap_add(a, b, dsp::CrossfadeSpec{0.05, CrossfadeMode::NormalizedHamming});
  EXPECT_EQ(out.size(), 2000u - 800u);
}

TEST(OverlapAdd, Errors) {
  EXPECT_THROW(dsp::overlap_add(wave({1, 2}), wave({1, 2}, 8000), 1, CrossfadeMode::NormalizedHamming),
               RateMismatchError);
  EXPECT_THROW(dsp::overlap_add(wave({1, 2}), wave({1, 2, 3}), 3, CrossfadeMode::NormalizedHamming),
               ValidationError);
}

TEST(NormalizeEnergy, Examples) {
  EXPECT_EQ(dsp::normalize_energy(wave({1, -1, 1, -1})).samples, (std::vector<float>{1, -1, 1, -1}));
  EXPECT_EQ(dsp::normalize_energy(wave({2, 2, 2, 2})).samples, (std::vector<float>{1, 1, 1, 1}));
  // rms([3,0,0,0]) = 1.5
  EXPECT_EQ(dsp::normalize_energy(wave({3, 0, 0, 0})).samples, (std::vector<float>{2, 0, 0, 0}));
}

TEST(NormalizeEnergy, ScaleEquivarianceAndIdempotence) {
  std::mt19937 gen(23);
  for (int trial = 0; trial < 300; ++trial) {
    const auto x = random_wave(gen, 1 + gen() % 2000);
    if (dsp::rms(x) < 1e-6) continue;
    const float c = (gen() % 2 ? 1.0f : -1.0f) * std::ldexp(1.0f, static_cast<int>(gen() % 9) - 4);
    Waveform cx = x;
    for (auto& s : cx.samples) s *= c;
    const auto nx = dsp::normalize_energy(x);
    const auto ncx = dsp::normalize_energy(cx);
    const float sign = c > 0 ? 1.0f : -1.0f;
    for (std::size_t i = 0; i < x.size(); ++i) ASSERT_NEAR(ncx.samples[i], sign * nx.samples[i], 1e-5);
    EXPECT_NEAR(dsp::rms(nx), 1.0, 1e-6);
    const auto nnx = dsp::normalize_energy(nx);
    for (std::size_t i = 0; i < x.size(); ++i) ASSERT_NEAR(nnx.samples[i], nx.samples[i], 1e-5);
  }
}

TEST(NormalizeEnergy, SilenceAndEmptyRejected) {
  EXPECT_THROW(dsp::normalize_energy(wave({0, 0, 0})), DegenerateInputError);
  EXPECT_THROW(dsp::normalize_energy(wave({})), DegenerateInputError);
  EXPECT_THROW(dsp::normalize_energy(wave({1e-10f, -1e-10f})), DegenerateInputError);
}

TEST(Rescale, Examples) {
  const auto y = dsp::rescale(wave({0.5f, 0.5f}), 0.25);
  EXPECT_EQ(y.samples, (std::vector<float>{0.25f, 0.25f}));
  std::mt19937 gen(1);
  const auto x = random_wave(gen, 999);
  EXPECT_NEAR(dsp::rms(dsp::rescale(x, 0.1)), 0.1, 1e-7);
  EXPECT_THROW(dsp::rescale(x, 0.0), ValidationError);
  EXPECT_THROW(dsp::rescale(wave({0, 0}), 0.5), DegenerateInputError);
}

class ExtractTest : public ::testing::Test {
protected:
  collage::testing::TempDir dir{"extract"};
  ingest::Recording rec = collage::testing::write_test_recording(dir / "r.wav", "r", 16000, 16000 * 3);

  units::CutRef cut(double start, double end) {
    units::CutRef c;
    c.recording_id = "r";
    c.start = start;
    c.end = end;
    return c;
  }
};

TEST_F(ExtractTest, ContextOnBothSides) {
  const auto seg = dsp::extract_with_context(rec, cut(1.00, 1.50), 0.05);
  EXPECT_EQ(seg.first_sample, 15200);
  EXPECT_EQ(seg.wave.size(), 9600u);  // 0.95 .. 1.55
  EXPECT_NEAR(seg.head, 0.05, 1e-12);
  EXPECT_NEAR(seg.tail, 0.05, 1e-12);
  const auto pcm = wav::read_all_pcm(rec.audio_path);
  for (std::size_t i = 0; i < seg.wave.size(); ++i) {
    ASSERT_EQ(seg.wave.samples[i], static_cast<float>(pcm[15200 + i]) / 32768.0f);
  }
}

TEST_F(ExtractTest, ClippedAtRecordingStart) {
  const auto seg = dsp::extract_with_context(rec, cut(0.0, 0.40), 0.05);
  EXPECT_EQ(seg.first_sample, 0);
  EXPECT_EQ(seg.head, 0.0);
  EXPECT_NEAR(seg.tail, 0.05, 1e-12);
  EXPECT_EQ(seg.wave.size(), 7200u);
}

TEST_F(ExtractTest, ClippedAtRecordingEnd) {
  const auto seg = dsp::extract_with_context(rec, cut(2.8, 3.0), 0.05);
  EXPECT_NEAR(seg.head, 0.05, 1e-12);
  EXPECT_EQ(seg.tail, 0.0);
  EXPECT_EQ(seg.first_sample + static_cast<std::int64_t>(seg.wave.size()), rec.num_samples);
}

TEST_F(ExtractTest, ZeroContextReadsCutOnly) {
  const auto seg = dsp::extract_with_context(rec, cut(1.00, 1.50), 0.0);
  EXPECT_EQ(seg.first_sample, 16000);
  EXPECT_EQ(seg.wave.size(), 8000u);
  EXPECT_EQ(seg.head, 0.0);
  EXPECT_EQ(seg.tail, 0.0);
}

TEST_F(ExtractTest, CutOutsideRecording) {
  EXPECT_THROW(dsp::extract_with_context(rec, cut(2.9, 3.5), 0.05), ValidationError);
  EXPECT_THROW(dsp::extract_with_context(rec, cut(1.0, 1.0), 0.05), ValidationError);
}

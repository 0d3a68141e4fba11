#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "collage/corpus.hpp"
#include "collage/errors.hpp"
#include "collage/time_base.hpp"
#include "collage/wav.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace collage;
using collage::testing::TempDir;

namespace {

ingest::Recording fake_recording(const std::string& id, double seconds, int rate = 16000) {
  ingest::Recording rec;
  rec.id = id;
  rec.audio_path = "/nonexistent/" + id + ".wav";
  rec.sample_rate = rate;
  rec.num_samples = to_samples(seconds, rate);
  return rec;
}

ingest::SupervisionSet parse(const std::string& text, const std::vector<ingest::Recording>& corpus) {
  std::istringstream in(text);
  return ingest::parse_ctm(in, corpus);
}

}  // namespace

TEST(ParseCtm, DirectFieldMapping) {
  const auto set = parse("rec1 1 0.00 0.42 hello\n", {fake_recording("rec1", 10.0)});
  ASSERT_EQ(set.tokens.size(), 1u);
  ASSERT_EQ(set.tokens[0].size(), 1u);
  const auto& t = set.tokens[0][0];
  EXPECT_EQ(t.recording_id, "rec1");
  EXPECT_EQ(t.channel, 1);
  EXPECT_EQ(t.start, 0.0);
  EXPECT_EQ(t.duration, 0.42);
  EXPECT_EQ(t.token, "hello");
  EXPECT_EQ(t.language, metrics::Language::English);
}

TEST(ParseCtm, ConfidenceColumnIgnoredAndCommentsSkipped) {
  const auto set = parse(";; header\n\nrec1 1 0.5 0.25 你 0.93\n", {fake_recording("rec1", 10.0)});
  ASSERT_EQ(set.token_count(), 1u);
  EXPECT_EQ(set.tokens[0][0].language, metrics::Language::Mandarin);
}

TEST(ParseCtm, EmptyStreamGivesEmptySet) {
  const auto set = parse("", {fake_recording("rec1", 10.0)});
  EXPECT_EQ(set.token_count(), 0u);
  EXPECT_TRUE(ingest::validate(set).accepted());
}

TEST(ParseCtm, OutOfOrderLinesAreSorted) {
  const std::vector<ingest::Recording> corpus = {fake_recording("a", 10.0), fake_recording("b", 10.0)};
  const std::string sorted = "a 1 0 1 x\na 1 1 1 y\nb 1 0.5 0.5 z\na 1 2.5 0.5 w\n";
  const std::string shuffled = "a 1 2.5 0.5 w\nb 1 0.5 0.5 z\na 1 1 1 y\na 1 0 1 x\n";
  EXPECT_EQ(parse(shuffled, corpus), parse(sorted, corpus));
}

TEST(ParseCtm, Errors) {
  const std::vector<ingest::Recording> corpus = {fake_recording("rec1", 10.0)};
  try {
    parse("rec1 1 0.0 0.4 ok\nrec1 1 0.5\n", corpus);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse("rec1 1 zero 0.4 hi\n", corpus), ParseError);
  EXPECT_THROW(parse("rec1 1 0.0 0.4x hi\n", corpus), ParseError);
  EXPECT_THROW(parse("rec1 A 0.0 0.4 hi\n", corpus), ParseError);
  EXPECT_THROW(parse("rec2 1 0.0 0.4 hi\n", corpus), ReferenceError);
  EXPECT_THROW(parse("rec1 1 0.0 0 hi\n", corpus), ValidationError);
  EXPECT_THROW(parse("rec1 1 0.0 -0.1 hi\n", corpus), ValidationError);
}

TEST(ParseCtm, RoundTripsThroughSerialization) {
  std::mt19937 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<ingest::Recording> corpus = {fake_recording("r1", 60.0), fake_recording("r2", 60.0)};
  for (int trial = 0; trial < 100; ++trial) {
    std::ostringstream ctm;
    for (const auto& rec : corpus) {
      double t = u(gen);
      const int n = static_cast<int>(gen() % 15);
      for (int i = 0; i < n; ++i) {
        const double d = 0.01 + u(gen);
        ctm << rec.id << ' ' << (1 + gen() % 2) << ' ' << ingest::format_seconds(t) << ' '
            << ingest::format_seconds(d) << " tok" << gen() % 5 << '\n';
        t += d + 0.3 * u(gen);
      }
    }
    const auto set = parse(ctm.str(), corpus);
    std::ostringstream again;
    ingest::serialize_ctm(set, again);
    EXPECT_EQ(parse(again.str(), corpus), set);
  }
}

TEST(Validate, OutOfBoundsToken) {
  const auto set = parse("rec1 1 9.5 0.6 late\n", {fake_recording("rec1", 10.0)});
  const auto report = ingest::validate(set);
  EXPECT_EQ(report.count(ingest::FindingKind::OutOfBounds), 1u);
  EXPECT_FALSE(report.accepted());
}

TEST(Validate, DisjointTokensAccepted) {
  const auto set = parse("rec1 1 0 1 a\nrec1 1 1 1 b\nrec1 1 3 0.5 c\n", {fake_recording("rec1", 10.0)});
  EXPECT_TRUE(ingest::validate(set).accepted());
}

TEST(Validate, OverlapFinding) {
  const auto set = parse("rec1 1 0 1 a\nrec1 1 0.5 1 b\n", {fake_recording("rec1", 10.0)});
  const auto report = ingest::validate(set);
  ASSERT_EQ(report.findings.size(), 1u);
  EXPECT_EQ(report.findings[0].kind, ingest::FindingKind::Overlap);
}

TEST(Validate, DuplicateRecordingIds) {
  const auto set = parse("", {fake_recording("r", 1.0), fake_recording("r", 2.0)});
  EXPECT_EQ(ingest::validate(set).count(ingest::FindingKind::DuplicateRecording), 1u);
}

TEST(Validate, AgreesWithBruteForcePairCheck) {
  std::mt19937 gen(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<ingest::Recording> corpus = {fake_recording("r", 100.0)};
  for (int trial = 0; trial < 300; ++trial) {
    std::ostringstream ctm;
    const int n = static_cast<int>(gen() % 12);
    for (int i = 0; i < n; ++i) {
      ctm << "r 1 " << ingest::format_seconds(std::round(u(gen) * 800) / 100.0) << ' '
          << ingest::format_seconds(0.05 + std::round(u(gen) * 300) / 100.0) << " t\n";
    }
    const auto set = parse(ctm.str(), corpus);
    std::vector<std::pair<double, double>> intervals;
    for (const auto& t : set.tokens[0]) intervals.emplace_back(t.start, t.end());
    const auto expected = oracle::overlapping_pairs(intervals, ingest::kTimeEpsilon);

    std::set<std::pair<std::size_t, std::size_t>> got;
    for (const auto& f : ingest::validate(set).findings) {
      ASSERT_EQ(f.kind, ingest::FindingKind::Overlap);
      got.emplace(std::min(f.first, f.second), std::max(f.first, f.second));
    }
    const std::set<std::pair<std::size_t, std::size_t>> want(expected.begin(), expected.end());
    EXPECT_EQ(got, want);
  }
}

class WindowTest : public ::testing::Test {
protected:
  TempDir dir{"window"};
  ingest::Recording rec = collage::testing::write_test_recording(dir / "a.wav", "a", 16000, 16000 * 2);
};

TEST_F(WindowTest, FullRecording) {
  const auto w = ingest::read_window(rec, 0.0, rec.duration());
  EXPECT_EQ(w.size(), 32000u);
  EXPECT_EQ(w.sample_rate, 16000);
  const auto pcm = wav::read_all_pcm(rec.audio_path);
  for (std::size_t i = 0; i < pcm.size(); ++i) ASSERT_EQ(w.samples[i], static_cast<float>(pcm[i]) / 32768.0f);
}

TEST_F(WindowTest, DegenerateWindowDoesNotFail) {
  const auto w = ingest::read_window(rec, 1.0 - 1e-5, 1.0);
  EXPECT_LE(w.size(), 1u);
}

TEST_F(WindowTest, NegativeStartIsClipped) {
  const auto w = ingest::read_window(rec, -0.05, 0.10);
  const auto direct = ingest::read_window(rec, 0.0, 0.10);
  EXPECT_EQ(w.size(), 1600u);
  EXPECT_EQ(w, direct);
  const auto pcm = wav::read_all_pcm(rec.audio_path);
  for (std::size_t i = 0; i < w.size(); ++i) ASSERT_EQ(w.samples[i], static_cast<float>(pcm[i]) / 32768.0f);
}

TEST_F(WindowTest, EndPastRecordingIsClipped) {
  const auto w = ingest::read_window(rec, 1.9, 2.5);
  EXPECT_EQ(w.size(), 1600u);
}

TEST_F(WindowTest, LengthFollowsRoundingRule) {
  std::mt19937 gen(4);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    double a = u(gen), b = u(gen);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    const auto w = ingest::read_window(rec, a, b);
    EXPECT_EQ(static_cast<std::int64_t>(w.size()),
              std::min<std::int64_t>(to_samples(b - a, 16000), rec.num_samples - to_samples(a, 16000)));
  }
}

TEST_F(WindowTest, RateMismatch) {
  auto other = rec;
  other.sample_rate = 8000;
  other.num_samples = 16000;
  EXPECT_THROW(ingest::read_window(other, 0.0, 0.5), RateMismatchError);
  EXPECT_THROW(ingest::corpus_sample_rate(std::vector{rec, other}), RateMismatchError);
}

TEST_F(WindowTest, CorruptAndMissingFiles) {
  collage::testing::write_text(dir / "bad.wav", "RIFF\x10\0\0\0WAVEjunk");
  auto bad = rec;
  bad.audio_path = dir / "bad.wav";
  EXPECT_THROW(ingest::read_window(bad, 0.0, 0.5), IoError);
  bad.audio_path = dir / "missing.wav";
  EXPECT_THROW(ingest::read_window(bad, 0.0, 0.5), IoError);
}

TEST_F(WindowTest, MultiChannelSelectsChannel) {
  // Two interleaved channels: left = +i, right = -i.
  std::vector<std::int16_t> interleaved;
  for (int i = 0; i < 100; ++i) {
    interleaved.push_back(static_cast<std::int16_t>(i));
    interleaved.push_back(static_cast<std::int16_t>(-i));
  }
  // Hand-written stereo header.
  std::string bytes = "RIFF";
  auto put32 = [&](std::uint32_t v) { for (int k = 0; k < 4; ++k) bytes.push_back(static_cast<char>((v >> (8 * k)) & 0xFF)); };
  auto put16 = [&](std::uint16_t v) { for (int k = 0; k < 2; ++k) bytes.push_back(static_cast<char>((v >> (8 * k)) & 0xFF)); };
  put32(36 + 400);
  bytes += "WAVEfmt ";
  put32(16); put16(1); put16(2); put32(1000); put32(4000); put16(4); put16(16);
  bytes += "data";
  put32(400);
  for (auto s : interleaved) put16(static_cast<std::uint16_t>(s));
  collage::testing::write_text(dir / "stereo.wav", bytes);

  ingest::Recording st{"st", dir / "stereo.wav", 1000, 100, 0};
  const auto left = ingest::read_window(st, 0.0, 0.01, 0);
  const auto right = ingest::read_window(st, 0.0, 0.01, 1);
  ASSERT_EQ(left.size(), 10u);
  EXPECT_EQ(left.samples[3], 3.0f / 32768.0f);
  EXPECT_EQ(right.samples[3], -3.0f / 32768.0f);
  EXPECT_THROW(ingest::read_window(st, 0.0, 0.01, 2), IoError);
}

TEST(CorpusManifest, LoadsAndChecksAudio) {
  TempDir dir("manifest");
  collage::testing::write_test_recording(dir / "a.wav", "a", 16000, 8000);
  collage::testing::write_text(dir / "corpus.jsonl",
                               "{\"id\":\"a\",\"audio\":\"a.wav\",\"sample_rate\":16000,\"duration\":0.5}\n");
  const auto corpus = ingest::load_corpus_manifest(dir / "corpus.jsonl");
  ASSERT_EQ(corpus.size(), 1u);
  EXPECT_EQ(corpus[0].num_samples, 8000);
  EXPECT_EQ(corpus[0].audio_path, dir / "a.wav");

  collage::testing::write_text(dir / "rate.jsonl",
                               "{\"id\":\"a\",\"audio\":\"a.wav\",\"sample_rate\":8000,\"duration\":1.0}\n");
  EXPECT_THROW(ingest::load_corpus_manifest(dir / "rate.jsonl"), RateMismatchError);

  collage::testing::write_text(dir / "missing.jsonl",
                               "{\"id\":\"b\",\"audio\":\"b.wav\",\"sample_rate\":16000,\"duration\":1.0}\n");
  try {
    ingest::load_corpus_manifest(dir / "missing.jsonl");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("b.wav"), std::string::npos);
  }

  collage::testing::write_text(dir / "len.jsonl",
                               "{\"id\":\"a\",\"audio\":\"a.wav\",\"sample_rate\":16000,\"duration\":0.7}\n");
  EXPECT_THROW(ingest::load_corpus_manifest(dir / "len.jsonl"), ValidationError);

  collage::testing::write_text(dir / "bad.jsonl", "{\"id\":\"a\"}\n");
  EXPECT_THROW(ingest::load_corpus_manifest(dir / "bad.jsonl"), ParseError);
}

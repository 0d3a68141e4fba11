#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "collage/cs_text.hpp"
#include "collage/errors.hpp"
#include "collage/metrics.hpp"

using namespace collage;
using cstext::ParallelSentence;
using cstext::ReplacementPolicy;
using metrics::Language;

namespace {

// n source tokens, each aligned one-to-one to a target token.
ParallelSentence one_to_one(std::size_t n, const std::string& id = "s") {
  ParallelSentence s;
  s.id = id;
  for (std::size_t i = 0; i < n; ++i) {
    s.source_tokens.push_back("src" + std::to_string(i));
    s.target_tokens.push_back("tgt" + std::to_string(i));
    s.alignment.emplace_back(i, i);
  }
  return s;
}

ParallelSentence random_sentence(std::mt19937& gen, const std::string& id) {
  ParallelSentence s;
  s.id = id;
  const std::size_t ns = 1 + gen() % 12, nt = 1 + gen() % 12;
  for (std::size_t i = 0; i < ns; ++i) s.source_tokens.push_back("s" + std::to_string(gen() % 20));
  for (std::size_t i = 0; i < nt; ++i) s.target_tokens.push_back("t" + std::to_string(gen() % 20));
  const std::size_t links = gen() % (ns + nt);
  for (std::size_t k = 0; k < links; ++k) s.alignment.emplace_back(gen() % ns, gen() % nt);
  return s;
}

}  // namespace

TEST(RandomReplace, RateZeroKeepsSource) {
  std::mt19937 gen(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_sentence(gen, "x");
    RandomStream rng(trial);
    const auto r = cstext::random_replace(s, {0.0, 0}, rng);
    EXPECT_EQ(r.utterance.tokens, s.source_tokens);
    EXPECT_EQ(r.replaced, 0u);
    for (auto tag : r.utterance.tags) EXPECT_EQ(tag, Language::Arabic);
  }
}

TEST(RandomReplace, RateOneReplacesEveryAlignedToken) {
  const auto s = one_to_one(7);
  RandomStream rng(3);
  const auto r = cstext::random_replace(s, {1.0, 0}, rng);
  EXPECT_EQ(r.utterance.tokens, s.target_tokens);
  EXPECT_EQ(r.replaced, 7u);
  EXPECT_EQ(r.eligible, 7u);
}

TEST(RandomReplace, UnalignedTokensNeverReplaced) {
  ParallelSentence s;
  s.id = "u";
  s.source_tokens = {"a", "b", "c"};
  s.target_tokens = {"X"};
  s.alignment = {{1, 0}};
  RandomStream rng(0);
  const auto r = cstext::random_replace(s, {1.0, 0}, rng);
  EXPECT_EQ(r.utterance.tokens, (std::vector<std::string>{"a", "X", "c"}));
  EXPECT_EQ(r.eligible, 1u);
}

TEST(RandomReplace, ManyToManyEmitsTargetsOncePerRun) {
  // Sources 0 and 1 both align to targets 0 and 1; replacing both must not
  // duplicate them. Source 3 aligns to target 0 again after an unreplaced gap.
  ParallelSentence s;
  s.id = "m";
  s.source_tokens = {"a", "b", "c", "d"};
  s.target_tokens = {"X", "Y"};
  s.alignment = {{0, 1}, {0, 0}, {1, 0}, {1, 1}, {3, 0}};
  RandomStream rng(0);
  const auto r = cstext::random_replace(s, {1.0, 0}, rng);
  EXPECT_EQ(r.utterance.tokens, (std::vector<std::string>{"X", "Y", "c", "X"}));
  EXPECT_EQ(r.utterance.tags,
            (std::vector<Language>{Language::English, Language::English, Language::Arabic, Language::English}));
}

TEST(RandomReplace, EmpiricalRate) {
  const auto s = one_to_one(10000);
  RandomStream rng(2024);
  const auto r = cstext::random_replace(s, {0.2, 0}, rng);
  const double fraction = static_cast<double>(r.replaced) / static_cast<double>(r.eligible);
  EXPECT_GE(fraction, 0.18);
  EXPECT_LE(fraction, 0.22);
  EXPECT_EQ(r.utterance.tokens.size(), 10000u);
}

TEST(RandomReplace, LengthAndTagSoundness) {
  std::mt19937 gen(9);
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = random_sentence(gen, "p");
    RandomStream rng(static_cast<std::uint64_t>(trial));
    const double rate = static_cast<double>(gen() % 11) / 10.0;
    const auto r = cstext::random_replace(s, {rate, 0}, rng);
    ASSERT_EQ(r.utterance.tokens.size(), r.utterance.tags.size());
    // Source-tagged tokens form a subsequence of the source of length
    // |source| - replaced.
    std::size_t pos = 0, kept = 0;
    for (std::size_t i = 0; i < r.utterance.tokens.size(); ++i) {
      if (r.utterance.tags[i] == Language::Arabic) {
        while (pos < s.source_tokens.size() && s.source_tokens[pos] != r.utterance.tokens[i]) ++pos;
        ASSERT_LT(pos, s.source_tokens.size());
        ++pos;
        ++kept;
      } else {
        ASSERT_EQ(r.utterance.tags[i], Language::English);
        EXPECT_NE(std::find(s.target_tokens.begin(), s.target_tokens.end(), r.utterance.tokens[i]),
                  s.target_tokens.end());
      }
    }
    EXPECT_EQ(kept, s.source_tokens.size() - r.replaced);
    EXPECT_LE(r.replaced, r.eligible);
  }
}

TEST(SynthesizeCorpus, DeterministicPerSeed) {
  std::mt19937 gen(4);
  std::vector<ParallelSentence> pairs;
  for (int i = 0; i < 200; ++i) pairs.push_back(random_sentence(gen, "id" + std::to_string(i)));
  const auto a = cstext::synthesize_corpus(pairs, {0.3, 77});
  const auto b = cstext::synthesize_corpus(pairs, {0.3, 77});
  const auto c = cstext::synthesize_corpus(pairs, {0.3, 78});
  EXPECT_EQ(a.text, b.text);
  EXPECT_NE(a.text, c.text);
  // Sentence i depends only on its own stream, so a prefix gives a prefix.
  const auto prefix = cstext::synthesize_corpus(std::span(pairs).first(50), {0.3, 77});
  EXPECT_TRUE(std::equal(prefix.text.begin(), prefix.text.end(), a.text.begin()));
}

TEST(SynthesizeCorpus, HigherRateMixesMore) {
  std::vector<ParallelSentence> pairs;
  for (int i = 0; i < 500; ++i) pairs.push_back(one_to_one(12, "s" + std::to_string(i)));
  auto corpus_mean = [&](double rate) {
    const auto result = cstext::synthesize_corpus(pairs, {rate, 5});
    std::vector<metrics::TaggedUtterance> tagged;
    for (const auto& u : result.text) tagged.push_back({u.tokens, u.tags});
    return metrics::corpus_cmi(tagged).mean.value();
  };
  EXPECT_GT(corpus_mean(0.2), corpus_mean(0.05));
}

TEST(ReadParallel, ParsesTextAndAlignments) {
  std::istringstream text("s1\tأنا أحب القهوة\tI love coffee\n");
  std::istringstream align("0-0 1-1 2-2\n");
  const auto pairs = cstext::read_parallel(text, align);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].source_tokens.size(), 3u);
  EXPECT_EQ(pairs[0].target_tokens, (std::vector<std::string>{"I", "love", "coffee"}));
  EXPECT_EQ(pairs[0].alignment.size(), 3u);
}

TEST(ReadParallel, Errors) {
  {
    std::istringstream text("s1\ta b\n");
    std::istringstream align("0-0\n");
    EXPECT_THROW(cstext::read_parallel(text, align), ParseError);
  }
  {
    std::istringstream text("s1\ta b\tx y\n");
    std::istringstream align("0-0 1:1\n");
    EXPECT_THROW(cstext::read_parallel(text, align), ParseError);
  }
  {
    std::istringstream text("s1\ta b\tx y\ns2\ta\tb\n");
    std::istringstream align("0-0\n");
    EXPECT_THROW(cstext::read_parallel(text, align), ParseError);
  }
  {
    std::istringstream text("s1\ta b\tx y\n");
    std::istringstream align("0-0\n1-1\n");
    EXPECT_THROW(cstext::read_parallel(text, align), ParseError);
  }
  {
    std::istringstream text("s1\ta b\tx y\n");
    std::istringstream align("0-5\n");
    EXPECT_THROW(cstext::read_parallel(text, align), ParseError);
  }
  {
    auto s = one_to_one(2);
    s.alignment.emplace_back(0, 5);
    RandomStream rng(0);
    EXPECT_THROW(cstext::random_replace(s, {}, rng), ValidationError);
  }
}

TEST(CsTextFile, ReadsAndRoundTrips) {
  std::istringstream in("u1\thello 你好 world\nu2\tgood morning\ten other\n");
  const auto text = cstext::read_cs_text(in);
  ASSERT_EQ(text.size(), 2u);
  EXPECT_EQ(text[0].tokens, (std::vector<std::string>{"hello", "你", "好", "world"}));
  EXPECT_EQ(text[0].tags,
            (std::vector<Language>{Language::English, Language::Mandarin, Language::Mandarin, Language::English}));
  EXPECT_EQ(text[1].tags, (std::vector<Language>{Language::English, Language::Other}));
  std::stringstream out;
  cstext::write_cs_text(text, out);
  EXPECT_EQ(cstext::read_cs_text(out), text);
}

TEST(CsTextFile, Errors) {
  std::istringstream dup("u1\ta\nu1\tb\n");
  EXPECT_THROW(cstext::read_cs_text(dup), ParseError);
  std::istringstream tags("u1\ta b\ten\n");
  EXPECT_THROW(cstext::read_cs_text(tags), ParseError);
  std::istringstream bad_id("../x\ta\n");
  EXPECT_THROW(cstext::read_cs_text(bad_id), ParseError);
  std::istringstream empty("u1\t   \n");
  EXPECT_THROW(cstext::read_cs_text(empty), ParseError);
}

#include "collage/cs_text.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "collage/errors.hpp"

namespace collage::cstext {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t begin = 0;
  while (true) {
    const std::size_t pos = line.find('\t', begin);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(begin));
      return fields;
    }
    fields.push_back(line.substr(begin, pos - begin));
    begin = pos + 1;
  }
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool usable_as_filename(std::string_view id) {
  return !id.empty() && id != "." && id != ".." && id.find('/') == std::string_view::npos &&
         id.find('\\') == std::string_view::npos && id.find('\0') == std::string_view::npos;
}

}  // namespace

CsText read_cs_text(std::istream& in, std::string_view source_name) {
  const std::string source(source_name);
  CsText text;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto fields = split_tabs(line);
    if (fields.size() < 2 || fields.size() > 3) {
      throw ParseError(source, line_no, "expected id<TAB>text[<TAB>tags]");
    }
    CsUtterance utt;
    utt.id = std::string(fields[0]);
    if (!usable_as_filename(utt.id)) throw ParseError(source, line_no, "invalid utterance id '" + utt.id + "'");
    if (!ids.insert(utt.id).second) throw ParseError(source, line_no, "duplicate utterance id '" + utt.id + "'");
    utt.tokens = metrics::tokenize_mixed(fields[1]);
    if (utt.tokens.empty()) throw ParseError(source, line_no, "utterance '" + utt.id + "' has no tokens");
    if (fields.size() == 3) {
      for (const auto& tag : metrics::split_words(fields[2])) {
        const auto lang = metrics::parse_language_tag(tag);
        if (!lang) throw ParseError(source, line_no, "unknown language tag '" + tag + "'");
        utt.tags.push_back(*lang);
      }
      if (utt.tags.size() != utt.tokens.size()) {
        throw ParseError(source, line_no, "tag count does not match token count");
      }
    } else {
      for (const auto& token : utt.tokens) utt.tags.push_back(metrics::classify_token(token));
    }
    text.push_back(std::move(utt));
  }
  return text;
}

CsText load_cs_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open CS text: " + path.string());
  return read_cs_text(in, path.string());
}

void write_cs_text(const CsText& text, std::ostream& out) {
  for (const auto& utt : text) {
    out << utt.id << '\t';
    for (std::size_t i = 0; i < utt.tokens.size(); ++i) out << (i ? " " : "") << utt.tokens[i];
    out << '\t';
    for (std::size_t i = 0; i < utt.tags.size(); ++i) out << (i ? " " : "") << metrics::language_tag(utt.tags[i]);
    out << '\n';
  }
}

ReplacementResult random_replace(const ParallelSentence& sent, const ReplacementPolicy& policy, RandomStream& rng) {
  if (!(policy.rate >= 0.0 && policy.rate <= 1.0)) throw ValidationError("replacement rate must lie in [0, 1]");

  std::vector<std::vector<std::size_t>> targets(sent.source_tokens.size());
  for (const auto& [s, t] : sent.alignment) {
    if (s >= sent.source_tokens.size() || t >= sent.target_tokens.size()) {
      throw ValidationError("sentence " + sent.id + ": alignment pair " + std::to_string(s) + "-" +
                            std::to_string(t) + " out of range");
    }
    targets[s].push_back(t);
  }
  for (auto& list : targets) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }

  ReplacementResult result;
  result.utterance.id = sent.id;
  auto emit = [&](const std::string& token, metrics::Language lang) {
    result.utterance.tokens.push_back(token);
    result.utterance.tags.push_back(lang);
  };

  std::set<std::size_t> run;  // target indices emitted by the current run of replacements
  bool previous_replaced = false;
  for (std::size_t s = 0; s < sent.source_tokens.size(); ++s) {
    bool replace = false;
    if (!targets[s].empty()) {
      ++result.eligible;
      replace = uniform_unit(rng) < policy.rate;
    }
    if (!replace) {
      emit(sent.source_tokens[s], policy.source_language);
      previous_replaced = false;
      continue;
    }
    ++result.replaced;
    if (!previous_replaced) run.clear();
    for (std::size_t t : targets[s]) {
      if (run.insert(t).second) emit(sent.target_tokens[t], policy.target_language);
    }
    previous_replaced = true;
  }
  return result;
}

SynthesisResult synthesize_corpus(std::span<const ParallelSentence> pairs, const ReplacementPolicy& policy) {
  SynthesisResult result;
  result.text.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    RandomStream rng = derive_stream(policy.seed, i);
    auto one = random_replace(pairs[i], policy, rng);
    result.eligible += one.eligible;
    result.replaced += one.replaced;
    result.text.push_back(std::move(one.utterance));
  }
  return result;
}

std::vector<ParallelSentence> read_parallel(std::istream& text, std::istream& alignments,
                                            std::string_view text_name, std::string_view alignment_name) {
  const std::string text_source(text_name);
  const std::string align_source(alignment_name);
  std::vector<ParallelSentence> pairs;
  std::string line;
  std::size_t record = 0;
  while (std::getline(text, line)) {
    ++record;
    strip_cr(line);
    const auto fields = split_tabs(line);
    if (fields.size() != 3) throw ParseError(text_source, record, "expected id<TAB>source<TAB>target");
    ParallelSentence sent;
    sent.id = std::string(fields[0]);
    if (sent.id.empty()) throw ParseError(text_source, record, "empty sentence id");
    sent.source_tokens = metrics::split_words(fields[1]);
    sent.target_tokens = metrics::split_words(fields[2]);

    std::string align_line;
    if (!std::getline(alignments, align_line)) {
      throw ParseError(align_source, record, "missing alignment line for sentence '" + sent.id + "'");
    }
    strip_cr(align_line);
    std::istringstream pairs_in(align_line);
    for (std::string item; pairs_in >> item;) {
      const auto dash = item.find('-');
      std::size_t s = 0;
      std::size_t t = 0;
      const char* begin = item.data();
      const char* end = item.data() + item.size();
      bool ok = dash != std::string::npos;
      if (ok) {
        const auto r1 = std::from_chars(begin, begin + dash, s);
        const auto r2 = std::from_chars(begin + dash + 1, end, t);
        ok = r1.ec == std::errc() && r1.ptr == begin + dash && r2.ec == std::errc() && r2.ptr == end;
      }
      if (!ok) throw ParseError(align_source, record, "malformed alignment pair '" + item + "'");
      if (s >= sent.source_tokens.size() || t >= sent.target_tokens.size()) {
        throw ParseError(align_source, record, "alignment pair '" + item + "' out of range");
      }
      sent.alignment.emplace_back(s, t);
    }
    pairs.push_back(std::move(sent));
  }
  std::string extra;
  while (std::getline(alignments, extra)) {
    ++record;
    if (extra.find_first_not_of(" \t\r") != std::string::npos) {
      throw ParseError(align_source, record, "more alignment lines than sentences");
    }
  }
  return pairs;
}

}  // namespace collage::cstext

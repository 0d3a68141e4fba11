#include "collage/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "collage/errors.hpp"
#include "collage/time_base.hpp"
#include "collage/wav.hpp"

namespace collage::ingest {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t begin = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > begin) fields.push_back(line.substr(begin, i - begin));
  }
  return fields;
}

std::optional<double> parse_double(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<int> parse_int(std::string_view text) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace

const Recording* SupervisionSet::find(std::string_view id) const {
  for (const auto& rec : recordings) {
    if (rec.id == id) return &rec;
  }
  return nullptr;
}

std::size_t SupervisionSet::token_count() const {
  std::size_t n = 0;
  for (const auto& list : tokens) n += list.size();
  return n;
}

std::size_t ValidationReport::count(FindingKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(findings.begin(), findings.end(), [&](const Finding& f) { return f.kind == kind; }));
}

std::string format_seconds(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

std::vector<Recording> parse_corpus_manifest(std::istream& in, const std::filesystem::path& base_dir,
                                             bool probe_audio, std::string_view source_name) {
  const std::string source(source_name);
  std::vector<Recording> corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(source, line_no, std::string("invalid JSON: ") + e.what());
    }
    Recording rec;
    double duration = 0.0;
    try {
      rec.id = record.at("id").get<std::string>();
      rec.audio_path = record.at("audio").get<std::string>();
      rec.sample_rate = record.at("sample_rate").get<int>();
      duration = record.at("duration").get<double>();
      rec.channel = record.value("channel", 0);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source, line_no, std::string("bad corpus record: ") + e.what());
    }
    if (rec.id.empty()) throw ParseError(source, line_no, "empty recording id");
    if (rec.sample_rate <= 0) throw ValidationError(source + ":" + std::to_string(line_no) + ": sample_rate must be positive");
    if (!(duration > 0.0)) throw ValidationError(source + ":" + std::to_string(line_no) + ": duration must be positive");
    if (rec.audio_path.is_relative()) rec.audio_path = base_dir / rec.audio_path;
    rec.num_samples = to_samples(duration, rec.sample_rate);

    if (probe_audio) {
      if (!std::filesystem::exists(rec.audio_path)) {
        throw IoError("audio file not found: " + rec.audio_path.string());
      }
      const wav::WavInfo info = wav::read_info(rec.audio_path);
      if (info.sample_rate != rec.sample_rate) {
        throw RateMismatchError("recording " + rec.id + ": file rate " + std::to_string(info.sample_rate) +
                                " Hz differs from manifest rate " + std::to_string(rec.sample_rate) + " Hz");
      }
      if (std::llabs(info.frames - rec.num_samples) > 1) {
        throw ValidationError("recording " + rec.id + ": manifest duration " + format_seconds(duration) +
                              " s disagrees with audio length " + std::to_string(info.frames) + " samples");
      }
      if (rec.channel < 0 || rec.channel >= info.channels) {
        throw ValidationError("recording " + rec.id + ": channel " + std::to_string(rec.channel) +
                              " not present in " + rec.audio_path.string());
      }
      rec.num_samples = info.frames;
    }
    if (rec.num_samples <= 0) throw ValidationError("recording " + rec.id + ": no samples");
    corpus.push_back(std::move(rec));
  }
  return corpus;
}

std::vector<Recording> load_corpus_manifest(const std::filesystem::path& path, bool probe_audio) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus manifest: " + path.string());
  return parse_corpus_manifest(in, path.parent_path(), probe_audio, path.string());
}

int corpus_sample_rate(std::span<const Recording> corpus) {
  if (corpus.empty()) throw ValidationError("empty corpus");
  const int rate = corpus.front().sample_rate;
  for (const auto& rec : corpus) {
    if (rec.sample_rate != rate) {
      throw RateMismatchError("recording " + rec.id + " has rate " + std::to_string(rec.sample_rate) +
                              " Hz; corpus rate is " + std::to_string(rate) + " Hz");
    }
  }
  return rate;
}

SupervisionSet parse_ctm(std::istream& in, std::span<const Recording> corpus, std::string_view source_name) {
  const std::string source(source_name);
  SupervisionSet set;
  set.recordings.assign(corpus.begin(), corpus.end());
  set.tokens.resize(set.recordings.size());
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < set.recordings.size(); ++i) index.emplace(set.recordings[i].id, i);

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty() || fields[0].starts_with(";;") || fields[0].starts_with("#")) continue;
    if (fields.size() < 5 || fields.size() > 6) {
      throw ParseError(source, line_no, "expected 5 or 6 fields, got " + std::to_string(fields.size()));
    }
    const auto channel = parse_int(fields[1]);
    if (!channel || *channel < 0) throw ParseError(source, line_no, "bad channel '" + std::string(fields[1]) + "'");
    const auto start = parse_double(fields[2]);
    if (!start) throw ParseError(source, line_no, "non-numeric begin time '" + std::string(fields[2]) + "'");
    const auto duration = parse_double(fields[3]);
    if (!duration) throw ParseError(source, line_no, "non-numeric duration '" + std::string(fields[3]) + "'");
    if (fields.size() == 6 && !parse_double(fields[5])) {
      throw ParseError(source, line_no, "non-numeric confidence '" + std::string(fields[5]) + "'");
    }

    const auto it = index.find(fields[0]);
    if (it == index.end()) {
      throw ReferenceError(source + ":" + std::to_string(line_no) + ": unknown recording id '" +
                           std::string(fields[0]) + "'");
    }
    if (*start < 0.0) {
      throw ValidationError(source + ":" + std::to_string(line_no) + ": negative begin time");
    }
    if (*duration <= 0.0) {
      throw ValidationError(source + ":" + std::to_string(line_no) + ": duration must be positive");
    }

    AlignedToken token;
    token.recording_id = std::string(fields[0]);
    token.channel = *channel;
    token.start = *start;
    token.duration = *duration;
    token.token = std::string(fields[4]);
    token.language = metrics::classify_token(token.token);
    set.tokens[it->second].push_back(std::move(token));
  }

  for (auto& list : set.tokens) {
    std::stable_sort(list.begin(), list.end(), [](const AlignedToken& a, const AlignedToken& b) {
      if (a.start != b.start) return a.start < b.start;
      return a.duration < b.duration;
    });
  }
  return set;
}

void serialize_ctm(const SupervisionSet& set, std::ostream& out) {
  for (const auto& list : set.tokens) {
    for (const auto& t : list) {
      out << t.recording_id << ' ' << t.channel << ' ' << format_seconds(t.start) << ' '
          << format_seconds(t.duration) << ' ' << t.token << '\n';
    }
  }
}

ValidationReport validate(const SupervisionSet& set) {
  ValidationReport report;

  std::unordered_map<std::string_view, std::size_t> seen;
  for (std::size_t i = 0; i < set.recordings.size(); ++i) {
    const auto& id = set.recordings[i].id;
    if (!seen.emplace(id, i).second) {
      report.findings.push_back({FindingKind::DuplicateRecording, id, seen[id], i, "duplicate recording id " + id});
    }
  }

  for (std::size_t r = 0; r < set.recordings.size() && r < set.tokens.size(); ++r) {
    const Recording& rec = set.recordings[r];
    const auto& list = set.tokens[r];
    const double limit = rec.duration() + 1.0 / rec.sample_rate;

    // Sweep over tokens sorted by start; `active` holds earlier tokens that
    // are still open, so every overlapping pair is reported exactly once.
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const AlignedToken& t = list[i];
      if (t.end() > limit + kTimeEpsilon) {
        report.findings.push_back({FindingKind::OutOfBounds, rec.id, i, i,
                                   "token '" + t.token + "' ends at " + format_seconds(t.end()) +
                                       " s past recording end " + format_seconds(rec.duration()) + " s"});
      }
      std::erase_if(active, [&](std::size_t j) { return list[j].end() <= t.start + kTimeEpsilon; });
      for (std::size_t j : active) {
        report.findings.push_back({FindingKind::Overlap, rec.id, j, i,
                                   "tokens '" + list[j].token + "' and '" + t.token + "' overlap"});
      }
      active.push_back(i);
    }
  }
  return report;
}

SampleWindow window_samples(const Recording& rec, double start, double end) {
  SampleWindow w;
  w.clipped_start = std::clamp(start, 0.0, rec.duration());
  w.clipped_end = std::clamp(end, 0.0, rec.duration());
  if (w.clipped_end < w.clipped_start) w.clipped_end = w.clipped_start;
  w.first = std::min(to_samples(w.clipped_start, rec.sample_rate), rec.num_samples);
  w.count = to_samples(w.clipped_end - w.clipped_start, rec.sample_rate);
  w.count = std::clamp<std::int64_t>(w.count, 0, rec.num_samples - w.first);
  return w;
}

dsp::Waveform read_samples(const Recording& rec, std::int64_t first, std::int64_t count, std::optional<int> channel) {
  const wav::WavInfo info = wav::read_info(rec.audio_path);
  if (info.sample_rate != rec.sample_rate) {
    throw RateMismatchError("recording " + rec.id + ": file rate " + std::to_string(info.sample_rate) +
                            " Hz differs from corpus rate " + std::to_string(rec.sample_rate) + " Hz");
  }
  dsp::Waveform wave;
  wave.sample_rate = rec.sample_rate;
  wave.samples = wav::read_frames(rec.audio_path, info, first, count, channel.value_or(rec.channel));
  return wave;
}

dsp::Waveform read_window(const Recording& rec, double start, double end, std::optional<int> channel) {
  if (!(start < end)) {
    throw ValidationError("read_window: start " + format_seconds(start) + " must precede end " + format_seconds(end));
  }
  const SampleWindow w = window_samples(rec, start, end);
  return read_samples(rec, w.first, w.count, channel);
}

}  // namespace collage::ingest

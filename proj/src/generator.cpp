#include "collage/generator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include "collage/errors.hpp"
#include "collage/time_base.hpp"
#include "collage/wav.hpp"

namespace collage::gen {

namespace fs = std::filesystem;

std::string_view output_level_name(OutputLevel level) {
  return level == OutputLevel::UnitRms ? "unit_rms" : "source_mean_rms";
}

std::optional<OutputLevel> parse_output_level(std::string_view name) {
  if (name == "unit_rms") return OutputLevel::UnitRms;
  if (name == "source_mean_rms") return OutputLevel::SourceMeanRms;
  return std::nullopt;
}

std::int64_t RenderPlan::output_samples() const {
  std::int64_t total = 0;
  for (const auto& seg : segments) total += seg.num_samples - seg.joint_overlap_samples;
  return total;
}

RecordingIndex::RecordingIndex(std::span<const ingest::Recording> corpus) : corpus_(corpus.begin(), corpus.end()) {
  for (std::size_t i = 0; i < corpus_.size(); ++i) by_id_.emplace(corpus_[i].id, i);
}

const ingest::Recording* RecordingIndex::find(const std::string& id) const {
  const auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &corpus_[it->second];
}

const ingest::Recording& RecordingIndex::at(const std::string& id) const {
  if (const auto* rec = find(id)) return *rec;
  throw ReferenceError("unknown recording id '" + id + "'");
}

RenderResult render_plan(const RenderPlan& plan, const RecordingIndex& recordings) {
  if (plan.segments.empty()) throw ValidationError("render plan has no segments");
  RenderResult result;
  dsp::Waveform acc;
  acc.sample_rate = plan.sample_rate;
  acc.samples.reserve(static_cast<std::size_t>(std::max<std::int64_t>(plan.output_samples(), 0)));
  double raw_rms_sum = 0.0;

  for (const auto& seg : plan.segments) {
    const auto& rec = recordings.at(seg.cut.recording_id);
    if (rec.sample_rate != plan.sample_rate) {
      throw RateMismatchError("recording " + rec.id + " rate differs from the plan rate");
    }
    const dsp::Waveform raw =
        ingest::read_samples(rec, seg.first_sample, seg.num_samples, ingest::audio_channel_index(seg.cut.channel));
    raw_rms_sum += dsp::rms(raw);
    const dsp::Waveform equalized = dsp::normalize_energy(raw);
    dsp::append_overlap_add(acc, equalized, static_cast<std::size_t>(seg.joint_overlap_samples), plan.crossfade_mode);
  }

  result.target_rms = plan.output_level == OutputLevel::UnitRms
                          ? 1.0
                          : raw_rms_sum / static_cast<double>(plan.segments.size());
  result.waveform = dsp::rescale(acc, result.target_rms);

  float peak = 0.0f;
  for (float s : result.waveform.samples) peak = std::max(peak, std::fabs(s));
  if (peak > kPeakLimit) {
    const double gain = static_cast<double>(kPeakLimit) / static_cast<double>(peak);
    for (float& s : result.waveform.samples) s = static_cast<float>(static_cast<double>(s) * gain);
    result.peak_limited = true;
  }
  return result;
}

double GenerationReport::total_audio_seconds() const {
  return sample_rate > 0 ? static_cast<double>(total_samples) / sample_rate : 0.0;
}

nlohmann::json GenerationReport::to_json() const {
  nlohmann::json skipped_json = nlohmann::json::array();
  for (const auto& s : skipped) {
    skipped_json.push_back({{"index", s.index},
                            {"utterance_id", s.utterance_id},
                            {"reason", s.reason},
                            {"missing_tokens", s.missing_tokens}});
  }
  nlohmann::json histogram = nlohmann::json::object();
  for (std::size_t k = 0; k < unit_length_histogram.size(); ++k) {
    histogram[std::to_string(k + 1)] = unit_length_histogram[k];
  }
  return {{"utterances", utterance_count},
          {"generated_count", generated_count},
          {"skipped_count", skipped.size()},
          {"skipped", skipped_json},
          {"sample_rate", sample_rate},
          {"total_samples", total_samples},
          {"total_audio_seconds", total_audio_seconds()},
          {"total_audio_hours", total_audio_hours()},
          {"joints", joint_count},
          {"peak_limited_count", peak_limited_count},
          {"unit_length_histogram", histogram}};
}

CollageGenerator::CollageGenerator(const units::Inventory& inventory, std::span<const ingest::Recording> corpus,
                                   CollageRequest request)
    : inventory_(inventory), recordings_(corpus), request_(std::move(request)) {
  if (!(request_.crossfade.overlap >= 0.0)) throw ValidationError("overlap must be >= 0");
  if (!(request_.context >= request_.crossfade.overlap)) {
    throw ValidationError("context (" + ingest::format_seconds(request_.context) + " s) must be >= overlap (" +
                          ingest::format_seconds(request_.crossfade.overlap) + " s)");
  }
  if (request_.workers == 0) request_.workers = 1;
  sample_rate_ = ingest::corpus_sample_rate(corpus);
  for (const auto& [key, cuts] : inventory_.entries()) {
    for (const auto& cut : cuts) {
      if (!recordings_.find(cut.recording_id)) {
        throw ReferenceError("inventory cut for '" + key.to_string() + "' names unknown recording '" +
                             cut.recording_id + "'");
      }
    }
  }
}

std::variant<RenderPlan, SkippedUtterance> CollageGenerator::plan_utterance(const cstext::CsUtterance& utt,
                                                                            std::size_t index,
                                                                            RandomStream& rng) const {
  auto match = units::get_consec_units(utt.tokens, inventory_);
  if (!match.ok()) return SkippedUtterance{utt.id, index, "oov", std::move(match.oov)};

  RenderPlan plan;
  plan.sample_rate = sample_rate_;
  plan.crossfade_mode = request_.crossfade.mode;
  plan.output_level = request_.output_level;
  std::int64_t length = 0;
  for (auto& key : match.units) {
    const units::CutRef& cut = units::sample_unit(inventory_, key, rng);
    const auto& rec = recordings_.at(cut.recording_id);
    const auto window = ingest::window_samples(rec, cut.start - request_.context, cut.end + request_.context);

    SegmentProvenance seg;
    seg.key = std::move(key);
    seg.cut = cut;
    seg.first_sample = window.first;
    seg.num_samples = window.count;
    seg.head_ext = std::max(0.0, cut.start - window.clipped_start);
    seg.tail_ext = std::max(0.0, window.clipped_end - cut.end);
    if (!plan.segments.empty()) {
      const double available = std::min({request_.crossfade.overlap, plan.segments.back().tail_ext, seg.head_ext});
      seg.joint_overlap_samples = std::clamp<std::int64_t>(to_samples(available, sample_rate_), 0,
                                                           std::min(length, seg.num_samples));
    }
    length += seg.num_samples - seg.joint_overlap_samples;
    plan.segments.push_back(std::move(seg));
  }
  return plan;
}

UtteranceOutcome CollageGenerator::generate_utterance(const cstext::CsUtterance& utt, std::size_t index,
                                                      RandomStream& rng) const {
  auto planned = plan_utterance(utt, index, rng);
  if (auto* skip = std::get_if<SkippedUtterance>(&planned)) return std::move(*skip);

  GeneratedUtterance out;
  out.utterance_id = utt.id;
  out.index = index;
  out.text = utt.tokens;
  out.plan = std::move(std::get<RenderPlan>(planned));
  try {
    auto rendered = render_plan(out.plan, recordings_);
    out.waveform = std::move(rendered.waveform);
    out.target_rms = rendered.target_rms;
    out.peak_limited = rendered.peak_limited;
  } catch (const DegenerateInputError&) {
    return SkippedUtterance{utt.id, index, "silent segment", {}};
  }
  return out;
}

nlohmann::json manifest_record(const GeneratedUtterance& utt, std::string_view audio_path) {
  nlohmann::json provenance = nlohmann::json::array();
  for (const auto& seg : utt.plan.segments) {
    provenance.push_back({{"tokens", seg.key.tokens},
                          {"recording_id", seg.cut.recording_id},
                          {"channel", seg.cut.channel},
                          {"start", seg.cut.start},
                          {"end", seg.cut.end},
                          {"head_ext", seg.head_ext},
                          {"tail_ext", seg.tail_ext},
                          {"first_sample", seg.first_sample},
                          {"num_samples", seg.num_samples},
                          {"joint_overlap", to_seconds(seg.joint_overlap_samples, utt.plan.sample_rate)},
                          {"joint_overlap_samples", seg.joint_overlap_samples}});
  }
  std::string text;
  for (std::size_t i = 0; i < utt.text.size(); ++i) text += (i ? " " : "") + utt.text[i];
  return {{"index", utt.index},
          {"utterance_id", utt.utterance_id},
          {"text", text},
          {"audio", std::string(audio_path)},
          {"sample_rate", utt.plan.sample_rate},
          {"num_samples", utt.waveform.size()},
          {"duration_seconds", utt.duration()},
          {"level_mode", std::string(output_level_name(utt.plan.output_level))},
          {"crossfade_mode", std::string(dsp::crossfade_mode_name(utt.plan.crossfade_mode))},
          {"target_rms", utt.target_rms},
          {"peak_limited", utt.peak_limited},
          {"provenance", provenance}};
}

RenderPlan plan_from_record(const nlohmann::json& record) {
  try {
    RenderPlan plan;
    plan.sample_rate = record.at("sample_rate").get<int>();
    const auto mode = dsp::parse_crossfade_mode(record.at("crossfade_mode").get<std::string>());
    const auto level = parse_output_level(record.at("level_mode").get<std::string>());
    if (!mode || !level) throw ValidationError("manifest record has unknown crossfade or level mode");
    plan.crossfade_mode = *mode;
    plan.output_level = *level;
    for (const auto& item : record.at("provenance")) {
      SegmentProvenance seg;
      seg.key.tokens = item.at("tokens").get<std::vector<std::string>>();
      seg.cut.key = seg.key;
      seg.cut.recording_id = item.at("recording_id").get<std::string>();
      seg.cut.channel = item.at("channel").get<int>();
      seg.cut.start = item.at("start").get<double>();
      seg.cut.end = item.at("end").get<double>();
      seg.head_ext = item.at("head_ext").get<double>();
      seg.tail_ext = item.at("tail_ext").get<double>();
      seg.first_sample = item.at("first_sample").get<std::int64_t>();
      seg.num_samples = item.at("num_samples").get<std::int64_t>();
      seg.joint_overlap_samples = item.at("joint_overlap_samples").get<std::int64_t>();
      plan.segments.push_back(std::move(seg));
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed manifest record: ") + e.what());
  }
}

GenerationReport CollageGenerator::generate_collage(std::span<const cstext::CsUtterance> utterances) const {
  const fs::path& dir = request_.output_dir;
  {
    std::error_code ec;
    fs::create_directories(dir, ec);
    const fs::path probe = dir / ".collage-write-probe";
    std::ofstream out(probe);
    if (ec || !out) throw IoError("output directory is not writable: " + dir.string());
    out.close();
    fs::remove(probe, ec);
  }
  {
    std::unordered_map<std::string_view, std::size_t> ids;
    for (std::size_t i = 0; i < utterances.size(); ++i) {
      if (!ids.emplace(utterances[i].id, i).second) {
        throw ValidationError("duplicate utterance id '" + utterances[i].id + "'");
      }
    }
  }

  struct Slot {
    std::optional<nlohmann::json> record;
    std::optional<SkippedUtterance> skipped;
    std::int64_t samples = 0;
    std::size_t joints = 0;
    bool peak_limited = false;
    std::vector<std::size_t> lengths;
  };
  std::vector<Slot> slots(utterances.size());
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < utterances.size(); i = next++) {
      const auto& utt = utterances[i];
      Slot& slot = slots[i];
      try {
        RandomStream rng = derive_stream(request_.seed, i);
        auto outcome = generate_utterance(utt, i, rng);
        if (auto* skip = std::get_if<SkippedUtterance>(&outcome)) {
          slot.skipped = std::move(*skip);
          continue;
        }
        const auto& generated = std::get<GeneratedUtterance>(outcome);
        const std::string file = utt.id + ".wav";
        wav::write_mono16(dir / file, std::span<const float>(generated.waveform.samples), generated.waveform.sample_rate);
        slot.record = manifest_record(generated, file);
        slot.samples = static_cast<std::int64_t>(generated.waveform.size());
        slot.joints = generated.plan.segments.size() - 1;
        slot.peak_limited = generated.peak_limited;
        for (const auto& seg : generated.plan.segments) slot.lengths.push_back(seg.key.size());
      } catch (const std::exception& e) {
        slot.record.reset();
        slot.skipped = SkippedUtterance{utt.id, i, std::string("error: ") + e.what(), {}};
      }
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(request_.workers, static_cast<unsigned>(utterances.size())));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  GenerationReport report;
  report.utterance_count = utterances.size();
  report.sample_rate = sample_rate_;
  report.unit_length_histogram.assign(static_cast<std::size_t>(inventory_.n_max()), 0);

  const fs::path manifest_path = dir / std::string(kManifestName);
  std::ofstream manifest(manifest_path, std::ios::trunc);
  if (!manifest) throw IoError("cannot write manifest: " + manifest_path.string());
  for (auto& slot : slots) {
    if (slot.skipped) {
      report.skipped.push_back(std::move(*slot.skipped));
      continue;
    }
    manifest << slot.record->dump() << '\n';
    ++report.generated_count;
    report.total_samples += slot.samples;
    report.joint_count += slot.joints;
    if (slot.peak_limited) ++report.peak_limited_count;
    for (std::size_t len : slot.lengths) ++report.unit_length_histogram[len - 1];
  }
  if (!manifest) throw IoError("failed writing manifest: " + manifest_path.string());

  const fs::path report_path = dir / std::string(kReportName);
  std::ofstream report_out(report_path, std::ios::trunc);
  report_out << report.to_json().dump(2) << '\n';
  if (!report_out) throw IoError("cannot write report: " + report_path.string());
  return report;
}

std::span<const cstext::CsUtterance> first_percent(std::span<const cstext::CsUtterance> utterances, double percent) {
  if (!(percent >= 0.0 && percent <= 100.0)) throw ValidationError("subset percent must lie in [0, 100]");
  const auto n = static_cast<std::size_t>(std::floor(static_cast<double>(utterances.size()) * percent / 100.0));
  return utterances.first(std::min(n, utterances.size()));
}

}  // namespace collage::gen

#include "collage/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "collage/corpus.hpp"
#include "collage/cs_text.hpp"
#include "collage/errors.hpp"
#include "collage/generator.hpp"
#include "collage/inventory.hpp"
#include "collage/metrics.hpp"
#include "collage/wav.hpp"

namespace collage::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GlobalOptions {
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

struct InventoryOptions {
  std::string corpus;
  std::string ctm;
  int n = units::kDefaultNgram;
  double gap_tolerance = units::kDefaultGapTolerance;
  std::string out;
};

struct GenerateOptions {
  std::string corpus;
  std::string inventory;
  std::string ctm;
  int n = units::kDefaultNgram;
  double gap_tolerance = units::kDefaultGapTolerance;
  std::string text;
  std::string out;
  double overlap = dsp::kDefaultOverlap;
  double context = dsp::kDefaultContext;
  std::string crossfade = "normalized-hamming";
  std::string level = "source_mean_rms";
  double subset_percent = 100.0;
};

struct SynthTextOptions {
  std::string parallel;
  std::string alignment;
  double rate = 0.2;
  std::string out;
  std::string source_lang = "ar";
  std::string target_lang = "en";
};

struct ScoreOptions {
  std::string ref;
  std::string hyp;
  std::string mode = "mer";
  bool cmi = false;
  std::optional<double> filter_threshold;
};

struct InspectOptions {
  std::string manifest;
  std::string corpus;
  std::string utterance;
  std::string out;
};

std::ifstream open_input(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw IoError(std::string("cannot open ") + what + ": " + path);
  return in;
}

std::ofstream open_output(const std::string& path, const char* what) {
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(std::string("cannot write ") + what + ": " + path);
  return out;
}

ingest::SupervisionSet load_supervisions(const std::string& corpus_path, const std::string& ctm_path,
                                         spdlog::logger& log) {
  const auto corpus = ingest::load_corpus_manifest(corpus_path);
  if (!corpus.empty()) ingest::corpus_sample_rate(corpus);
  auto in = open_input(ctm_path, "CTM");
  auto set = ingest::parse_ctm(in, corpus, ctm_path);
  const auto report = ingest::validate(set);
  if (!report.accepted()) {
    for (const auto& f : report.findings) log.error("validation: {}: {}", f.recording_id, f.message);
    throw ValidationError("alignments failed validation with " + std::to_string(report.findings.size()) + " findings");
  }
  log.info("loaded {} recordings, {} tokens", set.recordings.size(), set.token_count());
  return set;
}

json inventory_stats(const units::Inventory& inv) {
  json per_length = json::object();
  const auto counts = inv.keys_per_length();
  for (std::size_t k = 0; k < counts.size(); ++k) per_length[std::to_string(k + 1)] = counts[k];
  return {{"n_max", inv.n_max()},
          {"gap_tolerance", inv.gap_tolerance()},
          {"keys", inv.key_count()},
          {"cuts", inv.cut_count()},
          {"keys_per_length", per_length}};
}

int cmd_build_inventory(const InventoryOptions& opt, std::ostream& out, spdlog::logger& log) {
  const auto set = load_supervisions(opt.corpus, opt.ctm, log);
  const auto inv = units::build_inventory(set, opt.n, opt.gap_tolerance);
  auto file = open_output(opt.out, "inventory");
  units::dump_inventory(inv, file);
  if (!file) throw IoError("failed writing inventory: " + opt.out);
  out << inventory_stats(inv).dump(2) << '\n';
  return kExitOk;
}

int cmd_generate(const GenerateOptions& opt, const GlobalOptions& global, std::ostream& out, spdlog::logger& log) {
  const auto mode = dsp::parse_crossfade_mode(opt.crossfade);
  const auto level = gen::parse_output_level(opt.level);
  if (!mode) throw UsageError("unknown crossfade mode '" + opt.crossfade + "'");
  if (!level) throw UsageError("unknown level mode '" + opt.level + "'");
  if (opt.inventory.empty() == opt.ctm.empty()) throw UsageError("generate needs exactly one of --inventory or --ctm");

  const auto corpus = ingest::load_corpus_manifest(opt.corpus);
  std::optional<units::Inventory> inv;
  if (!opt.inventory.empty()) {
    auto in = open_input(opt.inventory, "inventory");
    inv = units::load_inventory(in, opt.inventory);
  } else {
    inv = units::build_inventory(load_supervisions(opt.corpus, opt.ctm, log), opt.n, opt.gap_tolerance);
  }
  const auto text = cstext::load_cs_text(opt.text);
  const auto subset = gen::first_percent(text, opt.subset_percent);

  gen::CollageRequest request;
  request.seed = global.seed;
  request.crossfade = {opt.overlap, *mode};
  request.context = opt.context;
  request.output_dir = opt.out;
  request.output_level = *level;
  request.workers = global.workers;
  const gen::CollageGenerator generator(*inv, corpus, request);
  log.info("generating {} of {} utterances with {} worker(s)", subset.size(), text.size(), request.workers);
  const auto report = generator.generate_collage(subset);
  for (const auto& skip : report.skipped) {
    log.warn("skipped {}: {}", skip.utterance_id, skip.reason);
  }
  out << report.to_json().dump(2) << '\n';
  return kExitOk;
}

int cmd_synth_text(const SynthTextOptions& opt, const GlobalOptions& global, std::ostream& out) {
  const auto source_lang = metrics::parse_language_tag(opt.source_lang);
  const auto target_lang = metrics::parse_language_tag(opt.target_lang);
  if (!source_lang || !target_lang) throw UsageError("language tags must be one of en, zh, ar, other");
  auto text_in = open_input(opt.parallel, "parallel text");
  auto align_in = open_input(opt.alignment, "alignment file");
  const auto pairs = cstext::read_parallel(text_in, align_in, opt.parallel, opt.alignment);

  cstext::ReplacementPolicy policy;
  policy.rate = opt.rate;
  policy.seed = global.seed;
  policy.source_language = *source_lang;
  policy.target_language = *target_lang;
  const auto result = cstext::synthesize_corpus(pairs, policy);

  auto file = open_output(opt.out, "CS text");
  cstext::write_cs_text(result.text, file);
  if (!file) throw IoError("failed writing CS text: " + opt.out);
  const double fraction =
      result.eligible ? static_cast<double>(result.replaced) / static_cast<double>(result.eligible) : 0.0;
  out << json{{"sentences", result.text.size()},
              {"eligible_tokens", result.eligible},
              {"replaced_tokens", result.replaced},
              {"replaced_fraction", fraction},
              {"rate", opt.rate}}
             .dump(2)
      << '\n';
  return kExitOk;
}

std::vector<std::pair<std::string, std::string>> read_scoring_file(const std::string& path) {
  auto in = open_input(path, "scoring file");
  std::vector<std::pair<std::string, std::string>> rows;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto tab = line.find('\t');
    std::string id = line.substr(0, tab);
    std::string text = tab == std::string::npos ? std::string() : line.substr(tab + 1);
    if (id.empty()) throw ParseError(path, line_no, "empty utterance id");
    if (!ids.insert(id).second) throw ParseError(path, line_no, "duplicate utterance id '" + id + "'");
    rows.emplace_back(std::move(id), std::move(text));
  }
  return rows;
}

int cmd_score(const ScoreOptions& opt, std::ostream& out) {
  const auto mode = metrics::parse_score_mode(opt.mode);
  if (!mode) throw UsageError("unknown scoring mode '" + opt.mode + "'");
  const auto refs = read_scoring_file(opt.ref);
  const auto hyps = read_scoring_file(opt.hyp);

  std::unordered_map<std::string, std::string> hyp_by_id(hyps.begin(), hyps.end());
  std::unordered_set<std::string> ref_ids;
  for (const auto& [id, text] : refs) ref_ids.insert(id);
  for (const auto& [id, text] : hyps) {
    if (!ref_ids.count(id)) throw ValidationError("hypothesis '" + id + "' has no reference");
  }

  std::vector<metrics::ScoredPair> pairs;
  metrics::ErrorRateResult total;
  std::size_t missing = 0;
  for (const auto& [id, ref_text] : refs) {
    const auto it = hyp_by_id.find(id);
    if (it == hyp_by_id.end()) ++missing;
    const std::string hyp_text = it == hyp_by_id.end() ? std::string() : it->second;
    total += metrics::edit_counts(metrics::tokenize_for(*mode, ref_text), metrics::tokenize_for(*mode, hyp_text));
    pairs.push_back({id, ref_text, hyp_text});
  }
  if (total.reference_length == 0) throw ValidationError("error rate undefined: references are empty");

  json report{{"mode", opt.mode},
              {"utterances", refs.size()},
              {"missing_hypotheses", missing},
              {"substitutions", total.substitutions},
              {"deletions", total.deletions},
              {"insertions", total.insertions},
              {"reference_length", total.reference_length},
              {"errors", total.errors()},
              {"error_rate", total.rate()}};

  auto cmi_json = [](const metrics::CorpusCmi& c) {
    return json{{"mean", c.mean ? json(*c.mean) : json(nullptr)}, {"counted", c.counted}};
  };
  if (opt.cmi) {
    std::vector<metrics::TaggedUtterance> ref_utts, hyp_utts;
    for (const auto& p : pairs) {
      ref_utts.push_back(metrics::TaggedUtterance::from_tokens(metrics::tokenize_mixed(p.reference)));
      hyp_utts.push_back(metrics::TaggedUtterance::from_tokens(metrics::tokenize_mixed(p.hypothesis)));
    }
    report["reference_cmi"] = cmi_json(metrics::corpus_cmi(ref_utts));
    report["hypothesis_cmi"] = cmi_json(metrics::corpus_cmi(hyp_utts));
  }
  if (opt.filter_threshold) {
    const auto filtered = metrics::filtered_corpus_cmi(pairs, *opt.filter_threshold);
    report["filtered_cmi"] = {{"threshold", *opt.filter_threshold},
                              {"mean", filtered.mean ? json(*filtered.mean) : json(nullptr)},
                              {"empty", !filtered.mean.has_value()},
                              {"retained", filtered.retained},
                              {"total", filtered.total}};
  }
  out << report.dump(2) << '\n';
  return kExitOk;
}

int cmd_inspect(const InspectOptions& opt, std::ostream& out) {
  auto in = open_input(opt.manifest, "manifest");
  std::optional<json> record;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto parsed = json::parse(line, nullptr, false);
    if (parsed.is_discarded()) throw ValidationError("malformed manifest line in " + opt.manifest);
    if (parsed.value("utterance_id", std::string()) == opt.utterance) {
      record = std::move(parsed);
      break;
    }
  }
  if (!record) throw LookupError("utterance '" + opt.utterance + "' not found in " + opt.manifest);

  const auto corpus = ingest::load_corpus_manifest(opt.corpus);
  const gen::RecordingIndex recordings(corpus);
  const auto plan = gen::plan_from_record(*record);
  const auto rendered = gen::render_plan(plan, recordings);

  std::vector<std::int16_t> pcm(rendered.waveform.size());
  for (std::size_t i = 0; i < pcm.size(); ++i) pcm[i] = wav::quantize(rendered.waveform.samples[i]);

  json result{{"record", *record},
              {"rerendered_samples", rendered.waveform.size()},
              {"rerendered_peak_limited", rendered.peak_limited}};
  bool matches = false;
  const fs::path audio = fs::path(opt.manifest).parent_path() / record->value("audio", std::string());
  if (fs::exists(audio)) {
    matches = wav::read_all_pcm(audio) == pcm;
    result["matches_stored_audio"] = matches;
  } else {
    result["matches_stored_audio"] = nullptr;
  }
  if (!opt.out.empty()) wav::write_mono16(opt.out, std::span<const std::int16_t>(pcm), plan.sample_rate);
  out << result.dump(2) << '\n';
  return (fs::exists(audio) && !matches) ? kExitData : kExitOk;
}

spdlog::level::level_enum log_level_from_env() {
  const char* value = std::getenv("COLLAGE_LOG_LEVEL");
  if (!value || !*value) return spdlog::level::info;
  const auto level = spdlog::level::from_str(value);
  // from_str maps unknown names to off; only honour it when asked for.
  if (level == spdlog::level::off && std::string_view(value) != "off") return spdlog::level::info;
  return level;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  spdlog::logger log("collage", sink);
  log.set_pattern("[%l] %v");
  log.set_level(log_level_from_env());

  CLI::App app{"Code-switched speech synthesis by splicing monolingual unit segments", "collage"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Seed for all randomness")->capture_default_str();
  app.add_option("--workers", global.workers, "Worker threads for generate")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  InventoryOptions inv_opt;
  auto* build = app.add_subcommand("build-inventory", "Index n-gram unit cuts from alignments");
  build->add_option("--corpus", inv_opt.corpus, "Corpus manifest (JSON lines)")->required();
  build->add_option("--ctm", inv_opt.ctm, "CTM alignments")->required();
  build->add_option("--n", inv_opt.n, "Maximum n-gram length")->capture_default_str()->check(CLI::PositiveNumber);
  build->add_option("--gap-tolerance", inv_opt.gap_tolerance, "Maximum gap inside a multi-token cut (s)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  build->add_option("--out", inv_opt.out, "Inventory dump path")->required();

  GenerateOptions gen_opt;
  auto* generate = app.add_subcommand("generate", "Splice code-switched utterances");
  generate->add_option("--corpus", gen_opt.corpus, "Corpus manifest (JSON lines)")->required();
  generate->add_option("--inventory", gen_opt.inventory, "Inventory dump from build-inventory");
  generate->add_option("--ctm", gen_opt.ctm, "Build the inventory from this CTM instead");
  generate->add_option("--n", gen_opt.n, "Maximum n-gram length (with --ctm)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  generate->add_option("--gap-tolerance", gen_opt.gap_tolerance, "Gap tolerance (with --ctm)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  generate->add_option("--text", gen_opt.text, "CS text (id<TAB>text[<TAB>tags])")->required();
  generate->add_option("--out", gen_opt.out, "Output directory")->required();
  generate->add_option("--overlap", gen_opt.overlap, "Crossfade overlap (s)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  generate->add_option("--context", gen_opt.context, "Context added around each cut (s)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  generate->add_option("--crossfade", gen_opt.crossfade, "normalized-hamming | raw-hamming")
      ->capture_default_str()
      ->check(CLI::IsMember({"normalized-hamming", "raw-hamming"}));
  generate->add_option("--level", gen_opt.level, "source_mean_rms | unit_rms")
      ->capture_default_str()
      ->check(CLI::IsMember({"source_mean_rms", "unit_rms"}));
  generate->add_option("--subset-percent", gen_opt.subset_percent, "Render only the first k% of the text")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 100.0));

  SynthTextOptions synth_opt;
  auto* synth = app.add_subcommand("synth-text", "Synthesize CS text by random aligned-word replacement");
  synth->add_option("--parallel", synth_opt.parallel, "id<TAB>source<TAB>target file")->required();
  synth->add_option("--alignment", synth_opt.alignment, "Pharaoh alignments, one line per sentence")->required();
  synth->add_option("--rate", synth_opt.rate, "Replacement probability per aligned word")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--out", synth_opt.out, "Output CS text")->required();
  synth->add_option("--source-lang", synth_opt.source_lang, "Tag for source tokens")->capture_default_str();
  synth->add_option("--target-lang", synth_opt.target_lang, "Tag for target tokens")->capture_default_str();

  ScoreOptions score_opt;
  auto* score = app.add_subcommand("score", "WER/CER/MER and code-mixing statistics");
  score->add_option("--ref", score_opt.ref, "Reference file (id<TAB>text)")->required();
  score->add_option("--hyp", score_opt.hyp, "Hypothesis file (id<TAB>text)")->required();
  score->add_option("--mode", score_opt.mode, "wer | cer | mer")
      ->capture_default_str()
      ->check(CLI::IsMember({"wer", "cer", "mer"}));
  score->add_flag("--cmi", score_opt.cmi, "Report corpus CMI of references and hypotheses");
  score->add_option("--filter-threshold", score_opt.filter_threshold,
                    "Report CMI over hypotheses with MER <= threshold (e.g. 0.2)")
      ->check(CLI::NonNegativeNumber);

  InspectOptions inspect_opt;
  auto* inspect = app.add_subcommand("inspect", "Print a manifest record and re-render it from provenance");
  inspect->add_option("--manifest", inspect_opt.manifest, "Manifest from generate")->required();
  inspect->add_option("--corpus", inspect_opt.corpus, "Corpus manifest")->required();
  inspect->add_option("--utterance", inspect_opt.utterance, "Utterance id")->required();
  inspect->add_option("--out", inspect_opt.out, "Write the re-rendered audio here");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }

  // Effective configuration of the global options and the chosen subcommand.
  const std::string active = app.get_subcommands().front()->get_name() + ".";
  std::istringstream echo(app.config_to_str(true, false));
  for (std::string line; std::getline(echo, line);) {
    const auto eq = line.find('=');
    const auto dot = line.find('.');
    const bool global_line = dot == std::string::npos || (eq != std::string::npos && dot > eq);
    if (!line.empty() && (global_line || line.starts_with(active))) log.info("config: {}", line);
  }

  try {
    if (*build) return cmd_build_inventory(inv_opt, out, log);
    if (*generate) return cmd_generate(gen_opt, global, out, log);
    if (*synth) return cmd_synth_text(synth_opt, global, out);
    if (*score) return cmd_score(score_opt, out);
    if (*inspect) return cmd_inspect(inspect_opt, out);
  } catch (const UsageError& e) {
    log.error("{}", e.what());
    return kExitUsage;
  } catch (const IoError& e) {
    log.error("{}", e.what());
    return kExitIo;
  } catch (const Error& e) {
    log.error("{}", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    log.error("unexpected failure: {}", e.what());
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace collage::cli

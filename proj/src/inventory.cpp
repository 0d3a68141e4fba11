#include "collage/inventory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "collage/errors.hpp"

namespace collage::units {

namespace {

std::vector<std::string> split_on(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t begin = 0;
  while (true) {
    const std::size_t pos = text.find(sep, begin);
    parts.emplace_back(text.substr(begin, pos == std::string_view::npos ? std::string_view::npos : pos - begin));
    if (pos == std::string_view::npos) break;
    begin = pos + 1;
  }
  return parts;
}

bool parse_number(std::string_view text, double& out) {
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(out);
}

bool parse_number(std::string_view text, int& out) {
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

std::string UnitKey::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

Inventory::Inventory(int n_max, double gap_tolerance) : n_max_(n_max), gap_tolerance_(gap_tolerance) {
  if (n_max < 1) throw ValidationError("n-gram size must be >= 1");
  if (!(gap_tolerance >= 0.0)) throw ValidationError("gap tolerance must be >= 0");
}

void Inventory::add(const ingest::SupervisionSet& set) {
  const auto report = ingest::validate(set);
  if (!report.accepted()) {
    throw ValidationError("supervisions failed validation (" + std::to_string(report.findings.size()) +
                          " findings); first: " + report.findings.front().message);
  }
  for (const auto& list : set.tokens) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      UnitKey key;
      for (std::size_t k = 0; k < static_cast<std::size_t>(n_max_) && i + k < list.size(); ++k) {
        const auto& last = list[i + k];
        if (k > 0) {
          const auto& prev = list[i + k - 1];
          if (last.channel != prev.channel ||
              last.start - prev.end() > gap_tolerance_ + ingest::kTimeEpsilon) {
            break;
          }
        }
        key.tokens.push_back(last.token);
        entries_[key].push_back(CutRef{list[i].recording_id, list[i].channel, list[i].start, last.end(), key});
      }
    }
  }
}

void Inventory::add_cut(CutRef cut) {
  if (cut.key.size() == 0 || cut.key.size() > static_cast<std::size_t>(n_max_)) {
    throw ValidationError("key '" + cut.key.to_string() + "' has length outside 1.." + std::to_string(n_max_));
  }
  for (const auto& t : cut.key.tokens) {
    if (t.empty()) throw ValidationError("empty token in key");
  }
  if (!(cut.start < cut.end)) throw ValidationError("cut for '" + cut.key.to_string() + "' has start >= end");
  auto& list = entries_[cut.key];
  list.push_back(std::move(cut));
}

const std::vector<CutRef>* Inventory::find(std::span<const std::string> tokens) const {
  const auto it = entries_.find(tokens);
  return it == entries_.end() ? nullptr : &it->second;
}

std::size_t Inventory::cut_count() const {
  std::size_t n = 0;
  for (const auto& [key, cuts] : entries_) n += cuts.size();
  return n;
}

std::vector<std::size_t> Inventory::keys_per_length() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_max_), 0);
  for (const auto& [key, cuts] : entries_) ++counts[key.size() - 1];
  return counts;
}

Inventory build_inventory(const ingest::SupervisionSet& set, int n, double gap_tolerance) {
  Inventory inv(n, gap_tolerance);
  inv.add(set);
  return inv;
}

MatchResult get_consec_units(std::span<const std::string> utterance, const Inventory& inv) {
  MatchResult result;
  std::size_t i = 0;
  while (i < utterance.size()) {
    const std::size_t longest = std::min<std::size_t>(static_cast<std::size_t>(inv.n_max()), utterance.size() - i);
    std::size_t matched = 0;
    for (std::size_t k = longest; k >= 1; --k) {
      if (inv.find(utterance.subspan(i, k))) {
        matched = k;
        break;
      }
    }
    if (matched == 0) {
      const auto& token = utterance[i];
      if (std::find(result.oov.begin(), result.oov.end(), token) == result.oov.end()) result.oov.push_back(token);
      ++i;
      continue;
    }
    const auto piece = utterance.subspan(i, matched);
    result.units.push_back(UnitKey{{piece.begin(), piece.end()}});
    i += matched;
  }
  return result;
}

const CutRef& sample_unit(const Inventory& inv, const UnitKey& key, RandomStream& rng) {
  const auto* cuts = inv.find(key);
  if (!cuts || cuts->empty()) throw LookupError("no cuts for unit '" + key.to_string() + "'");
  return (*cuts)[uniform_index(rng, cuts->size())];
}

void dump_inventory(const Inventory& inv, std::ostream& out) {
  out << "# collage-inventory v1 n_max=" << inv.n_max()
      << " gap_tolerance=" << ingest::format_seconds(inv.gap_tolerance()) << '\n';
  for (const auto& [key, cuts] : inv.entries()) {
    const std::string joined = key.to_string();
    for (const auto& cut : cuts) {
      out << joined << '\t' << cut.recording_id << '\t' << cut.channel << '\t'
          << ingest::format_seconds(cut.start) << '\t' << ingest::format_seconds(cut.end) << '\n';
    }
  }
}

Inventory load_inventory(std::istream& in, std::string_view source_name) {
  const std::string source(source_name);
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw ParseError(source, 1, "missing inventory header");
  ++line_no;
  int n_max = 0;
  double gap = -1.0;
  {
    std::istringstream header(line);
    std::string hash, magic, version, field;
    header >> hash >> magic >> version;
    if (hash != "#" || magic != "collage-inventory" || version != "v1") {
      throw ParseError(source, line_no, "not a collage inventory dump");
    }
    while (header >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) continue;
      const std::string_view name(field.data(), eq);
      const std::string_view value(field.data() + eq + 1, field.size() - eq - 1);
      if (name == "n_max" && !parse_number(value, n_max)) throw ParseError(source, line_no, "bad n_max");
      if (name == "gap_tolerance" && !parse_number(value, gap)) throw ParseError(source, line_no, "bad gap_tolerance");
    }
    if (n_max < 1 || gap < 0.0) throw ParseError(source, line_no, "header lacks n_max or gap_tolerance");
  }

  Inventory inv(n_max, gap);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_on(line, '\t');
    if (fields.size() != 5) throw ParseError(source, line_no, "expected 5 tab-separated fields");
    CutRef cut;
    std::istringstream key_stream(fields[0]);
    for (std::string tok; key_stream >> tok;) cut.key.tokens.push_back(tok);
    cut.recording_id = fields[1];
    if (cut.recording_id.empty()) throw ParseError(source, line_no, "empty recording id");
    if (!parse_number(fields[2], cut.channel)) throw ParseError(source, line_no, "bad channel");
    if (!parse_number(fields[3], cut.start) || !parse_number(fields[4], cut.end)) {
      throw ParseError(source, line_no, "non-numeric cut time");
    }
    try {
      inv.add_cut(std::move(cut));
    } catch (const ValidationError& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  return inv;
}

}  // namespace collage::units

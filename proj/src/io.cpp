/*
 * Copyright 2026 The gdecal Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "gdecal/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "gdecal/error.hpp"
#include "gdecal/format.hpp"

namespace gdecal {

using nlohmann::ordered_json;

namespace {

constexpr std::string_view kMagic = "CALIBDMP";
constexpr unsigned char kVersion = 0x01;
constexpr std::size_t kHeaderBytes = 8 + 1 + 3 * 4;

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

bool parse_number(std::string_view field, double& out) {
  const auto res = std::from_chars(field.data(), field.data() + field.size(), out);
  return res.ec == std::errc() && res.ptr == field.data() + field.size();
}

bool parse_number(std::string_view field, long long& out) {
  const auto res = std::from_chars(field.data(), field.data() + field.size(), out);
  return res.ec == std::errc() && res.ptr == field.data() + field.size();
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + i]))
         << (8 * i);
  }
  return v;
}

std::uint64_t get_u64(std::string_view bytes, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[at + i]))
         << (8 * i);
  }
  return v;
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xFFFFFFFEu) {
    throw Error(ErrorCode::kSizeMismatch,
                std::string(what) + " does not fit the binary format");
  }
  return static_cast<std::uint32_t>(v);
}

std::vector<double> read_vector(const ordered_json& j, const char* what) {
  if (!j.is_array()) {
    throw Error(ErrorCode::kMalformedWorld, std::string(what) + " must be an array");
  }
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) {
      throw Error(ErrorCode::kMalformedWorld,
                  std::string(what) + " must contain numbers");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<double> read_table(const ordered_json& j, std::size_t classes,
                               const char* what) {
  if (!j.is_array()) {
    throw Error(ErrorCode::kMalformedWorld, std::string(what) + " must be an array of rows");
  }
  std::vector<double> out;
  for (const auto& row : j) {
    auto values = read_vector(row, what);
    if (values.size() != classes) {
      throw Error(ErrorCode::kMalformedWorld,
                  std::string(what) + " rows must have K entries");
    }
    out.insert(out.end(), values.begin(), values.end());
  }
  return out;
}

ordered_json table_to_json(const std::vector<double>& table,
                           std::size_t classes) {
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < table.size(); i += classes) {
    rows.push_back(std::vector<double>(table.begin() + static_cast<std::ptrdiff_t>(i),
                                       table.begin() + static_cast<std::ptrdiff_t>(i + classes)));
  }
  return rows;
}

ordered_json bins_to_json(const std::vector<BinStat>& bins) {
  ordered_json out = ordered_json::array();
  for (const auto& b : bins) {
    out.push_back({{"bin", b.index},
                   {"lo", b.lo},
                   {"hi", b.hi},
                   {"count", b.count},
                   {"mass", b.mass},
                   {"hit_mass", b.hit_mass},
                   {"conf_mass", b.conf_mass},
                   {"accuracy", b.accuracy()},
                   {"mean_conf", b.mean_conf}});
  }
  return out;
}

std::string to_string(LogBase base) {
  return base == LogBase::kNatural ? "nat" : "2";
}

std::string to_string(DisagreementMode mode) {
  switch (mode) {
    case DisagreementMode::kMarginalIdentity: return "marginal-identity";
    case DisagreementMode::kOrderedPairs: return "ordered-pairs";
    case DisagreementMode::kDistinctPairs: return "distinct-pairs";
  }
  return "unknown";
}

}  // namespace

DumpFormat format_from_path(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot != std::string::npos) {
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == "csv") return DumpFormat::kCsv;
  }
  return DumpFormat::kBinary;
}

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  return fnv1a64(std::span<const unsigned char>(
      reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()));
}

std::string hex_digest(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(digest));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIo, "write to '" + path + "' failed");
}

EnsembleDataset parse_dump_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) {
    throw Error(ErrorCode::kMalformedHeader, "prediction CSV is empty");
  }
  const auto header = split_fields(lines[0]);
  if (header.size() < 4 || header[0] != "sample_id" || header[1] != "member_id") {
    throw Error(ErrorCode::kMalformedHeader,
                "expected header 'sample_id,member_id,p0,...,p{K-1}' with K >= 2");
  }
  const std::size_t K = header.size() - 2;
  for (std::size_t k = 0; k < K; ++k) {
    if (header[2 + k] != "p" + std::to_string(k)) {
      throw Error(ErrorCode::kMalformedHeader,
                  "column " + std::to_string(2 + k) + " must be 'p" +
                      std::to_string(k) + "'");
    }
  }

  std::vector<std::string> sample_ids;
  std::unordered_map<std::string, std::size_t> sample_index;
  std::unordered_map<std::string, std::size_t> member_index;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> cell;
  std::vector<double> values;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto fields = split_fields(lines[li]);
    const std::string where = "line " + std::to_string(li + 1);
    if (fields.size() != 2 + K) {
      throw Error(ErrorCode::kMalformedRow,
                  where + ": expected " + std::to_string(2 + K) + " fields");
    }
    std::string sid(fields[0]);
    std::string mid(fields[1]);
    if (sid.empty() || mid.empty()) {
      throw Error(ErrorCode::kMalformedRow, where + ": empty id");
    }
    auto [s_it, s_new] = sample_index.emplace(sid, sample_index.size());
    if (s_new) sample_ids.push_back(sid);
    auto [m_it, m_new] = member_index.emplace(mid, member_index.size());
    (void)m_new;
    if (!cell.emplace(std::make_pair(s_it->second, m_it->second),
                      values.size()).second) {
      throw Error(ErrorCode::kDuplicatePair,
                  where + ": duplicate (sample_id, member_id) pair (" + sid +
                      ", " + mid + ")");
    }
    for (std::size_t k = 0; k < K; ++k) {
      double v = 0.0;
      if (!parse_number(fields[2 + k], v)) {
        throw Error(ErrorCode::kMalformedRow,
                    where + ": cannot parse '" + std::string(fields[2 + k]) + "'");
      }
      values.push_back(v);
    }
  }

  EnsembleDataset ds;
  ds.samples = sample_index.size();
  ds.members = member_index.size();
  ds.classes = K;
  if (ds.samples == 0) {
    throw Error(ErrorCode::kMalformedRow, "prediction CSV has no rows");
  }
  if (cell.size() != ds.samples * ds.members) {
    throw Error(ErrorCode::kMissingPair,
                std::to_string(ds.samples * ds.members - cell.size()) +
                    " (sample, member) pairs are missing");
  }
  ds.probs.resize(ds.members * ds.samples * K);
  for (const auto& [key, offset] : cell) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(offset), K,
                ds.row(key.second, key.first).begin());
  }
  ds.sample_ids = std::move(sample_ids);
  return ds;
}

EnsembleDataset parse_dump_binary(std::string_view bytes) {
  if (bytes.size() < kHeaderBytes + 8) {
    throw Error(ErrorCode::kSizeMismatch, "binary dump is truncated");
  }
  if (bytes.substr(0, 8) != kMagic) {
    throw Error(ErrorCode::kBadMagic, "missing CALIBDMP magic");
  }
  if (static_cast<unsigned char>(bytes[8]) != kVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "unsupported dump version " +
                    std::to_string(static_cast<unsigned char>(bytes[8])));
  }
  const std::uint64_t M = get_u32(bytes, 9);
  const std::uint64_t N = get_u32(bytes, 13);
  const std::uint64_t K = get_u32(bytes, 17);
  const std::uint64_t expected = kHeaderBytes + 4 * M * N * K + 4 * N + 8;
  if (bytes.size() != expected) {
    throw Error(ErrorCode::kSizeMismatch,
                "binary dump has " + std::to_string(bytes.size()) +
                    " bytes, header implies " + std::to_string(expected));
  }
  const std::size_t payload = bytes.size() - 8;
  if (fnv1a64(bytes.substr(0, payload)) != get_u64(bytes, payload)) {
    throw Error(ErrorCode::kChecksumMismatch, "binary dump checksum mismatch");
  }

  EnsembleDataset ds;
  ds.members = M;
  ds.samples = N;
  ds.classes = K;
  ds.probs.resize(M * N * K);
  std::size_t at = kHeaderBytes;
  for (double& p : ds.probs) {
    p = static_cast<double>(std::bit_cast<float>(get_u32(bytes, at)));
    at += 4;
  }
  std::vector<std::uint32_t> raw(N);
  for (auto& y : raw) {
    y = get_u32(bytes, at);
    at += 4;
  }
  const bool unlabeled = std::all_of(raw.begin(), raw.end(),
                                     [](std::uint32_t y) { return y == kUnlabeled; });
  if (!unlabeled) {
    ds.labels.resize(N);
    for (std::size_t n = 0; n < N; ++n) {
      if (raw[n] >= K) {
        throw Error(ErrorCode::kLabelOutOfRange,
                    "label " + std::to_string(raw[n]) + " of sample " +
                        std::to_string(n) + " outside [0, " + std::to_string(K) + ")");
      }
      ds.labels[n] = static_cast<int>(raw[n]);
    }
  }
  ds.sample_ids = index_sample_ids(N);
  return ds;
}

std::string format_dump_csv(const EnsembleDataset& ds) {
  check_shape(ds);
  std::string out = "sample_id,member_id";
  for (std::size_t k = 0; k < ds.classes; ++k) out += ",p" + std::to_string(k);
  out += '\n';
  for (std::size_t n = 0; n < ds.samples; ++n) {
    for (std::size_t m = 0; m < ds.members; ++m) {
      out += ds.sample_ids[n];
      out += ',';
      out += std::to_string(m);
      for (double p : ds.row(m, n)) {
        out += ',';
        out += format_double(p);
      }
      out += '\n';
    }
  }
  return out;
}

std::string format_dump_binary(const EnsembleDataset& ds) {
  check_shape(ds);
  std::string out(kMagic);
  out.push_back(static_cast<char>(kVersion));
  put_u32(out, checked_u32(ds.members, "member count"));
  put_u32(out, checked_u32(ds.samples, "sample count"));
  put_u32(out, checked_u32(ds.classes, "class count"));
  out.reserve(out.size() + 4 * ds.probs.size() + 4 * ds.samples + 8);
  for (double p : ds.probs) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(p)));
  for (std::size_t n = 0; n < ds.samples; ++n) {
    put_u32(out, ds.labeled() ? static_cast<std::uint32_t>(ds.labels[n]) : kUnlabeled);
  }
  put_u64(out, fnv1a64(out));
  return out;
}

EnsembleDataset read_dump(const std::string& path, DumpFormat format) {
  const auto bytes = read_file(path);
  return format == DumpFormat::kCsv ? parse_dump_csv(bytes)
                                    : parse_dump_binary(bytes);
}

EnsembleDataset read_dump(const std::string& path) {
  return read_dump(path, format_from_path(path));
}

void write_dump(const std::string& path, const EnsembleDataset& ds,
                DumpFormat format) {
  write_file(path, format == DumpFormat::kCsv ? format_dump_csv(ds)
                                              : format_dump_binary(ds));
}

std::vector<std::pair<std::string, int>> parse_labels_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "sample_id,label") {
    throw Error(ErrorCode::kMalformedHeader, "expected header 'sample_id,label'");
  }
  std::vector<std::pair<std::string, int>> out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto fields = split_fields(lines[li]);
    long long y = 0;
    if (fields.size() != 2 || fields[0].empty() || !parse_number(fields[1], y) ||
        y < std::numeric_limits<int>::min() || y > std::numeric_limits<int>::max()) {
      throw Error(ErrorCode::kMalformedRow,
                  "labels line " + std::to_string(li + 1) + " is malformed");
    }
    out.emplace_back(std::string(fields[0]), static_cast<int>(y));
  }
  return out;
}

std::string format_labels_csv(const EnsembleDataset& ds) {
  if (!ds.labeled()) {
    throw Error(ErrorCode::kInvalidArgument, "dataset has no labels");
  }
  std::string out = "sample_id,label\n";
  for (std::size_t n = 0; n < ds.samples; ++n) {
    out += ds.sample_ids[n] + ',' + std::to_string(ds.labels[n]) + '\n';
  }
  return out;
}

void attach_labels(EnsembleDataset& ds,
                   const std::vector<std::pair<std::string, int>>& labels) {
  std::unordered_map<std::string, int> by_id;
  for (const auto& [id, y] : labels) {
    if (!by_id.emplace(id, y).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate label for sample '" + id + "'");
    }
  }
  if (by_id.size() != ds.samples) {
    throw Error(ErrorCode::kIdMismatch,
                "labels cover " + std::to_string(by_id.size()) +
                    " samples, predictions have " + std::to_string(ds.samples));
  }
  std::vector<int> out(ds.samples);
  for (std::size_t n = 0; n < ds.samples; ++n) {
    const auto it = by_id.find(ds.sample_ids[n]);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kIdMismatch,
                  "no label for sample '" + ds.sample_ids[n] + "'");
    }
    if (it->second < 0 || static_cast<std::size_t>(it->second) >= ds.classes) {
      throw Error(ErrorCode::kLabelOutOfRange,
                  "label " + std::to_string(it->second) + " of sample '" +
                      it->first + "' outside [0, " + std::to_string(ds.classes) + ")");
    }
    out[n] = it->second;
  }
  ds.labels = std::move(out);
}

ordered_json world_to_json(const FiniteWorld& world) {
  ordered_json members = ordered_json::array();
  for (const auto& table : world.members) {
    members.push_back(table_to_json(table, world.classes));
  }
  return {{"classes", world.classes},
          {"x_mass", world.x_mass},
          {"label_table", table_to_json(world.label_table, world.classes)},
          {"members", members},
          {"member_masses", world.member_masses}};
}

FiniteWorld world_from_json(const ordered_json& j) {
  try {
    FiniteWorld w;
    if (!j.is_object()) throw Error(ErrorCode::kMalformedWorld, "world must be an object");
    w.classes = j.at("classes").get<std::size_t>();
    w.x_mass = read_vector(j.at("x_mass"), "x_mass");
    w.label_table = read_table(j.at("label_table"), w.classes, "label_table");
    for (const auto& table : j.at("members")) {
      w.members.push_back(read_table(table, w.classes, "members"));
    }
    if (j.contains("member_masses")) {
      w.member_masses = read_vector(j.at("member_masses"), "member_masses");
    } else {
      w.member_masses.assign(w.members.size(),
                             w.members.empty() ? 0.0 : 1.0 / static_cast<double>(w.members.size()));
    }
    validate_world(w);
    return w;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedWorld, std::string("world file: ") + e.what());
  }
}

std::string format_world(const FiniteWorld& world) {
  return world_to_json(world).dump(2) + "\n";
}

FiniteWorld parse_world(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedWorld, std::string("world file: ") + e.what());
  }
  return world_from_json(j);
}

std::string to_string(BinKind kind) {
  switch (kind) {
    case BinKind::kEqualWidth: return "equal-width";
    case BinKind::kEqualCount: return "equal-count";
    case BinKind::kExplicit: return "explicit";
  }
  return "unknown";
}

BinKind parse_bin_kind(const std::string& text) {
  if (text == "equal-width") return BinKind::kEqualWidth;
  if (text == "equal-count") return BinKind::kEqualCount;
  throw Error(ErrorCode::kInvalidArgument, "unknown binning '" + text + "'");
}

ordered_json to_json(const BinningScheme& scheme) {
  return {{"kind", to_string(scheme.kind)},
          {"bin_count", scheme.bin_count},
          {"domain", {scheme.domain.lo, scheme.domain.hi}},
          {"edges", scheme.edges}};
}

ordered_json to_json(const CalibrationReport& r) {
  return {{"ece", r.ece},
          {"cwce", r.cwce},
          {"cace", r.cace},
          {"cace_qweighted", r.cace_qweighted},
          {"ecace", r.ecace},
          {"ic_floor", r.ic_floor},
          {"bins_used", to_json(r.bins_used)},
          {"reliability_bins", bins_to_json(r.per_bin)},
          {"pooled_bins", bins_to_json(r.pooled_bins)}};
}

ordered_json to_json(const InfoReport& r) {
  return {{"log_base", to_string(r.log_base)},
          {"prob_floor", r.prob_floor},
          {"mean_entropy_marginal", r.mean_entropy_marginal},
          {"mean_entropy_conditional", r.mean_entropy_conditional},
          {"bald_mean", r.bald_mean},
          {"bald_kl_mean", r.bald_kl_mean},
          {"approx_entropy_marginal", r.approx_entropy_marginal},
          {"approx_bald_mean", r.approx_bald_mean},
          {"cross_entropy", r.cross_entropy},
          {"entropic_gde_gap", r.entropic_gde_gap},
          {"test_error_upper_bound", r.test_error_upper_bound}};
}

ordered_json to_json(const MetricReport& r) {
  ordered_json j = {{"members", r.members},
                    {"samples", r.samples},
                    {"classes", r.classes},
                    {"labeled", r.labeled},
                    {"top", r.top},
                    {"acc", r.acc},
                    {"pred_acc", r.pred_acc},
                    {"top1_acc", r.top1_acc},
                    {"top1_conf", r.top1_conf},
                    {"test_error", r.test_error},
                    {"dis", r.dis},
                    {"gde_gap", r.gde_gap}};
  j["calibration"] = r.labeled ? to_json(r.calibration) : ordered_json(nullptr);
  j["info"] = to_json(r.info);
  return j;
}

ordered_json to_json(const ExactReport& r) {
  ordered_json levels = ordered_json::array();
  for (const auto& l : r.levelsets) {
    levels.push_back({{"q", l.q}, {"s_mass", l.s_mass}, {"t_mass", l.t_mass}});
  }
  return {{"acc", r.acc},
          {"pred_acc", r.pred_acc},
          {"test_error", r.test_error},
          {"dis", r.dis},
          {"gde_gap", r.gde_gap},
          {"cace_exact", r.cace_exact},
          {"cwce_exact", r.cwce_exact},
          {"ecace_exact", r.ecace_exact},
          {"bald", r.bald},
          {"approx_bald", r.approx_bald},
          {"approx_entropy_marginal", r.approx_entropy_marginal},
          {"approx_entropy_conditional", r.approx_entropy_conditional},
          {"cross_entropy", r.cross_entropy},
          {"entropy_marginal", r.entropy_marginal},
          {"entropy_conditional", r.entropy_conditional},
          {"entropic_gde_gap", r.entropic_gde_gap},
          {"ic_bound", r.ic_bound},
          {"min_marginal", r.min_marginal},
          {"top", r.top},
          {"levelsets", levels}};
}

ordered_json to_json(const TheoremReport& r) {
  ordered_json checks = ordered_json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"relation", c.relation},
                      {"lhs", c.lhs},
                      {"rhs", c.rhs},
                      {"slack", c.slack},
                      {"tolerance", c.tolerance},
                      {"passed", c.passed}});
  }
  return {{"all_passed", r.all_passed()},
          {"violations", r.violations()},
          {"checks", checks}};
}

ordered_json to_json(const AnalysisConfig& c) {
  return {{"binning", to_json(c.calibration.binning)},
          {"ic_floor", c.calibration.ic_floor},
          {"log_base", to_string(c.info.log_base)},
          {"prob_floor", c.info.prob_floor},
          {"disagreement_mode", to_string(c.dis_mode)}};
}

std::string format_reliability_csv(const CalibrationReport& report) {
  std::string out = "kind,bin,lo,hi,count,mass,accuracy,mean_conf\n";
  auto emit = [&out](const char* kind, const std::vector<BinStat>& bins) {
    for (const auto& b : bins) {
      out += kind;
      out += ',' + std::to_string(b.index) + ',' + format_double(b.lo) + ',' +
             format_double(b.hi) + ',' + std::to_string(b.count) + ',' +
             format_double(b.mass) + ',' + format_double(b.accuracy()) + ',' +
             format_double(b.mean_conf) + '\n';
    }
  };
  emit("top1", report.per_bin);
  emit("pooled", report.pooled_bins);
  return out;
}

std::string emit_curve_text(const RejectionCurve& curve,
                            const ordered_json& provenance) {
  const auto& cfg = curve.config;
  ordered_json sweep = {
      {"mode", cfg.sweep.mode == Sweep::Mode::kQuantile ? "quantile" : "absolute"},
      {"points", cfg.sweep.points},
      {"score", to_string(cfg.score)},
      {"keep_high", cfg.keep_high},
      {"fixed_bins", cfg.fixed_bins}};
  ordered_json rows = ordered_json::array();
  for (const auto& row : curve.rows) {
    ordered_json j = {{"threshold", row.threshold},
                      {"retained_count", row.retained_count},
                      {"retained_fraction", row.retained_fraction},
                      {"mean_score", row.mean_score}};
    j["metrics"] = row.metrics ? to_json(*row.metrics) : ordered_json(nullptr);
    rows.push_back(std::move(j));
  }
  ordered_json doc = {{"tool", {{"name", kToolName}, {"version", kToolVersion}}},
                      {"provenance", provenance},
                      {"config", to_json(cfg.analysis)},
                      {"sweep", sweep},
                      {"rows", rows}};
  return doc.dump(2) + "\n";
}

}  // namespace gdecal

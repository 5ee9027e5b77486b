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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gdecal/analysis.hpp"
#include "gdecal/oracle.hpp"
#include "gdecal/rejection.hpp"

// File formats.
//
// Prediction dump, CSV:
//   sample_id,member_id,p0,...,p{K-1}
//   one row per (sample, member); samples and members keep first-appearance
//   order.
//
// Prediction dump, binary (little endian):
//   "CALIBDMP" 0x01 | u32 M | u32 N | u32 K | f32 probs[M][N][K]
//   | u32 labels[N] | u64 FNV-1a of every preceding byte
//   Labels all equal to 0xFFFFFFFF mark an unlabeled dump. Sample ids are the
//   decimal indices "0".."N-1".
//
// Labels, CSV:  sample_id,label
//
// Worlds and reports are JSON with a fixed key order.

namespace gdecal {

inline constexpr std::string_view kToolName = "gdecal";
inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::uint32_t kUnlabeled = 0xFFFFFFFFu;

enum class DumpFormat { kCsv, kBinary };

// ".csv" -> CSV, anything else -> binary.
DumpFormat format_from_path(const std::string& path);

std::uint64_t fnv1a64(std::span<const unsigned char> bytes);
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex_digest(std::uint64_t digest);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

EnsembleDataset parse_dump_csv(std::string_view text);
EnsembleDataset parse_dump_binary(std::string_view bytes);
std::string format_dump_csv(const EnsembleDataset& ds);
// Probabilities are narrowed to float32.
std::string format_dump_binary(const EnsembleDataset& ds);

EnsembleDataset read_dump(const std::string& path, DumpFormat format);
EnsembleDataset read_dump(const std::string& path);
void write_dump(const std::string& path, const EnsembleDataset& ds,
                DumpFormat format);

std::vector<std::pair<std::string, int>> parse_labels_csv(std::string_view text);
std::string format_labels_csv(const EnsembleDataset& ds);

// Attaches labels by sample id; the id sets must be equal
// (Error(kIdMismatch)) and every label in [0, K) (Error(kLabelOutOfRange)).
void attach_labels(EnsembleDataset& ds,
                   const std::vector<std::pair<std::string, int>>& labels);

nlohmann::ordered_json world_to_json(const FiniteWorld& world);
FiniteWorld world_from_json(const nlohmann::ordered_json& j);
std::string format_world(const FiniteWorld& world);
FiniteWorld parse_world(std::string_view text);

nlohmann::ordered_json to_json(const BinningScheme& scheme);
nlohmann::ordered_json to_json(const CalibrationReport& report);
nlohmann::ordered_json to_json(const InfoReport& report);
nlohmann::ordered_json to_json(const MetricReport& report);
nlohmann::ordered_json to_json(const ExactReport& report);
nlohmann::ordered_json to_json(const TheoremReport& report);
nlohmann::ordered_json to_json(const AnalysisConfig& config);

// Reliability-diagram table: kind,bin,lo,hi,count,mass,accuracy,mean_conf.
std::string format_reliability_csv(const CalibrationReport& report);

// JSON variant of the curve with the sweep settings and input digests embedded.
std::string emit_curve_text(const RejectionCurve& curve,
                            const nlohmann::ordered_json& provenance);

std::string to_string(BinKind kind);
BinKind parse_bin_kind(const std::string& text);

}  // namespace gdecal

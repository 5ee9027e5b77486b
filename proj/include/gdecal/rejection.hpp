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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gdecal/analysis.hpp"

namespace gdecal {

enum class ScoreKind { kPredError, kBald, kApproxBald };

ScoreKind parse_score_kind(const std::string& text);
std::string to_string(ScoreKind kind);

// pred-error: 1 - sum_k p̄(k|x)^2; bald / approx-bald per sample.
std::vector<double> per_sample_score(const EnsembleDataset& ds, ScoreKind kind,
                                     const InfoConfig& cfg = {});

struct Sweep {
  enum class Mode { kQuantile, kAbsolute };
  Mode mode = Mode::kQuantile;
  // Retained fractions in (0, 1] or absolute score thresholds, in sweep order.
  std::vector<double> points;

  // {1/m, 2/m, ..., 1}
  static Sweep quantile_grid(std::size_t m);
  static Sweep absolute(std::vector<double> thresholds);
};

struct RejectionConfig {
  ScoreKind score = ScoreKind::kPredError;
  Sweep sweep = Sweep::quantile_grid(20);
  // Retain the highest scores first instead of the lowest.
  bool keep_high = false;
  // Compute bin edges once on the full dataset instead of per subset. Only
  // changes results for equal-count binning.
  bool fixed_bins = false;
  AnalysisConfig analysis;
};

struct RejectionRow {
  // Absolute mode: the sweep threshold. Quantile mode: score of the last
  // retained sample.
  double threshold = 0.0;
  std::size_t retained_count = 0;
  double retained_fraction = 0.0;
  double mean_score = 0.0;
  // Empty when nothing is retained.
  std::optional<MetricReport> metrics;
};

struct RejectionCurve {
  RejectionConfig config;
  std::vector<RejectionRow> rows;
};

// Sorts samples by (score, index), ascending unless keep_high, and evaluates
// the full metric report on the retained prefix for every sweep point.
// Requires labels.
RejectionCurve rejection_curve(const EnsembleDataset& ds,
                               const RejectionConfig& config = {});

// Fixed column set; floats printed with 17 significant digits. Rows without
// metrics leave the metric columns empty.
std::string emit_curve_csv(const RejectionCurve& curve);

extern const char* const kCurveCsvHeader;

}  // namespace gdecal

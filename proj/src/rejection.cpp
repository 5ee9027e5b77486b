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

#include "gdecal/rejection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "gdecal/compensated_sum.hpp"
#include "gdecal/error.hpp"
#include "gdecal/format.hpp"

namespace gdecal {

const char* const kCurveCsvHeader =
    "threshold,retained_count,retained_fraction,mean_score,test_error,dis,"
    "gde_gap,ece,cwce,cace,cace_qweighted,ecace,bald_mean,approx_bald_mean,"
    "cross_entropy";

ScoreKind parse_score_kind(const std::string& text) {
  if (text == "pred-error") return ScoreKind::kPredError;
  if (text == "bald") return ScoreKind::kBald;
  if (text == "approx-bald") return ScoreKind::kApproxBald;
  throw Error(ErrorCode::kInvalidArgument, "unknown score '" + text + "'");
}

std::string to_string(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::kPredError: return "pred-error";
    case ScoreKind::kBald: return "bald";
    case ScoreKind::kApproxBald: return "approx-bald";
  }
  return "unknown";
}

std::vector<double> per_sample_score(const EnsembleDataset& ds, ScoreKind kind,
                                     const InfoConfig& cfg) {
  switch (kind) {
    case ScoreKind::kPredError: {
      auto out = per_sample_pred_acc(marginal(ds));
      for (double& v : out) v = 1.0 - v;
      return out;
    }
    case ScoreKind::kBald:
      return bald(ds, cfg).values;
    case ScoreKind::kApproxBald:
      return approx_bald(ds).values;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown score kind");
}

Sweep Sweep::quantile_grid(std::size_t m) {
  if (m == 0) {
    throw Error(ErrorCode::kInvalidArgument, "quantile grid needs >= 1 point");
  }
  Sweep s;
  s.mode = Mode::kQuantile;
  for (std::size_t i = 1; i <= m; ++i) {
    s.points.push_back(static_cast<double>(i) / static_cast<double>(m));
  }
  return s;
}

Sweep Sweep::absolute(std::vector<double> thresholds) {
  Sweep s;
  s.mode = Mode::kAbsolute;
  s.points = std::move(thresholds);
  return s;
}

RejectionCurve rejection_curve(const EnsembleDataset& ds,
                               const RejectionConfig& config) {
  check_shape(ds);
  if (!ds.labeled()) {
    throw Error(ErrorCode::kInvalidArgument, "rejection curves need labels");
  }
  const auto& sweep = config.sweep;
  if (sweep.points.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "sweep grid is empty");
  }
  if (sweep.mode == Sweep::Mode::kQuantile) {
    for (double f : sweep.points) {
      if (!(f > 0.0) || f > 1.0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "quantile grid values must lie in (0, 1]");
      }
    }
  }

  const auto scores = per_sample_score(ds, config.score, config.analysis.info);
  const std::size_t N = ds.samples;
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) {
      return config.keep_high ? scores[a] > scores[b] : scores[a] < scores[b];
    }
    return a < b;
  });

  AnalysisConfig analysis = config.analysis;
  if (config.fixed_bins &&
      analysis.calibration.binning.kind == BinKind::kEqualCount) {
    auto& bins = analysis.calibration.binning;
    bins.edges = make_bins(bins, marginal(ds).probs);
    bins.kind = BinKind::kExplicit;
    bins.bin_count = bins.edges.size() - 1;
  }

  RejectionCurve curve;
  curve.config = config;
  for (double point : sweep.points) {
    RejectionRow row;
    std::size_t count = 0;
    if (sweep.mode == Sweep::Mode::kQuantile) {
      const double raw = point * static_cast<double>(N);
      count = static_cast<std::size_t>(std::ceil(raw - 1e-9));
      count = std::min(count, N);
    } else {
      while (count < N && (config.keep_high ? scores[order[count]] >= point
                                            : scores[order[count]] <= point)) {
        ++count;
      }
      row.threshold = point;
    }
    row.retained_count = count;
    row.retained_fraction = static_cast<double>(count) / static_cast<double>(N);
    if (count > 0) {
      const std::span<const std::size_t> kept(order.data(), count);
      if (sweep.mode == Sweep::Mode::kQuantile) {
        row.threshold = scores[kept.back()];
      }
      CompensatedSum s;
      for (auto n : kept) s.add(scores[n]);
      row.mean_score = s.value() / static_cast<double>(count);
      row.metrics = metric_report(subset(ds, kept), analysis);
    }
    curve.rows.push_back(std::move(row));
  }
  return curve;
}

std::string emit_curve_csv(const RejectionCurve& curve) {
  std::ostringstream out;
  out << kCurveCsvHeader << '\n';
  for (const auto& row : curve.rows) {
    out << format_double(row.threshold) << ',' << row.retained_count << ','
        << format_double(row.retained_fraction) << ','
        << format_double(row.mean_score);
    if (row.metrics) {
      const auto& m = *row.metrics;
      for (double v : {m.test_error, m.dis, m.gde_gap, m.calibration.ece,
                       m.calibration.cwce, m.calibration.cace,
                       m.calibration.cace_qweighted, m.calibration.ecace,
                       m.info.bald_mean, m.info.approx_bald_mean,
                       m.info.cross_entropy}) {
        out << ',' << format_double(v);
      }
    } else {
      out << ",,,,,,,,,,,";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace gdecal

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
#include <span>
#include <vector>

#include "gdecal/dataset.hpp"

// Binned estimators of calibration error.
//
// Every estimator pools weighted points (value v, hit h, confidence c) and
// reports sum_b |sum_{p in b} w_p (h_p - c_p)|. Sample weights default to
// 1/N; passing explicit weights lets a finite world expanded into weighted
// (x, y) rows reproduce the exact level-set sums.

namespace gdecal {

enum class BinKind {
  kEqualWidth,
  kEqualCount,
  // Caller-supplied edges (e.g. one bin per distinct value).
  kExplicit,
};

struct Domain {
  double lo = 0.0;
  double hi = 1.0;
};

struct BinningScheme {
  BinKind kind = BinKind::kEqualWidth;
  std::size_t bin_count = 15;
  Domain domain;
  // Only read for kExplicit: strictly increasing, front() == domain.lo,
  // back() == domain.hi.
  std::vector<double> edges;
};

// Bin edges for `scheme`. Equal-count edges sit halfway between the
// nearest-rank order statistics on either side of each cut; repeated cuts are
// merged, so fewer than bin_count bins may come back.
std::vector<double> make_bins(const BinningScheme& scheme,
                              std::span<const double> pooled_values);

// Bins are [lo, hi) except the last, which is closed. Values outside the
// domain are clamped into the first/last bin.
std::size_t bin_index(std::span<const double> edges, double value);

// Explicit scheme with one bin per distinct value (values grouped after
// rounding to 12 decimals), cuts placed midway between neighbours.
BinningScheme distinct_value_bins(std::span<const double> values,
                                  Domain domain = {});

struct BinStat {
  std::size_t index = 0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double mass = 0.0;
  double hit_mass = 0.0;
  double conf_mass = 0.0;
  double mean_conf = 0.0;

  double accuracy() const { return mass > 0.0 ? hit_mass / mass : 0.0; }
};

// Top-1 expected calibration error.
double ece(const MarginalPrediction& marg, std::span<const int> labels,
           const BinningScheme& bins, std::span<const double> weights = {});

// Class-aggregated calibration error over all (n, k) pairs; normalized by
// sample weight, so the pooled measure integrates to K.
double cace(const MarginalPrediction& marg, std::span<const int> labels,
            const BinningScheme& bins, std::span<const double> weights = {});

// sum_b |sum_{S in b} s - sum_{T in b} q| where S points carry s = p̄(y|x) and
// T points carry q^2; a single bin yields |E[Acc] - E[PredAcc]|.
double cace_qweighted(const MarginalPrediction& marg,
                      std::span<const int> labels, const BinningScheme& bins,
                      std::span<const double> weights = {});

// Class-wise calibration error. Equal-count bins are computed per class.
double cwce(const MarginalPrediction& marg, std::span<const int> labels,
            const BinningScheme& bins, std::span<const double> weights = {});

// Entropic CACE over information content -log max(q, ic_floor) in [0, L],
// L = -log(ic_floor). `bins_on_ic` must cover that domain.
double ecace(const MarginalPrediction& marg, std::span<const int> labels,
             const BinningScheme& bins_on_ic, double ic_floor,
             std::span<const double> weights = {});

// The scheme ecace() uses by default: same kind and count as `bins`, over
// [0, -log ic_floor].
BinningScheme ic_binning_for(const BinningScheme& bins, double ic_floor);

// Information-content values of every (n, k) pair, for building IC bins.
std::vector<double> pooled_information_content(const MarginalPrediction& marg,
                                               double ic_floor);

// Bin statistics behind ece() and cace(), for reliability diagrams.
std::vector<BinStat> top1_bin_stats(const MarginalPrediction& marg,
                                    std::span<const int> labels,
                                    const BinningScheme& bins,
                                    std::span<const double> weights = {});
std::vector<BinStat> pooled_bin_stats(const MarginalPrediction& marg,
                                      std::span<const int> labels,
                                      const BinningScheme& bins,
                                      std::span<const double> weights = {});

struct CalibrationConfig {
  BinningScheme binning;
  double ic_floor = 1e-12;
};

struct CalibrationReport {
  double ece = 0.0;
  double cwce = 0.0;
  double cace = 0.0;
  double cace_qweighted = 0.0;
  double ecace = 0.0;
  BinningScheme bins_used;
  // Top-1 reliability bins.
  std::vector<BinStat> per_bin;
  // Pooled (n, k) bins behind CACE.
  std::vector<BinStat> pooled_bins;
  double ic_floor = 1e-12;
};

CalibrationReport calibration_report(const MarginalPrediction& marg,
                                     std::span<const int> labels,
                                     const CalibrationConfig& config = {});

}  // namespace gdecal

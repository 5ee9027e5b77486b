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

#include "gdecal/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gdecal/compensated_sum.hpp"
#include "gdecal/error.hpp"
#include "gdecal/prob_core.hpp"

namespace gdecal {

namespace {

using Index = std::ptrdiff_t;

double round12(double v) { return std::round(v * 1e12) / 1e12; }

void check_inputs(const MarginalPrediction& marg, std::span<const int> labels,
                  std::span<const double> weights) {
  if (marg.samples == 0) {
    throw Error(ErrorCode::kInvalidArgument, "calibration needs samples");
  }
  if (labels.size() != marg.samples) {
    throw Error(ErrorCode::kInvalidArgument,
                "calibration needs one label per sample");
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= marg.classes) {
      throw Error(ErrorCode::kLabelOutOfRange,
                  "label " + std::to_string(y) + " out of range");
    }
  }
  if (!weights.empty() && weights.size() != marg.samples) {
    throw Error(ErrorCode::kInvalidArgument,
                "weights must have one entry per sample");
  }
}

class SampleWeight {
 public:
  SampleWeight(std::span<const double> weights, std::size_t n)
      : weights_(weights), uniform_(1.0 / static_cast<double>(n)) {}

  double operator()(std::size_t n) const {
    return weights_.empty() ? uniform_ : weights_[n];
  }

 private:
  std::span<const double> weights_;
  double uniform_;
};

// Accumulates weighted points into bins. The signed difference w*(hit - conf)
// is summed separately from the two masses so that cancellation inside a bin
// happens before rounding.
class BinAccumulator {
 public:
  explicit BinAccumulator(std::vector<double> edges)
      : edges_(std::move(edges)),
        count_(edges_.size() - 1, 0),
        mass_(edges_.size() - 1),
        hit_(edges_.size() - 1),
        conf_(edges_.size() - 1),
        diff_(edges_.size() - 1) {}

  void add(double value, double weight, double hit, double conf) {
    const std::size_t b = bin_index(edges_, value);
    ++count_[b];
    mass_[b].add(weight);
    hit_[b].add(weight * hit);
    conf_[b].add(weight * conf);
    diff_[b].add(weight * hit - weight * conf);
  }

  double l1_gap() const {
    CompensatedSum total;
    for (const auto& d : diff_) total.add(std::fabs(d.value()));
    return total.value();
  }

  std::vector<BinStat> stats() const {
    std::vector<BinStat> out(count_.size());
    for (std::size_t b = 0; b < out.size(); ++b) {
      auto& s = out[b];
      s.index = b;
      s.lo = edges_[b];
      s.hi = edges_[b + 1];
      s.count = count_[b];
      s.mass = mass_[b].value();
      s.hit_mass = hit_[b].value();
      s.conf_mass = conf_[b].value();
      s.mean_conf = s.mass > 0.0 ? s.conf_mass / s.mass : 0.0;
    }
    return out;
  }

 private:
  std::vector<double> edges_;
  std::vector<std::size_t> count_;
  std::vector<CompensatedSum> mass_;
  std::vector<CompensatedSum> hit_;
  std::vector<CompensatedSum> conf_;
  std::vector<CompensatedSum> diff_;
};

std::vector<double> pooled_probabilities(const MarginalPrediction& marg) {
  return marg.probs;
}

std::vector<double> class_column(const MarginalPrediction& marg,
                                 std::size_t k) {
  std::vector<double> out(marg.samples);
  for (std::size_t n = 0; n < marg.samples; ++n) out[n] = marg.at(n, k);
  return out;
}

double information_content(double q, double floor) {
  return -std::log(std::max(q, floor));
}

BinAccumulator top1_accumulator(const MarginalPrediction& marg,
                                std::span<const int> labels,
                                const BinningScheme& bins,
                                std::span<const double> weights) {
  check_inputs(marg, labels, weights);
  const auto top = top1_quantities(marg, labels);
  BinAccumulator acc(make_bins(bins, top.confidence));
  const SampleWeight w(weights, marg.samples);
  for (std::size_t n = 0; n < marg.samples; ++n) {
    acc.add(top.confidence[n], w(n), static_cast<double>(top.hit[n]),
            top.confidence[n]);
  }
  return acc;
}

BinAccumulator pooled_accumulator(const MarginalPrediction& marg,
                                  std::span<const int> labels,
                                  const BinningScheme& bins,
                                  std::span<const double> weights) {
  check_inputs(marg, labels, weights);
  BinAccumulator acc(make_bins(bins, pooled_probabilities(marg)));
  const SampleWeight w(weights, marg.samples);
  for (std::size_t n = 0; n < marg.samples; ++n) {
    const auto y = static_cast<std::size_t>(labels[n]);
    for (std::size_t k = 0; k < marg.classes; ++k) {
      const double q = marg.at(n, k);
      acc.add(q, w(n), k == y ? 1.0 : 0.0, q);
    }
  }
  return acc;
}

}  // namespace

std::vector<double> make_bins(const BinningScheme& scheme,
                              std::span<const double> pooled_values) {
  const double lo = scheme.domain.lo;
  const double hi = scheme.domain.hi;
  if (!(hi > lo)) {
    throw Error(ErrorCode::kInvalidArgument, "bin domain must be non-empty");
  }
  switch (scheme.kind) {
    case BinKind::kEqualWidth: {
      if (scheme.bin_count == 0) {
        throw Error(ErrorCode::kInvalidArgument, "bin count must be >= 1");
      }
      const auto B = scheme.bin_count;
      std::vector<double> edges(B + 1);
      for (std::size_t i = 0; i < B; ++i) {
        edges[i] = lo + static_cast<double>(i) * (hi - lo) /
                            static_cast<double>(B);
      }
      edges[B] = hi;
      return edges;
    }
    case BinKind::kEqualCount: {
      if (scheme.bin_count == 0) {
        throw Error(ErrorCode::kInvalidArgument, "bin count must be >= 1");
      }
      if (pooled_values.empty()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "equal-count binning needs at least one value");
      }
      std::vector<double> sorted(pooled_values.begin(), pooled_values.end());
      std::sort(sorted.begin(), sorted.end());
      const std::size_t P = sorted.size();
      const std::size_t B = scheme.bin_count;
      std::vector<double> edges{lo};
      for (std::size_t i = 1; i < B; ++i) {
        // Nearest rank: the cut leaves ceil(i*P/B) points on its left.
        const std::size_t rank = (i * P + B - 1) / B;
        if (rank == 0 || rank >= P) continue;
        const double cut = 0.5 * (sorted[rank - 1] + sorted[rank]);
        if (cut <= edges.back() || cut >= hi) continue;
        edges.push_back(cut);
      }
      edges.push_back(hi);
      return edges;
    }
    case BinKind::kExplicit: {
      const auto& e = scheme.edges;
      if (e.size() < 2) {
        throw Error(ErrorCode::kInvalidArgument,
                    "explicit binning needs at least two edges");
      }
      for (std::size_t i = 1; i < e.size(); ++i) {
        if (!(e[i] > e[i - 1])) {
          throw Error(ErrorCode::kInvalidArgument,
                      "explicit bin edges must be strictly increasing");
        }
      }
      return e;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown bin kind");
}

std::size_t bin_index(std::span<const double> edges, double value) {
  const std::size_t bins = edges.size() - 1;
  if (value <= edges.front()) return 0;
  if (value >= edges.back()) return bins - 1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), value);
  return static_cast<std::size_t>(it - edges.begin()) - 1;
}

BinningScheme distinct_value_bins(std::span<const double> values,
                                  Domain domain) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  BinningScheme scheme;
  scheme.kind = BinKind::kExplicit;
  scheme.domain = domain;
  scheme.edges.push_back(domain.lo);
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (round12(sorted[i]) == round12(sorted[i - 1])) continue;
    const double cut = 0.5 * (sorted[i - 1] + sorted[i]);
    if (cut > scheme.edges.back() && cut < domain.hi) {
      scheme.edges.push_back(cut);
    }
  }
  scheme.edges.push_back(domain.hi);
  scheme.bin_count = scheme.edges.size() - 1;
  return scheme;
}

double ece(const MarginalPrediction& marg, std::span<const int> labels,
           const BinningScheme& bins, std::span<const double> weights) {
  return top1_accumulator(marg, labels, bins, weights).l1_gap();
}

double cace(const MarginalPrediction& marg, std::span<const int> labels,
            const BinningScheme& bins, std::span<const double> weights) {
  return pooled_accumulator(marg, labels, bins, weights).l1_gap();
}

double cace_qweighted(const MarginalPrediction& marg,
                      std::span<const int> labels, const BinningScheme& bins,
                      std::span<const double> weights) {
  check_inputs(marg, labels, weights);
  BinAccumulator acc(make_bins(bins, pooled_probabilities(marg)));
  const SampleWeight w(weights, marg.samples);
  for (std::size_t n = 0; n < marg.samples; ++n) {
    const auto y = static_cast<std::size_t>(labels[n]);
    for (std::size_t k = 0; k < marg.classes; ++k) {
      const double q = marg.at(n, k);
      acc.add(q, w(n), k == y ? q : 0.0, q * q);
    }
  }
  return acc.l1_gap();
}

double cwce(const MarginalPrediction& marg, std::span<const int> labels,
            const BinningScheme& bins, std::span<const double> weights) {
  check_inputs(marg, labels, weights);
  const SampleWeight w(weights, marg.samples);
  std::vector<double> per_class(marg.classes, 0.0);
  const Index k_count = static_cast<Index>(marg.classes);
#pragma omp parallel for schedule(static)
  for (Index ki = 0; ki < k_count; ++ki) {
    const auto k = static_cast<std::size_t>(ki);
    const auto column = class_column(marg, k);
    BinAccumulator acc(make_bins(bins, column));
    for (std::size_t n = 0; n < marg.samples; ++n) {
      acc.add(column[n], w(n),
              static_cast<std::size_t>(labels[n]) == k ? 1.0 : 0.0, column[n]);
    }
    per_class[k] = acc.l1_gap();
  }
  return compensated_total(per_class);
}

BinningScheme ic_binning_for(const BinningScheme& bins, double ic_floor) {
  if (!(ic_floor > 0.0) || !(ic_floor < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "information-content floor must lie in (0, 1)");
  }
  const double L = -std::log(ic_floor);
  BinningScheme out = bins;
  out.domain = {0.0, L};
  if (bins.kind == BinKind::kExplicit) {
    // -log is decreasing, so mapping the probability cuts gives the same
    // partition of (n, k) points on the information-content axis.
    out.edges.clear();
    for (double e : bins.edges) {
      out.edges.push_back(std::clamp(information_content(e, ic_floor), 0.0, L));
    }
    std::sort(out.edges.begin(), out.edges.end());
    out.edges.erase(std::unique(out.edges.begin(), out.edges.end()),
                    out.edges.end());
    out.edges.front() = 0.0;
    out.edges.back() = L;
    out.bin_count = out.edges.size() - 1;
  }
  return out;
}

std::vector<double> pooled_information_content(const MarginalPrediction& marg,
                                               double ic_floor) {
  std::vector<double> out(marg.probs.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = information_content(marg.probs[i], ic_floor);
  }
  return out;
}

double ecace(const MarginalPrediction& marg, std::span<const int> labels,
             const BinningScheme& bins_on_ic, double ic_floor,
             std::span<const double> weights) {
  if (!(ic_floor > 0.0) || !(ic_floor < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "information-content floor must lie in (0, 1)");
  }
  check_inputs(marg, labels, weights);
  const auto ic = pooled_information_content(marg, ic_floor);
  BinAccumulator acc(make_bins(bins_on_ic, ic));
  const SampleWeight w(weights, marg.samples);
  for (std::size_t n = 0; n < marg.samples; ++n) {
    const auto y = static_cast<std::size_t>(labels[n]);
    for (std::size_t k = 0; k < marg.classes; ++k) {
      acc.add(ic[n * marg.classes + k], w(n), k == y ? 1.0 : 0.0,
              marg.at(n, k));
    }
  }
  return acc.l1_gap();
}

std::vector<BinStat> top1_bin_stats(const MarginalPrediction& marg,
                                    std::span<const int> labels,
                                    const BinningScheme& bins,
                                    std::span<const double> weights) {
  return top1_accumulator(marg, labels, bins, weights).stats();
}

std::vector<BinStat> pooled_bin_stats(const MarginalPrediction& marg,
                                      std::span<const int> labels,
                                      const BinningScheme& bins,
                                      std::span<const double> weights) {
  return pooled_accumulator(marg, labels, bins, weights).stats();
}

CalibrationReport calibration_report(const MarginalPrediction& marg,
                                     std::span<const int> labels,
                                     const CalibrationConfig& config) {
  CalibrationReport r;
  const auto top1 = top1_accumulator(marg, labels, config.binning, {});
  const auto pooled = pooled_accumulator(marg, labels, config.binning, {});
  r.ece = top1.l1_gap();
  r.cace = pooled.l1_gap();
  r.cace_qweighted = cace_qweighted(marg, labels, config.binning);
  r.cwce = cwce(marg, labels, config.binning);
  r.ecace = ecace(marg, labels, ic_binning_for(config.binning, config.ic_floor),
                  config.ic_floor);
  r.per_bin = top1.stats();
  r.pooled_bins = pooled.stats();
  r.bins_used = config.binning;
  if (config.binning.kind != BinKind::kExplicit) {
    r.bins_used.edges = make_bins(config.binning, marg.probs);
  }
  r.ic_floor = config.ic_floor;
  return r;
}

}  // namespace gdecal

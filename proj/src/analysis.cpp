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

#include "gdecal/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gdecal/compensated_sum.hpp"
#include "gdecal/error.hpp"
#include "gdecal/kernels.hpp"

namespace gdecal {

MetricReport metric_report(const EnsembleDataset& ds,
                           const AnalysisConfig& config) {
  check_shape(ds);
  const auto marg = marginal(ds);
  MetricReport r;
  r.members = ds.members;
  r.samples = ds.samples;
  r.classes = ds.classes;
  r.labeled = ds.labeled();
  r.top = satisfies_top(ds);
  r.pred_acc = compensated_mean(per_sample_pred_acc(marg));
  r.dis = expected_disagreement(ds, config.dis_mode);
  r.info = info_report(ds, config.info);

  if (r.labeled) {
    r.acc = compensated_mean(per_sample_accuracy(marg, ds.labels));
    const auto top1 = top1_quantities(marg, ds.labels);
    r.top1_conf = compensated_mean(top1.confidence);
    CompensatedSum hits;
    for (int h : top1.hit) hits.add(h);
    r.top1_acc = hits.value() / static_cast<double>(ds.samples);
    r.test_error = expected_test_error(ds).mean;
    r.gde_gap = gde_gap(marg, ds.labels);
    r.calibration = calibration_report(marg, ds.labels, config.calibration);
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.acc = r.top1_conf = r.top1_acc = r.test_error = r.gde_gap = nan;
  }
  return r;
}

TheoremReport verify_dataset(const EnsembleDataset& ds,
                             const AnalysisConfig& config) {
  check_shape(ds);
  if (!ds.labeled()) {
    throw Error(ErrorCode::kInvalidArgument,
                "dataset verification needs labels");
  }
  const auto marg = marginal(ds);
  const auto& labels = ds.labels;
  const double floor = config.info.prob_floor;
  TheoremReport out;
  auto& c = out.checks;

  const auto acc = per_sample_accuracy(marg, labels);
  const auto pred = per_sample_pred_acc(marg);
  const double mean_acc = compensated_mean(acc);
  const double gap = gde_gap(marg, labels);

  c.push_back(check_equal(
      "ordered-pairs dis == marginal-identity dis",
      expected_disagreement(ds, DisagreementMode::kOrderedPairs),
      expected_disagreement(ds, DisagreementMode::kMarginalIdentity), 1e-12));
  c.push_back(check_equal("test_error == 1 - acc", expected_test_error(ds).mean,
                          1.0 - mean_acc, 1e-12));
  const double k_inv = 1.0 / static_cast<double>(ds.classes);
  c.push_back(check_at_least("min pred_acc >= 1/K",
                             *std::min_element(pred.begin(), pred.end()), k_inv,
                             1e-12));
  c.push_back(check_at_least("1 >= max pred_acc", 1.0,
                             *std::max_element(pred.begin(), pred.end()), 1e-12));
  c.push_back(check_at_least("min acc >= 0",
                             *std::min_element(acc.begin(), acc.end()), 0.0,
                             0.0));
  c.push_back(check_at_least("1 >= max acc", 1.0,
                             *std::max_element(acc.begin(), acc.end()), 1e-12));

  // CWCE >= CACE needs both estimators on the same edges.
  BinningScheme shared = config.calibration.binning;
  if (shared.kind == BinKind::kEqualCount) shared = BinningScheme{};
  c.push_back(check_at_least("cwce >= cace (shared edges)",
                             cwce(marg, labels, shared),
                             cace(marg, labels, shared), 1e-12));

  const auto distinct = distinct_value_bins(marg.probs);
  const double cace_distinct = cace(marg, labels, distinct);
  c.push_back(check_at_least("cace (distinct-value bins) >= gde_gap",
                             cace_distinct, gap, 1e-12));
  c.push_back(check_at_least("2 >= cace (distinct-value bins)", 2.0,
                             cace_distinct, 1e-12));

  BinningScheme single;
  single.bin_count = 1;
  c.push_back(check_equal("cace_qweighted (1 bin) == gde_gap",
                          cace_qweighted(marg, labels, single), gap, 1e-12));

  const auto info = info_report(ds, config.info);
  std::vector<double> member_approx(ds.samples);
  kernels::mean_member_approx_entropy(ds, member_approx);
  c.push_back(check_equal(
      "approx_bald == approx_H(marginal) - approx_H(members)",
      info.approx_bald_mean,
      info.approx_entropy_marginal - compensated_mean(member_approx), 1e-12));

  double worst_gap = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < ds.samples; ++n) {
    worst_gap = std::min(worst_gap, info.approx_entropy[n] - info.approx_bald[n]);
  }
  c.push_back(check_at_least("per-sample approx_H(marginal) - approx_bald >= 0",
                             worst_gap, 0.0, 1e-12));
  c.push_back(check_at_least("min bald >= 0",
                             *std::min_element(info.bald.begin(), info.bald.end()),
                             0.0, 1e-12));
  c.push_back(check_at_least(
      "min approx_bald >= 0",
      *std::min_element(info.approx_bald.begin(), info.approx_bald.end()), 0.0,
      1e-12));

  const bool floor_free = std::none_of(
      ds.probs.begin(), ds.probs.end(),
      [floor](double p) { return p > 0.0 && p < floor; });
  if (floor_free) {
    c.push_back(check_equal("bald == bald_kl", info.bald_mean,
                            info.bald_kl_mean, 1e-10));
  }

  const bool marginal_floored = std::any_of(
      marg.probs.begin(), marg.probs.end(),
      [floor](double q) { return q < floor; });
  if (!marginal_floored) {
    const auto entropic = entropic_gde_report(ds, config.info);
    c.push_back(check_at_least("ecace (distinct-value bins) >= entropic gap / L",
                               entropic.ecace, entropic.bound, 1e-9));
    c.push_back(check_at_least("1 - exp(-CE) >= 1 - acc",
                               info.test_error_upper_bound, 1.0 - mean_acc,
                               1e-12));
  }

  if (satisfies_top(ds)) {
    if (ds.members >= 2) {
      const double M = static_cast<double>(ds.members);
      c.push_back(check_equal(
          "TOP: distinct-pairs dis == M/(M-1) ordered-pairs dis",
          expected_disagreement(ds, DisagreementMode::kDistinctPairs),
          M / (M - 1.0) *
              expected_disagreement(ds, DisagreementMode::kOrderedPairs),
          1e-12));
    }
    double worst = 0.0;
    for (std::size_t n = 0; n < ds.samples; ++n) {
      worst = std::max(worst, std::fabs(info.approx_bald[n] - (1.0 - pred[n])));
    }
    c.push_back(check_equal("TOP: per-sample approx_bald == disagreement", worst,
                            0.0, 1e-12));
    c.push_back(check_equal("TOP: mean member entropy == 0",
                            info.mean_entropy_conditional, 0.0, 0.0));
  }

  std::vector<std::size_t> reversed(ds.samples);
  std::iota(reversed.rbegin(), reversed.rend(), std::size_t{0});
  const auto flipped = subset(marg, reversed);
  std::vector<int> flipped_labels(labels.rbegin(), labels.rend());
  const auto& bins = config.calibration.binning;
  c.push_back(check_equal("cace invariant to sample order",
                          cace(flipped, flipped_labels, bins),
                          cace(marg, labels, bins), 1e-12));
  c.push_back(check_equal("cwce invariant to sample order",
                          cwce(flipped, flipped_labels, bins),
                          cwce(marg, labels, bins), 1e-12));
  c.push_back(check_equal("ece invariant to sample order",
                          ece(flipped, flipped_labels, bins),
                          ece(marg, labels, bins), 1e-12));
  return out;
}

}  // namespace gdecal

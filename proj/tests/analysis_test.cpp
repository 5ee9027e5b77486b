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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "gdecal/analysis.hpp"
#include "test_util.hpp"

namespace gdecal {
namespace {

TEST(MetricReport, MatchesComponentFunctions) {
  const auto ds = testing::random_dataset(31, 4, 300, 5);
  const auto r = metric_report(ds);
  const auto m = marginal(ds);
  EXPECT_TRUE(r.labeled);
  EXPECT_EQ(r.members, 4u);
  EXPECT_NEAR(r.gde_gap, gde_gap(m, ds.labels), 1e-15);
  EXPECT_NEAR(r.gde_gap, std::fabs(r.acc - r.pred_acc), 1e-15);
  EXPECT_NEAR(r.dis, 1.0 - r.pred_acc, 1e-15);
  EXPECT_NEAR(r.test_error, expected_test_error(ds).mean, 1e-15);
  EXPECT_NEAR(r.calibration.cace,
              cace(m, ds.labels, {.kind = BinKind::kEqualWidth, .bin_count = 15}), 1e-15);
}

TEST(MetricReport, UnlabeledLeavesLabelFieldsNan) {
  const auto r = metric_report(testing::random_dataset(2, 2, 20, 3, false));
  EXPECT_FALSE(r.labeled);
  EXPECT_TRUE(std::isnan(r.acc));
  EXPECT_TRUE(std::isnan(r.gde_gap));
  EXPECT_TRUE(std::isnan(r.test_error));
  EXPECT_FALSE(std::isnan(r.dis));
}

TEST(MetricReport, WorkedExample) {
  const auto r = metric_report(testing::worked_example());
  EXPECT_NEAR(r.acc, 0.38, 1e-15);
  EXPECT_NEAR(r.pred_acc, 0.68, 1e-15);
  EXPECT_NEAR(r.top1_acc, 0.3, 1e-15);
  EXPECT_NEAR(r.top1_conf, 0.8, 1e-15);
  EXPECT_NEAR(r.gde_gap, 0.3, 1e-15);
}

TEST(MetricReport, InvariantUnderSampleOrder) {
  const auto ds = testing::random_dataset(8, 3, 400, 4);
  std::vector<std::size_t> rev(ds.samples);
  std::iota(rev.rbegin(), rev.rend(), std::size_t{0});
  const auto a = metric_report(ds);
  const auto b = metric_report(subset(ds, rev));
  EXPECT_NEAR(a.calibration.ece, b.calibration.ece, 1e-14);
  EXPECT_NEAR(a.calibration.cace, b.calibration.cace, 1e-14);
  EXPECT_NEAR(a.calibration.cwce, b.calibration.cwce, 1e-14);
  EXPECT_NEAR(a.info.bald_mean, b.info.bald_mean, 1e-14);
}

TEST(VerifyDataset, PassesOnRandomData) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto ds = testing::random_dataset(seed, 1 + seed % 5, 150, 2 + seed % 5, true,
                                            seed % 3 == 0 ? 6.0 : 1.0);
    const auto report = verify_dataset(ds);
    for (const auto& c : report.checks) {
      EXPECT_TRUE(c.passed) << "seed " << seed << ": " << c.name << " lhs " << c.lhs
                            << " rhs " << c.rhs;
    }
  }
}

TEST(VerifyDataset, PassesOnTopData) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto ds = apply_top(testing::random_dataset(seed, 2 + seed % 4, 100, 3));
    const auto report = verify_dataset(ds);
    for (const auto& c : report.checks) EXPECT_TRUE(c.passed) << c.name;
  }
}

TEST(VerifyDataset, EqualCountConfiguration) {
  AnalysisConfig cfg;
  cfg.calibration.binning = {.kind = BinKind::kEqualCount, .bin_count = 10};
  const auto report = verify_dataset(testing::random_dataset(3, 3, 500, 4), cfg);
  EXPECT_TRUE(report.all_passed());
}

}  // namespace
}  // namespace gdecal

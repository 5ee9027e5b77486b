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
#include <functional>

#include "gdecal/error.hpp"
#include "test_util.hpp"

namespace gdecal {
namespace {

using testing::make_dataset;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected gdecal::Error";
  return ErrorCode::kInvalidArgument;
}

TEST(Validation, ExactSimplexRowIsValid) {
  const auto ds = make_dataset(1, 1, 2, {0.5, 0.5}, {0});
  const auto report = validate_dataset(ds);
  EXPECT_TRUE(report.valid);
  EXPECT_EQ(report.rows_checked, 1u);
  EXPECT_TRUE(report.row_issues.empty());
  EXPECT_NO_THROW(require_valid(ds));
}

TEST(Validation, ShortRowReportsDeficit) {
  const auto ds = make_dataset(1, 1, 2, {0.5, 0.49});
  const auto report = validate_dataset(ds, {.tolerance = 1e-6});
  EXPECT_FALSE(report.valid);
  ASSERT_EQ(report.row_issues.size(), 1u);
  EXPECT_NEAR(report.row_issues[0].deficit, 0.01, 1e-15);
  EXPECT_NEAR(report.max_abs_deficit, 0.01, 1e-15);
  EXPECT_EQ(code_of([&] { require_valid(ds); }), ErrorCode::kInvalidRow);
}

TEST(Validation, RenormalizeDividesByRowSum) {
  const auto ds = make_dataset(1, 1, 2, {0.500001, 0.5});
  const auto fixed = require_valid(ds, {.tolerance = 1e-9, .renormalize = true});
  EXPECT_DOUBLE_EQ(fixed.probs[0], 0.500001 / 1.000001);
  EXPECT_DOUBLE_EQ(fixed.probs[1], 0.5 / 1.000001);
}

TEST(Validation, RenormalizeClampsNegatives) {
  const auto ds = make_dataset(1, 1, 3, {-1e-3, 0.6, 0.401});
  const auto fixed = require_valid(ds, {.tolerance = 1e-2, .renormalize = true});
  EXPECT_EQ(fixed.probs[0], 0.0);
  EXPECT_DOUBLE_EQ(fixed.probs[1] + fixed.probs[2], 1.0);
}

TEST(Validation, NonFiniteEntryIsRejected) {
  const auto ds = make_dataset(1, 1, 2, {std::nan(""), 1.0});
  EXPECT_EQ(code_of([&] { validate_dataset(ds); }), ErrorCode::kInvalidRow);
}

TEST(Validation, LabelOutOfRange) {
  const auto ds = make_dataset(1, 2, 2, {0.5, 0.5, 0.5, 0.5}, {0, 2});
  const auto report = validate_dataset(ds);
  EXPECT_FALSE(report.valid);
  EXPECT_EQ(report.label_violations.size(), 1u);
  EXPECT_EQ(code_of([&] { require_valid(ds); }), ErrorCode::kLabelOutOfRange);
}

TEST(Validation, DuplicateSampleIds) {
  auto ds = make_dataset(1, 2, 2, {0.5, 0.5, 0.5, 0.5}, {0, 1});
  ds.sample_ids = {"a", "a"};
  EXPECT_EQ(code_of([&] { require_valid(ds); }), ErrorCode::kDuplicateId);
}

TEST(Shape, RejectsDegenerateShapes) {
  EXPECT_EQ(code_of([] { check_shape(make_dataset(0, 1, 2, {})); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { check_shape(make_dataset(1, 1, 1, {1.0})); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { check_shape(make_dataset(1, 2, 2, {0.5, 0.5})); }),
            ErrorCode::kInvalidArgument);
}

TEST(Subset, CopiesRowsInGivenOrder) {
  const auto ds = testing::random_dataset(3, 2, 5, 3);
  const std::vector<std::size_t> idx{4, 1};
  const auto sub = subset(ds, idx);
  ASSERT_EQ(sub.samples, 2u);
  EXPECT_EQ(sub.labels[0], ds.labels[4]);
  EXPECT_EQ(sub.sample_ids[1], ds.sample_ids[1]);
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_EQ(sub.prob(m, 0, k), ds.prob(m, 4, k));
      EXPECT_EQ(sub.prob(m, 1, k), ds.prob(m, 1, k));
    }
  }
}

}  // namespace
}  // namespace gdecal

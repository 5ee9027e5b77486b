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

#include "gdecal/error.hpp"
#include "gdecal/prob_core.hpp"
#include "test_util.hpp"

namespace gdecal {
namespace {

using testing::make_dataset;

TEST(Marginal, OppositeOneHotMembersAverageToUniform) {
  const auto m = marginal(make_dataset(2, 1, 2, {1, 0, 0, 1}));
  EXPECT_EQ(m.at(0, 0), 0.5);
  EXPECT_EQ(m.at(0, 1), 0.5);
}

TEST(Marginal, SingleMemberIsIdentity) {
  const auto ds = testing::random_dataset(5, 1, 20, 4);
  const auto m = marginal(ds);
  for (std::size_t i = 0; i < ds.probs.size(); ++i) EXPECT_EQ(m.probs[i], ds.probs[i]);
}

TEST(Marginal, ThreeMembers) {
  const auto m = marginal(make_dataset(3, 1, 2, {0.2, 0.8, 0.4, 0.6, 0.9, 0.1}));
  EXPECT_NEAR(m.at(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(m.at(0, 1), 0.5, 1e-15);
}

TEST(Top, OneHotArgmaxWithLowestIndexTies) {
  const auto ds = make_dataset(1, 3, 2, {0.2, 0.8, 0.5, 0.5, 0.7, 0.3});
  const auto top = apply_top(ds);
  EXPECT_EQ(top.probs, (std::vector<double>{0, 1, 1, 0, 1, 0}));
  EXPECT_TRUE(satisfies_top(top));
  EXPECT_FALSE(satisfies_top(ds));
  const auto top3 = apply_top(make_dataset(1, 1, 3, {0.3, 0.4, 0.3}));
  EXPECT_EQ(top3.probs, (std::vector<double>{0, 1, 0}));
}

TEST(Accuracy, WorkedExample) {
  const auto ds = testing::worked_example();
  const auto m = marginal(ds);
  const auto acc = per_sample_accuracy(m, ds.labels);
  double total = 0.0;
  for (double a : acc) total += a;
  EXPECT_NEAR(total / 10.0, 0.7 * 0.2 + 0.3 * 0.8, 1e-15);
  for (double p : per_sample_pred_acc(m)) EXPECT_NEAR(p, 0.68, 1e-15);
}

TEST(Accuracy, OneHotCorrectAndUniform) {
  const auto onehot = marginal(make_dataset(1, 1, 3, {0, 0, 1}));
  EXPECT_EQ(per_sample_accuracy(onehot, std::vector<int>{2})[0], 1.0);
  EXPECT_EQ(per_sample_pred_acc(onehot)[0], 1.0);
  const auto uniform = marginal(make_dataset(1, 1, 4, {0.25, 0.25, 0.25, 0.25}));
  EXPECT_EQ(per_sample_accuracy(uniform, std::vector<int>{3})[0], 0.25);
  EXPECT_EQ(per_sample_pred_acc(uniform)[0], 0.25);
}

TEST(Accuracy, LabelOutOfRangeThrows) {
  const auto m = marginal(make_dataset(1, 1, 2, {0.5, 0.5}));
  EXPECT_THROW(per_sample_accuracy(m, std::vector<int>{2}), Error);
}

TEST(Top1, ConfidenceAndHit) {
  const auto m = marginal(make_dataset(1, 3, 2, {0.2, 0.8, 0, 1, 0.5, 0.5}));
  const auto t = top1_quantities(m, std::vector<int>{0, 1, 1});
  EXPECT_EQ(t.confidence, (std::vector<double>{0.8, 1.0, 0.5}));
  EXPECT_EQ(t.hit, (std::vector<int>{0, 1, 0}));
}

TEST(TestError, PerMemberCounts) {
  // Member 0 wrong on sample 3 only, member 1 wrong on samples 2 and 3.
  const auto ds = make_dataset(2, 4, 2,
                               {1, 0, 0, 1, 1, 0, 1, 0,   // member 0
                                1, 0, 0, 1, 0, 1, 1, 0},  // member 1
                               {0, 1, 0, 1});
  const auto te = expected_test_error(ds);
  EXPECT_EQ(te.per_member, (std::vector<double>{0.25, 0.5}));
  EXPECT_DOUBLE_EQ(te.mean, 0.375);
}

TEST(TestError, UniformMemberHasHalfError) {
  const auto ds = make_dataset(1, 2, 2, {0.5, 0.5, 0.5, 0.5}, {0, 1});
  EXPECT_EQ(expected_test_error(ds).mean, 0.5);
  EXPECT_THROW(expected_test_error(make_dataset(1, 1, 2, {0.5, 0.5})), Error);
}

TEST(Disagreement, AgreeingMembersNeverDisagree) {
  const auto ds = make_dataset(2, 2, 2, {1, 0, 0, 1, 1, 0, 0, 1});
  for (auto mode : {DisagreementMode::kMarginalIdentity, DisagreementMode::kOrderedPairs,
                    DisagreementMode::kDistinctPairs}) {
    EXPECT_EQ(expected_disagreement(ds, mode), 0.0);
  }
}

TEST(Disagreement, FullyDisagreeingPair) {
  const auto ds = make_dataset(2, 2, 2, {1, 0, 0, 1, 0, 1, 1, 0});
  EXPECT_DOUBLE_EQ(expected_disagreement(ds, DisagreementMode::kOrderedPairs), 0.5);
  EXPECT_DOUBLE_EQ(expected_disagreement(ds, DisagreementMode::kDistinctPairs), 1.0);
  EXPECT_DOUBLE_EQ(expected_disagreement(ds, DisagreementMode::kMarginalIdentity), 0.5);
}

TEST(Disagreement, SingleSampleMarginalIdentity) {
  const auto ds = make_dataset(1, 1, 2, {0.2, 0.8});
  EXPECT_NEAR(expected_disagreement(ds), 0.32, 1e-15);
}

TEST(Disagreement, DistinctPairsNeedTwoMembers) {
  try {
    expected_disagreement(make_dataset(1, 1, 2, {0.2, 0.8}),
                          DisagreementMode::kDistinctPairs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientMembers);
  }
}

TEST(Disagreement, OrderedPairsMatchMarginalIdentityOnRandomData) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto ds = testing::random_dataset(seed, 1 + seed % 5, 40, 2 + seed % 4);
    EXPECT_NEAR(expected_disagreement(ds, DisagreementMode::kOrderedPairs),
                expected_disagreement(ds, DisagreementMode::kMarginalIdentity), 1e-14);
  }
}

// Brute force over member pairs, samples and classes.
double brute_force_ordered_disagreement(const EnsembleDataset& ds) {
  double total = 0.0;
  for (std::size_t n = 0; n < ds.samples; ++n) {
    for (std::size_t a = 0; a < ds.members; ++a) {
      for (std::size_t b = 0; b < ds.members; ++b) {
        double agree = 0.0;
        for (std::size_t k = 0; k < ds.classes; ++k) {
          agree += ds.prob(a, n, k) * ds.prob(b, n, k);
        }
        total += 1.0 - agree;
      }
    }
  }
  return total / static_cast<double>(ds.samples * ds.members * ds.members);
}

TEST(Disagreement, OrderedPairsMatchBruteForce) {
  const auto ds = testing::random_dataset(99, 4, 64, 5);
  EXPECT_NEAR(expected_disagreement(ds, DisagreementMode::kOrderedPairs),
              brute_force_ordered_disagreement(ds), 1e-14);
}

TEST(Gap, WorkedExample) {
  const auto ds = testing::worked_example();
  EXPECT_NEAR(gde_gap(marginal(ds), ds.labels), 0.30, 1e-15);
}

TEST(Gap, MatchedDatasetHasNoGap) {
  // Marginal (0.25, 0.75) with labels in exactly that ratio.
  const auto ds = make_dataset(1, 4, 2, {0.25, 0.75, 0.25, 0.75, 0.25, 0.75, 0.25, 0.75},
                               {0, 1, 1, 1});
  EXPECT_NEAR(gde_gap(marginal(ds), ds.labels), 0.0, 1e-15);
}

}  // namespace
}  // namespace gdecal

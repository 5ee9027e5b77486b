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

namespace gdecal {

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> p);

MarginalPrediction marginal(const EnsembleDataset& ds);

// Replaces every member row by the one-hot vector of its argmax.
EnsembleDataset apply_top(const EnsembleDataset& ds);

// True when every member row is exactly one-hot.
bool satisfies_top(const EnsembleDataset& ds);

// p̄(y_n | x_n)
std::vector<double> per_sample_accuracy(const MarginalPrediction& marg,
                                        std::span<const int> labels);

// sum_k p̄(k | x_n)^2
std::vector<double> per_sample_pred_acc(const MarginalPrediction& marg);

struct Top1 {
  std::vector<double> confidence;
  std::vector<int> hit;
};

Top1 top1_quantities(const MarginalPrediction& marg,
                     std::span<const int> labels);

struct TestErrorSummary {
  std::vector<double> per_member;
  double mean = 0.0;
};

// Requires a labeled dataset.
TestErrorSummary expected_test_error(const EnsembleDataset& ds);

enum class DisagreementMode {
  // 1 - E[sum_k p̄(k|x)^2]; equals the i.i.d. (Omega, Omega') expectation
  // including self-pairs.
  kMarginalIdentity,
  // Explicit average over all M^2 ordered member pairs.
  kOrderedPairs,
  // Average over the M(M-1) pairs with m != m'.
  kDistinctPairs,
};

// Throws Error(kInsufficientMembers) for kDistinctPairs with M = 1.
double expected_disagreement(
    const EnsembleDataset& ds,
    DisagreementMode mode = DisagreementMode::kMarginalIdentity);

// |E[Acc] - E[PredAcc]|
double gde_gap(const MarginalPrediction& marg, std::span<const int> labels);

}  // namespace gdecal

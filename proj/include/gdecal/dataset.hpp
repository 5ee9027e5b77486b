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
#include <span>
#include <string>
#include <vector>

namespace gdecal {

// Probabilities of M ensemble members on N samples over K classes, stored
// member-major, then sample-major, then class. Members carry uniform weight
// 1/M. `labels` is empty for unlabeled dumps.
struct EnsembleDataset {
  std::size_t members = 0;
  std::size_t samples = 0;
  std::size_t classes = 0;
  std::vector<double> probs;
  std::vector<int> labels;
  std::vector<std::string> sample_ids;

  bool labeled() const noexcept { return !labels.empty(); }

  double prob(std::size_t m, std::size_t n, std::size_t k) const {
    return probs[(m * samples + n) * classes + k];
  }

  std::span<const double> row(std::size_t m, std::size_t n) const {
    return {probs.data() + (m * samples + n) * classes, classes};
  }

  std::span<double> row(std::size_t m, std::size_t n) {
    return {probs.data() + (m * samples + n) * classes, classes};
  }
};

// Ensemble marginal p̄(k | x_n), N rows of K entries.
struct MarginalPrediction {
  std::size_t samples = 0;
  std::size_t classes = 0;
  std::vector<double> probs;

  double at(std::size_t n, std::size_t k) const {
    return probs[n * classes + k];
  }

  std::span<const double> row(std::size_t n) const {
    return {probs.data() + n * classes, classes};
  }
};

// Throws Error(kInvalidArgument) unless M >= 1, N >= 1, K >= 2 and every
// buffer has the size the header fields imply.
void check_shape(const EnsembleDataset& ds);

// Generates "0", "1", ... when a dump carries no ids of its own.
std::vector<std::string> index_sample_ids(std::size_t n);

struct ValidationPolicy {
  double tolerance = 1e-6;
  bool renormalize = false;
};

struct RowIssue {
  std::size_t member = 0;
  std::size_t sample = 0;
  double sum = 0.0;
  // 1 - sum; positive when mass is missing.
  double deficit = 0.0;
  double min_entry = 0.0;
};

struct ValidationReport {
  bool valid = true;
  std::size_t rows_checked = 0;
  double max_abs_deficit = 0.0;
  std::vector<RowIssue> row_issues;
  std::vector<std::size_t> label_violations;
  std::vector<std::string> duplicate_ids;
  // Present only with policy.renormalize and when every issue was repairable.
  std::optional<EnsembleDataset> corrected;
};

// Rows with sum <= 0 or an entry below -tolerance cannot be repaired and
// raise Error(kInvalidRow) regardless of the policy.
ValidationReport validate_dataset(const EnsembleDataset& ds,
                                  const ValidationPolicy& policy = {});

// Returns `ds` (or its renormalized copy) when it validates, otherwise throws
// Error(kInvalidRow / kLabelOutOfRange / kDuplicateId) describing the first
// problem found.
EnsembleDataset require_valid(const EnsembleDataset& ds,
                              const ValidationPolicy& policy = {});

// Copies the given samples, in the given order.
EnsembleDataset subset(const EnsembleDataset& ds,
                       std::span<const std::size_t> sample_indices);

MarginalPrediction subset(const MarginalPrediction& marg,
                          std::span<const std::size_t> sample_indices);

}  // namespace gdecal

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

#include "gdecal/prob_core.hpp"

#include <cmath>

#include "gdecal/compensated_sum.hpp"
#include "gdecal/error.hpp"
#include "gdecal/kernels.hpp"

namespace gdecal {

namespace {

void require_labels(const MarginalPrediction& marg,
                    std::span<const int> labels) {
  if (labels.size() != marg.samples) {
    throw Error(ErrorCode::kInvalidArgument,
                "label count does not match the number of samples");
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= marg.classes) {
      throw Error(ErrorCode::kLabelOutOfRange,
                  "label " + std::to_string(y) + " outside [0, " +
                      std::to_string(marg.classes) + ")");
    }
  }
}

}  // namespace

std::size_t argmax(std::span<const double> p) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < p.size(); ++k) {
    if (p[k] > p[best]) best = k;
  }
  return best;
}

MarginalPrediction marginal(const EnsembleDataset& ds) {
  check_shape(ds);
  MarginalPrediction out;
  out.samples = ds.samples;
  out.classes = ds.classes;
  out.probs.resize(ds.samples * ds.classes);
  kernels::marginal(ds, out.probs);
  return out;
}

EnsembleDataset apply_top(const EnsembleDataset& ds) {
  check_shape(ds);
  EnsembleDataset out = ds;
  for (std::size_t m = 0; m < ds.members; ++m) {
    for (std::size_t n = 0; n < ds.samples; ++n) {
      auto row = out.row(m, n);
      const std::size_t top = argmax(row);
      for (std::size_t k = 0; k < row.size(); ++k) {
        row[k] = k == top ? 1.0 : 0.0;
      }
    }
  }
  return out;
}

bool satisfies_top(const EnsembleDataset& ds) {
  for (std::size_t m = 0; m < ds.members; ++m) {
    for (std::size_t n = 0; n < ds.samples; ++n) {
      int ones = 0;
      for (double p : ds.row(m, n)) {
        if (p == 1.0) {
          ++ones;
        } else if (p != 0.0) {
          return false;
        }
      }
      if (ones != 1) return false;
    }
  }
  return true;
}

std::vector<double> per_sample_accuracy(const MarginalPrediction& marg,
                                        std::span<const int> labels) {
  require_labels(marg, labels);
  std::vector<double> out(marg.samples);
  for (std::size_t n = 0; n < marg.samples; ++n) {
    out[n] = marg.at(n, static_cast<std::size_t>(labels[n]));
  }
  return out;
}

std::vector<double> per_sample_pred_acc(const MarginalPrediction& marg) {
  std::vector<double> out(marg.samples);
  kernels::self_agreement(marg.probs, marg.classes, out);
  return out;
}

Top1 top1_quantities(const MarginalPrediction& marg,
                     std::span<const int> labels) {
  require_labels(marg, labels);
  Top1 out;
  out.confidence.resize(marg.samples);
  out.hit.resize(marg.samples);
  for (std::size_t n = 0; n < marg.samples; ++n) {
    const auto row = marg.row(n);
    const std::size_t top = argmax(row);
    out.confidence[n] = row[top];
    out.hit[n] = static_cast<int>(top) == labels[n] ? 1 : 0;
  }
  return out;
}

TestErrorSummary expected_test_error(const EnsembleDataset& ds) {
  check_shape(ds);
  if (!ds.labeled()) {
    throw Error(ErrorCode::kInvalidArgument, "test error needs labels");
  }
  TestErrorSummary out;
  out.per_member.resize(ds.members);
  kernels::member_hit_rate(ds, out.per_member);
  for (double& e : out.per_member) e = 1.0 - e;
  out.mean = compensated_mean(out.per_member);
  return out;
}

double expected_disagreement(const EnsembleDataset& ds,
                             DisagreementMode mode) {
  check_shape(ds);
  std::vector<double> agreement(ds.samples);
  switch (mode) {
    case DisagreementMode::kMarginalIdentity: {
      const auto marg = marginal(ds);
      kernels::self_agreement(marg.probs, marg.classes, agreement);
      break;
    }
    case DisagreementMode::kOrderedPairs:
      kernels::pair_agreement(ds, /*include_self=*/true, agreement);
      break;
    case DisagreementMode::kDistinctPairs:
      if (ds.members < 2) {
        throw Error(ErrorCode::kInsufficientMembers,
                    "distinct-pairs disagreement needs at least two members");
      }
      kernels::pair_agreement(ds, /*include_self=*/false, agreement);
      break;
  }
  return 1.0 - compensated_mean(agreement);
}

double gde_gap(const MarginalPrediction& marg, std::span<const int> labels) {
  const auto acc = per_sample_accuracy(marg, labels);
  const auto pred = per_sample_pred_acc(marg);
  return std::fabs(compensated_mean(acc) - compensated_mean(pred));
}

}  // namespace gdecal

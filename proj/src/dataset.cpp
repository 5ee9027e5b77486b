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

#include "gdecal/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "gdecal/compensated_sum.hpp"
#include "gdecal/error.hpp"

namespace gdecal {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInvalidRow: return "invalid-row";
    case ErrorCode::kLabelOutOfRange: return "label-out-of-range";
    case ErrorCode::kDuplicateId: return "duplicate-id";
    case ErrorCode::kInsufficientMembers: return "insufficient-members";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kMalformedHeader: return "malformed-header";
    case ErrorCode::kMalformedRow: return "malformed-row";
    case ErrorCode::kDuplicatePair: return "duplicate-pair";
    case ErrorCode::kMissingPair: return "missing-pair";
    case ErrorCode::kBadMagic: return "bad-magic";
    case ErrorCode::kUnsupportedVersion: return "unsupported-version";
    case ErrorCode::kSizeMismatch: return "size-mismatch";
    case ErrorCode::kChecksumMismatch: return "checksum-mismatch";
    case ErrorCode::kIdMismatch: return "id-mismatch";
    case ErrorCode::kMalformedWorld: return "malformed-world";
  }
  return "unknown";
}

void check_shape(const EnsembleDataset& ds) {
  if (ds.members == 0) {
    throw Error(ErrorCode::kInvalidArgument, "dataset has no members");
  }
  if (ds.samples == 0) {
    throw Error(ErrorCode::kInvalidArgument, "dataset has no samples");
  }
  if (ds.classes < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "dataset needs at least two classes");
  }
  if (ds.probs.size() != ds.members * ds.samples * ds.classes) {
    throw Error(ErrorCode::kInvalidArgument,
                "probability buffer does not match M*N*K");
  }
  if (!ds.labels.empty() && ds.labels.size() != ds.samples) {
    throw Error(ErrorCode::kInvalidArgument, "label count does not match N");
  }
  if (ds.sample_ids.size() != ds.samples) {
    throw Error(ErrorCode::kInvalidArgument,
                "sample id count does not match N");
  }
}

std::vector<std::string> index_sample_ids(std::size_t n) {
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  return ids;
}

ValidationReport validate_dataset(const EnsembleDataset& ds,
                                  const ValidationPolicy& policy) {
  check_shape(ds);
  ValidationReport report;
  const double tol = policy.tolerance;

  bool repairable = true;
  for (std::size_t m = 0; m < ds.members; ++m) {
    for (std::size_t n = 0; n < ds.samples; ++n) {
      const auto row = ds.row(m, n);
      CompensatedSum sum;
      double min_entry = row[0];
      for (double p : row) {
        if (!std::isfinite(p)) {
          throw Error(ErrorCode::kInvalidRow,
                      "non-finite probability at member " + std::to_string(m) +
                          ", sample " + std::to_string(n));
        }
        sum.add(p);
        min_entry = std::min(min_entry, p);
      }
      ++report.rows_checked;
      const double s = sum.value();
      if (s <= 0.0 || min_entry < -tol) {
        throw Error(ErrorCode::kInvalidRow,
                    "unrepairable row at member " + std::to_string(m) +
                        ", sample " + std::to_string(n) + " (sum " +
                        std::to_string(s) + ", min " +
                        std::to_string(min_entry) + ")");
      }
      const double deficit = 1.0 - s;
      report.max_abs_deficit = std::max(report.max_abs_deficit,
                                        std::fabs(deficit));
      if (std::fabs(deficit) > tol || min_entry < 0.0 || min_entry > 1.0) {
        report.row_issues.push_back({m, n, s, deficit, min_entry});
      }
    }
  }

  if (ds.labeled()) {
    for (std::size_t n = 0; n < ds.samples; ++n) {
      const int y = ds.labels[n];
      if (y < 0 || static_cast<std::size_t>(y) >= ds.classes) {
        report.label_violations.push_back(n);
        repairable = false;
      }
    }
  }

  std::unordered_set<std::string> seen;
  for (const auto& id : ds.sample_ids) {
    if (!seen.insert(id).second) {
      report.duplicate_ids.push_back(id);
      repairable = false;
    }
  }

  report.valid = report.row_issues.empty() && report.label_violations.empty() &&
                 report.duplicate_ids.empty();

  if (policy.renormalize && repairable) {
    EnsembleDataset fixed = ds;
    for (const auto& issue : report.row_issues) {
      auto row = fixed.row(issue.member, issue.sample);
      CompensatedSum sum;
      for (double& p : row) {
        p = std::max(p, 0.0);
        sum.add(p);
      }
      const double s = sum.value();
      for (double& p : row) p /= s;
    }
    report.corrected = std::move(fixed);
  }
  return report;
}

EnsembleDataset require_valid(const EnsembleDataset& ds,
                              const ValidationPolicy& policy) {
  auto report = validate_dataset(ds, policy);
  if (!report.label_violations.empty()) {
    const auto n = report.label_violations.front();
    throw Error(ErrorCode::kLabelOutOfRange,
                "label " + std::to_string(ds.labels[n]) + " of sample '" +
                    ds.sample_ids[n] + "' is outside [0, " +
                    std::to_string(ds.classes) + ")");
  }
  if (!report.duplicate_ids.empty()) {
    throw Error(ErrorCode::kDuplicateId,
                "duplicate sample id '" + report.duplicate_ids.front() + "'");
  }
  if (report.corrected) return std::move(*report.corrected);
  if (!report.row_issues.empty()) {
    const auto& issue = report.row_issues.front();
    throw Error(ErrorCode::kInvalidRow,
                std::to_string(report.row_issues.size()) +
                    " rows off the simplex; first at member " +
                    std::to_string(issue.member) + ", sample " +
                    std::to_string(issue.sample) + " (deficit " +
                    std::to_string(issue.deficit) + ")");
  }
  return ds;
}

EnsembleDataset subset(const EnsembleDataset& ds,
                       std::span<const std::size_t> sample_indices) {
  EnsembleDataset out;
  out.members = ds.members;
  out.samples = sample_indices.size();
  out.classes = ds.classes;
  out.probs.resize(out.members * out.samples * out.classes);
  for (std::size_t m = 0; m < ds.members; ++m) {
    for (std::size_t i = 0; i < sample_indices.size(); ++i) {
      const auto src = ds.row(m, sample_indices[i]);
      std::copy(src.begin(), src.end(), out.row(m, i).begin());
    }
  }
  out.sample_ids.reserve(out.samples);
  for (auto n : sample_indices) out.sample_ids.push_back(ds.sample_ids[n]);
  if (ds.labeled()) {
    out.labels.reserve(out.samples);
    for (auto n : sample_indices) out.labels.push_back(ds.labels[n]);
  }
  return out;
}

MarginalPrediction subset(const MarginalPrediction& marg,
                          std::span<const std::size_t> sample_indices) {
  MarginalPrediction out;
  out.samples = sample_indices.size();
  out.classes = marg.classes;
  out.probs.reserve(out.samples * out.classes);
  for (auto n : sample_indices) {
    const auto r = marg.row(n);
    out.probs.insert(out.probs.end(), r.begin(), r.end());
  }
  return out;
}

}  // namespace gdecal

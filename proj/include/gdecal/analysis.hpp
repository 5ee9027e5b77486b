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

#include "gdecal/calibration.hpp"
#include "gdecal/dataset.hpp"
#include "gdecal/info.hpp"
#include "gdecal/oracle.hpp"
#include "gdecal/prob_core.hpp"

namespace gdecal {

struct AnalysisConfig {
  CalibrationConfig calibration;
  InfoConfig info;
  DisagreementMode dis_mode = DisagreementMode::kMarginalIdentity;
};

// Everything computed for one (sub)dataset. Label-dependent scalars are NaN
// and the calibration report is empty when the dataset is unlabeled.
struct MetricReport {
  std::size_t members = 0;
  std::size_t samples = 0;
  std::size_t classes = 0;
  bool labeled = false;
  bool top = false;
  double acc = 0.0;
  double pred_acc = 0.0;
  double top1_acc = 0.0;
  double top1_conf = 0.0;
  double test_error = 0.0;
  double dis = 0.0;
  double gde_gap = 0.0;
  CalibrationReport calibration;
  InfoReport info;
};

MetricReport metric_report(const EnsembleDataset& ds,
                           const AnalysisConfig& config = {});

// Dataset-level identities and bounds: the empirical counterparts of the
// finite-world theorem checks. Requires labels.
TheoremReport verify_dataset(const EnsembleDataset& ds,
                             const AnalysisConfig& config = {});

}  // namespace gdecal

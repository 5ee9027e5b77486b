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

#include <span>
#include <vector>

#include "gdecal/dataset.hpp"
#include "gdecal/kernels.hpp"

namespace gdecal {

struct InfoConfig {
  LogBase log_base = LogBase::kNatural;
  // Applied inside logarithms only; never to probabilities used as weights.
  double prob_floor = 1e-12;
};

// -log_b(floor), the largest information content a floored probability can
// carry.
double information_bound(const InfoConfig& cfg);

double shannon_entropy(std::span<const double> p, const InfoConfig& cfg = {});

// 1 - sum_k p_k^2
double approx_entropy(std::span<const double> p);

struct PerSample {
  std::vector<double> values;
  double mean = 0.0;
};

// H(p̄(.|x)) - (1/M) sum_m H(p_m(.|x))
PerSample bald(const EnsembleDataset& ds, const InfoConfig& cfg = {});

// (1/M) sum_m KL(p_m(.|x) || p̄(.|x))
PerSample bald_kl(const EnsembleDataset& ds, const InfoConfig& cfg = {});

// sum_k Var_m p_m(k|x), population variance.
PerSample approx_bald(const EnsembleDataset& ds);

// (1/N) sum_n -log max(p̄(y_n|x_n), floor)
double cross_entropy_dataset(const MarginalPrediction& marg,
                             std::span<const int> labels,
                             const InfoConfig& cfg = {});

// 1 - b^{-CE}; with natural logs 1 - exp(-CE). Throws for negative CE.
double test_error_upper_bound(double cross_entropy,
                              LogBase base = LogBase::kNatural);

struct EntropicGdeReport {
  double cross_entropy = 0.0;
  double mean_entropy_marginal = 0.0;
  double mean_entropy_conditional = 0.0;
  // |CE - H(Ŷ|X)|
  double gap = 0.0;
  // ECACE with one bin per distinct information-content value.
  double ecace = 0.0;
  double bound = 0.0;  // gap / L
  double slack = 0.0;  // ecace - bound
  bool bound_ok = false;
  // Every member row one-hot, so H(Ŷ|X,Ω) = 0 and H(Ŷ|X) = I(Ŷ;Ω|X).
  bool top = false;
};

// Requires labels.
EntropicGdeReport entropic_gde_report(const EnsembleDataset& ds,
                                      const InfoConfig& cfg = {});

struct InfoReport {
  LogBase log_base = LogBase::kNatural;
  double prob_floor = 1e-12;
  double mean_entropy_marginal = 0.0;
  double mean_entropy_conditional = 0.0;
  double bald_mean = 0.0;
  double bald_kl_mean = 0.0;
  double approx_entropy_marginal = 0.0;
  double approx_bald_mean = 0.0;
  // Label-dependent fields are NaN for unlabeled datasets.
  double cross_entropy = 0.0;
  double entropic_gde_gap = 0.0;
  double test_error_upper_bound = 0.0;

  std::vector<double> entropy_marginal;
  std::vector<double> entropy_conditional;
  std::vector<double> bald;
  std::vector<double> bald_kl;
  std::vector<double> approx_entropy;
  std::vector<double> approx_bald;
  std::vector<double> cross_entropy_per_sample;
};

InfoReport info_report(const EnsembleDataset& ds, const InfoConfig& cfg = {});

}  // namespace gdecal

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

#include "gdecal/info.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "gdecal/calibration.hpp"
#include "gdecal/compensated_sum.hpp"
#include "gdecal/error.hpp"
#include "gdecal/prob_core.hpp"

namespace gdecal {

namespace {

double to_base(double nats, LogBase base) {
  return base == LogBase::kNatural ? nats : nats / std::numbers::ln2;
}

void check_floor(const InfoConfig& cfg) {
  if (!(cfg.prob_floor > 0.0) || !(cfg.prob_floor < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "probability floor must lie in (0, 1)");
  }
}

PerSample finish(std::vector<double> values) {
  PerSample out;
  out.mean = compensated_mean(values);
  out.values = std::move(values);
  return out;
}

// Slack allowed for the ECACE bound: floored logs make E_T[IC] differ from
// H(p̄) by at most K * floor * L.
constexpr double kBoundTolerance = 1e-9;

}  // namespace

double information_bound(const InfoConfig& cfg) {
  check_floor(cfg);
  return to_base(-std::log(cfg.prob_floor), cfg.log_base);
}

double shannon_entropy(std::span<const double> p, const InfoConfig& cfg) {
  CompensatedSum h;
  for (double v : p) {
    if (v > 0.0) h.add(-v * std::log(v));
  }
  return to_base(h.value(), cfg.log_base);
}

double approx_entropy(std::span<const double> p) {
  CompensatedSum s;
  for (double v : p) s.add(v * v);
  return 1.0 - s.value();
}

PerSample bald(const EnsembleDataset& ds, const InfoConfig& cfg) {
  const auto marg = marginal(ds);
  std::vector<double> h_marg(ds.samples);
  std::vector<double> h_cond(ds.samples);
  kernels::row_entropy(marg.probs, marg.classes, cfg.log_base, h_marg);
  kernels::mean_member_entropy(ds, cfg.log_base, h_cond);
  for (std::size_t n = 0; n < ds.samples; ++n) h_marg[n] -= h_cond[n];
  return finish(std::move(h_marg));
}

PerSample bald_kl(const EnsembleDataset& ds, const InfoConfig& cfg) {
  check_floor(cfg);
  const auto marg = marginal(ds);
  std::vector<double> out(ds.samples);
  kernels::mean_kl_to_marginal(ds, marg.probs, cfg.prob_floor, cfg.log_base,
                               out);
  return finish(std::move(out));
}

PerSample approx_bald(const EnsembleDataset& ds) {
  const auto marg = marginal(ds);
  std::vector<double> out(ds.samples);
  kernels::variance_sum(ds, marg.probs, out);
  return finish(std::move(out));
}

double cross_entropy_dataset(const MarginalPrediction& marg,
                             std::span<const int> labels,
                             const InfoConfig& cfg) {
  check_floor(cfg);
  const auto s = per_sample_accuracy(marg, labels);
  CompensatedSum ce;
  for (double p : s) ce.add(-std::log(std::max(p, cfg.prob_floor)));
  return to_base(ce.value() / static_cast<double>(s.size()), cfg.log_base);
}

double test_error_upper_bound(double cross_entropy, LogBase base) {
  if (cross_entropy < 0.0 || std::isnan(cross_entropy)) {
    throw Error(ErrorCode::kInvalidArgument,
                "cross-entropy must be non-negative");
  }
  const double nats = base == LogBase::kNatural
                          ? cross_entropy
                          : cross_entropy * std::numbers::ln2;
  return -std::expm1(-nats);
}

EntropicGdeReport entropic_gde_report(const EnsembleDataset& ds,
                                      const InfoConfig& cfg) {
  check_shape(ds);
  if (!ds.labeled()) {
    throw Error(ErrorCode::kInvalidArgument,
                "entropic GDE report needs labels");
  }
  const auto marg = marginal(ds);
  EntropicGdeReport r;
  r.cross_entropy = cross_entropy_dataset(marg, ds.labels, cfg);

  std::vector<double> h(ds.samples);
  kernels::row_entropy(marg.probs, marg.classes, cfg.log_base, h);
  r.mean_entropy_marginal = compensated_mean(h);
  kernels::mean_member_entropy(ds, cfg.log_base, h);
  r.mean_entropy_conditional = compensated_mean(h);
  r.gap = std::fabs(r.cross_entropy - r.mean_entropy_marginal);

  const double L_nats = -std::log(cfg.prob_floor);
  const auto ic = pooled_information_content(marg, cfg.prob_floor);
  r.ecace = ecace(marg, ds.labels, distinct_value_bins(ic, {0.0, L_nats}),
                  cfg.prob_floor);
  r.bound = r.gap / information_bound(cfg);
  r.slack = r.ecace - r.bound;
  r.bound_ok = r.slack >= -kBoundTolerance;
  r.top = satisfies_top(ds);
  return r;
}

InfoReport info_report(const EnsembleDataset& ds, const InfoConfig& cfg) {
  check_shape(ds);
  check_floor(cfg);
  const auto marg = marginal(ds);
  const std::size_t N = ds.samples;
  InfoReport r;
  r.log_base = cfg.log_base;
  r.prob_floor = cfg.prob_floor;

  r.entropy_marginal.resize(N);
  r.entropy_conditional.resize(N);
  kernels::row_entropy(marg.probs, marg.classes, cfg.log_base,
                       r.entropy_marginal);
  kernels::mean_member_entropy(ds, cfg.log_base, r.entropy_conditional);
  r.bald.resize(N);
  for (std::size_t n = 0; n < N; ++n) {
    r.bald[n] = r.entropy_marginal[n] - r.entropy_conditional[n];
  }
  r.bald_kl.resize(N);
  kernels::mean_kl_to_marginal(ds, marg.probs, cfg.prob_floor, cfg.log_base,
                               r.bald_kl);
  r.approx_entropy.resize(N);
  kernels::self_agreement(marg.probs, marg.classes, r.approx_entropy);
  for (double& v : r.approx_entropy) v = 1.0 - v;
  r.approx_bald.resize(N);
  kernels::variance_sum(ds, marg.probs, r.approx_bald);

  r.mean_entropy_marginal = compensated_mean(r.entropy_marginal);
  r.mean_entropy_conditional = compensated_mean(r.entropy_conditional);
  r.bald_mean = compensated_mean(r.bald);
  r.bald_kl_mean = compensated_mean(r.bald_kl);
  r.approx_entropy_marginal = compensated_mean(r.approx_entropy);
  r.approx_bald_mean = compensated_mean(r.approx_bald);

  if (ds.labeled()) {
    const auto s = per_sample_accuracy(marg, ds.labels);
    r.cross_entropy_per_sample.resize(N);
    for (std::size_t n = 0; n < N; ++n) {
      r.cross_entropy_per_sample[n] =
          to_base(-std::log(std::max(s[n], cfg.prob_floor)), cfg.log_base);
    }
    r.cross_entropy = compensated_mean(r.cross_entropy_per_sample);
    r.entropic_gde_gap = std::fabs(r.cross_entropy - r.mean_entropy_marginal);
    r.test_error_upper_bound =
        test_error_upper_bound(r.cross_entropy, cfg.log_base);
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.cross_entropy = nan;
    r.entropic_gde_gap = nan;
    r.test_error_upper_bound = nan;
  }
  return r;
}

}  // namespace gdecal

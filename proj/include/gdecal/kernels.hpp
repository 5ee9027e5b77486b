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

#include "gdecal/dataset.hpp"

// Per-sample kernels. Each output element depends on one sample only, so the
// OpenMP loops in `kernels` produce bit-identical results for any thread
// count; callers reduce the outputs serially.
//
// `reference` holds plain serial implementations written independently of the
// parallel ones. They are kept for tests and for the benchmark and are not
// used on any production path.

namespace gdecal {

enum class LogBase { kNatural, kBase2 };

namespace kernels {

// out[n*K + k] = (1/M) sum_m probs[m, n, k]
void marginal(const EnsembleDataset& ds, std::span<double> out);

// out[n] = sum_k q[n, k]^2 for an N x K row-major matrix q.
void self_agreement(std::span<const double> q, std::size_t classes,
                    std::span<double> out);

// out[n] = mean over ordered member pairs (m, m') of sum_k p_mk p_m'k.
// With include_self = false the M diagonal pairs are skipped.
void pair_agreement(const EnsembleDataset& ds, bool include_self,
                    std::span<double> out);

// out[n] = -sum_k q[n,k] log q[n,k], 0 log 0 = 0.
void row_entropy(std::span<const double> q, std::size_t classes, LogBase base,
                 std::span<double> out);

// out[n] = (1/M) sum_m H(probs[m, n, :]).
void mean_member_entropy(const EnsembleDataset& ds, LogBase base,
                         std::span<double> out);

// out[n] = (1/M) sum_m sum_k p_mk (log max(p_mk, floor) - log max(q_nk, floor)).
void mean_kl_to_marginal(const EnsembleDataset& ds,
                         std::span<const double> marginal, double floor,
                         LogBase base, std::span<double> out);

// out[n] = sum_k population variance over members of probs[:, n, k].
void variance_sum(const EnsembleDataset& ds, std::span<const double> marginal,
                  std::span<double> out);

// out[n] = (1/M) sum_m (1 - sum_k p_mk^2).
void mean_member_approx_entropy(const EnsembleDataset& ds,
                                std::span<double> out);

// out[m] = (1/N) sum_n probs[m, n, labels[n]]; parallel over members, each
// member reduced serially with compensation.
void member_hit_rate(const EnsembleDataset& ds, std::span<double> out);

}  // namespace kernels

namespace reference {

void marginal(const EnsembleDataset& ds, std::span<double> out);
void self_agreement(std::span<const double> q, std::size_t classes,
                    std::span<double> out);
void pair_agreement(const EnsembleDataset& ds, bool include_self,
                    std::span<double> out);
void row_entropy(std::span<const double> q, std::size_t classes, LogBase base,
                 std::span<double> out);
void mean_member_entropy(const EnsembleDataset& ds, LogBase base,
                         std::span<double> out);
void mean_kl_to_marginal(const EnsembleDataset& ds,
                         std::span<const double> marginal, double floor,
                         LogBase base, std::span<double> out);
void variance_sum(const EnsembleDataset& ds, std::span<const double> marginal,
                  std::span<double> out);
void mean_member_approx_entropy(const EnsembleDataset& ds,
                                std::span<double> out);
void member_hit_rate(const EnsembleDataset& ds, std::span<double> out);

}  // namespace reference

// Sets the OpenMP thread count used by the kernels (<= 0 keeps the runtime
// default).
void set_thread_count(int threads);
int thread_count();

}  // namespace gdecal

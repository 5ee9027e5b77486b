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

#include "gdecal/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>

#include "gdecal/compensated_sum.hpp"

namespace gdecal {

namespace {

using Index = std::ptrdiff_t;

inline double log_in(double x, LogBase base) {
  return base == LogBase::kNatural ? std::log(x)
                                   : std::log(x) / std::numbers::ln2;
}

inline double entropy_of(const double* p, std::size_t k_count, LogBase base) {
  CompensatedSum h;
  for (std::size_t k = 0; k < k_count; ++k) {
    if (p[k] > 0.0) h.add(-p[k] * log_in(p[k], base));
  }
  return h.value();
}

}  // namespace

void set_thread_count(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int thread_count() { return omp_get_max_threads(); }

namespace kernels {

void marginal(const EnsembleDataset& ds, std::span<double> out) {
  const Index n_count = static_cast<Index>(ds.samples);
  const std::size_t M = ds.members;
  const std::size_t K = ds.classes;
  const double inv_m = 1.0 / static_cast<double>(M);
#pragma omp parallel for schedule(static)
  for (Index n = 0; n < n_count; ++n) {
    for (std::size_t k = 0; k < K; ++k) {
      CompensatedSum acc;
      for (std::size_t m = 0; m < M; ++m) {
        acc.add(ds.probs[(m * ds.samples + n) * K + k]);
      }
      out[n * K + k] = acc.value() * inv_m;
    }
  }
}

void self_agreement(std::span<const double> q, std::size_t classes,
                    std::span<double> out) {
  const Index n_count = static_cast<Index>(q.size() / classes);
#pragma omp parallel for schedule(static)
  for (Index n = 0; n < n_count; ++n) {
    const double* row = q.data() + n * classes;
    CompensatedSum acc;
    for (std::size_t k = 0; k < classes; ++k) acc.add(row[k] * row[k]);
    out[n] = acc.value();
  }
}

void pair_agreement(const EnsembleDataset& ds, bool include_self,
                    std::span<double> out) {
  const Index n_count = static_cast<Index>(ds.samples);
  const std::size_t M = ds.members;
  const std::size_t K = ds.classes;
  const double pairs =
      include_self ? static_cast<double>(M * M) : static_cast<double>(M * (M - 1));
#pragma omp parallel for schedule(static)
  for (Index n = 0; n < n_count; ++n) {
    CompensatedSum acc;
    for (std::size_t a = 0; a < M; ++a) {
      const double* pa = ds.probs.data() + (a * ds.samples + n) * K;
      for (std::size_t b = 0; b < M; ++b) {
        if (!include_self && a == b) continue;
        const double* pb = ds.probs.data() + (b * ds.samples + n) * K;
        for (std::size_t k = 0; k < K; ++k) acc.add(pa[k] * pb[k]);
      }
    }
    out[n] = acc.value() / pairs;
  }
}

void row_entropy(std::span<const double> q, std::size_t classes, LogBase base,
                 std::span<double> out) {
  const Index n_count = static_cast<Index>(q.size() / classes);
#pragma omp parallel for schedule(static)
  for (Index n = 0; n < n_count; ++n) {
    out[n] = entropy_of(q.data() + n * classes, classes, base);
  }
}

void mean_member_entropy(const EnsembleDataset& ds, LogBase base,
                         std::span<double> out) {
  const Index n_count = static_cast<Index>(ds.samples);
  const std::size_t M = ds.members;
  const std::size_t K = ds.classes;
#pragma omp parallel for schedule(static)
  for (Index n = 0; n < n_count; ++n) {
    CompensatedSum acc;
    for (std::size_t m = 0; m < M; ++m) {
      acc.add(entropy_of(ds.probs.data() + (m * ds.samples + n) * K, K, base));
    }
    out[n] = acc.value() / static_cast<double>(M);
  }
}

void mean_kl_to_marginal(const EnsembleDataset& ds,
                         std::span<const double> marginal, double floor,
                         LogBase base, std::span<double> out) {
  const Index n_count = static_cast<Index>(ds.samples);
  const std::size_t M = ds.members;
  const std::size_t K = ds.classes;
#pragma omp parallel for schedule(static)
  for (Index n = 0; n < n_count; ++n) {
    const double* q = marginal.data() + n * K;
    CompensatedSum acc;
    for (std::size_t m = 0; m < M; ++m) {
      const double* p = ds.probs.data() + (m * ds.samples + n) * K;
      for (std::size_t k = 0; k < K; ++k) {
        if (p[k] == 0.0) continue;
        acc.add(p[k] * (log_in(std::max(p[k], floor), base) -
                        log_in(std::max(q[k], floor), base)));
      }
    }
    out[n] = acc.value() / static_cast<double>(M);
  }
}

void variance_sum(const EnsembleDataset& ds, std::span<const double> marginal,
                  std::span<double> out) {
  const Index n_count = static_cast<Index>(ds.samples);
  const std::size_t M = ds.members;
  const std::size_t K = ds.classes;
#pragma omp parallel for schedule(static)
  for (Index n = 0; n < n_count; ++n) {
    const double* q = marginal.data() + n * K;
    CompensatedSum acc;
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t m = 0; m < M; ++m) {
        const double d = ds.probs[(m * ds.samples + n) * K + k] - q[k];
        acc.add(d * d);
      }
    }
    out[n] = acc.value() / static_cast<double>(M);
  }
}

void mean_member_approx_entropy(const EnsembleDataset& ds,
                                std::span<double> out) {
  const Index n_count = static_cast<Index>(ds.samples);
  const std::size_t M = ds.members;
  const std::size_t K = ds.classes;
#pragma omp parallel for schedule(static)
  for (Index n = 0; n < n_count; ++n) {
    CompensatedSum acc;
    for (std::size_t m = 0; m < M; ++m) {
      const double* p = ds.probs.data() + (m * ds.samples + n) * K;
      CompensatedSum sq;
      for (std::size_t k = 0; k < K; ++k) sq.add(p[k] * p[k]);
      acc.add(1.0 - sq.value());
    }
    out[n] = acc.value() / static_cast<double>(M);
  }
}

void member_hit_rate(const EnsembleDataset& ds, std::span<double> out) {
  const Index m_count = static_cast<Index>(ds.members);
  const std::size_t N = ds.samples;
  const std::size_t K = ds.classes;
#pragma omp parallel for schedule(static)
  for (Index m = 0; m < m_count; ++m) {
    CompensatedSum acc;
    for (std::size_t n = 0; n < N; ++n) {
      acc.add(ds.probs[(m * N + n) * K + static_cast<std::size_t>(ds.labels[n])]);
    }
    out[m] = acc.value() / static_cast<double>(N);
  }
}

}  // namespace kernels
}  // namespace gdecal

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

#include <algorithm>
#include <cmath>

#include "gdecal/kernels.hpp"

namespace gdecal::reference {

namespace {

double log_base(double x, LogBase base) {
  return base == LogBase::kNatural ? std::log(x) : std::log2(x);
}

}  // namespace

void marginal(const EnsembleDataset& ds, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t m = 0; m < ds.members; ++m)
    for (std::size_t n = 0; n < ds.samples; ++n)
      for (std::size_t k = 0; k < ds.classes; ++k)
        out[n * ds.classes + k] += ds.prob(m, n, k);
  for (double& v : out) v /= static_cast<double>(ds.members);
}

void self_agreement(std::span<const double> q, std::size_t classes,
                    std::span<double> out) {
  for (std::size_t n = 0; n < out.size(); ++n) {
    double s = 0.0;
    for (std::size_t k = 0; k < classes; ++k) {
      s += q[n * classes + k] * q[n * classes + k];
    }
    out[n] = s;
  }
}

void pair_agreement(const EnsembleDataset& ds, bool include_self,
                    std::span<double> out) {
  const std::size_t M = ds.members;
  for (std::size_t n = 0; n < ds.samples; ++n) {
    double s = 0.0;
    double pairs = 0.0;
    for (std::size_t a = 0; a < M; ++a) {
      for (std::size_t b = 0; b < M; ++b) {
        if (!include_self && a == b) continue;
        pairs += 1.0;
        for (std::size_t k = 0; k < ds.classes; ++k) {
          s += ds.prob(a, n, k) * ds.prob(b, n, k);
        }
      }
    }
    out[n] = s / pairs;
  }
}

void row_entropy(std::span<const double> q, std::size_t classes, LogBase base,
                 std::span<double> out) {
  for (std::size_t n = 0; n < out.size(); ++n) {
    double h = 0.0;
    for (std::size_t k = 0; k < classes; ++k) {
      const double p = q[n * classes + k];
      if (p > 0.0) h -= p * log_base(p, base);
    }
    out[n] = h;
  }
}

void mean_member_entropy(const EnsembleDataset& ds, LogBase base,
                         std::span<double> out) {
  for (std::size_t n = 0; n < ds.samples; ++n) {
    double h = 0.0;
    for (std::size_t m = 0; m < ds.members; ++m) {
      for (std::size_t k = 0; k < ds.classes; ++k) {
        const double p = ds.prob(m, n, k);
        if (p > 0.0) h -= p * log_base(p, base);
      }
    }
    out[n] = h / static_cast<double>(ds.members);
  }
}

void mean_kl_to_marginal(const EnsembleDataset& ds,
                         std::span<const double> marginal, double floor,
                         LogBase base, std::span<double> out) {
  for (std::size_t n = 0; n < ds.samples; ++n) {
    double kl = 0.0;
    for (std::size_t m = 0; m < ds.members; ++m) {
      for (std::size_t k = 0; k < ds.classes; ++k) {
        const double p = ds.prob(m, n, k);
        if (p == 0.0) continue;
        const double q = marginal[n * ds.classes + k];
        kl += p * log_base(std::max(p, floor) / std::max(q, floor), base);
      }
    }
    out[n] = kl / static_cast<double>(ds.members);
  }
}

void variance_sum(const EnsembleDataset& ds, std::span<const double> marginal,
                  std::span<double> out) {
  // E[p^2] - E[p]^2 form, deliberately different from the two-pass kernel.
  (void)marginal;
  const double M = static_cast<double>(ds.members);
  for (std::size_t n = 0; n < ds.samples; ++n) {
    double total = 0.0;
    for (std::size_t k = 0; k < ds.classes; ++k) {
      double s = 0.0;
      double s2 = 0.0;
      for (std::size_t m = 0; m < ds.members; ++m) {
        s += ds.prob(m, n, k);
        s2 += ds.prob(m, n, k) * ds.prob(m, n, k);
      }
      total += s2 / M - (s / M) * (s / M);
    }
    out[n] = total;
  }
}

void mean_member_approx_entropy(const EnsembleDataset& ds,
                                std::span<double> out) {
  for (std::size_t n = 0; n < ds.samples; ++n) {
    double h = 0.0;
    for (std::size_t m = 0; m < ds.members; ++m) {
      double sq = 0.0;
      for (std::size_t k = 0; k < ds.classes; ++k) {
        sq += ds.prob(m, n, k) * ds.prob(m, n, k);
      }
      h += 1.0 - sq;
    }
    out[n] = h / static_cast<double>(ds.members);
  }
}

void member_hit_rate(const EnsembleDataset& ds, std::span<double> out) {
  for (std::size_t m = 0; m < ds.members; ++m) {
    double s = 0.0;
    for (std::size_t n = 0; n < ds.samples; ++n) {
      s += ds.prob(m, n, static_cast<std::size_t>(ds.labels[n]));
    }
    out[m] = s / static_cast<double>(ds.samples);
  }
}

}  // namespace gdecal::reference

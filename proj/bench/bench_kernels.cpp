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

#include <benchmark/benchmark.h>

#include <vector>

#include "gdecal/analysis.hpp"
#include "gdecal/kernels.hpp"
#include "gdecal/oracle.hpp"

namespace {

using gdecal::EnsembleDataset;

const EnsembleDataset& dataset() {
  static const EnsembleDataset ds = [] {
    const auto world = gdecal::random_world(7, 10, 512, 8);
    return gdecal::sample_dataset(world, 200000, 11);
  }();
  return ds;
}

template <auto Fn>
void bm_marginal(benchmark::State& state) {
  const auto& ds = dataset();
  std::vector<double> out(ds.samples * ds.classes);
  for (auto _ : state) {
    Fn(ds, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <auto Fn>
void bm_pair_agreement(benchmark::State& state) {
  const auto& ds = dataset();
  std::vector<double> out(ds.samples);
  for (auto _ : state) {
    Fn(ds, true, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <auto Fn>
void bm_member_entropy(benchmark::State& state) {
  const auto& ds = dataset();
  std::vector<double> out(ds.samples);
  for (auto _ : state) {
    Fn(ds, gdecal::LogBase::kNatural, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <auto Fn>
void bm_kl(benchmark::State& state) {
  const auto& ds = dataset();
  std::vector<double> q(ds.samples * ds.classes);
  gdecal::kernels::marginal(ds, q);
  std::vector<double> out(ds.samples);
  for (auto _ : state) {
    Fn(ds, q, 1e-12, gdecal::LogBase::kNatural, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <auto Fn>
void bm_variance(benchmark::State& state) {
  const auto& ds = dataset();
  std::vector<double> q(ds.samples * ds.classes);
  gdecal::kernels::marginal(ds, q);
  std::vector<double> out(ds.samples);
  for (auto _ : state) {
    Fn(ds, q, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void bm_metric_report(benchmark::State& state) {
  const auto& ds = dataset();
  for (auto _ : state) {
    benchmark::DoNotOptimize(gdecal::metric_report(ds).gde_gap);
  }
}

BENCHMARK(bm_marginal<gdecal::kernels::marginal>)->Name("marginal/parallel");
BENCHMARK(bm_marginal<gdecal::reference::marginal>)->Name("marginal/reference");
BENCHMARK(bm_pair_agreement<gdecal::kernels::pair_agreement>)->Name("pair_agreement/parallel");
BENCHMARK(bm_pair_agreement<gdecal::reference::pair_agreement>)->Name("pair_agreement/reference");
BENCHMARK(bm_member_entropy<gdecal::kernels::mean_member_entropy>)->Name("member_entropy/parallel");
BENCHMARK(bm_member_entropy<gdecal::reference::mean_member_entropy>)->Name("member_entropy/reference");
BENCHMARK(bm_kl<gdecal::kernels::mean_kl_to_marginal>)->Name("kl_to_marginal/parallel");
BENCHMARK(bm_kl<gdecal::reference::mean_kl_to_marginal>)->Name("kl_to_marginal/reference");
BENCHMARK(bm_variance<gdecal::kernels::variance_sum>)->Name("variance_sum/parallel");
BENCHMARK(bm_variance<gdecal::reference::variance_sum>)->Name("variance_sum/reference");
BENCHMARK(bm_metric_report)->Name("metric_report")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

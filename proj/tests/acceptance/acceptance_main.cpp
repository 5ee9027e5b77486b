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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "gdecal/analysis.hpp"
#include "gdecal/calibration.hpp"
#include "gdecal/cli.hpp"
#include "gdecal/info.hpp"
#include "gdecal/io.hpp"
#include "gdecal/kernels.hpp"
#include "gdecal/oracle.hpp"
#include "gdecal/prob_core.hpp"
#include "gdecal/rejection.hpp"
#include "gdecal/rng.hpp"

namespace {

using namespace gdecal;

struct Outcome {
  bool passed = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  // Zero means no runtime limit.
  double time_limit_ms;
  std::function<Outcome()> body;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// Worst deviation and violation count over a batch of checks.
struct Tally {
  double worst = 0.0;
  std::size_t checked = 0;
  std::size_t violations = 0;

  void deviation(double d, double tol) {
    worst = std::max(worst, d);
    ++checked;
    if (!(d <= tol)) ++violations;
  }
  // For lhs >= rhs: track the smallest slack.
  void at_least(double lhs, double rhs, double tol, double& min_slack) {
    const double slack = lhs - rhs;
    min_slack = std::min(min_slack, slack);
    ++checked;
    if (!(slack >= -tol)) ++violations;
  }
};

EnsembleDataset make_dataset(std::size_t members, std::size_t samples, std::size_t classes,
                             std::vector<double> probs, std::vector<int> labels) {
  EnsembleDataset ds;
  ds.members = members;
  ds.samples = samples;
  ds.classes = classes;
  ds.probs = std::move(probs);
  ds.labels = std::move(labels);
  ds.sample_ids = index_sample_ids(samples);
  return ds;
}

// Plain loops over the raw tensor; no library reductions.
std::vector<double> direct_marginal(const EnsembleDataset& ds) {
  std::vector<double> q(ds.samples * ds.classes, 0.0);
  for (std::size_t m = 0; m < ds.members; ++m) {
    for (std::size_t n = 0; n < ds.samples; ++n) {
      for (std::size_t k = 0; k < ds.classes; ++k) {
        q[n * ds.classes + k] += ds.prob(m, n, k) / static_cast<double>(ds.members);
      }
    }
  }
  return q;
}

double direct_pred_acc(const EnsembleDataset& ds) {
  const auto q = direct_marginal(ds);
  double total = 0.0;
  for (double v : q) total += v * v;
  return total / static_cast<double>(ds.samples);
}

double direct_gap(const EnsembleDataset& ds) {
  const auto q = direct_marginal(ds);
  double acc = 0.0;
  double pred = 0.0;
  for (std::size_t n = 0; n < ds.samples; ++n) {
    acc += q[n * ds.classes + static_cast<std::size_t>(ds.labels[n])];
    for (std::size_t k = 0; k < ds.classes; ++k) pred += q[n * ds.classes + k] * q[n * ds.classes + k];
  }
  return std::fabs(acc - pred) / static_cast<double>(ds.samples);
}

// Per-sample mean over all ordered member pairs of 1 - <p_a, p_b>.
std::vector<double> direct_pair_disagreement(const EnsembleDataset& ds) {
  std::vector<double> out(ds.samples, 0.0);
  const double pairs = static_cast<double>(ds.members * ds.members);
  for (std::size_t n = 0; n < ds.samples; ++n) {
    for (std::size_t a = 0; a < ds.members; ++a) {
      for (std::size_t b = 0; b < ds.members; ++b) {
        double agree = 0.0;
        for (std::size_t k = 0; k < ds.classes; ++k) agree += ds.prob(a, n, k) * ds.prob(b, n, k);
        out[n] += (1.0 - agree) / pairs;
      }
    }
  }
  return out;
}

struct WorldShape {
  std::size_t classes, x_count, members;
};

WorldShape shape_for(std::size_t i) {
  return {2 + i % 4, 1 + (i * 7) % 20, 1 + (i * 5) % 6};
}

std::vector<EnsembleDataset> sampled_datasets() {
  std::vector<EnsembleDataset> out;
  for (std::size_t i = 0; i < 20; ++i) {
    const auto shape = shape_for(i + 3);
    const auto world = random_world(500 + i, shape.classes, shape.x_count, shape.members);
    out.push_back(sample_dataset(world, 200 + 50 * i, 900 + i));
  }
  return out;
}

// Two strata of 100 samples each, K = 3, two members.
//   A: marginal (0.9, 0.05, 0.05), every block of 20 labeled 18/1/1.
//   B: marginal (0.5, 0.3, 0.2) from disagreeing members, every block of 20
//      labeled 9/9/2, i.e. frequencies (0.45, 0.45, 0.1). Accuracy and
//      predicted accuracy are both 0.38, so GDE holds while the per-class
//      frequencies are off by (0.05, 0.15, 0.1).
EnsembleDataset two_regime_dataset() {
  const std::size_t per = 100;
  const std::size_t N = 2 * per;
  std::vector<double> probs(2 * N * 3);
  std::vector<int> labels(N);
  const double a0[3] = {0.92, 0.04, 0.04}, a1[3] = {0.88, 0.06, 0.06};
  const double b0[3] = {0.9, 0.05, 0.05}, b1[3] = {0.1, 0.55, 0.35};
  for (std::size_t n = 0; n < N; ++n) {
    const bool a = n < per;
    for (std::size_t k = 0; k < 3; ++k) {
      probs[(0 * N + n) * 3 + k] = a ? a0[k] : b0[k];
      probs[(1 * N + n) * 3 + k] = a ? a1[k] : b1[k];
    }
    const std::size_t slot = n % 20;
    if (a) {
      labels[n] = slot < 18 ? 0 : (slot == 18 ? 1 : 2);
    } else {
      labels[n] = slot < 9 ? 0 : (slot < 18 ? 1 : 2);
    }
  }
  return make_dataset(2, N, 3, probs, labels);
}

FiniteWorld two_regime_world() {
  FiniteWorld w;
  w.classes = 3;
  w.x_mass = {0.5, 0.5};
  w.label_table = {0.9, 0.05, 0.05, 0.45, 0.45, 0.1};
  w.members = {{0.92, 0.04, 0.04, 0.9, 0.05, 0.05}, {0.88, 0.06, 0.06, 0.1, 0.55, 0.35}};
  w.member_masses = {0.5, 0.5};
  return w;
}

Outcome criterion_worked_example() {
  Outcome o;
  // Exact: one x, p(y) = (0.7, 0.3), single member (0.2, 0.8).
  FiniteWorld w;
  w.classes = 2;
  w.x_mass = {1.0};
  w.label_table = {0.7, 0.3};
  w.members = {{0.2, 0.8}};
  w.member_masses = {1.0};
  const auto exact = exact_report(w);
  // Top-1 over the world: argmax is class 1, right with probability 0.3.
  const double world_top1_acc = w.label_table[argmax(std::span<const double>(w.members[0]))];
  const double world_top1_conf = *std::max_element(w.members[0].begin(), w.members[0].end());

  // Empirical: ten samples, seven labeled 0 and three labeled 1.
  std::vector<double> probs;
  for (int i = 0; i < 10; ++i) probs.insert(probs.end(), {0.2, 0.8});
  const auto r = metric_report(make_dataset(1, 10, 2, probs, {0, 0, 0, 0, 0, 0, 0, 1, 1, 1}));

  Tally t;
  for (auto [got, want] : {std::pair{exact.acc, 0.38}, {exact.pred_acc, 0.68},
                           {exact.gde_gap, 0.30}, {world_top1_acc, 0.3},
                           {world_top1_conf, 0.8}, {r.acc, 0.38}, {r.pred_acc, 0.68},
                           {r.gde_gap, 0.30}, {r.top1_acc, 0.3}, {r.top1_conf, 0.8}}) {
    t.deviation(std::fabs(got - want), 1e-12);
  }
  o.passed = t.violations == 0;
  o.detail = "Acc " + fmt("%.15g", r.acc) + ", Top1Acc " + fmt("%.15g", r.top1_acc) +
             ", PredAcc " + fmt("%.15g", r.pred_acc) + ", Top1Conf " +
             fmt("%.15g", r.top1_conf) + ", gap " + fmt("%.15g", r.gde_gap) +
             "; max deviation " + fmt("%.2e", t.worst);
  return o;
}

Outcome criterion_calibrated_worlds() {
  Tally cace, gap;
  for (std::size_t i = 0; i < 100; ++i) {
    auto shape = shape_for(i);
    shape.x_count = std::max<std::size_t>(shape.x_count, 2);
    const auto mode = i % 2 == 0 ? WorldMode::kMatched : WorldMode::kLevelsetMixed;
    const auto r = exact_report(build_classwise_calibrated_world(
        1000 + i, shape.classes, shape.x_count, shape.members, mode));
    cace.deviation(r.cace_exact, 1e-10);
    gap.deviation(std::fabs(r.test_error - r.dis), 1e-10);
  }
  Outcome o;
  o.passed = cace.violations == 0 && gap.violations == 0;
  o.detail = "100 worlds (50 matched, 50 levelset-mixed); max CACE " + fmt("%.2e", cace.worst) +
             ", max GDE gap " + fmt("%.2e", gap.worst);
  return o;
}

Outcome criterion_inequalities() {
  Tally t;
  double cwce_slack = INFINITY, cace_slack = INFINITY, two_slack = INFINITY;
  for (std::size_t i = 0; i < 200; ++i) {
    const auto shape = shape_for(i);
    const auto w = random_world(2000 + i, shape.classes, shape.x_count, shape.members,
                                {.uniform_member_masses = i % 2 == 0});
    const auto r = exact_report(w);
    const double gap = std::fabs(r.test_error - r.dis);
    t.at_least(r.cwce_exact, r.cace_exact, 1e-9, cwce_slack);
    t.at_least(r.cace_exact, gap, 1e-9, cace_slack);
    t.at_least(2.0, r.cace_exact, 1e-9, two_slack);
  }
  Outcome o;
  o.passed = t.violations == 0;
  o.detail = "200 worlds, " + std::to_string(t.violations) + " violations; min slack CWCE-CACE " +
             fmt("%.3e", cwce_slack) + ", CACE-gap " + fmt("%.3e", cace_slack) + ", 2-CACE " +
             fmt("%.3e", two_slack);
  return o;
}

Outcome criterion_disagreement_identity() {
  Tally worlds, datasets;
  for (std::size_t i = 0; i < 200; ++i) {
    const auto shape = shape_for(i);
    const auto w = random_world(3000 + i, shape.classes, shape.x_count, shape.members,
                                {.uniform_member_masses = i % 3 != 0});
    for (const auto& world : {w, apply_top(w)}) {
      const auto r = exact_report(world);
      worlds.deviation(std::fabs(r.dis - (1.0 - r.pred_acc)), 1e-12);
    }
  }
  for (const auto& ds : sampled_datasets()) {
    for (const auto& d : {ds, apply_top(ds)}) {
      const double ordered = expected_disagreement(d, DisagreementMode::kOrderedPairs);
      datasets.deviation(std::fabs(ordered - (1.0 - direct_pred_acc(d))), 1e-12);
    }
  }
  Outcome o;
  o.passed = worlds.violations == 0 && datasets.violations == 0;
  o.detail = std::to_string(worlds.checked) + " worlds (max dev " + fmt("%.2e", worlds.worst) +
             "), " + std::to_string(datasets.checked) + " datasets (max dev " +
             fmt("%.2e", datasets.worst) + "), TOP variants included";
  return o;
}

Outcome criterion_approx_bald() {
  Tally identity, top;
  auto datasets = sampled_datasets();
  SplitMix64 rng(77);
  for (std::size_t i = 0; i < 20; ++i) {
    const std::size_t M = 1 + i % 6, N = 150, K = 2 + i % 5;
    std::vector<double> probs(M * N * K);
    for (std::size_t r = 0; r < M * N; ++r) {
      double total = 0.0;
      for (std::size_t k = 0; k < K; ++k) total += probs[r * K + k] = rng.uniform_positive();
      for (std::size_t k = 0; k < K; ++k) probs[r * K + k] /= total;
    }
    datasets.push_back(make_dataset(M, N, K, probs, {}));
  }
  for (const auto& ds : datasets) {
    const auto values = approx_bald(ds).values;
    const auto q = direct_marginal(ds);
    for (std::size_t n = 0; n < ds.samples; ++n) {
      double marg_sq = 0.0, member_sq = 0.0;
      for (std::size_t k = 0; k < ds.classes; ++k) marg_sq += q[n * ds.classes + k] * q[n * ds.classes + k];
      for (std::size_t m = 0; m < ds.members; ++m) {
        for (std::size_t k = 0; k < ds.classes; ++k) member_sq += ds.prob(m, n, k) * ds.prob(m, n, k);
      }
      member_sq /= static_cast<double>(ds.members);
      identity.deviation(std::fabs(values[n] - ((1.0 - marg_sq) - (1.0 - member_sq))), 1e-12);
    }
    const auto top_ds = apply_top(ds);
    const auto top_values = approx_bald(top_ds).values;
    const auto dis = direct_pair_disagreement(top_ds);
    for (std::size_t n = 0; n < ds.samples; ++n) top.deviation(std::fabs(top_values[n] - dis[n]), 1e-12);
  }
  Outcome o;
  o.passed = identity.violations == 0 && top.violations == 0;
  o.detail = std::to_string(datasets.size()) + " datasets, " + std::to_string(identity.checked) +
             " samples; max dev variance vs entropy-difference " + fmt("%.2e", identity.worst) +
             ", TOP approx-BALD vs disagreement " + fmt("%.2e", top.worst);
  return o;
}

Outcome criterion_tautology() {
  std::size_t levels = 0, violations = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < 50; ++i) {
    const auto shape = shape_for(i + 11);
    const auto t = check_tautology(
        random_world(4000 + i, shape.classes, shape.x_count, shape.members,
                     {.uniform_member_masses = i % 2 == 1}),
        1e-12);
    levels += t.levels_checked;
    violations += t.violations;
    worst = std::max(worst, t.max_slack);
  }
  Outcome o;
  o.passed = violations == 0;
  o.detail = "50 worlds, " + std::to_string(levels) + " level sets, " +
             std::to_string(violations) + " violations, max residual " + fmt("%.2e", worst);
  return o;
}

Outcome criterion_entropic_bound() {
  Tally t;
  double min_slack = INFINITY;
  std::size_t skipped = 0;
  const InfoConfig cfg;
  for (std::size_t i = 0; i < 100; ++i) {
    const auto shape = shape_for(i + 5);
    const auto w = random_world(5000 + i, shape.classes, shape.x_count, shape.members);
    const auto r = exact_report(w, cfg);
    if (r.min_marginal < cfg.prob_floor) {
      ++skipped;
      continue;
    }
    t.at_least(r.ecace_exact, r.entropic_gde_gap / r.ic_bound, 1e-9, min_slack);
  }
  Outcome o;
  o.passed = t.violations == 0 && skipped == 0;
  o.detail = std::to_string(t.checked) + " floor-consistent worlds, " +
             std::to_string(t.violations) + " violations, min slack " + fmt("%.3e", min_slack);
  return o;
}

Outcome criterion_convergence() {
  const auto world = random_world(6001, 3, 4, 3);
  const auto exact = exact_report(world);
  Outcome o;
  std::ostringstream detail;
  detail << "exact CACE " << fmt("%.6f", exact.cace_exact) << ", CWCE "
         << fmt("%.6f", exact.cwce_exact) << "; worst error/(5/sqrt N):";
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    double worst_ratio = 0.0;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto ds = sample_dataset(world, n, seed);
      const auto q = marginal(ds);
      const auto bins = distinct_value_bins(q.probs);
      const double bound = 5.0 / std::sqrt(static_cast<double>(n));
      for (double err : {std::fabs(cace(q, ds.labels, bins) - exact.cace_exact),
                         std::fabs(cwce(q, ds.labels, bins) - exact.cwce_exact)}) {
        worst_ratio = std::max(worst_ratio, err / bound);
        if (!(err < bound)) o.passed = false;
      }
    }
    detail << " N=" << n << " " << fmt("%.3f", worst_ratio);
  }
  o.detail = detail.str();
  return o;
}

Outcome criterion_single_bin() {
  std::vector<EnsembleDataset> datasets = sampled_datasets();
  for (std::size_t i = 0, n = datasets.size(); i < n; ++i) datasets.push_back(apply_top(datasets[i]));
  datasets.push_back(two_regime_dataset());
  datasets.push_back(read_dump(std::string(GDECAL_TEST_DATA_DIR) + "/fixture.bin"));
  datasets.push_back(read_dump(std::string(GDECAL_TEST_DATA_DIR) + "/worked_example.bin"));
  const BinningScheme one{.kind = BinKind::kEqualWidth, .bin_count = 1, .domain = {}, .edges = {}};
  Tally t;
  for (const auto& ds : datasets) {
    t.deviation(std::fabs(cace_qweighted(marginal(ds), ds.labels, one) - direct_gap(ds)), 1e-12);
  }
  Outcome o;
  o.passed = t.violations == 0;
  o.detail = std::to_string(t.checked) + " datasets, max |cace_qweighted(B=1) - gap| " +
             fmt("%.2e", t.worst);
  return o;
}

std::string run_cli_capture(const std::vector<std::string>& args, int& rc) {
  std::vector<const char*> argv{"gdecal"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return out.str();
}

Outcome criterion_determinism() {
  const std::string dir = GDECAL_TEST_DATA_DIR;
  const std::vector<std::vector<std::string>> commands{
      {"metrics", "-p", dir + "/fixture.bin", "-l", dir + "/fixture_labels.csv"},
      {"rejection", "-p", dir + "/fixture.bin", "-l", dir + "/fixture_labels.csv"},
      {"rejection", "-p", dir + "/fixture.bin", "-l", dir + "/fixture_labels.csv", "--score",
       "bald", "--binning", "equal-count", "--format", "text"}};
  Outcome o;
  std::size_t runs = 0;
  for (const auto& cmd : commands) {
    std::string first;
    for (const char* threads : {"1", "4"}) {
      for (int rep = 0; rep < 3; ++rep) {
        auto args = cmd;
        args.insert(args.begin(), {"--threads", threads});
        int rc = 0;
        const auto out = run_cli_capture(args, rc);
        ++runs;
        if (rc != 0 || out.empty()) o.passed = false;
        if (first.empty()) first = out;
        if (out != first) o.passed = false;
      }
    }
  }
  set_thread_count(1);
  o.detail = std::to_string(commands.size()) + " commands x 3 runs x threads {1, 4} = " +
             std::to_string(runs) + " runs, " + (o.passed ? "byte-identical" : "MISMATCH");
  return o;
}

Outcome criterion_two_regime() {
  const auto ds = two_regime_dataset();
  RejectionConfig cfg;
  cfg.score = ScoreKind::kPredError;
  cfg.sweep = Sweep::quantile_grid(10);
  const auto curve = rejection_curve(ds, cfg);
  const auto exact = exact_report(two_regime_world());

  Outcome o;
  double max_gap = 0.0;
  for (std::size_t i = 0; i < curve.rows.size(); ++i) {
    const auto& m = *curve.rows[i].metrics;
    max_gap = std::max(max_gap, m.gde_gap);
    if (i > 0) {
      const auto& p = curve.rows[i - 1].metrics->calibration;
      if (m.calibration.ece < p.ece - 1e-12 || m.calibration.cace < p.cace - 1e-12 ||
          m.calibration.cwce < p.cwce - 1e-12) {
        o.passed = false;
      }
    }
  }
  const auto& first = curve.rows.front().metrics->calibration;
  const auto& last = *curve.rows.back().metrics;
  // Calibration has to actually deteriorate, not just stay flat.
  if (!(last.calibration.cace > first.cace + 0.1)) o.passed = false;
  if (max_gap > 1e-12) o.passed = false;
  Tally t;
  t.deviation(std::fabs(last.calibration.cace - exact.cace_exact), 1e-12);
  t.deviation(std::fabs(last.calibration.cwce - exact.cwce_exact), 1e-12);
  t.deviation(std::fabs(last.gde_gap - exact.gde_gap), 1e-12);
  t.deviation(std::fabs(last.dis - exact.dis), 1e-12);
  t.deviation(std::fabs(last.test_error - exact.test_error), 1e-12);
  if (t.violations != 0) o.passed = false;
  o.detail = "ECE " + fmt("%.4f", first.ece) + " -> " + fmt("%.4f", last.calibration.ece) +
             ", CACE " + fmt("%.4f", first.cace) + " -> " + fmt("%.4f", last.calibration.cace) +
             ", CWCE " + fmt("%.4f", first.cwce) + " -> " + fmt("%.4f", last.calibration.cwce) +
             "; max GDE gap " + fmt("%.2e", max_gap) + "; final row vs oracle " +
             fmt("%.2e", t.worst);
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "worked binary example", 1.0, criterion_worked_example},
      {2, "class-wise calibrated worlds satisfy GDE", 5000.0, criterion_calibrated_worlds},
      {3, "CWCE >= CACE >= |test error - dis|, CACE <= 2", 10000.0, criterion_inequalities},
      {4, "ordered-pair disagreement equals 1 - PredAcc", 0.0, criterion_disagreement_identity},
      {5, "approx-BALD as sum of variances", 0.0, criterion_approx_bald},
      {6, "level-set tautology", 0.0, criterion_tautology},
      {7, "ECACE >= entropic gap / L", 0.0, criterion_entropic_bound},
      {8, "CACE/CWCE estimator convergence", 30000.0, criterion_convergence},
      {9, "single-bin cace_qweighted equals GDE gap", 0.0, criterion_single_bin},
      {10, "CLI determinism across runs and thread counts", 0.0, criterion_determinism},
      {11, "two-regime rejection curve shape", 0.0, criterion_two_regime},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    std::string timing = fmt("%.3f ms", ms);
    if (c.time_limit_ms > 0.0) {
      timing += fmt(" (limit %.0f ms)", c.time_limit_ms);
      if (ms >= c.time_limit_ms) {
        o.passed = false;
        timing += " OVER LIMIT";
      }
    }
    if (!o.passed) ++failures;
    std::printf("criterion %2d  %s  %s: %s [%s]\n", c.id, o.passed ? "PASS" : "FAIL",
                c.title.c_str(), o.detail.c_str(), timing.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}

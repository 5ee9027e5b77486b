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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gdecal/dataset.hpp"
#include "gdecal/info.hpp"

// Exact finite worlds p(x) p(y|x) p(ŷ|x,ω) p(ω) and the ground-truth values
// every estimator is checked against. Everything here is computed by plain
// enumeration and intentionally shares no code path with the estimators.

namespace gdecal {

struct FiniteWorld {
  std::size_t classes = 0;
  std::vector<double> x_mass;
  // |X| x K rows p(y | x).
  std::vector<double> label_table;
  // One |X| x K table p(ŷ | x, ω) per member.
  std::vector<std::vector<double>> members;
  std::vector<double> member_masses;

  std::size_t x_count() const noexcept { return x_mass.size(); }
  std::size_t member_count() const noexcept { return members.size(); }

  double label(std::size_t x, std::size_t k) const {
    return label_table[x * classes + k];
  }
  double member(std::size_t m, std::size_t x, std::size_t k) const {
    return members[m][x * classes + k];
  }
};

// Throws Error(kMalformedWorld) when shapes disagree or any row/mass vector
// is off the simplex by more than `tolerance`.
void validate_world(const FiniteWorld& world, double tolerance = 1e-9);

// p̄(k | x) = sum_ω p(ω) p(k | x, ω), |X| x K.
std::vector<double> world_marginal(const FiniteWorld& world);

FiniteWorld apply_top(const FiniteWorld& world);
bool satisfies_top(const FiniteWorld& world);

// Mass of the level set {S = q} (label side) and {T = q} (prediction side).
struct LevelSet {
  double q = 0.0;
  double s_mass = 0.0;
  double t_mass = 0.0;
};

struct ExactReport {
  double acc = 0.0;
  double pred_acc = 0.0;
  double test_error = 0.0;
  double dis = 0.0;
  double gde_gap = 0.0;
  double cace_exact = 0.0;
  double cwce_exact = 0.0;
  double ecace_exact = 0.0;
  double bald = 0.0;
  double approx_bald = 0.0;
  double approx_entropy_marginal = 0.0;
  double approx_entropy_conditional = 0.0;
  double cross_entropy = 0.0;
  double entropy_marginal = 0.0;
  double entropy_conditional = 0.0;
  double entropic_gde_gap = 0.0;
  // -log(prob_floor) in the configured base.
  double ic_bound = 0.0;
  // Smallest marginal probability; the world is floor-consistent when this
  // is at least the floor.
  double min_marginal = 0.0;
  bool top = false;
  std::vector<LevelSet> levelsets;
};

// Level sets are formed by grouping q values after rounding to 12 decimals.
ExactReport exact_report(const FiniteWorld& world, const InfoConfig& cfg = {});

enum class WorldMode { kMatched, kLevelsetMixed, kRandom };

WorldMode parse_world_mode(const std::string& text);
std::string to_string(WorldMode mode);

struct RandomWorldOptions {
  bool uniform_member_masses = true;
};

// Rows drawn as normalized uniform(0, 1] vectors from SplitMix64(seed).
FiniteWorld random_world(std::uint64_t seed, std::size_t classes,
                         std::size_t x_count, std::size_t members,
                         const RandomWorldOptions& options = {});

// kMatched sets p(y|x) = p̄(ŷ|x). kLevelsetMixed pairs up x values that share
// member rows (hence the marginal) and gives them label rows r + d and r - d
// with equal mass, so every level set averages back to r while no single x
// is matched; with an odd x_count the last x is matched. The result is
// checked to be class-wise calibrated before it is returned.
FiniteWorld build_classwise_calibrated_world(std::uint64_t seed,
                                             std::size_t classes,
                                             std::size_t x_count,
                                             std::size_t members,
                                             WorldMode mode);

// Dispatches on mode, kRandom included.
FiniteWorld synth_world(std::uint64_t seed, std::size_t classes,
                        std::size_t x_count, std::size_t members,
                        WorldMode mode);

struct TautologyReport {
  std::size_t levels_checked = 0;
  std::size_t violations = 0;
  double max_slack = 0.0;
  bool passed() const { return violations == 0; }
};

// For each class k and level q of p̄(k|x):
//   sum_{x: p̄(k|x)=q} p(x) p̄(k|x) == q sum_{x: p̄(k|x)=q} p(x).
TautologyReport check_tautology(const FiniteWorld& world,
                                double tolerance = 1e-12);

// N i.i.d. draws of x then y; member rows are copied, not sampled. Members of
// the returned dataset are uniformly weighted, so the world's member masses
// must be uniform.
EnsembleDataset sample_dataset(const FiniteWorld& world, std::size_t n,
                               std::uint64_t seed);

// One weighted row per (x, y) with p(x) p(y|x) > 0 and label y. Estimators
// run on this with its weights and distinct-value bins reproduce the exact
// level-set sums.
struct WeightedDataset {
  EnsembleDataset data;
  std::vector<double> weights;
};
WeightedDataset expand_world(const FiniteWorld& world);

struct TheoremCheck {
  std::string name;
  // "==" or ">=" (lhs relation rhs).
  std::string relation;
  double lhs = 0.0;
  double rhs = 0.0;
  // lhs - rhs for inequalities, |lhs - rhs| for identities.
  double slack = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct TheoremReport {
  std::vector<TheoremCheck> checks;
  bool all_passed() const;
  std::size_t violations() const;
};

TheoremCheck check_equal(std::string name, double lhs, double rhs,
                         double tolerance);
TheoremCheck check_at_least(std::string name, double lhs, double rhs,
                            double tolerance);

TheoremReport verify_theorems(const FiniteWorld& world,
                              const InfoConfig& cfg = {});

}  // namespace gdecal

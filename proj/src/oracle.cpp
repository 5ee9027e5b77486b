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

#include "gdecal/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "gdecal/compensated_sum.hpp"
#include "gdecal/error.hpp"
#include "gdecal/rng.hpp"

namespace gdecal {

namespace {

std::int64_t level_key(double q) {
  return static_cast<std::int64_t>(std::llround(q * 1e12));
}

double entropy_nats(const double* p, std::size_t k_count) {
  CompensatedSum h;
  for (std::size_t k = 0; k < k_count; ++k) {
    if (p[k] > 0.0) h.add(-p[k] * std::log(p[k]));
  }
  return h.value();
}

void check_simplex(std::span<const double> v, double tol,
                   const std::string& what) {
  CompensatedSum s;
  for (double p : v) {
    if (!(p >= -tol) || !(p <= 1.0 + tol)) {
      throw Error(ErrorCode::kMalformedWorld, what + " has an entry outside [0, 1]");
    }
    s.add(p);
  }
  if (std::fabs(s.value() - 1.0) > tol) {
    throw Error(ErrorCode::kMalformedWorld, what + " does not sum to 1");
  }
}

void fill_random_row(SplitMix64& rng, std::span<double> row) {
  CompensatedSum s;
  for (double& v : row) {
    v = rng.uniform_positive();
    s.add(v);
  }
  const double total = s.value();
  for (double& v : row) v /= total;
}

bool uniform_masses(const FiniteWorld& world) {
  const double expected = 1.0 / static_cast<double>(world.member_count());
  return std::all_of(world.member_masses.begin(), world.member_masses.end(),
                     [&](double w) { return std::fabs(w - expected) <= 1e-12; });
}

}  // namespace

void validate_world(const FiniteWorld& world, double tolerance) {
  const std::size_t K = world.classes;
  const std::size_t X = world.x_count();
  if (K < 2) throw Error(ErrorCode::kMalformedWorld, "world needs K >= 2");
  if (X == 0) throw Error(ErrorCode::kMalformedWorld, "world has no x values");
  if (world.members.empty()) {
    throw Error(ErrorCode::kMalformedWorld, "world has no members");
  }
  if (world.label_table.size() != X * K) {
    throw Error(ErrorCode::kMalformedWorld, "label table is not |X| x K");
  }
  if (world.member_masses.size() != world.members.size()) {
    throw Error(ErrorCode::kMalformedWorld,
                "member mass count does not match member tables");
  }
  check_simplex(world.x_mass, tolerance, "x mass vector");
  check_simplex(world.member_masses, tolerance, "member mass vector");
  for (std::size_t x = 0; x < X; ++x) {
    check_simplex({world.label_table.data() + x * K, K}, tolerance,
                  "label row " + std::to_string(x));
  }
  for (std::size_t m = 0; m < world.members.size(); ++m) {
    if (world.members[m].size() != X * K) {
      throw Error(ErrorCode::kMalformedWorld,
                  "member table " + std::to_string(m) + " is not |X| x K");
    }
    for (std::size_t x = 0; x < X; ++x) {
      check_simplex({world.members[m].data() + x * K, K}, tolerance,
                    "member " + std::to_string(m) + " row " + std::to_string(x));
    }
  }
}

std::vector<double> world_marginal(const FiniteWorld& world) {
  const std::size_t K = world.classes;
  std::vector<double> out(world.x_count() * K);
  for (std::size_t i = 0; i < out.size(); ++i) {
    CompensatedSum s;
    for (std::size_t m = 0; m < world.member_count(); ++m) {
      s.add(world.member_masses[m] * world.members[m][i]);
    }
    out[i] = s.value();
  }
  return out;
}

FiniteWorld apply_top(const FiniteWorld& world) {
  FiniteWorld out = world;
  const std::size_t K = world.classes;
  for (auto& table : out.members) {
    for (std::size_t x = 0; x < world.x_count(); ++x) {
      double* row = table.data() + x * K;
      std::size_t top = 0;
      for (std::size_t k = 1; k < K; ++k) {
        if (row[k] > row[top]) top = k;
      }
      for (std::size_t k = 0; k < K; ++k) row[k] = k == top ? 1.0 : 0.0;
    }
  }
  return out;
}

bool satisfies_top(const FiniteWorld& world) {
  const std::size_t K = world.classes;
  for (const auto& table : world.members) {
    for (std::size_t x = 0; x < world.x_count(); ++x) {
      int ones = 0;
      for (std::size_t k = 0; k < K; ++k) {
        const double p = table[x * K + k];
        if (p == 1.0) {
          ++ones;
        } else if (p != 0.0) {
          return false;
        }
      }
      if (ones != 1) return false;
    }
  }
  return true;
}

ExactReport exact_report(const FiniteWorld& world, const InfoConfig& cfg) {
  validate_world(world);
  if (!(cfg.prob_floor > 0.0) || !(cfg.prob_floor < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "probability floor must lie in (0, 1)");
  }
  const std::size_t K = world.classes;
  const std::size_t X = world.x_count();
  const std::size_t M = world.member_count();
  const auto marg = world_marginal(world);
  const double to_base =
      cfg.log_base == LogBase::kNatural ? 1.0 : 1.0 / std::numbers::ln2;
  const double floor = cfg.prob_floor;

  ExactReport r;
  r.ic_bound = -std::log(floor) * to_base;
  r.top = satisfies_top(world);
  r.min_marginal = *std::min_element(marg.begin(), marg.end());

  // Accuracy and predicted accuracy of the marginal model.
  CompensatedSum acc, pred_acc;
  for (std::size_t x = 0; x < X; ++x) {
    for (std::size_t k = 0; k < K; ++k) {
      const double q = marg[x * K + k];
      acc.add(world.x_mass[x] * world.label(x, k) * q);
      pred_acc.add(world.x_mass[x] * q * q);
    }
  }
  r.acc = acc.value();
  r.pred_acc = pred_acc.value();

  // E_Ω[TestError(Ω)] over (ω, x, y).
  CompensatedSum test_error;
  for (std::size_t m = 0; m < M; ++m) {
    CompensatedSum hit;
    for (std::size_t x = 0; x < X; ++x) {
      for (std::size_t y = 0; y < K; ++y) {
        hit.add(world.x_mass[x] * world.label(x, y) * world.member(m, x, y));
      }
    }
    test_error.add(world.member_masses[m] * (1.0 - hit.value()));
  }
  r.test_error = test_error.value();

  // E_{Ω,Ω'}[Dis(Ω, Ω')] over (ω, ω', x, ŷ), Ω' drawn independently.
  CompensatedSum dis;
  for (std::size_t a = 0; a < M; ++a) {
    for (std::size_t b = 0; b < M; ++b) {
      CompensatedSum agree;
      for (std::size_t x = 0; x < X; ++x) {
        for (std::size_t k = 0; k < K; ++k) {
          agree.add(world.x_mass[x] * world.member(a, x, k) *
                    world.member(b, x, k));
        }
      }
      dis.add(world.member_masses[a] * world.member_masses[b] *
              (1.0 - agree.value()));
    }
  }
  r.dis = dis.value();
  r.gde_gap = std::fabs(r.test_error - r.dis);

  // Level sets of S = p̄(Y|X) and T = p̄(Ŷ|X).
  struct Level {
    double q = 0.0;
    CompensatedSum s, t, diff;
  };
  std::map<std::int64_t, Level> levels;
  std::map<std::int64_t, CompensatedSum> ic_levels;
  std::vector<std::map<std::int64_t, CompensatedSum>> class_levels(K);
  for (std::size_t x = 0; x < X; ++x) {
    for (std::size_t k = 0; k < K; ++k) {
      const double q = marg[x * K + k];
      const double s_mass = world.x_mass[x] * world.label(x, k);
      const double t_mass = world.x_mass[x] * q;
      auto& level = levels[level_key(q)];
      if (level.s.value() == 0.0 && level.t.value() == 0.0) level.q = q;
      level.s.add(s_mass);
      level.t.add(t_mass);
      level.diff.add(s_mass - t_mass);
      ic_levels[level_key(-std::log(std::max(q, floor)))].add(s_mass - t_mass);
      class_levels[k][level_key(q)].add(s_mass - t_mass);
    }
  }
  CompensatedSum cace, ecace, cwce;
  for (const auto& [key, level] : levels) {
    r.levelsets.push_back({level.q, level.s.value(), level.t.value()});
    cace.add(std::fabs(level.diff.value()));
  }
  for (const auto& [key, diff] : ic_levels) ecace.add(std::fabs(diff.value()));
  for (const auto& per_class : class_levels) {
    for (const auto& [key, diff] : per_class) cwce.add(std::fabs(diff.value()));
  }
  r.cace_exact = cace.value();
  r.ecace_exact = ecace.value();
  r.cwce_exact = cwce.value();

  // Information-theoretic quantities.
  CompensatedSum h_marg, h_cond, approx_cond, approx_bald, ce;
  for (std::size_t x = 0; x < X; ++x) {
    const double px = world.x_mass[x];
    const double* q = marg.data() + x * K;
    h_marg.add(px * entropy_nats(q, K));
    for (std::size_t m = 0; m < M; ++m) {
      const double* p = world.members[m].data() + x * K;
      const double pw = px * world.member_masses[m];
      h_cond.add(pw * entropy_nats(p, K));
      CompensatedSum sq;
      for (std::size_t k = 0; k < K; ++k) {
        sq.add(p[k] * p[k]);
        approx_bald.add(pw * (p[k] - q[k]) * (p[k] - q[k]));
      }
      approx_cond.add(pw * (1.0 - sq.value()));
    }
    for (std::size_t y = 0; y < K; ++y) {
      ce.add(px * world.label(x, y) * -std::log(std::max(q[y], floor)));
    }
  }
  r.entropy_marginal = h_marg.value() * to_base;
  r.entropy_conditional = h_cond.value() * to_base;
  r.bald = r.entropy_marginal - r.entropy_conditional;
  r.approx_entropy_marginal = 1.0 - r.pred_acc;
  r.approx_entropy_conditional = approx_cond.value();
  r.approx_bald = approx_bald.value();
  r.cross_entropy = ce.value() * to_base;
  r.entropic_gde_gap = std::fabs(r.cross_entropy - r.entropy_marginal);
  return r;
}

WorldMode parse_world_mode(const std::string& text) {
  if (text == "matched") return WorldMode::kMatched;
  if (text == "levelset-mixed") return WorldMode::kLevelsetMixed;
  if (text == "random") return WorldMode::kRandom;
  throw Error(ErrorCode::kInvalidArgument, "unknown world mode '" + text + "'");
}

std::string to_string(WorldMode mode) {
  switch (mode) {
    case WorldMode::kMatched: return "matched";
    case WorldMode::kLevelsetMixed: return "levelset-mixed";
    case WorldMode::kRandom: return "random";
  }
  return "unknown";
}

FiniteWorld random_world(std::uint64_t seed, std::size_t classes,
                         std::size_t x_count, std::size_t members,
                         const RandomWorldOptions& options) {
  if (classes < 2 || x_count == 0 || members == 0) {
    throw Error(ErrorCode::kInfeasible,
                "random world needs K >= 2, |X| >= 1 and M >= 1");
  }
  SplitMix64 rng(seed);
  FiniteWorld w;
  w.classes = classes;
  w.x_mass.resize(x_count);
  fill_random_row(rng, w.x_mass);
  w.label_table.resize(x_count * classes);
  for (std::size_t x = 0; x < x_count; ++x) {
    fill_random_row(rng, {w.label_table.data() + x * classes, classes});
  }
  w.members.assign(members, std::vector<double>(x_count * classes));
  for (auto& table : w.members) {
    for (std::size_t x = 0; x < x_count; ++x) {
      fill_random_row(rng, {table.data() + x * classes, classes});
    }
  }
  w.member_masses.assign(members, 1.0 / static_cast<double>(members));
  if (!options.uniform_member_masses) fill_random_row(rng, w.member_masses);
  return w;
}

FiniteWorld build_classwise_calibrated_world(std::uint64_t seed,
                                             std::size_t classes,
                                             std::size_t x_count,
                                             std::size_t members,
                                             WorldMode mode) {
  if (mode == WorldMode::kRandom) {
    throw Error(ErrorCode::kInvalidArgument,
                "random worlds are not calibrated by construction");
  }
  if (mode == WorldMode::kLevelsetMixed && x_count < 2) {
    throw Error(ErrorCode::kInfeasible,
                "levelset-mixed worlds need at least two x values");
  }
  FiniteWorld w = random_world(seed, classes, x_count, members);
  const std::size_t K = classes;

  if (mode == WorldMode::kLevelsetMixed) {
    // Separate stream so the member draws above stay those of random_world.
    SplitMix64 rng(seed ^ 0x5bd1e9955bd1e995ULL);
    std::vector<double> d(K);
    for (std::size_t x = 0; x + 1 < x_count; x += 2) {
      for (auto& table : w.members) {
        std::copy_n(table.begin() + static_cast<std::ptrdiff_t>(x * K), K,
                    table.begin() + static_cast<std::ptrdiff_t>((x + 1) * K));
      }
      w.x_mass[x + 1] = w.x_mass[x];
    }
    // Re-normalize x masses after pairing (pairs keep equal mass).
    CompensatedSum total;
    for (double v : w.x_mass) total.add(v);
    for (double& v : w.x_mass) v /= total.value();

    const auto marg = world_marginal(w);
    for (std::size_t x = 0; x < x_count; ++x) {
      std::copy_n(marg.begin() + static_cast<std::ptrdiff_t>(x * K), K,
                  w.label_table.begin() + static_cast<std::ptrdiff_t>(x * K));
    }
    for (std::size_t x = 0; x + 1 < x_count; x += 2) {
      const double* r = marg.data() + x * K;
      double mean = 0.0;
      for (auto& v : d) {
        v = rng.uniform();
        mean += v;
      }
      mean /= static_cast<double>(K);
      double t_max = 1.0;
      for (std::size_t k = 0; k < K; ++k) {
        d[k] -= mean;
        if (d[k] != 0.0) t_max = std::min(t_max, r[k] / std::fabs(d[k]));
      }
      const double t = 0.5 * t_max;
      for (std::size_t k = 0; k < K; ++k) {
        w.label_table[x * K + k] = r[k] + t * d[k];
        w.label_table[(x + 1) * K + k] = r[k] - t * d[k];
      }
    }
  } else {
    w.label_table = world_marginal(w);
  }

  const auto report = exact_report(w);
  if (report.cwce_exact > 1e-12 || !check_tautology(w).passed()) {
    throw Error(ErrorCode::kInfeasible,
                "constructed world failed the class-wise calibration check");
  }
  return w;
}

FiniteWorld synth_world(std::uint64_t seed, std::size_t classes,
                        std::size_t x_count, std::size_t members,
                        WorldMode mode) {
  if (mode == WorldMode::kRandom) {
    return random_world(seed, classes, x_count, members);
  }
  return build_classwise_calibrated_world(seed, classes, x_count, members,
                                          mode);
}

TautologyReport check_tautology(const FiniteWorld& world, double tolerance) {
  validate_world(world);
  const std::size_t K = world.classes;
  const auto marg = world_marginal(world);
  TautologyReport report;
  for (std::size_t k = 0; k < K; ++k) {
    struct Level {
      double q = 0.0;
      CompensatedSum predicted;  // sum p(x) p̄(k|x)
      CompensatedSum mass;       // sum p(x)
    };
    std::map<std::int64_t, Level> levels;
    for (std::size_t x = 0; x < world.x_count(); ++x) {
      const double q = marg[x * K + k];
      auto& level = levels[level_key(q)];
      level.q = q;
      level.predicted.add(world.x_mass[x] * q);
      level.mass.add(world.x_mass[x]);
    }
    for (const auto& [key, level] : levels) {
      ++report.levels_checked;
      const double slack =
          std::fabs(level.predicted.value() - level.q * level.mass.value());
      report.max_slack = std::max(report.max_slack, slack);
      if (slack > tolerance) ++report.violations;
    }
  }
  return report;
}

EnsembleDataset sample_dataset(const FiniteWorld& world, std::size_t n,
                               std::uint64_t seed) {
  validate_world(world);
  if (n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "sample count must be >= 1");
  }
  if (!uniform_masses(world)) {
    throw Error(ErrorCode::kInvalidArgument,
                "sampling needs uniform member masses");
  }
  const std::size_t K = world.classes;
  const std::size_t M = world.member_count();
  SplitMix64 rng(seed);

  auto draw = [&rng](std::span<const double> masses) {
    const double u = rng.uniform();
    double cum = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
      cum += masses[i];
      if (u < cum) return i;
    }
    // Rounding left the cumulative sum just below 1; take the last non-empty.
    std::size_t last = masses.size() - 1;
    while (last > 0 && masses[last] == 0.0) --last;
    return last;
  };

  EnsembleDataset ds;
  ds.members = M;
  ds.samples = n;
  ds.classes = K;
  ds.probs.resize(M * n * K);
  ds.labels.resize(n);
  ds.sample_ids = index_sample_ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t x = draw(world.x_mass);
    const std::size_t y = draw({world.label_table.data() + x * K, K});
    ds.labels[i] = static_cast<int>(y);
    for (std::size_t m = 0; m < M; ++m) {
      std::copy_n(world.members[m].begin() + static_cast<std::ptrdiff_t>(x * K),
                  K, ds.row(m, i).begin());
    }
  }
  return ds;
}

WeightedDataset expand_world(const FiniteWorld& world) {
  validate_world(world);
  const std::size_t K = world.classes;
  const bool keep_members = uniform_masses(world);
  const auto marg = world_marginal(world);

  std::vector<std::size_t> xs;
  WeightedDataset out;
  for (std::size_t x = 0; x < world.x_count(); ++x) {
    for (std::size_t y = 0; y < K; ++y) {
      const double w = world.x_mass[x] * world.label(x, y);
      if (w <= 0.0) continue;
      xs.push_back(x);
      out.data.labels.push_back(static_cast<int>(y));
      out.weights.push_back(w);
    }
  }
  auto& ds = out.data;
  ds.members = keep_members ? world.member_count() : 1;
  ds.samples = xs.size();
  ds.classes = K;
  ds.sample_ids = index_sample_ids(ds.samples);
  ds.probs.resize(ds.members * ds.samples * K);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t m = 0; m < ds.members; ++m) {
      const double* src = keep_members ? world.members[m].data() + xs[i] * K
                                       : marg.data() + xs[i] * K;
      std::copy_n(src, K, ds.row(m, i).begin());
    }
  }
  return out;
}

bool TheoremReport::all_passed() const { return violations() == 0; }

std::size_t TheoremReport::violations() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(),
                    [](const TheoremCheck& c) { return !c.passed; }));
}

TheoremCheck check_equal(std::string name, double lhs, double rhs,
                         double tolerance) {
  const double slack = std::fabs(lhs - rhs);
  return {std::move(name), "==", lhs, rhs, slack, tolerance,
          slack <= tolerance};
}

TheoremCheck check_at_least(std::string name, double lhs, double rhs,
                            double tolerance) {
  const double slack = lhs - rhs;
  return {std::move(name), ">=", lhs, rhs, slack, tolerance,
          slack >= -tolerance};
}

TheoremReport verify_theorems(const FiniteWorld& world, const InfoConfig& cfg) {
  const auto r = exact_report(world, cfg);
  const auto tautology = check_tautology(world);
  TheoremReport out;
  auto& c = out.checks;

  c.push_back(check_equal("test_error == 1 - acc", r.test_error, 1.0 - r.acc,
                          1e-12));
  c.push_back(check_equal("dis == 1 - pred_acc", r.dis, 1.0 - r.pred_acc,
                          1e-12));
  c.push_back(check_equal("gde_gap == |acc - pred_acc|", r.gde_gap,
                          std::fabs(r.acc - r.pred_acc), 1e-12));
  c.push_back(check_at_least("cwce >= cace", r.cwce_exact, r.cace_exact, 1e-9));
  c.push_back(check_at_least("cace >= gde_gap", r.cace_exact, r.gde_gap, 1e-9));
  c.push_back(check_at_least("2 >= cace", 2.0, r.cace_exact, 1e-9));
  if (r.cace_exact <= 1e-12) {
    c.push_back(check_equal("class-aggregated calibration implies gde_gap == 0",
                            r.gde_gap, 0.0, 1e-10));
  }
  c.push_back(check_equal("tautology violations == 0",
                          static_cast<double>(tautology.violations), 0.0, 0.0));

  CompensatedSum s_total, t_total;
  for (const auto& level : r.levelsets) {
    s_total.add(level.s_mass);
    t_total.add(level.t_mass);
  }
  c.push_back(check_equal("sum of S level-set masses == 1", s_total.value(),
                          1.0, 1e-12));
  c.push_back(check_equal("sum of T level-set masses == 1", t_total.value(),
                          1.0, 1e-12));

  c.push_back(check_equal("approx_bald == approx_H(marginal) - approx_H(members)",
                          r.approx_bald,
                          r.approx_entropy_marginal - r.approx_entropy_conditional,
                          1e-12));
  c.push_back(check_at_least("approx_bald >= 0", r.approx_bald, 0.0, 1e-12));
  c.push_back(check_at_least("bald >= 0", r.bald, 0.0, 1e-12));
  c.push_back(check_at_least("approx_H(marginal) >= approx_bald",
                             r.approx_entropy_marginal, r.approx_bald, 1e-12));
  c.push_back(check_at_least("H(marginal) >= bald", r.entropy_marginal, r.bald,
                             1e-12));

  if (r.min_marginal >= cfg.prob_floor) {
    c.push_back(check_at_least("ecace >= entropic_gde_gap / L", r.ecace_exact,
                               r.entropic_gde_gap / r.ic_bound, 1e-9));
    c.push_back(check_at_least(
        "1 - exp(-CE) >= 1 - acc",
        test_error_upper_bound(r.cross_entropy, cfg.log_base), 1.0 - r.acc,
        1e-12));
  }
  if (r.top) {
    c.push_back(check_equal("TOP: approx_bald == dis", r.approx_bald, r.dis,
                            1e-12));
    c.push_back(check_equal("TOP: bald == H(marginal)", r.bald,
                            r.entropy_marginal, 1e-12));
  }
  return out;
}

}  // namespace gdecal

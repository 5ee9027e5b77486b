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

#include "gdecal/cli.hpp"

#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gdecal/analysis.hpp"
#include "gdecal/error.hpp"
#include "gdecal/io.hpp"
#include "gdecal/kernels.hpp"
#include "gdecal/oracle.hpp"
#include "gdecal/rejection.hpp"

namespace gdecal {

using nlohmann::ordered_json;

namespace {

struct CommonOptions {
  int threads = 0;
};

struct MetricsOptions {
  std::string predictions;
  std::string labels;
  std::size_t bins = 15;
  std::string binning = "equal-width";
  bool top = false;
  double ic_floor = 1e-12;
  std::string log_base = "nat";
  std::string dis_mode = "marginal-identity";
  bool renormalize = false;
  double tolerance = 1e-6;
  std::string out;
  std::string reliability;
};

struct RejectionOptions {
  MetricsOptions metrics;
  std::string score = "pred-error";
  std::size_t grid = 20;
  std::vector<double> absolute;
  bool fixed_bins = false;
  bool keep_high = false;
  std::string format = "csv";
};

struct VerifyOptions {
  std::string world;
  MetricsOptions metrics;
};

struct SynthOptions {
  std::uint64_t seed = 0;
  std::size_t classes = 3;
  std::size_t xcount = 8;
  std::size_t members = 3;
  std::string mode = "matched";
  std::string out;
};

struct OracleOptions {
  std::string world;
  std::string log_base = "nat";
  double ic_floor = 1e-12;
  std::string out;
};

struct ConvertOptions {
  std::string in;
  std::string labels;
  std::string out;
  std::string labels_out;
};

struct SampleOptions {
  std::string world;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::string out;
  std::string labels_out;
};

LogBase parse_log_base(const std::string& text) {
  if (text == "nat" || text == "e") return LogBase::kNatural;
  if (text == "2" || text == "bits") return LogBase::kBase2;
  throw Error(ErrorCode::kInvalidArgument, "unknown log base '" + text + "'");
}

DisagreementMode parse_dis_mode(const std::string& text) {
  if (text == "marginal-identity") return DisagreementMode::kMarginalIdentity;
  if (text == "ordered-pairs") return DisagreementMode::kOrderedPairs;
  if (text == "distinct-pairs") return DisagreementMode::kDistinctPairs;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown disagreement mode '" + text + "'");
}

AnalysisConfig analysis_config(const MetricsOptions& o) {
  AnalysisConfig cfg;
  cfg.calibration.binning.kind = parse_bin_kind(o.binning);
  cfg.calibration.binning.bin_count = o.bins;
  cfg.calibration.ic_floor = o.ic_floor;
  cfg.info.log_base = parse_log_base(o.log_base);
  cfg.info.prob_floor = o.ic_floor;
  cfg.dis_mode = parse_dis_mode(o.dis_mode);
  return cfg;
}

ordered_json tool_json() {
  return {{"name", kToolName}, {"version", kToolVersion}};
}

ordered_json input_json(const std::string& bytes) {
  return {{"bytes", bytes.size()}, {"fnv1a64", hex_digest(fnv1a64(bytes))}};
}

struct LoadedDataset {
  EnsembleDataset data;
  ordered_json inputs;
  ValidationReport validation;
};

LoadedDataset load_dataset(const MetricsOptions& o) {
  LoadedDataset loaded;
  const std::string bytes = read_file(o.predictions);
  loaded.data = format_from_path(o.predictions) == DumpFormat::kCsv
                    ? parse_dump_csv(bytes)
                    : parse_dump_binary(bytes);
  loaded.inputs["predictions"] = input_json(bytes);
  if (!o.labels.empty()) {
    const std::string label_bytes = read_file(o.labels);
    attach_labels(loaded.data, parse_labels_csv(label_bytes));
    loaded.inputs["labels"] = input_json(label_bytes);
  }
  ValidationPolicy policy;
  policy.tolerance = o.tolerance;
  policy.renormalize = o.renormalize;
  loaded.validation = validate_dataset(loaded.data, policy);
  loaded.data = require_valid(loaded.data, policy);
  return loaded;
}

ordered_json validation_json(const ValidationReport& v, bool renormalized) {
  return {{"rows_checked", v.rows_checked},
          {"max_abs_deficit", v.max_abs_deficit},
          {"rows_off_simplex", v.row_issues.size()},
          {"renormalized", renormalized && v.corrected.has_value()}};
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file(path, text);
  }
}

void add_metrics_options(CLI::App* cmd, MetricsOptions& o, bool labels_required) {
  cmd->add_option("--predictions,-p", o.predictions, "Prediction dump (.csv or binary)")
      ->required();
  auto* labels = cmd->add_option("--labels,-l", o.labels, "Labels CSV (sample_id,label)");
  if (labels_required) labels->required();
  cmd->add_option("--bins", o.bins, "Number of calibration bins")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
  cmd->add_option("--binning", o.binning, "equal-width or equal-count")
      ->check(CLI::IsMember({"equal-width", "equal-count"}));
  cmd->add_option("--ic-floor", o.ic_floor, "Probability floor inside logarithms")
      ->check(CLI::Range(1e-300, 0.5));
  cmd->add_option("--log-base", o.log_base, "nat or 2")
      ->check(CLI::IsMember({"nat", "2"}));
  cmd->add_option("--dis-mode", o.dis_mode,
                  "marginal-identity, ordered-pairs or distinct-pairs")
      ->check(CLI::IsMember({"marginal-identity", "ordered-pairs", "distinct-pairs"}));
  cmd->add_flag("--renormalize", o.renormalize,
                "Clamp negatives and renormalize rows off the simplex");
  cmd->add_option("--tolerance", o.tolerance, "Simplex tolerance for row sums")
      ->check(CLI::PositiveNumber);
}

int cmd_metrics(const MetricsOptions& o, std::ostream& out) {
  auto loaded = load_dataset(o);
  EnsembleDataset ds = std::move(loaded.data);
  if (o.top) ds = apply_top(ds);
  const auto cfg = analysis_config(o);
  if (!o.reliability.empty() && !ds.labeled()) {
    throw Error(ErrorCode::kInvalidArgument, "--reliability needs labels");
  }
  const auto report = metric_report(ds, cfg);

  ordered_json doc = {{"tool", tool_json()},
                      {"command", "metrics"},
                      {"inputs", loaded.inputs},
                      {"config", to_json(cfg)},
                      {"top_transform", o.top},
                      {"validation", validation_json(loaded.validation, o.renormalize)},
                      {"metrics", to_json(report)}};
  emit(o.out, doc.dump(2) + "\n", out);
  if (!o.reliability.empty()) {
    write_file(o.reliability, format_reliability_csv(report.calibration));
  }
  return kExitOk;
}

int cmd_rejection(const RejectionOptions& o, std::ostream& out) {
  auto loaded = load_dataset(o.metrics);
  RejectionConfig cfg;
  cfg.score = parse_score_kind(o.score);
  cfg.sweep = o.absolute.empty() ? Sweep::quantile_grid(o.grid)
                                 : Sweep::absolute(o.absolute);
  cfg.keep_high = o.keep_high;
  cfg.fixed_bins = o.fixed_bins;
  cfg.analysis = analysis_config(o.metrics);
  const auto curve = rejection_curve(loaded.data, cfg);

  if (o.format == "csv") {
    emit(o.metrics.out, emit_curve_csv(curve), out);
  } else {
    ordered_json provenance = {{"command", "rejection"}, {"inputs", loaded.inputs}};
    emit(o.metrics.out, emit_curve_text(curve, provenance), out);
  }
  return kExitOk;
}

int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
  ordered_json doc = {{"tool", tool_json()}, {"command", "verify"}};
  TheoremReport report;
  if (!o.world.empty()) {
    const std::string bytes = read_file(o.world);
    const auto world = parse_world(bytes);
    InfoConfig info;
    info.log_base = parse_log_base(o.metrics.log_base);
    info.prob_floor = o.metrics.ic_floor;
    doc["inputs"] = {{"world", input_json(bytes)}};
    doc["config"] = {{"log_base", o.metrics.log_base}, {"prob_floor", info.prob_floor}};
    doc["exact"] = to_json(exact_report(world, info));
    report = verify_theorems(world, info);
  } else {
    if (o.metrics.predictions.empty() || o.metrics.labels.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "verify needs --world or both --predictions and --labels");
    }
    auto loaded = load_dataset(o.metrics);
    const auto cfg = analysis_config(o.metrics);
    doc["inputs"] = loaded.inputs;
    doc["config"] = to_json(cfg);
    report = verify_dataset(loaded.data, cfg);
  }
  doc["report"] = to_json(report);
  emit(o.metrics.out, doc.dump(2) + "\n", out);
  if (!report.all_passed()) {
    for (const auto& c : report.checks) {
      if (!c.passed) {
        err << "violated: " << c.name << " (" << c.lhs << ' ' << c.relation << ' '
            << c.rhs << ", slack " << c.slack << ")\n";
      }
    }
    return kExitViolation;
  }
  return kExitOk;
}

int cmd_synth(const SynthOptions& o, std::ostream& out) {
  const auto world =
      synth_world(o.seed, o.classes, o.xcount, o.members, parse_world_mode(o.mode));
  emit(o.out, format_world(world), out);
  return kExitOk;
}

int cmd_oracle(const OracleOptions& o, std::ostream& out) {
  const std::string bytes = read_file(o.world);
  const auto world = parse_world(bytes);
  InfoConfig info;
  info.log_base = parse_log_base(o.log_base);
  info.prob_floor = o.ic_floor;
  ordered_json doc = {{"tool", tool_json()},
                      {"command", "oracle"},
                      {"inputs", {{"world", input_json(bytes)}}},
                      {"config", {{"log_base", o.log_base}, {"prob_floor", o.ic_floor}}},
                      {"exact", to_json(exact_report(world, info))}};
  emit(o.out, doc.dump(2) + "\n", out);
  return kExitOk;
}

int cmd_convert(const ConvertOptions& o) {
  EnsembleDataset ds = read_dump(o.in);
  if (!o.labels.empty()) attach_labels(ds, parse_labels_csv(read_file(o.labels)));
  write_dump(o.out, ds, format_from_path(o.out));
  if (!o.labels_out.empty()) write_file(o.labels_out, format_labels_csv(ds));
  return kExitOk;
}

int cmd_sample(const SampleOptions& o) {
  const auto world = parse_world(read_file(o.world));
  const auto ds = sample_dataset(world, o.n, o.seed);
  write_dump(o.out, ds, format_from_path(o.out));
  if (!o.labels_out.empty()) write_file(o.labels_out, format_labels_csv(ds));
  return kExitOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return kExitIo;
    case ErrorCode::kInvalidArgument: return kExitUsage;
    default: return kExitInvalidInput;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Ensemble calibration and disagreement metrics", std::string(kToolName)};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  CommonOptions common;
  app.add_option("--threads", common.threads,
                 "Worker threads for parallel kernels (0 = runtime default)")
      ->check(CLI::NonNegativeNumber);

  MetricsOptions metrics;
  auto* metrics_cmd = app.add_subcommand("metrics", "Metric report for a prediction dump");
  add_metrics_options(metrics_cmd, metrics, false);
  metrics_cmd->add_flag("--top", metrics.top, "Replace member rows by one-hot argmax");
  metrics_cmd->add_option("--out,-o", metrics.out, "Report path (JSON, default stdout)");
  metrics_cmd->add_option("--reliability", metrics.reliability,
                          "Write reliability-diagram bins as CSV");

  RejectionOptions rejection;
  auto* rejection_cmd =
      app.add_subcommand("rejection", "Metrics along a rejection sweep");
  add_metrics_options(rejection_cmd, rejection.metrics, true);
  rejection_cmd->add_option("--score", rejection.score, "pred-error, bald or approx-bald")
      ->check(CLI::IsMember({"pred-error", "bald", "approx-bald"}));
  auto* grid = rejection_cmd
                   ->add_option("--grid", rejection.grid,
                                "Quantile grid size m: retain 1/m, 2/m, ..., 1")
                   ->check(CLI::PositiveNumber);
  rejection_cmd
      ->add_option("--absolute", rejection.absolute,
                   "Absolute score thresholds, comma separated")
      ->delimiter(',')
      ->excludes(grid);
  rejection_cmd->add_flag("--fixed-bins", rejection.fixed_bins,
                          "Equal-count edges from the full dataset");
  rejection_cmd->add_flag("--keep-high", rejection.keep_high,
                          "Retain the highest scores first");
  rejection_cmd->add_option("--format", rejection.format, "csv or text")
      ->check(CLI::IsMember({"csv", "text"}));
  rejection_cmd->add_option("--out,-o", rejection.metrics.out, "Curve path (default stdout)");

  VerifyOptions verify;
  auto* verify_cmd =
      app.add_subcommand("verify", "Check identities and bounds; exit 4 on violation");
  auto* world_opt = verify_cmd->add_option("--world,-w", verify.world, "World JSON");
  auto* pred_opt = verify_cmd->add_option("--predictions,-p", verify.metrics.predictions,
                                          "Prediction dump");
  verify_cmd->add_option("--labels,-l", verify.metrics.labels, "Labels CSV");
  world_opt->excludes(pred_opt);
  verify_cmd->add_option("--bins", verify.metrics.bins, "Number of calibration bins")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
  verify_cmd->add_option("--ic-floor", verify.metrics.ic_floor, "Probability floor")
      ->check(CLI::Range(1e-300, 0.5));
  verify_cmd->add_option("--log-base", verify.metrics.log_base, "nat or 2")
      ->check(CLI::IsMember({"nat", "2"}));
  verify_cmd->add_flag("--renormalize", verify.metrics.renormalize,
                       "Renormalize rows off the simplex");
  verify_cmd->add_option("--out,-o", verify.metrics.out, "Report path (default stdout)");

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a finite world");
  synth_cmd->add_option("--seed", synth.seed, "RNG seed")->required();
  synth_cmd->add_option("--classes", synth.classes, "K")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000}));
  synth_cmd->add_option("--xcount", synth.xcount, "|X|")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
  synth_cmd->add_option("--members", synth.members, "Ensemble size")
      ->check(CLI::Range(std::size_t{1}, std::size_t{10000}));
  synth_cmd->add_option("--mode", synth.mode, "matched, levelset-mixed or random")
      ->check(CLI::IsMember({"matched", "levelset-mixed", "random"}));
  synth_cmd->add_option("--out,-o", synth.out, "World path (default stdout)");

  OracleOptions oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact values of a finite world");
  oracle_cmd->add_option("--world,-w", oracle.world, "World JSON")->required();
  oracle_cmd->add_option("--log-base", oracle.log_base, "nat or 2")
      ->check(CLI::IsMember({"nat", "2"}));
  oracle_cmd->add_option("--ic-floor", oracle.ic_floor, "Probability floor")
      ->check(CLI::Range(1e-300, 0.5));
  oracle_cmd->add_option("--out,-o", oracle.out, "Report path (default stdout)");

  ConvertOptions convert;
  auto* convert_cmd = app.add_subcommand("convert", "Convert between CSV and binary dumps");
  convert_cmd->add_option("--in,-i", convert.in, "Input dump")->required();
  convert_cmd->add_option("--labels,-l", convert.labels, "Labels to embed");
  convert_cmd->add_option("--out,-o", convert.out, "Output dump")->required();
  convert_cmd->add_option("--labels-out", convert.labels_out, "Also write labels CSV");

  SampleOptions sample;
  auto* sample_cmd = app.add_subcommand("sample", "Draw a prediction dump from a world");
  sample_cmd->add_option("--world,-w", sample.world, "World JSON")->required();
  sample_cmd->add_option("--n", sample.n, "Number of samples")
      ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
  sample_cmd->add_option("--seed", sample.seed, "RNG seed")->required();
  sample_cmd->add_option("--out,-o", sample.out, "Output dump")->required();
  sample_cmd->add_option("--labels-out", sample.labels_out, "Also write labels CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (common.threads > 0) set_thread_count(common.threads);
    if (*metrics_cmd) return cmd_metrics(metrics, out);
    if (*rejection_cmd) return cmd_rejection(rejection, out);
    if (*verify_cmd) return cmd_verify(verify, out, err);
    if (*synth_cmd) return cmd_synth(synth, out);
    if (*oracle_cmd) return cmd_oracle(oracle, out);
    if (*convert_cmd) return cmd_convert(convert);
    if (*sample_cmd) return cmd_sample(sample);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return kExitUsage;
}

}  // namespace gdecal

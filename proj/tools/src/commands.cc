/*
 * Copyright 2026 The DriftAlign Authors.
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

#include "driftalign/cli/commands.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "driftalign/alignment_optimizer.h"
#include "driftalign/cli/run_config.h"
#include "driftalign/descriptor_fusion.h"
#include "driftalign/embedding_io.h"
#include "driftalign/error.h"
#include "driftalign/retrieval_eval.h"
#include "driftalign/synthetic_gap.h"

namespace driftalign::cli {
namespace {

namespace fs = std::filesystem;

std::string FormatG17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string FormatFixed(double v, int decimals) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

// UTC ISO-8601. SOURCE_DATE_EPOCH, when set, replaces the wall clock so that
// manifests can be reproduced byte for byte.
std::string CreationTimestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(env, nullptr, 10));
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void RecordFusion(Manifest& m, const FusionConfig& f) {
  m.Set("lambda", FormatG17(f.lambda));
  m.Set("fusion_scheme", std::string(ToString(f.scheme)));
  m.Set("activation", std::string(ToString(f.activation)));
  m.Set("pre_normalize", f.pre_normalize ? "true" : "false");
  m.Set("post_normalize", f.post_normalize ? "true" : "false");
}

void RecordAlignment(Manifest& m, const AlignmentConfig& a) {
  m.Set("alpha", FormatG17(a.alpha));
  m.Set("tau_t", FormatG17(a.tau_t));
  m.Set("tau_i", FormatG17(a.tau_i));
  m.Set("eta0", FormatG17(a.eta0));
  m.Set("iterations", std::to_string(a.iterations));
  m.Set("update_rule", std::string(ToString(a.update_rule)));
  m.Set("projection", std::string(ToString(a.projection)));
  m.Set("refresh_pseudo_labels", a.refresh_pseudo_labels ? "true" : "false");
}

void EnsureParent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

std::ofstream OpenText(const fs::path& path) {
  EnsureParent(path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

// Hyperparameter flags. Only flags actually given on the command line
// override config-file values.
class SettingFlags {
 public:
  void Add(CLI::App* app, const std::string& key, const std::string& help) {
    auto entry = std::make_unique<Entry>();
    entry->key = key;
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    entry->option = app->add_option(flag, entry->value, help);
    const std::string def = DefaultValueFor(key);
    if (!def.empty()) entry->option->default_str(def);
    entries_.push_back(std::move(entry));
  }

  void AddAlignment(CLI::App* app) {
    Add(app, "alpha", "Pseudo-label confidence threshold");
    Add(app, "tau_t", "Temperature of the fixed pseudo-label distribution");
    Add(app, "tau_i", "Temperature of the learnable distribution");
    Add(app, "eta0", "Initial learning rate (halved when the gradient norm grows)");
    Add(app, "iterations", "Number of descent iterations");
    Add(app, "update_rule", "exact_kl | paper_eq8");
    Add(app, "projection", "unit_sphere | none");
    Add(app, "refresh_pseudo_labels", "Rebuild pseudo-labels every iteration (true|false)");
  }

  void AddFusion(CLI::App* app) {
    Add(app, "lambda", "Weight of the caption feature in [0,1]");
    Add(app, "fusion_scheme", "add | concat");
    Add(app, "activation", "tanh | relu | sigmoid | none");
    Add(app, "pre_normalize", "L2-normalize inputs before fusion (true|false)");
    Add(app, "post_normalize", "L2-normalize descriptors (true|false)");
  }

  void AddGap(CLI::App* app) {
    Add(app, "seed", "Generator seed");
    Add(app, "num_classes", "Number of classes");
    Add(app, "dim", "Embedding dimension");
    Add(app, "queries_per_class", "Query rows per class");
    Add(app, "targets_per_class", "Target rows per class");
    Add(app, "cluster_spread", "Per-coordinate within-class standard deviation");
    Add(app, "shift_magnitude", "Length of the query-side offset");
    Add(app, "shift_mode", "global | per_class");
  }

  void ApplyTo(RunConfig& config) const {
    for (const auto& e : entries_) {
      if (e->option->count() > 0) ApplySetting(config, e->key, e->value);
    }
  }

 private:
  struct Entry {
    std::string key;
    std::string value;
    CLI::Option* option = nullptr;
  };
  std::vector<std::unique_ptr<Entry>> entries_;
};

RunConfig BuildConfig(const std::string& config_path, const SettingFlags& flags) {
  RunConfig config;
  if (!config_path.empty()) {
    for (const auto& [k, v] : ReadConfigFile(config_path)) {
      ApplySetting(config, k, v);
    }
  }
  flags.ApplyTo(config);
  config.Validate();
  return config;
}

void WriteRunLogHeader(std::ostream& log) {
  log << "iter,eta,grad_norm,objective\n";
}

ProgressObserver RunLogObserver(std::ostream& log) {
  return [&log](const IterationRecord& r) {
    log << r.iteration << ',' << FormatG17(r.eta) << ','
        << FormatG17(r.grad_norm) << ',' << FormatG17(r.objective) << '\n';
  };
}

std::string MetricsLine(const MetricsReport& r) {
  return "mAP " + FormatFixed(100.0 * r.map, 2) + " NDCG " +
         FormatFixed(100.0 * r.ndcg, 2) + " ANMRR " +
         FormatFixed(100.0 * r.anmrr, 2);
}

void WriteMetrics(const MetricsReport& report, const fs::path& json_path,
                  const fs::path& csv_path) {
  {
    auto out = OpenText(json_path);
    out << MetricsToJson(report);
    if (!out) throw IoError("write failed for '" + json_path.string() + "'");
  }
  auto out = OpenText(csv_path);
  WritePrCurveCsv(report.pr_curve, out);
  if (!out) throw IoError("write failed for '" + csv_path.string() + "'");
}

// ---------------------------------------------------------------- fuse

struct FuseArgs {
  std::vector<std::string> views;
  std::string stacked;
  std::size_t views_per_object = 0;
  std::string object_ids;
  std::string text;
  std::string output;
  std::string manifest;
  std::string config;
  SettingFlags flags;
};

int CmdFuse(const FuseArgs& args, std::ostream& out) {
  const RunConfig config = BuildConfig(args.config, args.flags);
  if (args.views.empty() == args.stacked.empty()) {
    throw ValidationError("give exactly one of --views or --stacked");
  }

  std::vector<ViewFeatureBlock> blocks;
  std::string view_count;
  if (!args.views.empty()) {
    for (const auto& path : args.views) {
      blocks.push_back(
          ViewFeatureBlock{fs::path(path).stem().string(), ReadMatrixFile(path)});
    }
    std::size_t m = blocks.front().features.rows();
    for (const auto& b : blocks) {
      if (b.features.rows() != m) m = 0;
    }
    view_count = m == 0 ? "mixed" : std::to_string(m);
  } else {
    const EmbeddingMatrix stacked = ReadMatrixFile(args.stacked);
    std::size_t m = args.views_per_object;
    std::vector<std::string> ids;
    const fs::path side = args.stacked + ".manifest";
    if (fs::exists(side)) {
      const Manifest manifest = ReadManifestFile(side);
      if (m == 0) {
        if (auto v = manifest.Get("view_count")) {
          m = static_cast<std::size_t>(std::stoull(*v));
        }
      }
    }
    if (m == 0) {
      throw ValidationError("views per object unknown: pass --views-per-object "
                            "or provide view_count in " + side.string());
    }
    if (!args.object_ids.empty()) {
      ids = ReadLabelsFile(args.object_ids, stacked.rows() / m);
    }
    blocks = SplitViewBlocks(stacked, m, ids);
    view_count = std::to_string(m);
  }
  if (!args.object_ids.empty() && !args.views.empty()) {
    const auto ids = ReadLabelsFile(args.object_ids, blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].object_id = ids[i];
  }

  std::optional<EmbeddingMatrix> text;
  if (!args.text.empty()) text = ReadMatrixFile(args.text);

  const EmbeddingMatrix descriptors =
      BuildDescriptorSet(blocks, text, config.fusion);
  EnsureParent(args.output);
  WriteMatrixFile(descriptors, args.output);

  Manifest manifest;
  manifest.Set("tool", "fuse");
  manifest.Set("objects", std::to_string(blocks.size()));
  manifest.Set("view_count", view_count);
  manifest.Set("text", text ? "present" : "absent");
  RecordFusion(manifest, config.fusion);
  manifest.Set("output_dim", std::to_string(descriptors.dim()));
  std::string order;
  for (const auto& b : blocks) {
    if (!order.empty()) order += ',';
    order += b.object_id;
  }
  manifest.Set("object_order", order);
  manifest.Set("created", CreationTimestamp());
  WriteManifestFile(manifest, args.manifest.empty() ? args.output + ".manifest"
                                                    : args.manifest);

  out << "descriptors rows=" << descriptors.rows()
      << " dim=" << descriptors.dim() << " -> " << args.output << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- align

struct AlignArgs {
  std::string query;
  std::string target;
  std::string output;
  std::string log;
  std::string config;
  SettingFlags flags;
};

int CmdAlign(const AlignArgs& args, std::ostream& out) {
  const RunConfig config = BuildConfig(args.config, args.flags);
  const EmbeddingMatrix query = ReadMatrixFile(args.query);
  const EmbeddingMatrix target = ReadMatrixFile(args.target);
  if (query.dim() != target.dim()) {
    throw ValidationError("query dim " + std::to_string(query.dim()) +
                          " does not match target dim " +
                          std::to_string(target.dim()));
  }

  const fs::path log_path =
      args.log.empty() ? fs::path(args.output + ".log.csv") : fs::path(args.log);
  auto log = OpenText(log_path);
  WriteRunLogHeader(log);
  const AlignResult result = Align(query.ToDouble(), target.ToDouble(),
                                   config.alignment, RunLogObserver(log));
  log.close();
  if (!log) throw IoError("write failed for '" + log_path.string() + "'");

  EnsureParent(args.output);
  WriteMatrixFile(EmbeddingMatrix::FromDouble(result.q_bar), args.output);

  Manifest manifest;
  manifest.Set("tool", "align");
  RecordAlignment(manifest, config.alignment);
  manifest.Set("queries", std::to_string(query.rows()));
  manifest.Set("targets", std::to_string(target.rows()));
  manifest.Set("hardened_rows", std::to_string(result.hardened_rows));
  manifest.Set("halvings", std::to_string(result.halvings));
  manifest.Set("final_eta", FormatG17(result.final_eta));
  manifest.Set("created", CreationTimestamp());
  WriteManifestFile(manifest, args.output + ".manifest");

  out << "aligned " << query.rows() << " queries against " << target.rows()
      << " targets: iterations=" << config.alignment.iterations
      << " hardened=" << result.hardened_rows << " halvings=" << result.halvings
      << " final_eta=" << FormatG17(result.final_eta) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string query;
  std::string target;
  std::string query_labels;
  std::string target_labels;
  std::string metrics_json = "metrics.json";
  std::string pr_csv = "pr_curve.csv";
};

int CmdEval(const EvalArgs& args, std::ostream& out) {
  const EmbeddingMatrix query = ReadMatrixFile(args.query);
  const EmbeddingMatrix target = ReadMatrixFile(args.target);
  const auto query_labels = ReadLabelsFile(args.query_labels, query.rows());
  const auto target_labels = ReadLabelsFile(args.target_labels, target.rows());
  const MetricsReport report = Evaluate(query.ToDouble(), target.ToDouble(),
                                        query_labels, target_labels);
  WriteMetrics(report, args.metrics_json, args.pr_csv);
  out << MetricsLine(report) << "\n";
  if (!report.skipped.empty()) {
    out << "skipped " << report.skipped.size()
        << " queries without relevant targets\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string out_dir = ".";
  std::string config;
  SettingFlags flags;
};

void WriteGapInstance(const GapInstance& inst, const GapSpec& spec,
                      const fs::path& dir) {
  fs::create_directories(dir);
  WriteMatrixFile(inst.query.embeddings, dir / "query.temb");
  WriteMatrixFile(inst.target.embeddings, dir / "target.temb");
  WriteLabelsFile(inst.query.labels, dir / "query_labels.txt");
  WriteLabelsFile(inst.target.labels, dir / "target_labels.txt");
  Manifest manifest = spec.ToManifest();
  manifest.Set("created", CreationTimestamp());
  WriteManifestFile(manifest, dir / "manifest.txt");
}

int CmdSynth(const SynthArgs& args, std::ostream& out) {
  const RunConfig config = BuildConfig(args.config, args.flags);
  const GapInstance inst = Generate(config.gap);
  WriteGapInstance(inst, config.gap, args.out_dir);
  out << "synthetic instance seed=" << config.gap.seed
      << " queries=" << inst.query.embeddings.rows()
      << " targets=" << inst.target.embeddings.rows()
      << " dim=" << config.gap.dim << " -> " << args.out_dir << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- pipeline

struct PipelineArgs {
  std::string config;
  std::string out_dir;
  bool no_align = false;
  SettingFlags flags;
};

int CmdPipeline(const PipelineArgs& args, std::ostream& out) {
  RunConfig config = BuildConfig(args.config, args.flags);
  fs::path dir = "driftalign_run";
  if (auto it = config.paths.find("out_dir"); it != config.paths.end()) {
    dir = it->second;
  }
  if (!args.out_dir.empty()) dir = args.out_dir;
  fs::create_directories(dir);

  std::optional<LabeledSet> query;
  std::optional<LabeledSet> target;
  const bool load = config.paths.count("query") > 0;
  if (load) {
    for (const char* key : {"target", "query_labels", "target_labels"}) {
      if (config.paths.count(key) == 0) {
        throw ValidationError(std::string("config sets query but not ") + key);
      }
    }
    EmbeddingMatrix q = ReadMatrixFile(config.paths.at("query"));
    EmbeddingMatrix t = ReadMatrixFile(config.paths.at("target"));
    auto ql = ReadLabelsFile(config.paths.at("query_labels"), q.rows());
    auto tl = ReadLabelsFile(config.paths.at("target_labels"), t.rows());
    query.emplace(LabeledSet{std::move(q), std::move(ql)});
    target.emplace(LabeledSet{std::move(t), std::move(tl)});
  } else {
    GapInstance inst = Generate(config.gap);
    WriteGapInstance(inst, config.gap, dir);
    query.emplace(std::move(inst.query));
    target.emplace(std::move(inst.target));
  }
  if (query->embeddings.dim() != target->embeddings.dim()) {
    throw ValidationError("query dim " + std::to_string(query->embeddings.dim()) +
                          " does not match target dim " +
                          std::to_string(target->embeddings.dim()));
  }

  const Eigen::MatrixXd q = query->embeddings.ToDouble();
  const Eigen::MatrixXd x = target->embeddings.ToDouble();
  const MetricsReport before = Evaluate(q, x, query->labels, target->labels);
  WriteMetrics(before, dir / "metrics_before.json", dir / "pr_before.csv");

  EmbeddingMatrix aligned = query->embeddings;
  if (!args.no_align) {
    auto log = OpenText(dir / "align_log.csv");
    WriteRunLogHeader(log);
    const AlignResult result =
        Align(q, x, config.alignment, RunLogObserver(log));
    aligned = EmbeddingMatrix::FromDouble(result.q_bar);
  }
  WriteMatrixFile(aligned, dir / "aligned_query.temb");

  const MetricsReport after =
      Evaluate(aligned.ToDouble(), x, query->labels, target->labels);
  WriteMetrics(after, dir / "metrics_after.json", dir / "pr_after.csv");

  Manifest manifest;
  manifest.Set("tool", "pipeline");
  manifest.Set("source", load ? "files" : "synthetic_gap");
  manifest.Set("aligned", args.no_align ? "false" : "true");
  RecordAlignment(manifest, config.alignment);
  manifest.Set("created", CreationTimestamp());
  WriteManifestFile(manifest, dir / "run_manifest.txt");

  const auto row = [](const char* name, const MetricsReport& r) {
    return std::string(name) + "  " + FormatFixed(100.0 * r.map, 2) + "  " +
           FormatFixed(100.0 * r.ndcg, 2) + "  " +
           FormatFixed(100.0 * r.anmrr, 2) + "\n";
  };
  out << "stage   mAP  NDCG  ANMRR\n";
  out << row("before", before) << row("after ", after);
  const double delta = 100.0 * (after.map - before.map);
  out << "mAP delta " << (delta >= 0 ? "+" : "") << FormatFixed(delta, 2)
      << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- inspect

int CmdInspect(const std::string& path, std::ostream& out) {
  const EmbeddingMatrix m = ReadMatrixFile(path);
  double min_norm = std::numeric_limits<double>::infinity();
  double max_norm = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double s = 0.0;
    for (const float v : m.row(r)) s += static_cast<double>(v) * v;
    const double n = std::sqrt(s);
    min_norm = std::min(min_norm, n);
    max_norm = std::max(max_norm, n);
  }
  out << "file " << path << "\n"
      << "format TEDAEMB v1\n"
      << "rows " << m.rows() << "\n"
      << "dim " << m.dim() << "\n"
      << "bytes " << kEmbeddingHeaderBytes + 4 * m.rows() * m.dim() << "\n"
      << "row_norm_min " << FormatG17(min_norm) << "\n"
      << "row_norm_max " << FormatG17(max_norm) << "\n";
  return kExitOk;
}

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo:
      return kExitIo;
    case ErrorKind::kDegenerate:
      return kExitDegenerate;
    default:
      return kExitValidation;
  }
}

}  // namespace

int RunCli(std::span<const std::string> args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Test-time distribution alignment for embedding retrieval",
               "driftalign"};
  app.require_subcommand(1);

  FuseArgs fuse;
  auto* fuse_cmd =
      app.add_subcommand("fuse", "Build object descriptors from view features");
  fuse_cmd->add_option("--views", fuse.views,
                       "Per-object view embedding files (M x d each)");
  fuse_cmd->add_option("--stacked", fuse.stacked,
                       "Single (objects*M) x d view embedding file");
  fuse_cmd->add_option("--views-per-object", fuse.views_per_object,
                       "M for --stacked (else read from <stacked>.manifest)");
  fuse_cmd->add_option("--object-ids", fuse.object_ids,
                       "Object id file, one per line");
  fuse_cmd->add_option("--text", fuse.text, "Caption embedding file (objects x d)");
  fuse_cmd->add_option("-o,--output", fuse.output, "Descriptor file")->required();
  fuse_cmd->add_option("--manifest", fuse.manifest,
                       "Manifest path (default <output>.manifest)");
  fuse_cmd->add_option("--config", fuse.config, "key=value config file");
  fuse.flags.AddFusion(fuse_cmd);

  AlignArgs align;
  auto* align_cmd = app.add_subcommand("align", "Align query embeddings to targets");
  align_cmd->add_option("--query", align.query, "Query embedding file")->required();
  align_cmd->add_option("--target", align.target, "Target embedding file")->required();
  align_cmd->add_option("-o,--output", align.output, "Aligned query file")->required();
  align_cmd->add_option("--log", align.log,
                        "Per-iteration CSV log (default <output>.log.csv)");
  align_cmd->add_option("--config", align.config, "key=value config file");
  align.flags.AddAlignment(align_cmd);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate retrieval metrics");
  eval_cmd->add_option("--query", eval.query, "Query embedding file")->required();
  eval_cmd->add_option("--target", eval.target, "Target embedding file")->required();
  eval_cmd->add_option("--query-labels", eval.query_labels, "Query label file")
      ->required();
  eval_cmd->add_option("--target-labels", eval.target_labels, "Target label file")
      ->required();
  eval_cmd->add_option("--metrics-json", eval.metrics_json, "Metrics JSON output")
      ->capture_default_str();
  eval_cmd->add_option("--pr-csv", eval.pr_csv, "Precision-recall CSV output")
      ->capture_default_str();

  SynthArgs synth;
  auto* synth_cmd =
      app.add_subcommand("synth", "Generate a synthetic distribution-gap instance");
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")
      ->capture_default_str();
  synth_cmd->add_option("--config", synth.config, "key=value config file");
  synth.flags.AddGap(synth_cmd);

  PipelineArgs pipeline;
  auto* pipeline_cmd = app.add_subcommand(
      "pipeline", "Synthesize or load, align, and compare metrics before/after");
  pipeline_cmd->add_option("--config", pipeline.config, "key=value config file");
  pipeline_cmd->add_option("--out-dir", pipeline.out_dir,
                           "Output directory (default driftalign_run)");
  pipeline_cmd->add_flag("--no-align", pipeline.no_align,
                         "Skip alignment; after == before");
  pipeline.flags.AddAlignment(pipeline_cmd);
  pipeline.flags.AddGap(pipeline_cmd);

  std::string inspect_path;
  auto* inspect_cmd =
      app.add_subcommand("inspect", "Print the header and shape of an embedding file");
  inspect_cmd->add_option("file", inspect_path, "Embedding file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error[usage] " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (*fuse_cmd) return CmdFuse(fuse, out);
    if (*align_cmd) return CmdAlign(align, out);
    if (*eval_cmd) return CmdEval(eval, out);
    if (*synth_cmd) return CmdSynth(synth, out);
    if (*pipeline_cmd) return CmdPipeline(pipeline, out);
    if (*inspect_cmd) return CmdInspect(inspect_path, out);
  } catch (const Error& e) {
    err << "error[" << ErrorKindName(e.kind()) << "] " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error[io] " << e.what() << "\n";
    return kExitIo;
  }
  return kExitValidation;
}

}  // namespace driftalign::cli

// Command-line front end: synth / prepare / train / report.
//
// Exit codes (one per error family):
//   0 success                5 dataset ingestion errors
//   2 usage / bad arguments  6 preprocessing errors
//   3 configuration errors   7 model / weight errors
//   4 filesystem errors      8 training errors
//                            9 reporting / parse errors

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "signbench/signbench.hpp"

namespace fs = std::filesystem;
using namespace signbench;

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
      return 3;
    case ErrorCode::IoError:
      return 4;
    case ErrorCode::DuplicateClass:
    case ErrorCode::ClassCountMismatch:
    case ErrorCode::EmptyClass:
    case ErrorCode::EmptyDataset:
    case ErrorCode::ImageDecodeError:
      return 5;
    case ErrorCode::InfeasibleUnderSampling:
    case ErrorCode::InfeasibleOverSampling:
    case ErrorCode::StratificationError:
    case ErrorCode::ChannelPolicyError:
      return 6;
    case ErrorCode::WeightLoadError:
    case ErrorCode::FreezePolicyError:
    case ErrorCode::InputShapeError:
    case ErrorCode::ShapeError:
      return 7;
    case ErrorCode::EmptySplit:
    case ErrorCode::DivergenceError:
    case ErrorCode::LabelRangeError:
      return 8;
    case ErrorCode::LengthMismatch:
    case ErrorCode::DatasetKeyError:
    case ErrorCode::ParseError:
      return 9;
  }
  return 1;
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;  // key.path=json_value
};

// Applies --set key.path=value patches onto the raw config JSON before the
// strict parse, so any config key can be overridden from the command line.
void apply_overrides(nlohmann::json& j, const std::vector<std::string>& overrides) {
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      raise(ErrorCode::ConfigError, "--set expects key.path=value, got '" + item + "'");
    }
    std::string pointer = "/" + item.substr(0, eq);
    for (auto& ch : pointer) {
      if (ch == '.') ch = '/';
    }
    const std::string raw_value = item.substr(eq + 1);
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(raw_value);
    } catch (const nlohmann::json::exception&) {
      value = raw_value;  // plain string
    }
    try {
      j[nlohmann::json::json_pointer(pointer)] = value;
    } catch (const nlohmann::json::exception& e) {
      raise(ErrorCode::ConfigError, "cannot apply override '" + item + "': " + e.what());
    }
  }
}

ExperimentConfig resolve_config(const CommonArgs& args, bool config_required) {
  nlohmann::json j;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) raise(ErrorCode::IoError, "cannot open config " + args.config_path);
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      raise(ErrorCode::ConfigError, args.config_path + ": " + e.what());
    }
  } else if (config_required) {
    raise(ErrorCode::ConfigError, "this command needs --config");
  } else {
    j = nlohmann::json::object();
  }
  apply_overrides(j, args.overrides);
  if (args.seed) j["seed"] = *args.seed;
  if (!args.out_dir.empty()) j["output_dir"] = args.out_dir;
  if (!j.contains("dataset")) {
    j["dataset"] = {{"kind", "SYNTHETIC"}};
  }
  return experiment_config_from_json(j);
}

void print_class_counts(const DatasetManifest& manifest, const char* heading) {
  std::printf("%s (%zu samples, %d classes):\n", heading, manifest.size(),
              manifest.label_map.num_classes());
  for (int c = 0; c < manifest.label_map.num_classes(); ++c) {
    std::printf("  %-24s %zu\n", manifest.label_map.name_of(c).c_str(),
                manifest.class_counts[static_cast<std::size_t>(c)]);
  }
}

// --- synth ------------------------------------------------------------------

int cmd_synth(const CommonArgs& common, int classes, std::vector<std::size_t> per_class,
              std::size_t image_size) {
  ExperimentConfig cfg = resolve_config(common, false);

  SyntheticSpec spec;
  if (cfg.synthetic) spec = *cfg.synthetic;
  if (classes > 0) spec.num_classes = classes;
  if (image_size > 0) spec.image_size = image_size;
  if (!per_class.empty()) {
    if (per_class.size() == 1) {
      spec.per_class_counts.assign(static_cast<std::size_t>(spec.num_classes), per_class[0]);
    } else {
      spec.per_class_counts = per_class;
    }
  } else if (spec.per_class_counts.empty()) {
    spec.per_class_counts.assign(static_cast<std::size_t>(spec.num_classes), 50);
  }
  if (spec.per_class_counts.size() != static_cast<std::size_t>(spec.num_classes)) {
    raise(ErrorCode::ConfigError, "--per-class needs 1 value or one per class");
  }
  spec.seed = cfg.seed;

  // for synth, --out names the dataset directory itself
  fs::path out = !common.out_dir.empty() ? fs::path(common.out_dir) : fs::path(cfg.dataset_root);
  if (out.empty()) raise(ErrorCode::ConfigError, "synth needs --out or dataset.root");

  const DatasetManifest manifest = generate_synthetic_dataset(out, spec);
  print_class_counts(manifest, "generated");
  std::printf("checksum: %s\n", manifest.checksum.c_str());
  return 0;
}

// --- prepare ----------------------------------------------------------------

int cmd_prepare(const CommonArgs& common) {
  ExperimentConfig cfg = resolve_config(common, true);
  if (cfg.dataset_root.empty()) raise(ErrorCode::ConfigError, "config needs dataset.root");

  const DatasetManifest manifest = scan_dataset(cfg.dataset_root, cfg.dataset_kind);
  print_class_counts(manifest, "before balancing");
  if (!manifest.skipped.empty()) {
    std::printf("skipped %zu undecodable file(s):\n", manifest.skipped.size());
    for (const auto& path : manifest.skipped) std::printf("  %s\n", path.c_str());
  }

  const DatasetManifest balanced =
      balance_classes(manifest, cfg.preprocess.balance_strategy, cfg.preprocess.target_count,
                      cfg.balance_seed());
  print_class_counts(balanced, "after balancing");

  const SplitAssignment split =
      split_dataset(balanced, cfg.preprocess.split_ratios, cfg.split_seed());
  std::printf("split sizes: train=%zu val=%zu test=%zu\n", split.train.size(), split.val.size(),
              split.test.size());

  const fs::path out(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) raise(ErrorCode::IoError, "cannot create " + out.string());
  write_manifest(manifest, out / "manifest.json");
  write_manifest(balanced, out / "balanced_manifest.json");
  write_split(split, balanced, out / "splits.json");
  std::printf("wrote %s, %s, %s\n", (out / "manifest.json").c_str(),
              (out / "balanced_manifest.json").c_str(), (out / "splits.json").c_str());
  return 0;
}

// --- train ------------------------------------------------------------------

int cmd_train(const CommonArgs& common, bool lazy) {
  ExperimentConfig cfg = resolve_config(common, true);
  const fs::path out(cfg.output_dir);
  if (!fs::exists(out / "balanced_manifest.json") || !fs::exists(out / "splits.json")) {
    raise(ErrorCode::IoError,
          "no prepared splits under " + out.string() + "; run `signbench prepare` first");
  }
  const DatasetManifest manifest = read_manifest(out / "balanced_manifest.json");
  const SplitAssignment split = read_split(out / "splits.json", manifest);

  ModelAdapter<float> model =
      create_model<float>(cfg.backbone, manifest.label_map.num_classes(), cfg.freeze_policy,
                          cfg.model_seed(), cfg.weights_source, cfg.head_hidden);
  const FreezeReport freeze = model.freeze_report();
  std::printf("model %s: %zu parameters (%zu trainable, %zu frozen)\n",
              backbone_display_name(model.backbone_id()), freeze.total_params,
              freeze.trainable_params, freeze.frozen_params);

  TrainConfig train_cfg = cfg.train;
  train_cfg.seed = cfg.shuffle_seed();

  RunRecord record;
  const std::string kind_name = dataset_kind_name(cfg.dataset_kind);
  if (lazy) {
    LazySampleSource<float> tr(manifest, split.train, cfg.preprocess);
    LazySampleSource<float> va(manifest, split.val, cfg.preprocess);
    LazySampleSource<float> te(manifest, split.test, cfg.preprocess);
    record = train(model, tr, va, te, train_cfg, kind_name, out / "checkpoints");
  } else {
    EagerSampleSource<float> tr(manifest, split.train, cfg.preprocess);
    EagerSampleSource<float> va(manifest, split.val, cfg.preprocess);
    EagerSampleSource<float> te(manifest, split.test, cfg.preprocess);
    record = train(model, tr, va, te, train_cfg, kind_name, out / "checkpoints");
  }

  const fs::path run_path = out / run_record_file_name(record);
  write_run_record(record, run_path);
  std::printf("epochs trained: %zu%s (best epoch %zu)\n", record.history.size(),
              record.stopped_early ? " [early stop]" : "", record.best_epoch);
  std::printf("final accuracy: train=%s val=%s test=%s\n",
              format_pct(record.final_train_acc).c_str(), format_pct(record.final_val_acc).c_str(),
              format_pct(record.final_test_acc).c_str());
  std::printf("training time: %s minutes\n", format_minutes(record.total_train_time_s).c_str());
  std::printf("wrote %s\n", run_path.c_str());
  return 0;
}

// --- report -----------------------------------------------------------------

int cmd_report(const CommonArgs& common, const std::vector<std::string>& run_files,
               const std::string& baselines_path) {
  ExperimentConfig cfg = resolve_config(common, false);
  const fs::path out(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) raise(ErrorCode::IoError, "cannot create " + out.string());

  std::vector<RunRecord> runs;
  for (const auto& file : run_files) runs.push_back(read_run_record(file));

  const TableDocument results = emit_results_table(runs);
  write_table_document(results, out, "results");
  std::printf("%s", results.markdown.c_str());

  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string stem = fs::path(run_files[i]).stem().string();
    emit_accuracy_curves(runs[i], out, stem);
  }

  if (!baselines_path.empty()) {
    const auto baselines = load_baselines(baselines_path);
    const TableDocument comparison = compare_with_baselines(runs, baselines);
    write_table_document(comparison, out, "comparison");
    std::printf("\n%s", comparison.markdown.c_str());
  }
  std::printf("wrote tables and curves under %s\n", out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sign-image classification benchmark harness"};
  app.require_subcommand(1);

  CommonArgs common;
  int classes = 0;
  std::vector<std::size_t> per_class;
  std::size_t image_size = 0;
  bool lazy = false;
  std::vector<std::string> run_files;
  std::string baselines_path;

  auto add_common = [&common](CLI::App* cmd) {
    cmd->add_option("--config", common.config_path, "experiment config file (JSON)");
    cmd->add_option("--out", common.out_dir, "output directory (overrides output_dir)");
    cmd->add_option("--seed", common.seed, "global seed (overrides config)");
    cmd->add_option("--set", common.overrides,
                    "override any config key, e.g. --set train.max_epochs=5");
  };

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic glyph dataset");
  add_common(synth);
  synth->add_option("--classes", classes, "number of classes");
  synth->add_option("--per-class", per_class, "images per class (1 value or one per class)");
  synth->add_option("--size", image_size, "square image size in pixels");

  CLI::App* prepare = app.add_subcommand("prepare", "scan, balance and split a dataset");
  add_common(prepare);

  CLI::App* train_cmd = app.add_subcommand("train", "run the fine-tuning protocol");
  add_common(train_cmd);
  train_cmd->add_flag("--lazy", lazy, "re-decode images per batch instead of caching");

  CLI::App* report = app.add_subcommand("report", "emit result tables and accuracy curves");
  add_common(report);
  report->add_option("runs", run_files, "run record JSON files")->required();
  report->add_option("--baselines", baselines_path, "published-baselines JSON file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(common, classes, per_class, image_size);
    if (prepare->parsed()) return cmd_prepare(common);
    if (train_cmd->parsed()) return cmd_train(common, lazy);
    if (report->parsed()) return cmd_report(common, run_files, baselines_path);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}

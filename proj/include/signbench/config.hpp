#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "signbench/error.hpp"
#include "signbench/label_map.hpp"
#include "signbench/model.hpp"
#include "signbench/preprocess.hpp"
#include "signbench/rng.hpp"
#include "signbench/synthetic.hpp"
#include "signbench/trainer.hpp"

namespace signbench {

// Experiment file: strict JSON. Any key the schema does not name aborts the
// parse, so a typo cannot silently fall back to a default hyperparameter.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  DatasetKind dataset_kind = DatasetKind::SYNTHETIC;
  std::string dataset_root;
  std::optional<SyntheticSpec> synthetic;

  PreprocessConfig preprocess;

  BackboneId backbone = BackboneId::TINY_CNN;
  FreezePolicy freeze_policy;
  std::string weights_source;
  std::size_t head_hidden = 0;

  TrainConfig train;

  // per-stage seeds derived from the global seed by fixed offsets
  std::uint64_t balance_seed() const { return seed + seed_offset::kBalance; }
  std::uint64_t split_seed() const { return seed + seed_offset::kSplit; }
  std::uint64_t model_seed() const { return seed + seed_offset::kModelInit; }
  std::uint64_t shuffle_seed() const { return seed + seed_offset::kShuffle; }
};

namespace config_detail {

inline void check_keys(const nlohmann::json& j, const std::string& path,
                       const std::set<std::string>& allowed) {
  if (!j.is_object()) raise(ErrorCode::ConfigError, path + " must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (allowed.count(key) == 0) {
      raise(ErrorCode::ConfigError, "unknown config key '" + path + key + "'");
    }
  }
}

}  // namespace config_detail

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  using config_detail::check_keys;
  ExperimentConfig cfg;
  try {
    check_keys(j, "", {"seed", "output_dir", "dataset", "preprocess", "model", "train"});
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.output_dir = j.value("output_dir", std::string("out"));

    if (!j.contains("dataset")) raise(ErrorCode::ConfigError, "config needs a 'dataset' section");
    const auto& d = j.at("dataset");
    check_keys(d, "dataset.", {"kind", "root", "synthetic"});
    cfg.dataset_kind = dataset_kind_from_name(d.at("kind").get<std::string>());
    cfg.dataset_root = d.value("root", std::string());
    if (d.contains("synthetic")) {
      const auto& s = d.at("synthetic");
      check_keys(s, "dataset.synthetic.", {"classes", "per_class", "image_size"});
      SyntheticSpec spec;
      spec.num_classes = s.at("classes").get<int>();
      if (s.at("per_class").is_array()) {
        spec.per_class_counts = s.at("per_class").get<std::vector<std::size_t>>();
      } else {
        spec.per_class_counts.assign(static_cast<std::size_t>(spec.num_classes),
                                     s.at("per_class").get<std::size_t>());
      }
      spec.image_size = s.value("image_size", std::size_t{64});
      spec.seed = cfg.seed;
      cfg.synthetic = std::move(spec);
    }

    if (j.contains("preprocess")) {
      const auto& p = j.at("preprocess");
      check_keys(p, "preprocess.",
                 {"balance_strategy", "target_count", "image_size", "channel_policy",
                  "split_ratios"});
      if (p.contains("balance_strategy")) {
        cfg.preprocess.balance_strategy =
            balance_strategy_from_name(p.at("balance_strategy").get<std::string>());
      }
      if (p.contains("target_count") && !p.at("target_count").is_null()) {
        cfg.preprocess.target_count = p.at("target_count").get<std::size_t>();
      }
      if (p.contains("image_size")) {
        const auto& size = p.at("image_size");
        if (!size.is_array() || size.size() != 2) {
          raise(ErrorCode::ConfigError, "preprocess.image_size must be [height, width]");
        }
        cfg.preprocess.image_height = size[0].get<std::size_t>();
        cfg.preprocess.image_width = size[1].get<std::size_t>();
      }
      if (p.contains("channel_policy") &&
          p.at("channel_policy").get<std::string>() != "REPLICATE_GRAY_TO_3") {
        raise(ErrorCode::ConfigError, "unknown channel policy");
      }
      if (p.contains("split_ratios")) {
        const auto& r = p.at("split_ratios");
        check_keys(r, "preprocess.split_ratios.", {"train", "val", "test"});
        cfg.preprocess.split_ratios.train = r.at("train").get<double>();
        cfg.preprocess.split_ratios.val = r.at("val").get<double>();
        cfg.preprocess.split_ratios.test = r.at("test").get<double>();
      }
    }
    cfg.preprocess.seed = cfg.balance_seed();

    if (j.contains("model")) {
      const auto& m = j.at("model");
      check_keys(m, "model.", {"backbone", "unfreeze_depth", "weights", "head_hidden"});
      if (m.contains("backbone")) {
        cfg.backbone = backbone_from_name(m.at("backbone").get<std::string>());
      }
      cfg.freeze_policy.unfreeze_depth = m.value("unfreeze_depth", std::size_t{1});
      cfg.weights_source = m.value("weights", std::string());
      cfg.head_hidden = m.value("head_hidden", std::size_t{0});
    }

    if (j.contains("train")) {
      const auto& t = j.at("train");
      check_keys(t, "train.",
                 {"batch_size", "base_lr", "lr_gamma", "lr_step_epochs", "early_stop_patience",
                  "max_epochs"});
      cfg.train.batch_size = t.value("batch_size", std::size_t{32});
      cfg.train.base_lr = t.value("base_lr", 0.001);
      cfg.train.lr_gamma = t.value("lr_gamma", 0.1);
      cfg.train.lr_step_epochs = t.value("lr_step_epochs", std::size_t{10});
      cfg.train.early_stop_patience = t.value("early_stop_patience", std::size_t{5});
      cfg.train.max_epochs = t.value("max_epochs", std::size_t{50});
    }
    cfg.train.seed = cfg.shuffle_seed();

    cfg.preprocess.validate();
    cfg.train.validate();
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::ConfigError, std::string("bad config value: ") + e.what());
  }
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  return experiment_config_from_json(j);
}

}  // namespace signbench

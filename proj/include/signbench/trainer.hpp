#pragma once

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "signbench/adam.hpp"
#include "signbench/data_source.hpp"
#include "signbench/error.hpp"
#include "signbench/loss.hpp"
#include "signbench/metrics.hpp"
#include "signbench/model.hpp"
#include "signbench/rng.hpp"
#include "signbench/schedule.hpp"

namespace signbench {

struct TrainConfig {
  std::size_t batch_size = 32;
  double base_lr = 0.001;
  double lr_gamma = 0.1;
  std::size_t lr_step_epochs = 10;
  std::size_t early_stop_patience = 5;
  std::size_t max_epochs = 50;
  std::uint64_t seed = 0;

  void validate() const {
    if (batch_size < 1) raise(ErrorCode::ConfigError, "batch_size must be >= 1");
    if (lr_gamma <= 0.0 || lr_gamma >= 1.0) raise(ErrorCode::ConfigError, "lr_gamma must be in (0,1)");
    if (lr_step_epochs < 1) raise(ErrorCode::ConfigError, "lr_step_epochs must be >= 1");
    if (early_stop_patience < 1) raise(ErrorCode::ConfigError, "early_stop_patience must be >= 1");
    if (max_epochs < 1) raise(ErrorCode::ConfigError, "max_epochs must be >= 1");
  }
};

struct EpochRecord {
  std::size_t epoch = 0;  // 0-based
  double lr = 0.0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_acc = 0.0;
  double duration_s = 0.0;
};

struct RunRecord {
  std::string backbone_id;
  std::string model_name;
  std::string dataset_kind;
  int num_classes = 0;
  std::size_t unfreeze_depth = 0;
  TrainConfig config;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  bool stopped_early = false;
  double final_train_acc = 0.0;       // best-epoch weights
  double final_train_acc_last = 0.0;  // last trained epoch, for comparison
  double final_val_acc = 0.0;
  double final_test_acc = 0.0;
  double total_train_time_s = 0.0;
};

namespace trainer_detail {

template <typename T>
Tensor<T> assemble_batch(const SampleSource<T>& source, const std::vector<std::size_t>& order,
                         std::size_t begin, std::size_t end, std::size_t height,
                         std::size_t width, std::vector<int>& labels_out) {
  Tensor<T> batch({end - begin, 3, height, width});
  labels_out.clear();
  const std::size_t stride = source.values_per_sample();
  for (std::size_t i = begin; i < end; ++i) {
    source.fetch(order[i], batch.data() + (i - begin) * stride);
    labels_out.push_back(source.label(order[i]));
  }
  return batch;
}

// Full-pass accuracy in inference mode.
template <typename T>
double evaluate_accuracy(ModelAdapter<T>& model, const SampleSource<T>& source,
                         std::size_t batch_size) {
  std::vector<std::size_t> order(source.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t correct = 0;
  std::vector<int> labels;
  for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
    const std::size_t end = std::min(order.size(), begin + batch_size);
    Tensor<T> batch = assemble_batch(source, order, begin, end, model.input_height(),
                                     model.input_width(), labels);
    const Tensor<T> logits = model.forward(batch, false);
    const std::vector<int> preds = predict_labels(logits);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      if (preds[i] == labels[i]) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(source.size());
}

}  // namespace trainer_detail

// Runs the full protocol: seeded shuffles, Adam on the trainable parameters
// with step-decayed learning rate, per-epoch train/val accuracy, early
// stopping on validation accuracy, best-epoch weight restore, then the final
// test evaluation. Set checkpoint_dir to also persist best/last weights.
template <typename T = float>
RunRecord train(ModelAdapter<T>& model, const SampleSource<T>& train_split,
                const SampleSource<T>& val_split, const SampleSource<T>& test_split,
                const TrainConfig& config, const std::string& dataset_kind = "SYNTHETIC",
                const std::filesystem::path& checkpoint_dir = {}) {
  config.validate();
  if (train_split.size() == 0) raise(ErrorCode::EmptySplit, "train split is empty");
  if (val_split.size() == 0) raise(ErrorCode::EmptySplit, "val split is empty");
  if (test_split.size() == 0) raise(ErrorCode::EmptySplit, "test split is empty");

  RunRecord record;
  record.backbone_id = backbone_name(model.backbone_id());
  record.model_name = backbone_display_name(model.backbone_id());
  record.dataset_kind = dataset_kind;
  record.num_classes = model.num_classes();
  record.unfreeze_depth = model.freeze_policy().unfreeze_depth;
  record.config = config;

  auto trainable = model.trainable_params();
  std::vector<AdamState<T>> opt_state(trainable.size());

  Rng shuffle_rng(config.seed);
  std::vector<std::size_t> order(train_split.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<double> val_history;
  double best_val = -1.0;
  std::vector<std::vector<T>> best_weights;

  const auto run_start = std::chrono::steady_clock::now();
  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    const auto epoch_start = std::chrono::steady_clock::now();
    const double lr = step_lr(epoch, config.base_lr, config.lr_gamma, config.lr_step_epochs);

    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    std::vector<int> labels;
    std::size_t batch_index = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      Tensor<T> batch = trainer_detail::assemble_batch(train_split, order, begin, end,
                                                       model.input_height(), model.input_width(),
                                                       labels);
      model.zero_grads();
      const Tensor<T> logits = model.forward(batch, true);
      auto [loss, logit_grad] = cross_entropy_with_grad(logits, labels);
      if (!std::isfinite(static_cast<double>(loss))) {
        raise(ErrorCode::DivergenceError, "non-finite loss at epoch " + std::to_string(epoch) +
                                              ", batch " + std::to_string(batch_index));
      }
      model.backward(logit_grad);
      for (std::size_t p = 0; p < trainable.size(); ++p) {
        adam_step(*trainable[p], opt_state[p], lr);
      }
      loss_sum += static_cast<double>(loss) * static_cast<double>(end - begin);
    }

    EpochRecord er;
    er.epoch = epoch;
    er.lr = lr;
    er.train_loss = loss_sum / static_cast<double>(order.size());
    er.train_acc = trainer_detail::evaluate_accuracy(model, train_split, config.batch_size);
    er.val_acc = trainer_detail::evaluate_accuracy(model, val_split, config.batch_size);
    er.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_start).count();
    record.history.push_back(er);
    val_history.push_back(er.val_acc);

    if (er.val_acc > best_val) {
      best_val = er.val_acc;
      record.best_epoch = epoch;
      best_weights = model.snapshot_weights();
      if (!checkpoint_dir.empty()) {
        save_checkpoint(model, checkpoint_dir / "best", static_cast<int>(epoch), er.val_acc);
      }
    }
    if (!checkpoint_dir.empty()) {
      save_checkpoint(model, checkpoint_dir / "last", static_cast<int>(epoch), er.val_acc);
    }

    if (early_stop_check(val_history, config.early_stop_patience)) {
      record.stopped_early = true;
      break;
    }
  }
  record.total_train_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start).count();

  record.final_train_acc_last = record.history.back().train_acc;
  model.restore_weights(best_weights);
  record.final_train_acc = trainer_detail::evaluate_accuracy(model, train_split, config.batch_size);
  record.final_val_acc = trainer_detail::evaluate_accuracy(model, val_split, config.batch_size);
  record.final_test_acc = trainer_detail::evaluate_accuracy(model, test_split, config.batch_size);
  return record;
}

// ---------------------------------------------------------------------------
// run record serialization

inline nlohmann::ordered_json run_record_to_json(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["model"] = {{"backbone_id", r.backbone_id},
                {"name", r.model_name},
                {"num_classes", r.num_classes},
                {"unfreeze_depth", r.unfreeze_depth}};
  j["dataset_kind"] = r.dataset_kind;
  j["config"] = {{"batch_size", r.config.batch_size},
                 {"base_lr", r.config.base_lr},
                 {"lr_gamma", r.config.lr_gamma},
                 {"lr_step_epochs", r.config.lr_step_epochs},
                 {"early_stop_patience", r.config.early_stop_patience},
                 {"max_epochs", r.config.max_epochs},
                 {"seed", r.config.seed}};
  nlohmann::ordered_json history = nlohmann::ordered_json::array();
  for (const auto& e : r.history) {
    history.push_back({{"epoch", e.epoch},
                       {"lr", e.lr},
                       {"train_loss", e.train_loss},
                       {"train_acc", e.train_acc},
                       {"val_acc", e.val_acc},
                       {"duration_s", e.duration_s}});
  }
  j["history"] = std::move(history);
  j["best_epoch"] = r.best_epoch;
  j["stopped_early"] = r.stopped_early;
  j["final"] = {{"train_acc", r.final_train_acc},
                {"train_acc_last_epoch", r.final_train_acc_last},
                {"val_acc", r.final_val_acc},
                {"test_acc", r.final_test_acc}};
  j["total_train_time_s"] = r.total_train_time_s;
  return j;
}

inline RunRecord run_record_from_json(const nlohmann::json& j) {
  try {
    RunRecord r;
    r.backbone_id = j.at("model").at("backbone_id").get<std::string>();
    r.model_name = j.at("model").at("name").get<std::string>();
    r.num_classes = j.at("model").at("num_classes").get<int>();
    r.unfreeze_depth = j.at("model").value("unfreeze_depth", std::size_t{0});
    r.dataset_kind = j.at("dataset_kind").get<std::string>();
    const auto& c = j.at("config");
    r.config.batch_size = c.at("batch_size").get<std::size_t>();
    r.config.base_lr = c.at("base_lr").get<double>();
    r.config.lr_gamma = c.at("lr_gamma").get<double>();
    r.config.lr_step_epochs = c.at("lr_step_epochs").get<std::size_t>();
    r.config.early_stop_patience = c.at("early_stop_patience").get<std::size_t>();
    r.config.max_epochs = c.at("max_epochs").get<std::size_t>();
    r.config.seed = c.at("seed").get<std::uint64_t>();
    for (const auto& e : j.at("history")) {
      EpochRecord er;
      er.epoch = e.at("epoch").get<std::size_t>();
      er.lr = e.at("lr").get<double>();
      er.train_loss = e.at("train_loss").get<double>();
      er.train_acc = e.at("train_acc").get<double>();
      er.val_acc = e.at("val_acc").get<double>();
      er.duration_s = e.at("duration_s").get<double>();
      r.history.push_back(er);
    }
    r.best_epoch = j.at("best_epoch").get<std::size_t>();
    r.stopped_early = j.at("stopped_early").get<bool>();
    r.final_train_acc = j.at("final").at("train_acc").get<double>();
    r.final_train_acc_last = j.at("final").value("train_acc_last_epoch", r.final_train_acc);
    r.final_val_acc = j.at("final").at("val_acc").get<double>();
    r.final_test_acc = j.at("final").at("test_acc").get<double>();
    r.total_train_time_s = j.at("total_train_time_s").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::ParseError, std::string("malformed run record: ") + e.what());
  }
}

inline std::string run_record_file_name(const RunRecord& r) {
  return "run_" + r.backbone_id + "_" + r.dataset_kind + "_" + std::to_string(r.config.seed) +
         ".json";
}

inline void write_run_record(const RunRecord& r, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) raise(ErrorCode::IoError, "cannot write " + path.string());
  out << run_record_to_json(r).dump(2) << "\n";
}

inline RunRecord read_run_record(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return run_record_from_json(j);
}

}  // namespace signbench

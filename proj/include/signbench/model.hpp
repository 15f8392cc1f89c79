#pragma once

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "signbench/error.hpp"
#include "signbench/nn.hpp"
#include "signbench/rng.hpp"
#include "signbench/tensor.hpp"

namespace signbench {

// The five published backbones load ImageNet-pretrained weights from an
// exported bundle (see load_backbone_bundle below); TINY_CNN is built in and
// needs no download, which is what keeps the test suite self-contained.
enum class BackboneId { RESNET50, MOBILENETV2, EFFICIENTNETB7, GOOGLE_VIT, MICROSOFT_SWIN, TINY_CNN };

inline const char* backbone_name(BackboneId id) {
  switch (id) {
    case BackboneId::RESNET50: return "RESNET50";
    case BackboneId::MOBILENETV2: return "MOBILENETV2";
    case BackboneId::EFFICIENTNETB7: return "EFFICIENTNETB7";
    case BackboneId::GOOGLE_VIT: return "GOOGLE_VIT";
    case BackboneId::MICROSOFT_SWIN: return "MICROSOFT_SWIN";
    case BackboneId::TINY_CNN: return "TINY_CNN";
  }
  return "?";
}

inline const char* backbone_display_name(BackboneId id) {
  switch (id) {
    case BackboneId::RESNET50: return "Resnet50";
    case BackboneId::MOBILENETV2: return "MobileNetV2";
    case BackboneId::EFFICIENTNETB7: return "EfficientNetB7";
    case BackboneId::GOOGLE_VIT: return "Google ViT";
    case BackboneId::MICROSOFT_SWIN: return "Microsoft Swin";
    case BackboneId::TINY_CNN: return "TinyCNN";
  }
  return "?";
}

inline BackboneId backbone_from_name(const std::string& name) {
  for (BackboneId id : {BackboneId::RESNET50, BackboneId::MOBILENETV2, BackboneId::EFFICIENTNETB7,
                        BackboneId::GOOGLE_VIT, BackboneId::MICROSOFT_SWIN, BackboneId::TINY_CNN}) {
    if (name == backbone_name(id)) return id;
  }
  raise(ErrorCode::ConfigError, "unknown backbone '" + name + "'");
}

// Number of trailing backbone blocks left trainable. The new classification
// head is always trainable regardless of depth.
struct FreezePolicy {
  std::size_t unfreeze_depth = 1;
};

struct FreezeReport {
  struct Group {
    std::string name;
    std::size_t params = 0;
    bool trainable = false;
  };
  std::size_t total_params = 0;
  std::size_t trainable_params = 0;
  std::size_t frozen_params = 0;
  std::vector<Group> groups;
};

// ---------------------------------------------------------------------------
// backbone bundle: arch.json + weights.bin (float32 LE, declaration order)

namespace bundle_detail {

template <typename T>
std::unique_ptr<nn::Layer<T>> layer_from_json(const nlohmann::json& spec);

template <typename T>
std::vector<std::unique_ptr<nn::Layer<T>>> layers_from_json(const nlohmann::json& list) {
  std::vector<std::unique_ptr<nn::Layer<T>>> out;
  for (const auto& spec : list) out.push_back(layer_from_json<T>(spec));
  return out;
}

template <typename T>
std::unique_ptr<nn::Layer<T>> layer_from_json(const nlohmann::json& spec) {
  const std::string type = spec.at("type").get<std::string>();
  if (type == "conv2d") {
    return std::make_unique<nn::Conv2d<T>>(
        spec.at("in").get<std::size_t>(), spec.at("out").get<std::size_t>(),
        spec.at("kernel").get<std::size_t>(), spec.value("stride", std::size_t{1}),
        spec.value("padding", std::size_t{0}), spec.value("groups", std::size_t{1}),
        spec.value("bias", true));
  }
  if (type == "scale_shift") {
    return std::make_unique<nn::ScaleShift<T>>(spec.at("channels").get<std::size_t>());
  }
  if (type == "relu") return std::make_unique<nn::ReLU<T>>();
  if (type == "relu6") return std::make_unique<nn::ReLU<T>>(T(6));
  if (type == "maxpool") {
    return std::make_unique<nn::MaxPool2d<T>>(spec.at("kernel").get<std::size_t>(),
                                              spec.at("stride").get<std::size_t>());
  }
  if (type == "global_avg_pool") return std::make_unique<nn::GlobalAvgPool<T>>();
  if (type == "flatten") return std::make_unique<nn::Flatten<T>>();
  if (type == "linear") {
    return std::make_unique<nn::Linear<T>>(spec.at("in").get<std::size_t>(),
                                           spec.at("out").get<std::size_t>());
  }
  if (type == "residual") {
    std::unique_ptr<nn::Layer<T>> projection;
    if (spec.contains("projection") && !spec["projection"].is_null()) {
      projection = layer_from_json<T>(spec["projection"]);
    }
    return std::make_unique<nn::Residual<T>>(layers_from_json<T>(spec.at("layers")),
                                             std::move(projection));
  }
  raise(ErrorCode::WeightLoadError, "bundle uses unsupported layer type '" + type +
                                        "'; re-export the backbone with supported ops");
}

template <typename T>
void read_weights_file(const std::filesystem::path& path,
                       const std::vector<nn::Parameter<T>*>& params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::WeightLoadError, "cannot open weight blob " + path.string());
  in.seekg(0, std::ios::end);
  const auto file_size = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  std::size_t expected = 0;
  for (const auto* p : params) expected += p->value.numel() * sizeof(float);
  if (file_size != expected) {
    raise(ErrorCode::WeightLoadError,
          path.string() + " holds " + std::to_string(file_size) + " bytes, expected " +
              std::to_string(expected) + "; the bundle is corrupt or mismatched");
  }
  std::vector<float> buf;
  for (auto* p : params) {
    buf.resize(p->value.numel());
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!in) raise(ErrorCode::WeightLoadError, "short read from " + path.string());
    for (std::size_t i = 0; i < buf.size(); ++i) p->value[i] = static_cast<T>(buf[i]);
  }
}

template <typename T>
void write_weights_file(const std::filesystem::path& path,
                        const std::vector<nn::Parameter<T>*>& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::IoError, "cannot write " + path.string());
  std::vector<float> buf;
  for (const auto* p : params) {
    buf.resize(p->value.numel());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(p->value[i]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
  }
  if (!out) raise(ErrorCode::IoError, "short write to " + path.string());
}

}  // namespace bundle_detail

// ---------------------------------------------------------------------------
// adapter: backbone + (pooling) + new head, with block-level freeze tags

template <typename T = float>
class ModelAdapter {
 public:
  ModelAdapter(BackboneId id, int num_classes, FreezePolicy policy, std::uint64_t seed,
               nn::Network<T> backbone, std::size_t input_h, std::size_t input_w,
               std::size_t head_hidden)
      : id_(id),
        num_classes_(num_classes),
        policy_(policy),
        seed_(seed),
        backbone_(std::move(backbone)),
        input_h_(input_h),
        input_w_(input_w) {
    if (num_classes_ < 2) raise(ErrorCode::ConfigError, "num_classes must be >= 2");
    if (policy_.unfreeze_depth > backbone_.block_count()) {
      raise(ErrorCode::FreezePolicyError,
            "unfreeze_depth " + std::to_string(policy_.unfreeze_depth) + " exceeds the " +
                std::to_string(backbone_.block_count()) + " backbone blocks");
    }

    // probe the backbone to find its feature dimensionality; rank-4 outputs
    // get a pooling stage before the head
    Tensor<T> probe({1, 3, input_h_, input_w_});
    Tensor<T> features = backbone_.forward(probe, false);
    if (features.rank() == 4) {
      pool_ = std::make_unique<nn::GlobalAvgPool<T>>();
      features = pool_->forward(features, false);
    }
    if (features.rank() != 2) {
      raise(ErrorCode::WeightLoadError, "backbone output has unsupported rank");
    }
    feature_dim_ = features.dim(1);

    Rng head_rng(seed_);
    auto& head = head_.add_block("head");
    if (head_hidden > 0) {
      auto hidden = std::make_unique<nn::Linear<T>>(feature_dim_, head_hidden);
      hidden->init(head_rng);
      head.layers.push_back(std::move(hidden));
      head.layers.push_back(std::make_unique<nn::ReLU<T>>());
      auto out = std::make_unique<nn::Linear<T>>(head_hidden, static_cast<std::size_t>(num_classes_));
      out->init(head_rng);
      head.layers.push_back(std::move(out));
    } else {
      auto out = std::make_unique<nn::Linear<T>>(feature_dim_, static_cast<std::size_t>(num_classes_));
      out->init(head_rng);
      head.layers.push_back(std::move(out));
    }
    apply_freeze_tags();
  }

  BackboneId backbone_id() const { return id_; }
  int num_classes() const { return num_classes_; }
  const FreezePolicy& freeze_policy() const { return policy_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t feature_dim() const { return feature_dim_; }
  std::size_t input_height() const { return input_h_; }
  std::size_t input_width() const { return input_w_; }
  nn::Network<T>& backbone() { return backbone_; }

  // (B, 3, H, W) in [0,1] -> (B, num_classes) logits.
  Tensor<T> forward(const Tensor<T>& batch, bool training = false) {
    if (batch.rank() != 4 || batch.dim(1) != 3 || batch.dim(2) != input_h_ ||
        batch.dim(3) != input_w_) {
      raise(ErrorCode::InputShapeError,
            "expected (B,3," + std::to_string(input_h_) + "," + std::to_string(input_w_) +
                "), got " + batch.shape_str());
    }
    Tensor<T> y = backbone_.forward(batch, training);
    if (pool_) y = pool_->forward(y, training);
    return head_.forward(y, training);
  }

  // Backpropagates from the logit gradient into every trainable parameter.
  // Blocks before the earliest trainable one are skipped: their parameters
  // are frozen, so the chain can stop there.
  void backward(const Tensor<T>& logit_grad) {
    Tensor<T> g = head_.backward(logit_grad);
    const std::size_t stop = first_trainable_block();
    if (stop == backbone_.block_count()) return;  // backbone fully frozen
    if (pool_) g = pool_->backward(g);
    auto& blocks = backbone_.blocks();
    for (std::size_t b = blocks.size(); b-- > stop;) {
      for (auto it = blocks[b].layers.rbegin(); it != blocks[b].layers.rend(); ++it) {
        g = (*it)->backward(g);
      }
    }
  }

  std::vector<nn::Parameter<T>*> all_params() {
    auto params = backbone_.all_params();
    auto head = head_.all_params();
    params.insert(params.end(), head.begin(), head.end());
    return params;
  }

  std::vector<nn::Parameter<T>*> trainable_params() {
    std::vector<nn::Parameter<T>*> out;
    for (auto* p : all_params()) {
      if (p->trainable) out.push_back(p);
    }
    return out;
  }

  std::vector<nn::Parameter<T>*> head_params() { return head_.all_params(); }

  void zero_grads() {
    for (auto* p : all_params()) p->zero_grad();
  }

  FreezeReport freeze_report() {
    FreezeReport report;
    auto add_group = [&report](const std::string& name, const std::vector<nn::Parameter<T>*>& params) {
      FreezeReport::Group g;
      g.name = name;
      for (const auto* p : params) g.params += p->value.numel();
      g.trainable = !params.empty() && params.front()->trainable;
      report.total_params += g.params;
      if (g.trainable) {
        report.trainable_params += g.params;
      } else {
        report.frozen_params += g.params;
      }
      report.groups.push_back(std::move(g));
    };
    auto& blocks = backbone_.blocks();
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      add_group(blocks[b].name, backbone_.block_params(b));
    }
    add_group("head", head_.all_params());
    return report;
  }

  // In-memory weight snapshot/restore, used for best-epoch restoration.
  std::vector<std::vector<T>> snapshot_weights() {
    std::vector<std::vector<T>> out;
    for (auto* p : all_params()) out.push_back(p->value.vec());
    return out;
  }

  void restore_weights(const std::vector<std::vector<T>>& snapshot) {
    auto params = all_params();
    if (snapshot.size() != params.size()) {
      raise(ErrorCode::ShapeError, "weight snapshot does not match parameter registry");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (snapshot[i].size() != params[i]->value.numel()) {
        raise(ErrorCode::ShapeError, "weight snapshot tensor size mismatch");
      }
      params[i]->value.vec() = snapshot[i];
    }
  }

 private:
  std::size_t first_trainable_block() const {
    const std::size_t blocks = backbone_.block_count();
    return blocks - std::min(policy_.unfreeze_depth, blocks);
  }

  void apply_freeze_tags() {
    const std::size_t stop = first_trainable_block();
    auto& blocks = backbone_.blocks();
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      for (auto* p : backbone_.block_params(b)) p->trainable = b >= stop;
    }
    for (auto* p : head_.all_params()) p->trainable = true;
  }

  BackboneId id_;
  int num_classes_;
  FreezePolicy policy_;
  std::uint64_t seed_;
  nn::Network<T> backbone_;
  std::unique_ptr<nn::GlobalAvgPool<T>> pool_;
  nn::Network<T> head_;
  std::size_t input_h_, input_w_;
  std::size_t feature_dim_ = 0;
};

// ---------------------------------------------------------------------------
// built-in tiny backbone: three conv blocks, trains on a CPU in minutes

template <typename T>
nn::Network<T> build_tiny_cnn_backbone(std::uint64_t seed) {
  Rng rng(seed);
  nn::Network<T> net;
  auto& b1 = net.add_block("block1");
  auto c1 = std::make_unique<nn::Conv2d<T>>(3, 16, 5, 4, 2);
  c1->init(rng);
  b1.layers.push_back(std::move(c1));
  b1.layers.push_back(std::make_unique<nn::ReLU<T>>());
  b1.layers.push_back(std::make_unique<nn::MaxPool2d<T>>(2, 2));

  auto& b2 = net.add_block("block2");
  auto c2 = std::make_unique<nn::Conv2d<T>>(16, 32, 3, 1, 1);
  c2->init(rng);
  b2.layers.push_back(std::move(c2));
  b2.layers.push_back(std::make_unique<nn::ReLU<T>>());
  b2.layers.push_back(std::make_unique<nn::MaxPool2d<T>>(2, 2));

  auto& b3 = net.add_block("block3");
  auto c3 = std::make_unique<nn::Conv2d<T>>(32, 64, 3, 1, 1);
  c3->init(rng);
  b3.layers.push_back(std::move(c3));
  b3.layers.push_back(std::make_unique<nn::ReLU<T>>());
  b3.layers.push_back(std::make_unique<nn::MaxPool2d<T>>(2, 2));
  return net;
}

// Loads an exported feature-extractor bundle: a directory holding arch.json
// (block/layer graph) and weights.bin (float32, declaration order). The
// bundle carries no classification head; create_model attaches a fresh one.
template <typename T>
struct LoadedBackbone {
  nn::Network<T> network;
  std::size_t input_h = 224;
  std::size_t input_w = 224;
  std::string backbone_id;
};

template <typename T>
LoadedBackbone<T> load_backbone_bundle(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const fs::path arch_path = dir / "arch.json";
  const fs::path weights_path = dir / "weights.bin";
  if (!fs::exists(arch_path) || !fs::exists(weights_path)) {
    raise(ErrorCode::WeightLoadError,
          "no backbone bundle at " + dir.string() +
              " (expected arch.json + weights.bin); export the pretrained backbone first or "
              "point model.weights / SIGNBENCH_WEIGHTS_DIR at an existing bundle");
  }
  nlohmann::json arch;
  std::ifstream in(arch_path);
  try {
    in >> arch;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::WeightLoadError, arch_path.string() + ": " + e.what());
  }

  LoadedBackbone<T> out;
  try {
    out.backbone_id = arch.at("backbone_id").get<std::string>();
    if (arch.contains("input")) {
      out.input_h = arch["input"].value("height", std::size_t{224});
      out.input_w = arch["input"].value("width", std::size_t{224});
    }
    for (const auto& block_spec : arch.at("blocks")) {
      auto& block = out.network.add_block(block_spec.at("name").get<std::string>());
      block.layers = bundle_detail::layers_from_json<T>(block_spec.at("layers"));
    }
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::WeightLoadError, arch_path.string() + ": malformed bundle: " + e.what());
  }
  bundle_detail::read_weights_file(weights_path, out.network.all_params());
  return out;
}

inline std::optional<std::filesystem::path> default_weights_dir(BackboneId id) {
  const char* env = std::getenv("SIGNBENCH_WEIGHTS_DIR");
  if (env == nullptr || *env == '\0') return std::nullopt;
  std::string name = backbone_name(id);
  for (auto& ch : name) ch = static_cast<char>(std::tolower(ch));
  return std::filesystem::path(env) / name;
}

// Assembles a classifier: backbone (pretrained bundle, or the seeded built-in
// tiny net), early blocks frozen per policy, and a fresh head sized to
// num_classes and initialized from the seed.
template <typename T = float>
ModelAdapter<T> create_model(BackboneId id, int num_classes, FreezePolicy policy,
                             std::uint64_t seed, const std::string& weights_source = "",
                             std::size_t head_hidden = 0) {
  if (id == BackboneId::TINY_CNN) {
    return ModelAdapter<T>(id, num_classes, policy, seed, build_tiny_cnn_backbone<T>(seed), 224,
                           224, head_hidden);
  }
  std::filesystem::path bundle_dir;
  if (!weights_source.empty()) {
    bundle_dir = weights_source;
  } else if (auto dir = default_weights_dir(id)) {
    bundle_dir = *dir;
  } else {
    raise(ErrorCode::WeightLoadError,
          std::string(backbone_name(id)) +
              " needs pretrained weights; set model.weights in the config or export a bundle "
              "under $SIGNBENCH_WEIGHTS_DIR");
  }
  LoadedBackbone<T> loaded = load_backbone_bundle<T>(bundle_dir);
  if (loaded.backbone_id != backbone_name(id)) {
    raise(ErrorCode::WeightLoadError, "bundle at " + bundle_dir.string() + " holds " +
                                          loaded.backbone_id + ", requested " + backbone_name(id));
  }
  return ModelAdapter<T>(id, num_classes, policy, seed, std::move(loaded.network),
                         loaded.input_h, loaded.input_w, head_hidden);
}

// ---------------------------------------------------------------------------
// checkpoints: weights.bin + sidecar.json

template <typename T>
void save_checkpoint(ModelAdapter<T>& model, const std::filesystem::path& dir, int epoch,
                     double val_accuracy) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) raise(ErrorCode::IoError, "cannot create checkpoint dir " + dir.string());
  bundle_detail::write_weights_file(dir / "weights.bin", model.all_params());
  nlohmann::ordered_json sidecar;
  sidecar["backbone_id"] = backbone_name(model.backbone_id());
  sidecar["num_classes"] = model.num_classes();
  sidecar["freeze_policy"] = {{"unfreeze_depth", model.freeze_policy().unfreeze_depth}};
  sidecar["seed"] = model.seed();
  sidecar["epoch"] = epoch;
  sidecar["val_accuracy"] = val_accuracy;
  std::ofstream out(dir / "sidecar.json", std::ios::trunc);
  if (!out) raise(ErrorCode::IoError, "cannot write checkpoint sidecar");
  out << sidecar.dump(2) << "\n";
}

template <typename T>
void load_checkpoint(ModelAdapter<T>& model, const std::filesystem::path& dir) {
  std::ifstream in(dir / "sidecar.json");
  if (!in) raise(ErrorCode::WeightLoadError, "no checkpoint sidecar in " + dir.string());
  nlohmann::json sidecar;
  try {
    in >> sidecar;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::WeightLoadError, std::string("malformed checkpoint sidecar: ") + e.what());
  }
  if (sidecar.value("backbone_id", "") != backbone_name(model.backbone_id()) ||
      sidecar.value("num_classes", -1) != model.num_classes()) {
    raise(ErrorCode::WeightLoadError, "checkpoint at " + dir.string() +
                                          " does not match the model it is being loaded into");
  }
  bundle_detail::read_weights_file(dir / "weights.bin", model.all_params());
}

}  // namespace signbench

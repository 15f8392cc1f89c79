#pragma once

#include <algorithm>
#include <memory>
#include <vector>

#include "signbench/error.hpp"
#include "signbench/manifest.hpp"
#include "signbench/preprocess.hpp"
#include "signbench/tensor.hpp"

namespace signbench {

// Feeds preprocessed (3, H, W) tensors to the trainer. The eager source runs
// the whole pipeline up front and is the right choice at desk scale; the lazy
// source re-decodes per access and exists for datasets that do not fit in
// memory (full-scale runs).
template <typename T>
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual std::size_t size() const = 0;
  virtual std::size_t values_per_sample() const = 0;  // 3 * H * W
  virtual void fetch(std::size_t index, T* dst) const = 0;
  virtual int label(std::size_t index) const = 0;
};

template <typename T>
class EagerSampleSource : public SampleSource<T> {
 public:
  EagerSampleSource(const DatasetManifest& manifest, const std::vector<std::size_t>& indices,
                    const PreprocessConfig& config) {
    config.validate();
    stride_ = 3 * config.image_height * config.image_width;
    data_.reserve(indices.size() * stride_);
    labels_.reserve(indices.size());
    for (std::size_t idx : indices) {
      auto sample = preprocess_sample<T>(manifest.samples.at(idx), config);
      data_.insert(data_.end(), sample.tensor.vec().begin(), sample.tensor.vec().end());
      labels_.push_back(sample.class_index);
    }
  }

  std::size_t size() const override { return labels_.size(); }
  std::size_t values_per_sample() const override { return stride_; }
  void fetch(std::size_t index, T* dst) const override {
    std::copy(data_.begin() + index * stride_, data_.begin() + (index + 1) * stride_, dst);
  }
  int label(std::size_t index) const override { return labels_[index]; }

 private:
  std::size_t stride_ = 0;
  std::vector<T> data_;
  std::vector<int> labels_;
};

template <typename T>
class LazySampleSource : public SampleSource<T> {
 public:
  LazySampleSource(const DatasetManifest& manifest, std::vector<std::size_t> indices,
                   PreprocessConfig config)
      : manifest_(manifest), indices_(std::move(indices)), config_(std::move(config)) {
    config_.validate();
  }

  std::size_t size() const override { return indices_.size(); }
  std::size_t values_per_sample() const override {
    return 3 * config_.image_height * config_.image_width;
  }
  void fetch(std::size_t index, T* dst) const override {
    auto sample = preprocess_sample<T>(manifest_.samples.at(indices_[index]), config_);
    std::copy(sample.tensor.vec().begin(), sample.tensor.vec().end(), dst);
  }
  int label(std::size_t index) const override {
    return manifest_.samples.at(indices_[index]).class_index;
  }

 private:
  const DatasetManifest& manifest_;
  std::vector<std::size_t> indices_;
  PreprocessConfig config_;
};

}  // namespace signbench

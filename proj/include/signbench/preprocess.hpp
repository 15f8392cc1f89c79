#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "signbench/error.hpp"
#include "signbench/image.hpp"
#include "signbench/manifest.hpp"
#include "signbench/tensor.hpp"

namespace signbench {

enum class BalanceStrategy { NONE, UNDER, OVER, HYBRID_TO_MEDIAN };

inline const char* balance_strategy_name(BalanceStrategy s) {
  switch (s) {
    case BalanceStrategy::NONE: return "NONE";
    case BalanceStrategy::UNDER: return "UNDER";
    case BalanceStrategy::OVER: return "OVER";
    case BalanceStrategy::HYBRID_TO_MEDIAN: return "HYBRID_TO_MEDIAN";
  }
  return "?";
}

inline BalanceStrategy balance_strategy_from_name(const std::string& name) {
  if (name == "NONE") return BalanceStrategy::NONE;
  if (name == "UNDER") return BalanceStrategy::UNDER;
  if (name == "OVER") return BalanceStrategy::OVER;
  if (name == "HYBRID_TO_MEDIAN") return BalanceStrategy::HYBRID_TO_MEDIAN;
  raise(ErrorCode::ConfigError, "unknown balance strategy '" + name + "'");
}

enum class ChannelPolicy { REPLICATE_GRAY_TO_3 };

struct SplitRatios {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
};

struct PreprocessConfig {
  BalanceStrategy balance_strategy = BalanceStrategy::HYBRID_TO_MEDIAN;
  std::optional<std::size_t> target_count;
  std::size_t image_height = 224;
  std::size_t image_width = 224;
  ChannelPolicy channel_policy = ChannelPolicy::REPLICATE_GRAY_TO_3;
  SplitRatios split_ratios;
  std::uint64_t seed = 0;

  void validate() const {
    if (image_height < 8 || image_width < 8) {
      raise(ErrorCode::ConfigError, "image size components must be >= 8");
    }
    const auto& r = split_ratios;
    if (r.train <= 0 || r.val <= 0 || r.test <= 0) {
      raise(ErrorCode::ConfigError, "split ratios must be strictly positive");
    }
    if (std::abs(r.train + r.val + r.test - 1.0) > 1e-9) {
      raise(ErrorCode::ConfigError, "split ratios must sum to 1.0");
    }
  }
};

// Luminance conversion with the conventional 0.299/0.587/0.114 weights,
// rounded to the nearest integer. Single-channel input passes through.
inline RawImage to_grayscale(const RawImage& raw) {
  if (!raw.valid()) raise(ErrorCode::ShapeError, "invalid image");
  if (raw.channels == 1) return raw;
  RawImage out(raw.height, raw.width, 1);
  const std::size_t n = raw.height * raw.width;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = raw.pixels[3 * i + 0];
    const double g = raw.pixels[3 * i + 1];
    const double b = raw.pixels[3 * i + 2];
    const long y = std::lround(0.299 * r + 0.587 * g + 0.114 * b);
    out.pixels[i] = static_cast<std::uint8_t>(std::min(255L, std::max(0L, y)));
  }
  return out;
}

// Bilinear resize with half-pixel-center sampling and edge clamping. No
// aspect-ratio padding: both axes are scaled independently.
inline RawImage resize(const RawImage& image, std::size_t out_h, std::size_t out_w) {
  if (!image.valid()) raise(ErrorCode::ShapeError, "invalid image");
  if (out_h < 8 || out_w < 8) raise(ErrorCode::ConfigError, "resize target must be >= 8x8");
  if (out_h == image.height && out_w == image.width) return image;

  RawImage out(out_h, out_w, image.channels);
  const double scale_y = static_cast<double>(image.height) / static_cast<double>(out_h);
  const double scale_x = static_cast<double>(image.width) / static_cast<double>(out_w);

  for (std::size_t oy = 0; oy < out_h; ++oy) {
    double sy = (static_cast<double>(oy) + 0.5) * scale_y - 0.5;
    sy = std::min(std::max(sy, 0.0), static_cast<double>(image.height - 1));
    const std::size_t y0 = static_cast<std::size_t>(sy);
    const std::size_t y1 = std::min(y0 + 1, image.height - 1);
    const double ay = sy - static_cast<double>(y0);
    for (std::size_t ox = 0; ox < out_w; ++ox) {
      double sx = (static_cast<double>(ox) + 0.5) * scale_x - 0.5;
      sx = std::min(std::max(sx, 0.0), static_cast<double>(image.width - 1));
      const std::size_t x0 = static_cast<std::size_t>(sx);
      const std::size_t x1 = std::min(x0 + 1, image.width - 1);
      const double ax = sx - static_cast<double>(x0);
      for (std::size_t c = 0; c < image.channels; ++c) {
        const double v00 = image.at(y0, x0, c);
        const double v01 = image.at(y0, x1, c);
        const double v10 = image.at(y1, x0, c);
        const double v11 = image.at(y1, x1, c);
        const double v = (1.0 - ay) * ((1.0 - ax) * v00 + ax * v01) +
                         ay * ((1.0 - ax) * v10 + ax * v11);
        const long q = std::lround(v);
        out.at(oy, ox, c) = static_cast<std::uint8_t>(std::min(255L, std::max(0L, q)));
      }
    }
  }
  return out;
}

// Maps [0,255] to [0,1] by dividing by 255. Output is planar (K, H, W).
template <typename T = float>
Tensor<T> normalize(const RawImage& image) {
  if (!image.valid()) raise(ErrorCode::ShapeError, "invalid image");
  Tensor<T> out({image.channels, image.height, image.width});
  for (std::size_t c = 0; c < image.channels; ++c) {
    for (std::size_t y = 0; y < image.height; ++y) {
      for (std::size_t x = 0; x < image.width; ++x) {
        out[(c * image.height + y) * image.width + x] =
            static_cast<T>(image.at(y, x, c)) / static_cast<T>(255);
      }
    }
  }
  return out;
}

// (1, H, W) -> (3, H, W) with three identical channels.
template <typename T>
Tensor<T> replicate_channels(const Tensor<T>& gray) {
  if (gray.rank() != 3 || gray.dim(0) != 1) {
    raise(ErrorCode::ChannelPolicyError,
          "replicate_channels expects a single-channel (1,H,W) input, got " + gray.shape_str());
  }
  const std::size_t h = gray.dim(1), w = gray.dim(2);
  Tensor<T> out({3, h, w});
  const std::size_t plane = h * w;
  for (std::size_t c = 0; c < 3; ++c) {
    std::copy(gray.data(), gray.data() + plane, out.data() + c * plane);
  }
  return out;
}

template <typename T = float>
struct PreprocessedSample {
  Tensor<T> tensor;  // (3, H, W), values in [0, 1]
  int class_index = -1;
  SampleRef origin;
};

// load -> grayscale -> resize -> normalize -> replicate, in that order.
template <typename T = float>
PreprocessedSample<T> preprocess_sample(const SampleRef& ref, const PreprocessConfig& config) {
  config.validate();
  const RawImage raw = load_image(ref);
  const RawImage gray = to_grayscale(raw);
  const RawImage sized = resize(gray, config.image_height, config.image_width);
  Tensor<T> norm = normalize<T>(sized);
  PreprocessedSample<T> out;
  out.tensor = replicate_channels(norm);
  out.class_index = ref.class_index;
  out.origin = ref;
  return out;
}

}  // namespace signbench

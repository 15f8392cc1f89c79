#pragma once

#include <cstdint>
#include <vector>

#include "signbench/error.hpp"

namespace signbench {

// Decoded raster image, H x W x K interleaved, 8-bit channels, K in {1, 3}.
struct RawImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<std::uint8_t> pixels;  // row-major, interleaved

  RawImage() = default;
  RawImage(std::size_t h, std::size_t w, std::size_t k)
      : height(h), width(w), channels(k), pixels(h * w * k, 0) {}

  std::uint8_t& at(std::size_t y, std::size_t x, std::size_t c) {
    return pixels[(y * width + x) * channels + c];
  }
  std::uint8_t at(std::size_t y, std::size_t x, std::size_t c) const {
    return pixels[(y * width + x) * channels + c];
  }

  bool valid() const {
    return height >= 1 && width >= 1 && (channels == 1 || channels == 3) &&
           pixels.size() == height * width * channels;
  }
};

}  // namespace signbench

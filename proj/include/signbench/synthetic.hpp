#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "signbench/error.hpp"
#include "signbench/image.hpp"
#include "signbench/image_codec.hpp"
#include "signbench/manifest.hpp"
#include "signbench/rng.hpp"

namespace signbench {

// Desk-scale stand-in for a real sign-image dataset. Class i draws the blob
// pattern encoded by the bits of (i+1) on a 3x3 cell grid, so every class has
// a distinct, learnable glyph. Seeded jitter (position, blob radius,
// brightness, pixel noise) keeps samples within a class from being
// pixel-identical. Same seed => byte-identical files.
struct SyntheticSpec {
  int num_classes = 8;
  std::vector<std::size_t> per_class_counts;  // one entry per class
  std::size_t image_size = 64;                // square, >= 16
  std::uint64_t seed = 0;
};

namespace synth_detail {

inline void draw_disk(RawImage& img, double cy, double cx, double radius, int value) {
  const int y0 = std::max(0, static_cast<int>(cy - radius - 1));
  const int y1 = std::min(static_cast<int>(img.height) - 1, static_cast<int>(cy + radius + 1));
  const int x0 = std::max(0, static_cast<int>(cx - radius - 1));
  const int x1 = std::min(static_cast<int>(img.width) - 1, static_cast<int>(cx + radius + 1));
  const double r2 = radius * radius;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dy = y - cy, dx = x - cx;
      if (dy * dy + dx * dx <= r2) {
        img.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x), 0) =
            static_cast<std::uint8_t>(value);
      }
    }
  }
}

inline RawImage render_glyph(int class_index, std::size_t size, Rng& rng) {
  RawImage img(size, size, 1);
  const double s = static_cast<double>(size);

  // background with per-pixel noise
  for (auto& p : img.pixels) {
    const int v = 30 + static_cast<int>(rng.uniform_int(25));
    p = static_cast<std::uint8_t>(v);
  }

  const double jitter_y = rng.uniform(-s / 16.0, s / 16.0);
  const double jitter_x = rng.uniform(-s / 16.0, s / 16.0);
  const int brightness = 200 + static_cast<int>(rng.uniform_int(56));

  const unsigned pattern = static_cast<unsigned>(class_index) + 1u;
  const double cell = s / 3.0;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (!(pattern & (1u << (r * 3 + c)))) continue;
      const double cy = (r + 0.5) * cell + jitter_y;
      const double cx = (c + 0.5) * cell + jitter_x;
      const double radius = cell * rng.uniform(0.30, 0.42);
      draw_disk(img, cy, cx, radius, brightness);
    }
  }
  return img;
}

}  // namespace synth_detail

inline DatasetManifest generate_synthetic_dataset(const std::filesystem::path& out_dir,
                                                  const SyntheticSpec& spec) {
  namespace fs = std::filesystem;
  if (spec.num_classes < 2 || spec.num_classes > 511) {
    raise(ErrorCode::ConfigError, "synthetic class count must be in [2, 511], got " +
                                      std::to_string(spec.num_classes));
  }
  if (spec.image_size < 16) {
    raise(ErrorCode::ConfigError, "synthetic image size must be >= 16");
  }
  if (spec.per_class_counts.size() != static_cast<std::size_t>(spec.num_classes)) {
    raise(ErrorCode::ConfigError, "per_class_counts must have one entry per class");
  }
  for (std::size_t n : spec.per_class_counts) {
    if (n < 1) raise(ErrorCode::ConfigError, "per-class counts must be >= 1");
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    raise(ErrorCode::IoError, "cannot create output directory " + out_dir.string());
  }

  const int digits = spec.num_classes > 100 ? 3 : 2;
  Rng rng(spec.seed);
  for (int ci = 0; ci < spec.num_classes; ++ci) {
    char name[32];
    std::snprintf(name, sizeof(name), "class_%0*d", digits, ci);
    const fs::path class_dir = out_dir / name;
    fs::create_directories(class_dir, ec);
    if (ec) raise(ErrorCode::IoError, "cannot create " + class_dir.string());
    for (std::size_t k = 0; k < spec.per_class_counts[static_cast<std::size_t>(ci)]; ++k) {
      const RawImage img = synth_detail::render_glyph(ci, spec.image_size, rng);
      char file_name[32];
      std::snprintf(file_name, sizeof(file_name), "img_%04zu.png", k);
      write_file_bytes(class_dir / file_name, encode_png(img));
    }
  }

  return scan_dataset(out_dir, DatasetKind::SYNTHETIC);
}

}  // namespace signbench

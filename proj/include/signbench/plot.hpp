#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "signbench/image.hpp"

namespace signbench {

// Minimal RGB line-chart rasterizer for the accuracy-curve images. No text
// rendering beyond tick marks; the CSV next to the image carries the numbers.
struct PlotSeries {
  std::vector<double> values;  // y per integer x
  std::uint8_t r = 0, g = 0, b = 0;
};

namespace plot_detail {

inline void set_pixel(RawImage& img, int x, int y, std::uint8_t r, std::uint8_t g,
                      std::uint8_t b) {
  if (x < 0 || y < 0 || x >= static_cast<int>(img.width) || y >= static_cast<int>(img.height)) {
    return;
  }
  img.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x), 0) = r;
  img.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x), 1) = g;
  img.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x), 2) = b;
}

inline void draw_line(RawImage& img, int x0, int y0, int x1, int y1, std::uint8_t r,
                      std::uint8_t g, std::uint8_t b) {
  // Bresenham
  const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    set_pixel(img, x0, y0, r, g, b);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

}  // namespace plot_detail

inline RawImage render_line_chart(const std::vector<PlotSeries>& series, std::size_t width = 800,
                                  std::size_t height = 500, double y_min = 0.0,
                                  double y_max = 1.0) {
  RawImage img(height, width, 3);
  std::fill(img.pixels.begin(), img.pixels.end(), std::uint8_t{255});

  const int margin = 40;
  const int x0 = margin, y0 = static_cast<int>(height) - margin;
  const int x1 = static_cast<int>(width) - margin / 2, y1 = margin / 2;
  plot_detail::draw_line(img, x0, y0, x1, y0, 0, 0, 0);  // x axis
  plot_detail::draw_line(img, x0, y0, x0, y1, 0, 0, 0);  // y axis

  std::size_t max_points = 0;
  for (const auto& s : series) max_points = std::max(max_points, s.values.size());
  if (max_points == 0 || y_max <= y_min) return img;

  // horizontal gridlines every 0.1 of the y range
  for (int tick = 0; tick <= 10; ++tick) {
    const int y = y0 - static_cast<int>(std::lround((y0 - y1) * (tick / 10.0)));
    plot_detail::draw_line(img, x0 - 3, y, x0, y, 0, 0, 0);
    for (int x = x0; x <= x1; x += 5) plot_detail::set_pixel(img, x, y, 230, 230, 230);
  }

  const double x_step = max_points > 1 ? static_cast<double>(x1 - x0) / (max_points - 1) : 0.0;
  for (const auto& s : series) {
    int prev_x = 0, prev_y = 0;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      const double t = (s.values[i] - y_min) / (y_max - y_min);
      const int px = x0 + static_cast<int>(std::lround(x_step * static_cast<double>(i)));
      const int py = y0 - static_cast<int>(std::lround((y0 - y1) * std::clamp(t, 0.0, 1.0)));
      if (i > 0) plot_detail::draw_line(img, prev_x, prev_y, px, py, s.r, s.g, s.b);
      prev_x = px;
      prev_y = py;
    }
  }
  return img;
}

}  // namespace signbench

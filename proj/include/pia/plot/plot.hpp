#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pia::plot {

using Rgb = std::array<std::uint8_t, 3>;

// A polyline; non-finite y values break the line.
struct Series {
  std::vector<double> x;
  std::vector<double> y;
  Rgb color{0, 0, 0};
};

struct Figure {
  int width = 640;
  int height = 400;
  std::vector<Series> series;
  std::optional<double> threshold;  // dashed horizontal line
  bool diagonal = false;            // dashed y = x reference (ROC)
  std::optional<std::array<double, 4>> limits;  // x_min, x_max, y_min, y_max; default fits the data
};

// Row-major RGB raster of the figure: white canvas, axes, grid, lines.
std::vector<std::uint8_t> render(const Figure& figure);

// Throws InvalidInput when the file cannot be written.
void write_png(const std::string& path, int width, int height, const std::vector<std::uint8_t>& rgb);
void save(const std::string& path, const Figure& figure);

}  // namespace pia::plot

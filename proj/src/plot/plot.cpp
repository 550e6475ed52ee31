#include "pia/plot/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include <png.h>

#include "pia/errors.hpp"

namespace pia::plot {

namespace {

constexpr int kMargin = 40;
constexpr Rgb kAxis{0, 0, 0};
constexpr Rgb kGrid{225, 225, 225};
constexpr Rgb kGuide{150, 150, 150};

class Canvas {
 public:
  Canvas(int w, int h) : w_(w), h_(h), px_(static_cast<std::size_t>(w) * h * 3, 255) {}

  void set(int x, int y, const Rgb& c) {
    if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
    auto* p = &px_[(static_cast<std::size_t>(y) * w_ + x) * 3];
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }

  // Bresenham with a square pen; dash > 0 skips alternate runs of that length.
  void line(int x0, int y0, int x1, int y1, const Rgb& c, int pen = 1, int dash = 0) {
    const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy, step = 0;
    while (true) {
      if (dash == 0 || (step / dash) % 2 == 0) {
        for (int oy = 0; oy < pen; ++oy) {
          for (int ox = 0; ox < pen; ++ox) set(x0 + ox - pen / 2, y0 + oy - pen / 2, c);
        }
      }
      ++step;
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

  std::vector<std::uint8_t> take() { return std::move(px_); }

 private:
  int w_, h_;
  std::vector<std::uint8_t> px_;
};

std::array<double, 4> fit_limits(const Figure& f) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : f.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (f.threshold) {
    y0 = std::min(y0, *f.threshold);
    y1 = std::max(y1, *f.threshold);
  }
  if (!std::isfinite(x0)) return {0.0, 1.0, 0.0, 1.0};
  y0 = std::min(y0, 0.0);
  if (x1 <= x0) x1 = x0 + 1.0;
  if (y1 <= y0) y1 = y0 + 1.0;
  return {x0, x1, y0, y1 + 0.05 * (y1 - y0)};
}

}  // namespace

std::vector<std::uint8_t> render(const Figure& f) {
  if (f.width < 2 * kMargin + 10 || f.height < 2 * kMargin + 10) throw InvalidInput("figure too small");
  Canvas canvas(f.width, f.height);
  const auto lim = f.limits ? *f.limits : fit_limits(f);
  const int left = kMargin, right = f.width - kMargin / 2, top = kMargin / 2, bottom = f.height - kMargin;
  const auto to_x = [&](double x) {
    return left + static_cast<int>(std::lround((x - lim[0]) / (lim[1] - lim[0]) * (right - left)));
  };
  const auto to_y = [&](double y) {
    return bottom - static_cast<int>(std::lround((y - lim[2]) / (lim[3] - lim[2]) * (bottom - top)));
  };
  for (int k = 1; k < 5; ++k) {
    const int gx = left + k * (right - left) / 5;
    const int gy = bottom - k * (bottom - top) / 5;
    canvas.line(gx, top, gx, bottom, kGrid);
    canvas.line(left, gy, right, gy, kGrid);
  }
  if (f.diagonal) canvas.line(to_x(lim[0]), to_y(lim[2]), to_x(lim[1]), to_y(lim[3]), kGuide, 1, 6);
  if (f.threshold) canvas.line(left, to_y(*f.threshold), right, to_y(*f.threshold), kGuide, 1, 6);
  for (const auto& s : f.series) {
    bool have = false;
    int px = 0, py = 0;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        have = false;
        continue;
      }
      const int x = to_x(s.x[i]), y = to_y(s.y[i]);
      if (have) {
        canvas.line(px, py, x, y, s.color, 2);
      } else {
        canvas.line(x, y, x, y, s.color, 3);
      }
      px = x;
      py = y;
      have = true;
    }
  }
  canvas.line(left, bottom, right, bottom, kAxis);
  canvas.line(left, top, left, bottom, kAxis);
  for (int k = 0; k <= 5; ++k) {
    const int gx = left + k * (right - left) / 5;
    const int gy = bottom - k * (bottom - top) / 5;
    canvas.line(gx, bottom, gx, bottom + 4, kAxis);
    canvas.line(left - 4, gy, left, gy, kAxis);
  }
  return canvas.take();
}

void write_png(const std::string& path, int width, int height, const std::vector<std::uint8_t>& rgb) {
  if (rgb.size() != static_cast<std::size_t>(width) * height * 3) throw InvalidInput("raster size mismatch");
  std::unique_ptr<FILE, int (*)(FILE*)> file(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!file) throw InvalidInput("cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, nullptr);
    throw InvalidInput("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw InvalidInput("libpng failed writing " + path);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(&rgb[static_cast<std::size_t>(y) * width * 3]));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void save(const std::string& path, const Figure& figure) { write_png(path, figure.width, figure.height, render(figure)); }

}  // namespace pia::plot

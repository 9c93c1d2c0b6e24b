#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "asitu/flow.hpp"
#include "asitu/image.hpp"
#include "asitu/motivation.hpp"
#include "asitu/rng.hpp"

namespace asitu::test {

/// Unique scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("asitu_" + tag + "_" + std::to_string(++counter) + "_" +
             std::to_string(static_cast<std::uint64_t>(
                 reinterpret_cast<std::uintptr_t>(this))));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Oracle: exact affine field v(p) = u + chi * (p - p_ref) evaluated at the
/// flow-grid block centers. Independent of the fitting code.
inline FlowField make_affine_field(int grid_w, int grid_h, int block_size,
                                   double u1, double u2, const Mat2& chi,
                                   double ref_x, double ref_y) {
  FlowField f;
  f.grid_w = grid_w;
  f.grid_h = grid_h;
  f.block_size = block_size;
  f.vx.resize(static_cast<std::size_t>(grid_w) * grid_h);
  f.vy.resize(f.vx.size());
  for (int by = 0; by < grid_h; ++by)
    for (int bx = 0; bx < grid_w; ++bx) {
      const double dx = f.center_x(bx) - ref_x;
      const double dy = f.center_y(by) - ref_y;
      const std::size_t i = static_cast<std::size_t>(by) * grid_w + bx;
      f.vx[i] = u1 + chi[0] * dx + chi[1] * dy;
      f.vy[i] = u2 + chi[2] * dx + chi[3] * dy;
    }
  return f;
}

/// Center of a whole grid, matching the window-center convention of the fit.
inline double grid_center_x(const FlowField& f) {
  return 0.5 * (f.center_x(0) + f.center_x(f.grid_w - 1));
}
inline double grid_center_y(const FlowField& f) {
  return 0.5 * (f.center_y(0) + f.center_y(f.grid_h - 1));
}

/// Smooth deterministic texture with enough gradient for block matching.
inline Image textured_image(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  const double p1 = rng.uniform(0.0, 6.28);
  const double p2 = rng.uniform(0.0, 6.28);
  const double p3 = rng.uniform(0.0, 6.28);
  Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      // Periodic in both axes so wrap-translation stays seamless.
      const double v = 127.5 + 45.0 * std::sin(2.0 * M_PI * 3.0 * x / w + p1) +
                       35.0 * std::sin(2.0 * M_PI * 4.0 * y / h + p2) +
                       25.0 * std::sin(2.0 * M_PI * (2.0 * x / w + 3.0 * y / h) + p3);
      img.at(x, y) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
  return img;
}

inline Image translate_wrap(const Image& src, int dx, int dy) {
  Image dst(src.width, src.height);
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x) {
      const int sx = ((x - dx) % src.width + src.width) % src.width;
      const int sy = ((y - dy) % src.height + src.height) % src.height;
      dst.at(x, y) = src.at(sx, sy);
    }
  return dst;
}

}  // namespace asitu::test

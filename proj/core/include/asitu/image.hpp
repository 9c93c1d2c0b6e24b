#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace asitu {

/// 8-bit grayscale image, row-major, stride == width.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& at(int x, int y) {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  bool same_dims(const Image& other) const {
    return width == other.width && height == other.height;
  }
};

// Binary PGM (P5), maxval <= 255. Comments ('#') in the header are accepted.
Image read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Image& img);

}  // namespace asitu

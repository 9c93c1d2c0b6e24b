#include "asitu/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "asitu/image.hpp"

namespace asitu {

SaliencyMap load_saliency(const std::filesystem::path& path, int width,
                          int height) {
  const Image img = read_pgm(path);
  if (img.width != width || img.height != height)
    throw std::runtime_error(
        "saliency map " + path.string() + " is " + std::to_string(img.width) +
        "x" + std::to_string(img.height) + ", frames are " +
        std::to_string(width) + "x" + std::to_string(height));
  SaliencyMap map;
  map.width = width;
  map.height = height;
  map.values.resize(img.pixels.size());
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    map.values[i] = img.pixels[i] / 255.0;
  return map;
}

SaliencyMap center_prior(int width, int height, double sigma_frac) {
  if (width < 8 || height < 8)
    throw std::invalid_argument("center_prior: dimensions must be >= 8");
  if (sigma_frac <= 0.0)
    throw std::invalid_argument("center_prior: sigma_frac must be positive");

  const double cx = (width - 1) / 2.0;
  const double cy = (height - 1) / 2.0;
  const double sigma = sigma_frac * std::min(width, height);
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);

  SaliencyMap map;
  map.width = width;
  map.height = height;
  map.values.resize(static_cast<std::size_t>(width) * height);
  double peak = 0.0;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
      const double v = std::exp(-d2 * inv2s2);
      map.values[static_cast<std::size_t>(y) * width + x] = v;
      peak = std::max(peak, v);
    }
  // Even dimensions put the center between pixels; rescale so the maximum
  // pixel is exactly 1.
  for (double& v : map.values) v /= peak;
  return map;
}

BinaryMask binarize(const SaliencyMap& map, double t_h) {
  if (t_h <= 0.0 || t_h >= 1.0)
    throw std::invalid_argument("binarize: t_h must lie in (0, 1)");
  BinaryMask mask;
  mask.width = map.width;
  mask.height = map.height;
  mask.values.resize(map.values.size());
  for (std::size_t i = 0; i < map.values.size(); ++i)
    mask.values[i] = map.values[i] >= t_h ? 1 : 0;
  return mask;
}

AttentiveRegion attentive_region(const BinaryMask& mask) {
  const int w = mask.width, h = mask.height;
  AttentiveRegion region;
  region.mask.width = w;
  region.mask.height = h;
  region.mask.values.assign(static_cast<std::size_t>(w) * h, 0);

  // Scan-order flood fill; the first component of the maximal size wins,
  // which keeps the result deterministic.
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  int best_label = -1;
  std::size_t best_size = 0;
  int next_label = 0;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < label.size(); ++start) {
    if (!mask.values[start] || label[start] != -1) continue;
    std::size_t size = 0;
    stack.assign(1, start);
    label[start] = next_label;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      ++size;
      const int x = static_cast<int>(i % w);
      const int y = static_cast<int>(i / w);
      const auto visit = [&](int nx, int ny) {
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) return;
        const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
        if (mask.values[j] && label[j] == -1) {
          label[j] = next_label;
          stack.push_back(j);
        }
      };
      visit(x - 1, y);
      visit(x + 1, y);
      visit(x, y - 1);
      visit(x, y + 1);
    }
    if (size > best_size) {
      best_size = size;
      best_label = next_label;
    }
    ++next_label;
  }

  if (best_label < 0) {
    // Empty mask: fall back to the whole frame.
    region.x0 = 0;
    region.y0 = 0;
    region.x1 = w - 1;
    region.y1 = h - 1;
    region.full_frame_fallback = true;
    std::fill(region.mask.values.begin(), region.mask.values.end(), 1);
    return region;
  }

  region.x0 = w;
  region.y0 = h;
  region.x1 = 0;
  region.y1 = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (label[i] != best_label) continue;
      region.mask.values[i] = 1;
      region.x0 = std::min(region.x0, x);
      region.y0 = std::min(region.y0, y);
      region.x1 = std::max(region.x1, x);
      region.y1 = std::max(region.y1, y);
    }
  return region;
}

}  // namespace asitu

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace asitu {

/// Probability map over a frame; every value lies in [0, 1].
struct SaliencyMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;  // 0 or 1

  bool at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x] != 0;
  }
};

/// Prime fixation area: tight bounding box of the largest 4-connected
/// component of a binary saliency mask. If the mask was empty the region
/// falls back to the whole frame and is flagged.
struct AttentiveRegion {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive pixel bounds
  BinaryMask mask;                     // the selected component only
  bool full_frame_fallback = false;

  int width() const { return x1 - x0 + 1; }
  int height() const { return y1 - y0 + 1; }
};

/// Loads a precomputed saliency map (PGM P5, values scaled by 1/255) and
/// checks it against the expected frame dimensions.
SaliencyMap load_saliency(const std::filesystem::path& path, int width,
                          int height);

/// Isotropic Gaussian fallback prior centered on the frame, peak exactly 1.
/// sigma = sigma_frac * min(W, H).
SaliencyMap center_prior(int width, int height, double sigma_frac = 0.25);

/// value >= t_h maps to 1. t_h must lie in (0, 1).
BinaryMask binarize(const SaliencyMap& map, double t_h);

AttentiveRegion attentive_region(const BinaryMask& mask);

}  // namespace asitu

#pragma once

#include <iosfwd>
#include <vector>

#include "asitu/image.hpp"
#include "asitu/ingest.hpp"

namespace asitu {

struct FlowConfig {
  int block_size = 16;     // px; >= 4, power of two
  int search_radius = 7;   // full-search radius at the coarsest level, in that
                           // level's pixels
  int refine_radius = 2;   // correction radius at each finer level
  int pyramid_levels = 3;  // >= 1

  /// Largest representable displacement component (px/frame). The search is
  /// clamped to this bound, which also serves as |v_max| when normalizing
  /// motion activity.
  double max_displacement() const {
    return static_cast<double>(search_radius) * (1 << (pyramid_levels - 1));
  }
};

/// Dense motion-vector grid, one vector per non-overlapping block of the
/// first frame. Row-major: vectors[by * grid_w + bx].
struct FlowField {
  int grid_w = 0;
  int grid_h = 0;
  int block_size = 16;
  std::vector<double> vx;
  std::vector<double> vy;

  std::size_t size() const { return vx.size(); }
  /// Pixel coordinates of a block center in the source frame.
  double center_x(int bx) const { return bx * block_size + (block_size - 1) / 2.0; }
  double center_y(int by) const { return by * block_size + (block_size - 1) / 2.0; }
};

/// Estimates block displacements from frame_a to frame_b by coarse-to-fine
/// SAD matching. Matching-cost ties break toward the smaller displacement
/// magnitude, then lexicographically on (vx, vy); the result is fully
/// deterministic.
FlowField estimate_flow(const Image& frame_a, const Image& frame_b,
                        const FlowConfig& cfg = {});

/// Mean vector magnitude normalized by v_max_mag, in [0, 1].
double motion_activity(const FlowField& flow, double v_max_mag);

/// Per-frame device-motion gate G in [0, 1]: deviation of the acceleration
/// magnitude from its median, Gaussian-smoothed (std sigma_s, 3-sigma
/// truncation) and min-max normalized over the situation. A constant
/// magnitude series maps to all zeros.
std::vector<double> artifact_gate(const AccelSeries& accel_at_frames,
                                  double sigma_s = 0.5);

/// Motion component: (1 - g) * m_bar. Both inputs must lie in [0, 1].
double motion_component(double m_bar, double g);

/// Debug dump, one "bx,by,vx,vy" row per block.
void write_flow_csv(std::ostream& out, const FlowField& flow);

}  // namespace asitu

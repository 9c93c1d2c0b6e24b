#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "asitu/flow.hpp"
#include "asitu/saliency.hpp"

namespace asitu {

/// Local first-order flow model v(p) = u + chi * (p - p0), reduced to the
/// divergence / rotation / hyperbolic basis:
///   d1 = chi11 + chi22   (divergence; positive when approaching)
///   d2 = chi21 - chi12   (rotation / curl)
///   h1 = chi11 - chi22   (hyperbolic, axis-aligned)
///   h2 = chi21 + chi12   (hyperbolic, diagonal)
/// chi reconstructs exactly as (d1*D1 + d2*D2 + h1*H1 + h2*H2) / 2.
struct FlowParams {
  double u1 = 0.0, u2 = 0.0;  // translation, px/frame
  double d1 = 0.0, d2 = 0.0;  // 1/frame
  double h1 = 0.0, h2 = 0.0;
  double residual = 0.0;      // RMS reconstruction error over the fit window
};

/// chi laid out [[chi11, chi12], [chi21, chi22]] row-major.
using Mat2 = std::array<double, 4>;

std::array<double, 4> decompose(const Mat2& chi);          // (d1, d2, h1, h2)
Mat2 compose(double d1, double d2, double h1, double h2);  // exact inverse

struct MotivationConfig {
  int window_blocks = 3;   // fitting window side, in flow-grid blocks
  double epsilon = 1e-6;   // denominator regularizer
  double kappa = 10.0;     // per-window ratio clamp
  // Raw variant for comparison: signed denominator d2 + h1 + h2, no clamp.
  bool raw_ratio_mode = false;
};

struct WindowRatio {
  int wx = 0, wy = 0;  // window origin in flow-grid coordinates
  FlowParams params;
  double rho = 0.0;
};

struct MotivationResult {
  double log_o = 0.0;  // natural log of the motivation component
  std::vector<WindowRatio> windows;
  bool degenerate_fit = false;  // region too thin for any well-posed fit
};

/// Least-squares affine fit over a rectangular sub-grid of flow blocks
/// (block columns [bx0, bx1], rows [by0, by1], inclusive). Throws when the
/// block centers are collinear.
FlowParams fit_affine_flow(const FlowField& flow, int bx0, int by0, int bx1,
                           int by1);

/// Sliding-window affine fits inside the attentive region; each window
/// contributes rho = d1 / (|d2| + |h1| + |h2| + eps), clamped to
/// [-kappa, kappa], and log_o is their sum. Regions thinner than one window
/// fall back to a single whole-region fit.
MotivationResult motivation_component(const FlowField& flow,
                                      const AttentiveRegion& region,
                                      const MotivationConfig& cfg = {});

/// Debug dump: "frame,window_x,window_y,u1,u2,d1,d2,h1,h2,rho".
void write_motivation_csv(std::ostream& out, int frame,
                          const MotivationResult& result);

}  // namespace asitu

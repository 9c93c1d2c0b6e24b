#include "asitu/motivation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "asitu/csv.hpp"

namespace asitu {

std::array<double, 4> decompose(const Mat2& chi) {
  const double c11 = chi[0], c12 = chi[1], c21 = chi[2], c22 = chi[3];
  return {c11 + c22, c21 - c12, c11 - c22, c21 + c12};
}

Mat2 compose(double d1, double d2, double h1, double h2) {
  return {0.5 * (d1 + h1), 0.5 * (h2 - d2), 0.5 * (d2 + h2), 0.5 * (d1 - h1)};
}

FlowParams fit_affine_flow(const FlowField& flow, int bx0, int by0, int bx1,
                           int by1) {
  if (bx0 < 0 || by0 < 0 || bx1 >= flow.grid_w || by1 >= flow.grid_h ||
      bx0 > bx1 || by0 > by1)
    throw std::invalid_argument("fit_affine_flow: window outside the flow grid");
  const int nx = bx1 - bx0 + 1;
  const int ny = by1 - by0 + 1;
  const int n = nx * ny;
  if (n < 3 || nx < 2 || ny < 2)
    throw std::runtime_error(
        "fit_affine_flow: collinear block centers give a singular fit");

  // p0 is the window center; with it at the design-matrix origin the
  // intercept estimate is exactly the velocity at p0.
  const double p0x = 0.5 * (flow.center_x(bx0) + flow.center_x(bx1));
  const double p0y = 0.5 * (flow.center_y(by0) + flow.center_y(by1));

  // Two independent least-squares systems share one design matrix:
  //   vx = u1 + chi11*dx + chi12*dy,  vy = u2 + chi21*dx + chi22*dy.
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs_x(n), rhs_y(n);
  int r = 0;
  for (int by = by0; by <= by1; ++by)
    for (int bx = bx0; bx <= bx1; ++bx, ++r) {
      design(r, 0) = 1.0;
      design(r, 1) = flow.center_x(bx) - p0x;
      design(r, 2) = flow.center_y(by) - p0y;
      const std::size_t i = static_cast<std::size_t>(by) * flow.grid_w + bx;
      rhs_x(r) = flow.vx[i];
      rhs_y(r) = flow.vy[i];
    }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3)
    throw std::runtime_error(
        "fit_affine_flow: collinear block centers give a singular fit");
  const Eigen::Vector3d cx = qr.solve(rhs_x);
  const Eigen::Vector3d cy = qr.solve(rhs_y);

  FlowParams params;
  params.u1 = cx(0);
  params.u2 = cy(0);
  const Mat2 chi{cx(1), cx(2), cy(1), cy(2)};
  const auto [d1, d2, h1, h2] = decompose(chi);
  params.d1 = d1;
  params.d2 = d2;
  params.h1 = h1;
  params.h2 = h2;

  const double ssr = (design * cx - rhs_x).squaredNorm() +
                     (design * cy - rhs_y).squaredNorm();
  params.residual = std::sqrt(ssr / (2.0 * n));
  return params;
}

namespace {

double window_ratio(const FlowParams& p, const MotivationConfig& cfg) {
  if (cfg.raw_ratio_mode) {
    const double den = p.d2 + p.h1 + p.h2;
    // The raw form divides by a signed sum that can vanish; treat an exactly
    // zero denominator as no contribution instead of poisoning the sum.
    return den == 0.0 ? 0.0 : p.d1 / den;
  }
  const double den = std::abs(p.d2) + std::abs(p.h1) + std::abs(p.h2) + cfg.epsilon;
  return std::clamp(p.d1 / den, -cfg.kappa, cfg.kappa);
}

}  // namespace

MotivationResult motivation_component(const FlowField& flow,
                                      const AttentiveRegion& region,
                                      const MotivationConfig& cfg) {
  if (cfg.window_blocks < 2)
    throw std::invalid_argument("motivation_component: window_blocks must be >= 2");

  // Blocks whose centers fall inside the region's bounding box.
  int bx0 = flow.grid_w, bx1 = -1, by0 = flow.grid_h, by1 = -1;
  for (int bx = 0; bx < flow.grid_w; ++bx) {
    const double cx = flow.center_x(bx);
    if (cx >= region.x0 && cx <= region.x1) {
      bx0 = std::min(bx0, bx);
      bx1 = std::max(bx1, bx);
    }
  }
  for (int by = 0; by < flow.grid_h; ++by) {
    const double cy = flow.center_y(by);
    if (cy >= region.y0 && cy <= region.y1) {
      by0 = std::min(by0, by);
      by1 = std::max(by1, by);
    }
  }
  // A region thinner than one block row/column still gets a fit attempt over
  // the nearest blocks; widen the span to the enclosing blocks.
  if (bx1 < bx0) {
    bx0 = std::clamp(region.x0 / flow.block_size, 0, flow.grid_w - 1);
    bx1 = bx0;
  }
  if (by1 < by0) {
    by0 = std::clamp(region.y0 / flow.block_size, 0, flow.grid_h - 1);
    by1 = by0;
  }

  MotivationResult result;
  const int nx = bx1 - bx0 + 1;
  const int ny = by1 - by0 + 1;
  const int w = cfg.window_blocks;

  if (nx < w || ny < w) {
    try {
      WindowRatio wr;
      wr.wx = bx0;
      wr.wy = by0;
      wr.params = fit_affine_flow(flow, bx0, by0, bx1, by1);
      wr.rho = window_ratio(wr.params, cfg);
      result.log_o = wr.rho;
      result.windows.push_back(wr);
    } catch (const std::runtime_error&) {
      result.degenerate_fit = true;  // collinear centers; neutral motivation
      result.log_o = 0.0;
    }
    return result;
  }

  for (int wy = by0; wy + w - 1 <= by1; ++wy)
    for (int wx = bx0; wx + w - 1 <= bx1; ++wx) {
      WindowRatio wr;
      wr.wx = wx;
      wr.wy = wy;
      wr.params = fit_affine_flow(flow, wx, wy, wx + w - 1, wy + w - 1);
      wr.rho = window_ratio(wr.params, cfg);
      result.log_o += wr.rho;
      result.windows.push_back(wr);
    }
  return result;
}

void write_motivation_csv(std::ostream& out, int frame,
                          const MotivationResult& result) {
  for (const auto& w : result.windows) {
    out << frame << ',' << w.wx << ',' << w.wy << ','
        << format_double(w.params.u1) << ',' << format_double(w.params.u2)
        << ',' << format_double(w.params.d1) << ','
        << format_double(w.params.d2) << ',' << format_double(w.params.h1)
        << ',' << format_double(w.params.h2) << ',' << format_double(w.rho)
        << '\n';
  }
}

}  // namespace asitu

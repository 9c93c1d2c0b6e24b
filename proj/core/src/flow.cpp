#include "asitu/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "asitu/csv.hpp"
#include "asitu/series.hpp"

namespace asitu {

namespace {

Image downsample2(const Image& src) {
  Image dst(src.width / 2, src.height / 2);
  for (int y = 0; y < dst.height; ++y) {
    const std::uint8_t* r0 = &src.pixels[static_cast<std::size_t>(2 * y) * src.width];
    const std::uint8_t* r1 = r0 + src.width;
    for (int x = 0; x < dst.width; ++x) {
      const int sum = r0[2 * x] + r0[2 * x + 1] + r1[2 * x] + r1[2 * x + 1];
      dst.at(x, y) = static_cast<std::uint8_t>((sum + 2) / 4);
    }
  }
  return dst;
}

std::uint32_t sad(const Image& a, int ax, int ay, const Image& b, int bx,
                  int by, int bs, std::uint32_t bail) {
  std::uint32_t cost = 0;
  for (int y = 0; y < bs; ++y) {
    const std::uint8_t* pa = &a.pixels[static_cast<std::size_t>(ay + y) * a.width + ax];
    const std::uint8_t* pb = &b.pixels[static_cast<std::size_t>(by + y) * b.width + bx];
    for (int x = 0; x < bs; ++x)
      cost += static_cast<std::uint32_t>(std::abs(int(pa[x]) - int(pb[x])));
    if (cost >= bail) return cost;
  }
  return cost;
}

struct Candidate {
  std::uint32_t cost = std::numeric_limits<std::uint32_t>::max();
  int dx = 0;
  int dy = 0;

  // cost, then displacement magnitude, then (dx, dy) lexicographic.
  bool better_than(const Candidate& o) const {
    if (cost != o.cost) return cost < o.cost;
    const long mag = long(dx) * dx + long(dy) * dy;
    const long omag = long(o.dx) * o.dx + long(o.dy) * o.dy;
    if (mag != omag) return mag < omag;
    if (dx != o.dx) return dx < o.dx;
    return dy < o.dy;
  }
};

}  // namespace

FlowField estimate_flow(const Image& frame_a, const Image& frame_b,
                        const FlowConfig& cfg) {
  if (!frame_a.same_dims(frame_b))
    throw std::invalid_argument("estimate_flow: frame dimension mismatch");
  if (cfg.block_size < 4)
    throw std::invalid_argument("estimate_flow: block_size must be >= 4");
  if (cfg.pyramid_levels < 1 || cfg.search_radius < 1)
    throw std::invalid_argument("estimate_flow: bad search configuration");
  if (frame_a.width < cfg.block_size || frame_a.height < cfg.block_size)
    throw std::invalid_argument("estimate_flow: frame smaller than one block");

  // The block grid is shared by all levels; blocks shrink with the images so
  // level l keeps one (block_size >> l)-sized block per grid cell. Levels are
  // capped so the coarsest block is still at least 2 px.
  int levels = cfg.pyramid_levels;
  while (levels > 1 && (cfg.block_size >> (levels - 1)) < 2) --levels;

  FlowField field;
  field.block_size = cfg.block_size;
  field.grid_w = frame_a.width / cfg.block_size;
  field.grid_h = frame_a.height / cfg.block_size;
  const std::size_t n_blocks =
      static_cast<std::size_t>(field.grid_w) * field.grid_h;

  std::vector<Image> pyr_a{frame_a}, pyr_b{frame_b};
  for (int l = 1; l < levels; ++l) {
    pyr_a.push_back(downsample2(pyr_a.back()));
    pyr_b.push_back(downsample2(pyr_b.back()));
  }

  // Displacement bound at the coarsest level equals search_radius; doubling
  // per level keeps every vector within cfg.max_displacement().
  std::vector<int> dx(n_blocks, 0), dy(n_blocks, 0);
  for (int level = levels - 1; level >= 0; --level) {
    const Image& a = pyr_a[level];
    const Image& b = pyr_b[level];
    const int bs = cfg.block_size >> level;
    const int cap = cfg.search_radius << (levels - 1 - level);
    const bool coarsest = (level == levels - 1);
    const int radius = coarsest ? cfg.search_radius : cfg.refine_radius;

    for (int by = 0; by < field.grid_h; ++by) {
      for (int bx = 0; bx < field.grid_w; ++bx) {
        const std::size_t idx = static_cast<std::size_t>(by) * field.grid_w + bx;
        const int x0 = bx * bs;
        const int y0 = by * bs;
        const int px = coarsest ? 0 : 2 * dx[idx];
        const int py = coarsest ? 0 : 2 * dy[idx];

        Candidate best;
        for (int ddy = -radius; ddy <= radius; ++ddy) {
          for (int ddx = -radius; ddx <= radius; ++ddx) {
            Candidate cand;
            cand.dx = px + ddx;
            cand.dy = py + ddy;
            if (std::abs(cand.dx) > cap || std::abs(cand.dy) > cap) continue;
            const int tx = x0 + cand.dx;
            const int ty = y0 + cand.dy;
            if (tx < 0 || ty < 0 || tx + bs > b.width || ty + bs > b.height)
              continue;
            cand.cost = sad(a, x0, y0, b, tx, ty, bs,
                            best.cost + 1);  // bail once strictly worse
            if (cand.better_than(best)) best = cand;
          }
        }
        // The zero candidate is always representable, so a match exists.
        dx[idx] = best.dx;
        dy[idx] = best.dy;
      }
    }
  }

  field.vx.resize(n_blocks);
  field.vy.resize(n_blocks);
  for (std::size_t i = 0; i < n_blocks; ++i) {
    field.vx[i] = static_cast<double>(dx[i]);
    field.vy[i] = static_cast<double>(dy[i]);
  }
  return field;
}

double motion_activity(const FlowField& flow, double v_max_mag) {
  if (v_max_mag <= 0.0)
    throw std::invalid_argument("motion_activity: v_max_mag must be positive");
  if (flow.size() == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < flow.size(); ++i)
    sum += std::sqrt(flow.vx[i] * flow.vx[i] + flow.vy[i] * flow.vy[i]);
  const double m = sum / (static_cast<double>(flow.size()) * v_max_mag);
  return std::min(m, 1.0);
}

std::vector<double> artifact_gate(const AccelSeries& accel_at_frames,
                                  double sigma_s) {
  const std::size_t n = accel_at_frames.samples.size();
  if (n < 2)
    throw std::invalid_argument("artifact_gate: need at least 2 samples");
  if (accel_at_frames.timestamps.size() != n)
    throw std::invalid_argument("artifact_gate: mismatched series");

  std::vector<double> mags(n);
  for (std::size_t i = 0; i < n; ++i)
    mags[i] = accel_at_frames.samples[i].magnitude();
  const double g0 = median(mags);

  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = std::abs(mags[i] - g0);

  const std::vector<double> smooth =
      gaussian_smooth(accel_at_frames.timestamps, dev, sigma_s);
  const MinMax mm = series_minmax(smooth);
  if (mm.hi - mm.lo < 1e-12) return std::vector<double>(n, 0.0);
  return minmax_normalize(smooth, mm.lo, mm.hi);
}

double motion_component(double m_bar, double g) {
  if (m_bar < 0.0 || m_bar > 1.0)
    throw std::invalid_argument("motion_component: m_bar outside [0, 1]");
  if (g < 0.0 || g > 1.0)
    throw std::invalid_argument("motion_component: g outside [0, 1]");
  return (1.0 - g) * m_bar;
}

void write_flow_csv(std::ostream& out, const FlowField& flow) {
  out << "bx,by,vx,vy\n";
  for (int by = 0; by < flow.grid_h; ++by)
    for (int bx = 0; bx < flow.grid_w; ++bx) {
      const std::size_t i = static_cast<std::size_t>(by) * flow.grid_w + bx;
      out << bx << ',' << by << ',' << format_double(flow.vx[i]) << ','
          << format_double(flow.vy[i]) << '\n';
    }
}

}  // namespace asitu

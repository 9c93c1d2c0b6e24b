#include "asitu/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "asitu/csv.hpp"
#include "asitu/image.hpp"
#include "asitu/rng.hpp"

namespace asitu {

namespace fs = std::filesystem;

namespace {

constexpr double kTau = 2.0 * 3.141592653589793238462643383279502884;

// Wrap-around smoothed-noise tile for the background texture.
struct Tile {
  static constexpr int kSize = 256;
  std::vector<double> v;

  explicit Tile(Rng& rng) : v(kSize * kSize) {
    std::vector<double> raw(kSize * kSize);
    for (double& x : raw) x = rng.uniform(0.0, 255.0);
    // Two box-blur passes leave enough gradient for block matching while
    // killing single-pixel noise.
    for (int pass = 0; pass < 2; ++pass) {
      for (int y = 0; y < kSize; ++y)
        for (int x = 0; x < kSize; ++x) {
          double acc = 0.0;
          for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx)
              acc += raw[((y + dy + kSize) % kSize) * kSize +
                         ((x + dx + kSize) % kSize)];
          v[y * kSize + x] = acc / 9.0;
        }
      raw = v;
    }
  }

  double sample(double x, double y) const {
    // Bilinear with wrap.
    const double fx = x - std::floor(x);
    const double fy = y - std::floor(y);
    const int x0 = static_cast<int>(std::floor(x)) % kSize;
    const int y0 = static_cast<int>(std::floor(y)) % kSize;
    const int xi = (x0 + kSize) % kSize;
    const int yi = (y0 + kSize) % kSize;
    const int xj = (xi + 1) % kSize;
    const int yj = (yi + 1) % kSize;
    const double a = v[yi * kSize + xi] * (1 - fx) + v[yi * kSize + xj] * fx;
    const double b = v[yj * kSize + xi] * (1 - fx) + v[yj * kSize + xj] * fx;
    return a * (1 - fy) + b * fy;
  }
};

std::string frame_name(const char* prefix, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%04d.pgm", prefix, index);
  return buf;
}

std::ofstream open_text(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("synth: cannot write " + path.string());
  return out;
}

}  // namespace

void generate_synthetic_dataset(const fs::path& out_dir,
                                const SynthConfig& cfg) {
  if (cfg.n_frames < 2 || cfg.width < 32 || cfg.height < 32)
    throw std::invalid_argument("synth: need at least 2 frames of 32x32");

  const fs::path frames_dir = out_dir / "frames";
  fs::create_directories(frames_dir);

  Rng scene_rng(cfg.seed);
  const Tile tile(scene_rng);

  const double cx = (cfg.width - 1) / 2.0;
  const double cy = (cfg.height - 1) / 2.0;
  const double r0 = 0.22 * std::min(cfg.width, cfg.height);

  Image frame(cfg.width, cfg.height);
  Image saliency(cfg.width, cfg.height);
  for (int f = 0; f < cfg.n_frames; ++f) {
    const double t = f / cfg.fps;
    // Slow pan plus an approach/withdraw zoom cycle on the center object.
    const double ox = 14.0 * std::sin(kTau * t / 21.0);
    const double oy = 7.0 * std::cos(kTau * t / 29.0);
    const double radius = r0 * (1.0 + 0.45 * std::sin(kTau * t / 8.0));

    for (int y = 0; y < cfg.height; ++y) {
      for (int x = 0; x < cfg.width; ++x) {
        const double dx = x - cx;
        const double dy = y - cy;
        const double dist = std::sqrt(dx * dx + dy * dy);
        double value;
        if (dist < radius) {
          // Radial rings scale with the radius, so zooming produces a
          // divergent flow field inside the attended region.
          const double rho = dist / radius;
          value = 130.0 + 95.0 * std::cos(kTau * 3.5 * rho) * (1.0 - 0.25 * rho);
        } else {
          value = tile.sample(x * 0.75 + ox, y * 0.75 + oy);
        }
        frame.at(x, y) =
            static_cast<std::uint8_t>(std::clamp(value, 0.0, 255.0));
        if (cfg.emit_saliency) {
          const double sigma = 0.8 * radius;
          const double s =
              255.0 * std::exp(-dist * dist / (2.0 * sigma * sigma));
          saliency.at(x, y) = static_cast<std::uint8_t>(std::clamp(s, 0.0, 255.0));
        }
      }
    }
    write_pgm(frames_dir / frame_name("frame", f), frame);
    if (cfg.emit_saliency)
      write_pgm(frames_dir / frame_name("saliency", f), saliency);
  }

  const double duration = (cfg.n_frames - 1) / cfg.fps;
  const double shake_end = cfg.shake_time_s + cfg.shake_duration_s;

  // Accelerometer: gravity on z, small jitter, one shake burst.
  {
    Rng rng(cfg.seed + 1);
    auto out = open_text(out_dir / "accel.csv");
    out << "t,ax,ay,az\n";
    const int n = static_cast<int>(duration * cfg.accel_rate_hz) + 1;
    for (int k = 0; k < n; ++k) {
      const double t = k / cfg.accel_rate_hz;
      double ax = 0.05 * rng.gaussian();
      double ay = 0.05 * rng.gaussian();
      double az = 9.81 + 0.05 * rng.gaussian();
      if (t >= cfg.shake_time_s && t < shake_end) {
        ax += 6.0 * std::sin(kTau * 8.0 * t);
        ay += 4.5 * std::cos(kTau * 11.0 * t);
      }
      out << format_double(t) << ',' << format_double(ax) << ','
          << format_double(ay) << ',' << format_double(az) << '\n';
    }
  }

  // EEG: alpha rhythm, a quadratically coupled (6, 16, 22) Hz triad with
  // per-second phases, white noise, and a large artifact during the shake.
  {
    Rng rng(cfg.seed + 2);
    auto out = open_text(out_dir / "eeg.csv");
    out << "t,f3,f4\n";
    const int n = static_cast<int>(duration * cfg.eeg_rate_hz) + 1;
    double p6[2] = {0, 0}, p16[2] = {0, 0}, pa[2] = {0, 0};
    int last_second = -1;
    for (int k = 0; k < n; ++k) {
      const double t = static_cast<double>(k) / cfg.eeg_rate_hz;
      const int second = static_cast<int>(t);
      if (second != last_second) {
        for (int c = 0; c < 2; ++c) {
          p6[c] = rng.uniform(0.0, kTau);
          p16[c] = rng.uniform(0.0, kTau);
          pa[c] = rng.uniform(0.0, kTau);
        }
        last_second = second;
      }
      double ch[2];
      for (int c = 0; c < 2; ++c) {
        const double alpha_amp = (c == 0 ? 8.0 : 6.0) *
                                 (1.0 + 0.3 * std::sin(kTau * t / 13.0));
        double v = alpha_amp * std::sin(kTau * 10.0 * t + pa[c]);
        v += 2.0 * (std::cos(kTau * 6.0 * t + p6[c]) +
                    std::cos(kTau * 16.0 * t + p16[c]) +
                    std::cos(kTau * 22.0 * t + p6[c] + p16[c]));
        v += 3.0 * rng.gaussian();
        if (t >= cfg.shake_time_s && t < shake_end)
          v += 60.0 * std::sin(kTau * 4.5 * t) + 12.0 * rng.gaussian();
        ch[c] = v;
      }
      out << format_double(t) << ',' << format_double(ch[0]) << ','
          << format_double(ch[1]) << '\n';
    }
  }

  {
    auto out = open_text(out_dir / "ratings.csv");
    out << "situation_id,valence,arousal\n";
    out << cfg.id << ",1,4\n";
  }

  {
    auto out = open_text(out_dir / "config.json");
    out << "{\n"
        << "  \"situations\": [\n"
        << "    {\n"
        << "      \"id\": \"" << cfg.id << "\",\n"
        << "      \"frames_dir\": \"frames\",\n"
        << "      \"frames_pattern\": \"frame_*.pgm\",\n"
        << "      \"nominal_fps\": " << format_double(cfg.fps) << ",\n"
        << "      \"accel_csv\": \"accel.csv\",\n"
        << "      \"eeg_csv\": \"eeg.csv\"";
    if (cfg.emit_saliency) out << ",\n      \"saliency_dir\": \"frames\"\n";
    else out << "\n";
    out << "    }\n"
        << "  ],\n"
        << "  \"ratings_csv\": \"ratings.csv\"\n"
        << "}\n";
  }
}

}  // namespace asitu

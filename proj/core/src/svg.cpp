#include "asitu/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "asitu/series.hpp"

namespace asitu {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 480;
constexpr int kMargin = 48;

const char* kTraceColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                              "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::ofstream open_svg(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open SVG for writing: " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  return out;
}

void axis_frame(std::ofstream& out, const std::string& x_label,
                const std::string& y_label) {
  out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\""
      << kWidth - 2 * kMargin << "\" height=\"" << kHeight - 2 * kMargin
      << "\" fill=\"none\" stroke=\"#444444\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << kHeight / 2 << ")\">" << y_label << "</text>\n";
}

double map_x(double v, double lo, double hi) {
  return kMargin + (v - lo) / (hi - lo) * (kWidth - 2 * kMargin);
}

double map_y(double v, double lo, double hi) {
  return kHeight - kMargin - (v - lo) / (hi - lo) * (kHeight - 2 * kMargin);
}

}  // namespace

void write_va_plot(const std::filesystem::path& path,
                   std::span<const double> valence,
                   std::span<const double> arousal,
                   std::span<const CurveSample> curve_samples) {
  auto out = open_svg(path);
  axis_frame(out, "valence", "arousal");

  // Fixed label ranges: V in [-1, 1], A in [0, 1].
  out << "<line x1=\"" << fmt(map_x(0.0, -1.0, 1.0)) << "\" y1=\"" << kMargin
      << "\" x2=\"" << fmt(map_x(0.0, -1.0, 1.0)) << "\" y2=\""
      << kHeight - kMargin << "\" stroke=\"#cccccc\"/>\n";

  for (std::size_t i = 0; i < valence.size(); ++i) {
    out << "<circle cx=\"" << fmt(map_x(valence[i], -1.0, 1.0)) << "\" cy=\""
        << fmt(map_y(arousal[i], 0.0, 1.0))
        << "\" r=\"2\" fill=\"#1f77b4\" fill-opacity=\"0.45\"/>\n";
  }

  if (!curve_samples.empty()) {
    out << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" points=\"";
    for (const auto& s : curve_samples) {
      const double a = std::clamp(s.mean_a, 0.0, 1.0);
      out << fmt(map_x(s.v, -1.0, 1.0)) << ',' << fmt(map_y(a, 0.0, 1.0)) << ' ';
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

void write_trace_plot(const std::filesystem::path& path,
                      std::span<const double> timestamps,
                      std::span<const TracePlotSeries> series) {
  if (timestamps.empty() || series.empty())
    throw std::invalid_argument("write_trace_plot: empty input");
  auto out = open_svg(path);
  axis_frame(out, "time [s]", "per-series normalized value");

  const double t0 = timestamps.front();
  const double t1 = std::max(timestamps.back(), t0 + 1e-9);

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& tr = series[s];
    if (tr.values.size() != timestamps.size())
      throw std::invalid_argument("write_trace_plot: series length mismatch");
    const MinMax mm = series_minmax(tr.values);
    const double lo = mm.lo;
    const double hi = mm.hi - mm.lo < 1e-12 ? mm.lo + 1.0 : mm.hi;
    const char* color = kTraceColors[s % 6];

    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < timestamps.size(); ++i) {
      out << fmt(map_x(timestamps[i], t0, t1)) << ','
          << fmt(map_y((tr.values[i] - lo) / (hi - lo), 0.0, 1.0)) << ' ';
    }
    out << "\"/>\n";
    out << "<text x=\"" << kWidth - kMargin - 4 << "\" y=\""
        << kMargin + 16 + 16 * static_cast<int>(s)
        << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << color << "\">"
        << tr.name << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace asitu

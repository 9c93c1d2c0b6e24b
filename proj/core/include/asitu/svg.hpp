#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "asitu/curve.hpp"

namespace asitu {

/// Valence-arousal scatter of the per-frame labels with the fitted curve's
/// posterior mean overlaid. Deterministic text output.
void write_va_plot(const std::filesystem::path& path,
                   std::span<const double> valence,
                   std::span<const double> arousal,
                   std::span<const CurveSample> curve_samples);

/// Time traces of named series sharing one time axis, each auto-scaled to
/// its own min/max band.
struct TracePlotSeries {
  std::string name;
  std::vector<double> values;
};

void write_trace_plot(const std::filesystem::path& path,
                      std::span<const double> timestamps,
                      std::span<const TracePlotSeries> series);

}  // namespace asitu

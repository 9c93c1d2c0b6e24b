#pragma once

#include <span>
#include <vector>

namespace asitu {

// Timestamp comparisons throughout the pipeline use this tolerance (seconds).
inline constexpr double kTimeTolerance = 1e-6;

/// Linear interpolation of (ts, vs) at time t. Returns the stored sample
/// exactly when t matches a timestamp within kTimeTolerance. Outside the
/// sampled range the nearest endpoint is held if the distance is at most
/// max_gap_s, otherwise this throws; the same cap applies to the bracketing
/// interval inside the range.
double interp_linear(std::span<const double> ts, std::span<const double> vs,
                     double t, double max_gap_s);

/// Centered moving average. The window is `window` samples wide (forced odd,
/// capped at the series length); near the edges the window keeps its full
/// width and slides no further, so only real samples are ever averaged and
/// the per-step change never exceeds (max - min) / window.
std::vector<double> moving_average(std::span<const double> xs, int window);

/// Maps [lo, hi] to [0, 1]; a degenerate range (hi - lo below eps) maps the
/// whole series to 0.5.
std::vector<double> minmax_normalize(std::span<const double> xs, double lo,
                                     double hi, double eps = 1e-12);

/// Gaussian smoothing on an irregularly sampled series. Kernel weights come
/// from the actual timestamps and are truncated at 3 sigma.
std::vector<double> gaussian_smooth(std::span<const double> ts,
                                    std::span<const double> xs,
                                    double sigma_s);

double median(std::vector<double> xs);  // by value: selection reorders

struct MinMax {
  double lo = 0.0;
  double hi = 0.0;
};
MinMax series_minmax(std::span<const double> xs);

}  // namespace asitu

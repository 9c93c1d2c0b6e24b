#include "asitu/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace asitu {

double interp_linear(std::span<const double> ts, std::span<const double> vs,
                     double t, double max_gap_s) {
  if (ts.size() != vs.size() || ts.empty())
    throw std::invalid_argument("interp_linear: mismatched or empty series");

  const auto it = std::lower_bound(ts.begin(), ts.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - ts.begin());

  if (hi < ts.size() && std::abs(ts[hi] - t) <= kTimeTolerance) return vs[hi];
  if (hi > 0 && std::abs(ts[hi - 1] - t) <= kTimeTolerance) return vs[hi - 1];

  if (hi == 0) {
    if (ts.front() - t > max_gap_s)
      throw std::runtime_error("interp_linear: t=" + std::to_string(t) +
                               " precedes the series by more than the gap cap");
    return vs.front();
  }
  if (hi == ts.size()) {
    if (t - ts.back() > max_gap_s)
      throw std::runtime_error("interp_linear: t=" + std::to_string(t) +
                               " follows the series by more than the gap cap");
    return vs.back();
  }

  const double t0 = ts[hi - 1], t1 = ts[hi];
  if (t1 - t0 > max_gap_s)
    throw std::runtime_error(
        "interp_linear: sample gap of " + std::to_string(t1 - t0) +
        " s exceeds the cap; refusing to interpolate across it");
  if (t1 == t0) return vs[hi - 1];
  const double w = (t - t0) / (t1 - t0);
  return vs[hi - 1] + w * (vs[hi] - vs[hi - 1]);
}

std::vector<double> moving_average(std::span<const double> xs, int window) {
  const int n = static_cast<int>(xs.size());
  if (n == 0) return {};
  int w = std::max(1, window);
  if (w % 2 == 0) ++w;
  w = std::min(w, n);

  // Prefix sums make each window O(1); edge windows are slid, not shrunk.
  std::vector<double> prefix(n + 1, 0.0);
  for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + xs[i];

  std::vector<double> out(n);
  const int half = w / 2;
  for (int i = 0; i < n; ++i) {
    int lo = i - half;
    lo = std::clamp(lo, 0, n - w);
    out[i] = (prefix[lo + w] - prefix[lo]) / w;
  }
  return out;
}

std::vector<double> minmax_normalize(std::span<const double> xs, double lo,
                                     double hi, double eps) {
  std::vector<double> out(xs.size());
  const double range = hi - lo;
  if (range < eps) {
    std::fill(out.begin(), out.end(), 0.5);
    return out;
  }
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (xs[i] - lo) / range;
  return out;
}

std::vector<double> gaussian_smooth(std::span<const double> ts,
                                    std::span<const double> xs,
                                    double sigma_s) {
  if (ts.size() != xs.size())
    throw std::invalid_argument("gaussian_smooth: mismatched series");
  const std::size_t n = xs.size();
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  if (sigma_s <= 0.0) {
    std::copy(xs.begin(), xs.end(), out.begin());
    return out;
  }
  const double cutoff = 3.0 * sigma_s;
  const double inv2s2 = 1.0 / (2.0 * sigma_s * sigma_s);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0, wsum = 0.0;
    // Timestamps are sorted; walk outward only as far as the 3-sigma cutoff.
    for (std::size_t j = i; j-- > 0;) {
      const double dt = ts[i] - ts[j];
      if (dt > cutoff) break;
      const double w = std::exp(-dt * dt * inv2s2);
      acc += w * xs[j];
      wsum += w;
    }
    for (std::size_t j = i; j < n; ++j) {
      const double dt = ts[j] - ts[i];
      if (dt > cutoff) break;
      const double w = std::exp(-dt * dt * inv2s2);
      acc += w * xs[j];
      wsum += w;
    }
    out[i] = acc / wsum;
  }
  return out;
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median of empty series");
  const std::size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + mid, xs.end());
  if (xs.size() % 2 == 1) return xs[mid];
  const double hi = xs[mid];
  std::nth_element(xs.begin(), xs.begin() + mid - 1, xs.begin() + mid);
  return 0.5 * (xs[mid - 1] + hi);
}

MinMax series_minmax(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("series_minmax: empty series");
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  return {*lo, *hi};
}

}  // namespace asitu

#include "asitu/affect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "asitu/series.hpp"

namespace asitu {

double contentment_component(double t_elapsed_s, const AffectParams& params) {
  if (t_elapsed_s < 0.0)
    throw std::invalid_argument("contentment_component: negative elapsed time");
  // delta(t) = t + lambda2 + 1 cancels the -lambda2, so the argument is t+1.
  return params.lambda1 * std::log(t_elapsed_s + 1.0) + params.lambda3;
}

Maxima compute_maxima(std::span<const ComponentSeries> batch,
                      std::span<const std::vector<double>> r_batch) {
  if (batch.empty())
    throw std::invalid_argument("compute_maxima: empty batch");
  Maxima mx;
  double m_max = 0.0, l_max = 0.0, r_max = 0.0;
  double log_o_max = -std::numeric_limits<double>::infinity();
  for (const auto& comp : batch) {
    for (double v : comp.m) m_max = std::max(m_max, v);
    for (double v : comp.l) l_max = std::max(l_max, std::abs(v));
    for (double v : comp.log_o) log_o_max = std::max(log_o_max, v);
  }
  for (const auto& rs : r_batch)
    for (double v : rs) r_max = std::max(r_max, std::abs(v));

  mx.m_max = std::max(m_max, Maxima::kFloor);
  mx.l_max = std::max(l_max, Maxima::kFloor);
  mx.r_max = std::max(r_max, Maxima::kFloor);
  mx.log_o_max = std::max(log_o_max, Maxima::kFloor);
  return mx;
}

std::vector<double> arousal_raw(const ComponentSeries& comp,
                                const AffectParams& params,
                                const Maxima& maxima) {
  if (comp.size() == 0)
    throw std::invalid_argument("arousal_raw: empty component series");
  if (comp.m.size() != comp.size() || comp.l.size() != comp.size())
    throw std::invalid_argument("arousal_raw: mismatched component lengths");
  std::vector<double> out(comp.size());
  for (std::size_t i = 0; i < comp.size(); ++i)
    out[i] = params.alpha1 * comp.m[i] / maxima.m_max +
             params.alpha2() * comp.l[i] / maxima.l_max;
  return out;
}

int smoothing_window_frames(std::span<const double> timestamps,
                            double window_s) {
  if (timestamps.size() < 2 || window_s <= 0.0) return 1;
  const double span = timestamps.back() - timestamps.front();
  if (span <= 0.0) return 1;
  const double dt = span / static_cast<double>(timestamps.size() - 1);
  int w = static_cast<int>(std::lround(window_s / dt));
  if (w < 1) w = 1;
  if (w % 2 == 0) ++w;
  return w;
}

std::vector<double> arousal_series(const ComponentSeries& comp,
                                   const AffectParams& params,
                                   const Maxima& maxima) {
  const std::vector<double> raw = arousal_raw(comp, params, maxima);
  const int w = smoothing_window_frames(comp.timestamps, params.smoothing_window_s);
  const std::vector<double> smooth = moving_average(raw, w);
  const MinMax mm = series_minmax(smooth);
  return minmax_normalize(smooth, mm.lo, mm.hi);
}

double range_dependence(double l, double arousal) {
  if (arousal < 0.0 || arousal > 1.0)
    throw std::invalid_argument("range_dependence: arousal outside [0, 1]");
  if (l > 0.0) return arousal;
  if (l < 0.0) return -arousal;
  return 0.0;
}

std::vector<double> valence_series(std::span<const double> r,
                                   std::span<const double> log_o,
                                   std::span<const double> timestamps,
                                   const AffectParams& params,
                                   const Maxima& maxima) {
  if (r.empty()) throw std::invalid_argument("valence_series: empty series");
  if (r.size() != log_o.size() || r.size() != timestamps.size())
    throw std::invalid_argument("valence_series: mismatched series lengths");

  std::vector<double> raw(r.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    raw[i] = params.nu1 * r[i] / maxima.r_max +
             params.nu2() * std::exp(log_o[i] - maxima.log_o_max);

  const int w = smoothing_window_frames(timestamps, params.smoothing_window_s);
  std::vector<double> out = moving_average(raw, w);
  for (double& v : out) v = std::clamp(v, -1.0, 1.0);
  return out;
}

}  // namespace asitu

#pragma once

#include <span>
#include <vector>

namespace asitu {

/// Per-frame component traces for one situation.
struct ComponentSeries {
  std::vector<double> timestamps;  // seconds
  std::vector<double> m;           // motion, in [0, 1]
  std::vector<double> log_o;       // log motivation
  std::vector<double> l;           // contentment

  std::size_t size() const { return timestamps.size(); }
};

struct AffectParams {
  double lambda1 = 0.5;   // contentment growth rate (per-subject 0.25/0.5/0.75)
  double lambda2 = 2.0;
  double lambda3 = -1.0;
  double alpha1 = 0.75;   // arousal weight on motion; alpha2 = 1 - alpha1
  double nu1 = 0.5;       // valence weight on range dependence; nu2 = 1 - nu1
  double smoothing_window_s = 5.0;

  double alpha2() const { return 1.0 - alpha1; }
  double nu2() const { return 1.0 - nu1; }
};

/// Normalization maxima over a batch of situations; all floored at a small
/// epsilon so they can be divided by.
struct Maxima {
  double m_max = 1e-9;
  double l_max = 1e-9;      // max |l|
  double r_max = 1e-9;      // max |r|
  double log_o_max = 1e-9;  // max log_o (signed)

  static constexpr double kFloor = 1e-9;
};

/// Arousal in [0, 1] and valence in [-1, 1], one pair per frame.
struct LabelSeries {
  std::vector<double> timestamps;
  std::vector<double> valence;
  std::vector<double> arousal;

  std::size_t size() const { return timestamps.size(); }
};

/// Contentment l = lambda1 * log(t_elapsed + 1) + lambda3; the offset keeps
/// the log argument >= 1, so l(0) = lambda3.
double contentment_component(double t_elapsed_s, const AffectParams& params);

/// Componentwise maxima over a batch; r series (if already available) feed
/// r_max. Every field is floored at Maxima::kFloor.
Maxima compute_maxima(std::span<const ComponentSeries> batch,
                      std::span<const std::vector<double>> r_batch = {});

/// Unsmoothed weighted average alpha1 * m/m_max + alpha2 * l/l_max.
std::vector<double> arousal_raw(const ComponentSeries& comp,
                                const AffectParams& params,
                                const Maxima& maxima);

/// Smoothing window width in frames for this series (odd, >= 1).
int smoothing_window_frames(std::span<const double> timestamps, double window_s);

/// Full arousal pipeline for a single situation: raw weighted average,
/// centered moving average over the smoothing window, then min-max
/// normalization over this series (a constant series maps to 0.5).
std::vector<double> arousal_series(const ComponentSeries& comp,
                                   const AffectParams& params,
                                   const Maxima& maxima);

/// Range dependence r = sign(l) * A with sign(0) = 0; A must be in [0, 1].
double range_dependence(double l, double arousal);

/// Valence: nu1 * r/r_max + nu2 * exp(log_o - log_o_max), smoothed with the
/// same moving-average filter as arousal and clamped to [-1, 1].
std::vector<double> valence_series(std::span<const double> r,
                                   std::span<const double> log_o,
                                   std::span<const double> timestamps,
                                   const AffectParams& params,
                                   const Maxima& maxima);

}  // namespace asitu

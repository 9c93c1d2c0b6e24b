#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace asitu {

struct CurveConfig {
  double noise_variance = 1e-2;
  // Heuristics when <= 0: length_scale = median pairwise |dV| (floor 1e-3),
  // signal_variance = variance of the linear-basis residuals.
  double length_scale = 0.0;
  double signal_variance = -1.0;
  // Optional marginal-likelihood grid search (9 length scales x 5 noise
  // levels around the heuristics).
  bool optimize_hyperparams = false;
};

struct CurveSample {
  double v = 0.0;
  double mean_a = 0.0;
  double var_a = 0.0;
};

/// Exact GP regression of arousal on valence: a generalized-least-squares
/// linear mean (intercept + slope) plus a zero-mean GP with a squared
/// exponential kernel. Immutable once fitted; safe to sample concurrently.
class AffectiveCurve {
 public:
  /// Requires >= 2 points. All-identical V collapses to a constant curve at
  /// the mean A, flagged via degenerate().
  static AffectiveCurve fit(std::span<const double> v, std::span<const double> a,
                            const CurveConfig& cfg = {});

  double mean_at(double v) const;
  double variance_at(double v) const;  // clamped at 0
  double mean_derivative_at(double v) const;
  std::vector<CurveSample> sample(std::span<const double> v_grid) const;

  bool degenerate() const;
  double length_scale() const;
  double signal_variance() const;
  double noise_variance() const;
  double basis_intercept() const;
  double basis_slope() const;

  AffectiveCurve(const AffectiveCurve&);
  AffectiveCurve& operator=(const AffectiveCurve&);
  AffectiveCurve(AffectiveCurve&&) noexcept;
  AffectiveCurve& operator=(AffectiveCurve&&) noexcept;
  ~AffectiveCurve();

 private:
  AffectiveCurve();
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// 0-6 SAM-scale label pair (0 negative .. 6 positive valence; 0 low .. 6
/// high arousal).
struct SamScalePair {
  double v6 = 0.0;
  double a6 = 0.0;
};

/// v6 = 3(V+1), a6 = 6A. Inputs must lie in [-1,1] x [0,1].
SamScalePair to_sam_scale(double valence, double arousal);

/// Inverse of to_sam_scale.
void from_sam_scale(const SamScalePair& pair, double& valence, double& arousal);

/// Nine affective states over the 0-6 plane, low/mid/high arousal crossed
/// with negative/neutral/positive valence.
enum class AffectiveState {
  kLANV, kLAUV, kLAPV,
  kMANV, kMAUV, kMAPV,
  kHANV, kHAUV, kHAPV,
};

std::string to_string(AffectiveState s);

struct StateThresholds {
  // Bin edges on the 0-6 axes; a boundary belongs to the upper bin, except
  // the closing 6.0 which stays in the top bin.
  double arousal_low_mid = 2.0;
  double arousal_mid_high = 4.0;
  double valence_neg_neutral = 2.0;
  double valence_neutral_pos = 4.0;
};

AffectiveState bin_state(const SamScalePair& pair,
                         const StateThresholds& thresholds = {});

}  // namespace asitu

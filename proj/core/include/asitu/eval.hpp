#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "asitu/affect.hpp"
#include "asitu/curve.hpp"

namespace asitu {

/// SAM self-report for one situation: valence -3..3, arousal 0..6.
struct RatingRecord {
  std::string situation_id;
  double valence = 0.0;
  double arousal = 0.0;
};

/// Per-dimension RMSE on the 0-6 scale plus the normalized percentage under
/// both plausible divisors (6 scale range, 7 scale points).
struct RmseReport {
  double valence_rmse = 0.0;
  double arousal_rmse = 0.0;
  double valence_pct_range6 = 0.0;
  double arousal_pct_range6 = 0.0;
  double valence_pct_range7 = 0.0;
  double arousal_pct_range7 = 0.0;
  std::size_t n = 0;
};

std::vector<RatingRecord> load_ratings_csv(const std::filesystem::path& path);

/// Temporal mean of the label series mapped to the 0-6 scale.
SamScalePair situation_label_summary(const LabelSeries& labels);

/// Ratings are shifted to the 0-6 scale (valence +3) before differencing.
RmseReport rmse(std::span<const SamScalePair> predicted,
                std::span<const RatingRecord> truth);

/// Rank correlation with mid-rank tie handling. Requires length >= 3 and
/// non-constant ranks.
double spearman(std::span<const double> x, std::span<const double> y);

/// Product-moment correlation. Requires length >= 3 and nonzero variances.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace asitu

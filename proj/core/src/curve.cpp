#include "asitu/curve.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "asitu/series.hpp"

namespace asitu {

struct AffectiveCurve::Impl {
  Eigen::VectorXd train_v;
  Eigen::VectorXd alpha;       // K^-1 (y - H beta)
  Eigen::LLT<Eigen::MatrixXd> chol;
  double beta0 = 0.0;          // intercept
  double beta1 = 0.0;          // slope
  double length_scale = 1.0;
  double signal_variance = 0.0;
  double noise_variance = 1e-2;
  bool degenerate = false;
  double degenerate_mean = 0.0;

  double kernel(double a, double b) const {
    const double d = (a - b) / length_scale;
    return signal_variance * std::exp(-0.5 * d * d);
  }
};

namespace {

double median_pairwise_gap(const Eigen::VectorXd& v) {
  std::vector<double> gaps;
  gaps.reserve(static_cast<std::size_t>(v.size()) * (v.size() - 1) / 2);
  for (Eigen::Index i = 0; i < v.size(); ++i)
    for (Eigen::Index j = i + 1; j < v.size(); ++j)
      gaps.push_back(std::abs(v(i) - v(j)));
  return median(std::move(gaps));
}

Eigen::MatrixXd build_gram(const Eigen::VectorXd& v, double signal_variance,
                           double length_scale, double noise_variance) {
  const Eigen::Index n = v.size();
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double d = (v(i) - v(j)) / length_scale;
      const double k = signal_variance * std::exp(-0.5 * d * d);
      gram(i, j) = k;
      gram(j, i) = k;
    }
    gram(i, i) += noise_variance;
  }
  return gram;
}

/// Log marginal likelihood with the OLS linear trend removed; used only by
/// the optional hyperparameter grid search.
double log_evidence(const Eigen::VectorXd& v, const Eigen::VectorXd& resid,
                    double signal_variance, double length_scale,
                    double noise_variance) {
  const Eigen::MatrixXd gram =
      build_gram(v, signal_variance, length_scale, noise_variance);
  const Eigen::LLT<Eigen::MatrixXd> chol(gram);
  if (chol.info() != Eigen::Success)
    return -std::numeric_limits<double>::infinity();
  const Eigen::VectorXd alpha = chol.solve(resid);
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    log_det += 2.0 * std::log(chol.matrixL()(i, i));
  return -0.5 * resid.dot(alpha) - 0.5 * log_det -
         0.5 * static_cast<double>(v.size()) * std::log(2.0 * M_PI);
}

}  // namespace

AffectiveCurve::AffectiveCurve() : impl_(std::make_unique<Impl>()) {}
AffectiveCurve::~AffectiveCurve() = default;
AffectiveCurve::AffectiveCurve(AffectiveCurve&&) noexcept = default;
AffectiveCurve& AffectiveCurve::operator=(AffectiveCurve&&) noexcept = default;
AffectiveCurve::AffectiveCurve(const AffectiveCurve& o)
    : impl_(std::make_unique<Impl>(*o.impl_)) {}
AffectiveCurve& AffectiveCurve::operator=(const AffectiveCurve& o) {
  impl_ = std::make_unique<Impl>(*o.impl_);
  return *this;
}

AffectiveCurve AffectiveCurve::fit(std::span<const double> v,
                                   std::span<const double> a,
                                   const CurveConfig& cfg) {
  if (v.size() != a.size())
    throw std::invalid_argument("AffectiveCurve::fit: mismatched inputs");
  if (v.size() < 2)
    throw std::invalid_argument("AffectiveCurve::fit: need at least 2 points");
  if (cfg.noise_variance <= 0.0)
    throw std::invalid_argument("AffectiveCurve::fit: noise variance must be positive");

  AffectiveCurve curve;
  Impl& im = *curve.impl_;
  const Eigen::Index n = static_cast<Eigen::Index>(v.size());
  im.train_v = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(a.data(), n);
  im.noise_variance = cfg.noise_variance;

  const double v_spread = im.train_v.maxCoeff() - im.train_v.minCoeff();
  if (v_spread < 1e-12) {
    im.degenerate = true;
    im.degenerate_mean = y.mean();
    return curve;
  }

  // OLS pass: trend for the residual-variance heuristic and the grid search.
  Eigen::MatrixXd basis(n, 2);
  basis.col(0).setOnes();
  basis.col(1) = im.train_v;
  const Eigen::Vector2d beta_ols =
      (basis.transpose() * basis).ldlt().solve(basis.transpose() * y);
  const Eigen::VectorXd resid = y - basis * beta_ols;

  im.length_scale = cfg.length_scale > 0.0
                        ? cfg.length_scale
                        : std::max(median_pairwise_gap(im.train_v), 1e-3);
  im.signal_variance =
      cfg.signal_variance >= 0.0
          ? cfg.signal_variance
          : resid.squaredNorm() / static_cast<double>(std::max<Eigen::Index>(n - 1, 1));

  if (cfg.optimize_hyperparams && im.signal_variance > 0.0) {
    static constexpr double kScaleGrid[9] = {0.25, 0.35, 0.5,  0.7, 1.0,
                                             1.4,  2.0,  2.8,  4.0};
    static constexpr double kNoiseGrid[5] = {1e-4, 1e-3, 1e-2, 1e-1, 0.5};
    double best = -std::numeric_limits<double>::infinity();
    for (double ls : kScaleGrid) {
      for (double nv : kNoiseGrid) {
        const double cand_ls = im.length_scale * ls;
        const double cand_nv = nv * im.signal_variance;
        const double ev = log_evidence(im.train_v, resid, im.signal_variance,
                                       cand_ls, cand_nv);
        if (ev > best) {
          best = ev;
          im.length_scale = cand_ls;
          im.noise_variance = cand_nv;
        }
      }
    }
  }

  Eigen::MatrixXd gram = build_gram(im.train_v, im.signal_variance,
                                    im.length_scale, im.noise_variance);
  im.chol.compute(gram);
  // Rescue a numerically non-PD Gram with growing jitter; inflating the
  // noise floor slightly beats failing outright.
  double jitter = 1e-12 * (im.signal_variance + im.noise_variance + 1.0);
  while (im.chol.info() != Eigen::Success && jitter < 1e-3) {
    gram.diagonal().array() += jitter;
    im.chol.compute(gram);
    jitter *= 10.0;
  }
  if (im.chol.info() != Eigen::Success)
    throw std::runtime_error("AffectiveCurve::fit: Gram factorization failed");

  // Generalized least squares for the basis weights, then the usual alpha.
  const Eigen::MatrixXd kinv_basis = im.chol.solve(basis);
  const Eigen::Vector2d beta =
      (basis.transpose() * kinv_basis)
          .ldlt()
          .solve(kinv_basis.transpose() * y);
  im.beta0 = beta(0);
  im.beta1 = beta(1);
  im.alpha = im.chol.solve(y - basis * beta);
  return curve;
}

double AffectiveCurve::mean_at(double v) const {
  const Impl& im = *impl_;
  if (im.degenerate) return im.degenerate_mean;
  double acc = im.beta0 + im.beta1 * v;
  for (Eigen::Index i = 0; i < im.train_v.size(); ++i)
    acc += im.kernel(v, im.train_v(i)) * im.alpha(i);
  return acc;
}

double AffectiveCurve::mean_derivative_at(double v) const {
  const Impl& im = *impl_;
  if (im.degenerate) return 0.0;
  double acc = im.beta1;
  const double inv_ls2 = 1.0 / (im.length_scale * im.length_scale);
  for (Eigen::Index i = 0; i < im.train_v.size(); ++i)
    acc += im.kernel(v, im.train_v(i)) * (-(v - im.train_v(i)) * inv_ls2) *
           im.alpha(i);
  return acc;
}

double AffectiveCurve::variance_at(double v) const {
  const Impl& im = *impl_;
  if (im.degenerate) return 0.0;
  const Eigen::Index n = im.train_v.size();
  Eigen::VectorXd kstar(n);
  for (Eigen::Index i = 0; i < n; ++i) kstar(i) = im.kernel(v, im.train_v(i));
  const double var = im.signal_variance - kstar.dot(im.chol.solve(kstar));
  return std::max(var, 0.0);
}

std::vector<CurveSample> AffectiveCurve::sample(
    std::span<const double> v_grid) const {
  std::vector<CurveSample> out;
  out.reserve(v_grid.size());
  for (double v : v_grid)
    out.push_back({v, mean_at(v), variance_at(v)});
  return out;
}

bool AffectiveCurve::degenerate() const { return impl_->degenerate; }
double AffectiveCurve::length_scale() const { return impl_->length_scale; }
double AffectiveCurve::signal_variance() const { return impl_->signal_variance; }
double AffectiveCurve::noise_variance() const { return impl_->noise_variance; }
double AffectiveCurve::basis_intercept() const { return impl_->beta0; }
double AffectiveCurve::basis_slope() const { return impl_->beta1; }

SamScalePair to_sam_scale(double valence, double arousal) {
  if (valence < -1.0 || valence > 1.0)
    throw std::invalid_argument("to_sam_scale: valence outside [-1, 1]");
  if (arousal < 0.0 || arousal > 1.0)
    throw std::invalid_argument("to_sam_scale: arousal outside [0, 1]");
  return {3.0 * (valence + 1.0), 6.0 * arousal};
}

void from_sam_scale(const SamScalePair& pair, double& valence,
                    double& arousal) {
  valence = pair.v6 / 3.0 - 1.0;
  arousal = pair.a6 / 6.0;
}

std::string to_string(AffectiveState s) {
  switch (s) {
    case AffectiveState::kLANV: return "LANV";
    case AffectiveState::kLAUV: return "LAUV";
    case AffectiveState::kLAPV: return "LAPV";
    case AffectiveState::kMANV: return "MANV";
    case AffectiveState::kMAUV: return "MAUV";
    case AffectiveState::kMAPV: return "MAPV";
    case AffectiveState::kHANV: return "HANV";
    case AffectiveState::kHAUV: return "HAUV";
    case AffectiveState::kHAPV: return "HAPV";
  }
  return "?";
}

AffectiveState bin_state(const SamScalePair& pair,
                         const StateThresholds& thresholds) {
  const auto tier = [](double x, double lo, double hi) {
    if (x < lo) return 0;
    if (x < hi) return 1;
    return 2;
  };
  const int ai =
      tier(pair.a6, thresholds.arousal_low_mid, thresholds.arousal_mid_high);
  const int vi = tier(pair.v6, thresholds.valence_neg_neutral,
                      thresholds.valence_neutral_pos);
  static constexpr AffectiveState kTable[3][3] = {
      {AffectiveState::kLANV, AffectiveState::kLAUV, AffectiveState::kLAPV},
      {AffectiveState::kMANV, AffectiveState::kMAUV, AffectiveState::kMAPV},
      {AffectiveState::kHANV, AffectiveState::kHAUV, AffectiveState::kHAPV},
  };
  return kTable[ai][vi];
}

}  // namespace asitu

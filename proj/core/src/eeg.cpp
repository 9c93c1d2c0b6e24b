#include "asitu/eeg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include "asitu/series.hpp"

namespace asitu {

const std::array<Band, 4>& default_bands() {
  static const std::array<Band, 4> bands{Band{"theta", 4, 7},
                                         Band{"alpha", 8, 13},
                                         Band{"beta", 14, 29},
                                         Band{"gamma", 30, 45}};
  return bands;
}

namespace {

struct Biquad {
  double b0, b1, b2, a1, a2;  // normalized (a0 == 1)
};

// RBJ high-pass biquad for one second-order Butterworth section.
Biquad butter_hp_section(double cutoff_hz, double sample_rate, double q) {
  const double w0 = 2.0 * M_PI * cutoff_hz / sample_rate;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double c = std::cos(w0);
  const double a0 = 1.0 + alpha;
  Biquad s;
  s.b0 = (1.0 + c) / 2.0 / a0;
  s.b1 = -(1.0 + c) / a0;
  s.b2 = (1.0 + c) / 2.0 / a0;
  s.a1 = -2.0 * c / a0;
  s.a2 = (1.0 - alpha) / a0;
  return s;
}

void biquad_forward(const Biquad& s, std::vector<double>& x) {
  double z1 = 0.0, z2 = 0.0;
  for (double& v : x) {
    const double in = v;
    const double out = s.b0 * in + z1;
    z1 = s.b1 * in - s.a1 * out + z2;
    z2 = s.b2 * in - s.a2 * out;
    v = out;
  }
}

std::vector<double> filtfilt_hp(const std::vector<double>& x,
                                double cutoff_hz, double sample_rate) {
  // Fourth-order Butterworth = two cascaded sections with these Q values.
  const Biquad s1 = butter_hp_section(cutoff_hz, sample_rate, 0.54119610014619698);
  const Biquad s2 = butter_hp_section(cutoff_hz, sample_rate, 1.3065629648763764);

  // Odd extension keeps the startup transient inside the padding.
  const std::size_t n = x.size();
  const std::size_t pad = std::min<std::size_t>(
      n > 1 ? n - 1 : 0, static_cast<std::size_t>(2.0 * sample_rate));
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x.front() - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i)
    ext.push_back(2.0 * x.back() - x[n - 1 - i]);

  biquad_forward(s1, ext);
  biquad_forward(s2, ext);
  std::reverse(ext.begin(), ext.end());
  biquad_forward(s1, ext);
  biquad_forward(s2, ext);
  std::reverse(ext.begin(), ext.end());

  return std::vector<double>(ext.begin() + pad, ext.begin() + pad + n);
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / static_cast<double>(n)));
  return w;
}

const std::vector<double>& channel_of(const EegSegment& seg, EegChannel ch) {
  return ch == EegChannel::kF3 ? seg.f3 : seg.f4;
}

std::array<double, 5> channel_stats(const std::vector<double>& x,
                                    bool& zero_variance) {
  const double n = static_cast<double>(x.size());
  double sum = 0.0, sum_sq = 0.0, max_amp = 0.0;
  for (double v : x) {
    sum += v;
    sum_sq += v * v;
    max_amp = std::max(max_amp, std::abs(v));
  }
  const double mean = sum / n;
  const double mean_power = sum_sq / n;

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;

  double skew = 0.0, kurt = 3.0;
  if (m2 < 1e-24) {
    zero_variance = true;
  } else {
    skew = m3 / std::pow(m2, 1.5);
    kurt = m4 / (m2 * m2);
  }
  return {mean_power, max_amp, std::sqrt(m2), kurt, skew};
}

}  // namespace

EegRecording highpass(const EegRecording& eeg, double cutoff_hz) {
  if (cutoff_hz <= 0.0)
    throw std::invalid_argument("highpass: cutoff must be positive");
  if (eeg.sample_rate <= 2.0 * cutoff_hz)
    throw std::invalid_argument("highpass: cutoff at or above Nyquist");
  if (eeg.f3.size() != eeg.f4.size() ||
      eeg.f3.size() != eeg.timestamps.size())
    throw std::invalid_argument("highpass: mismatched channel lengths");

  EegRecording out = eeg;
  out.f3 = filtfilt_hp(eeg.f3, cutoff_hz, eeg.sample_rate);
  out.f4 = filtfilt_hp(eeg.f4, cutoff_hz, eeg.sample_rate);
  return out;
}

std::vector<EegSegment> segment(const EegRecording& eeg,
                                std::span<const double> gate_timestamps,
                                std::span<const double> gate_values) {
  const std::size_t sr = static_cast<std::size_t>(eeg.sample_rate);
  if (eeg.f3.size() < sr)
    throw std::invalid_argument("segment: recording shorter than 1 s");
  if (gate_timestamps.size() != gate_values.size() || gate_timestamps.empty())
    throw std::invalid_argument("segment: bad gate series");

  const std::size_t count = eeg.f3.size() / sr;
  std::vector<EegSegment> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    EegSegment seg;
    const std::size_t begin = k * sr;
    seg.start_time = eeg.timestamps[begin];
    seg.f3.assign(eeg.f3.begin() + begin, eeg.f3.begin() + begin + sr);
    seg.f4.assign(eeg.f4.begin() + begin, eeg.f4.begin() + begin + sr);
    double acc = 0.0;
    for (std::size_t i = begin; i < begin + sr; ++i)
      acc += interp_linear(gate_timestamps, gate_values, eeg.timestamps[i],
                           kMaxSensorGapS);
    seg.gate = acc / static_cast<double>(sr);
    out.push_back(std::move(seg));
  }
  return out;
}

SegmentStats segment_stats(const EegSegment& seg) {
  if (seg.f3.empty() || seg.f3.size() != seg.f4.size())
    throw std::invalid_argument("segment_stats: bad segment");
  bool zero_var = false;
  const auto s3 = channel_stats(seg.f3, zero_var);
  const auto s4 = channel_stats(seg.f4, zero_var);
  SegmentStats out;
  out.mean_power = 0.5 * (s3[0] + s4[0]);
  out.max_amplitude = 0.5 * (s3[1] + s4[1]);
  out.amplitude_std = 0.5 * (s3[2] + s4[2]);
  out.kurtosis = 0.5 * (s3[3] + s4[3]);
  out.skewness = 0.5 * (s3[4] + s4[4]);
  out.zero_variance = zero_var;
  return out;
}

double bhattacharyya_distance(const Gaussian2d& a, const Gaussian2d& b) {
  const Eigen::Vector2d ma(a.mean[0], a.mean[1]);
  const Eigen::Vector2d mb(b.mean[0], b.mean[1]);
  Eigen::Matrix2d ca, cb;
  ca << a.cov[0], a.cov[1], a.cov[2], a.cov[3];
  cb << b.cov[0], b.cov[1], b.cov[2], b.cov[3];

  Eigen::Matrix2d mixed = 0.5 * (ca + cb);
  double det_a = ca.determinant();
  double det_b = cb.determinant();
  double det_m = mixed.determinant();
  // Degenerate covariances get a scale-proportional ridge on all three so
  // identical inputs still yield exactly zero.
  const double scale = 1.0 + mixed.trace();
  if (det_m <= 1e-12 * scale * scale || det_a <= 0.0 || det_b <= 0.0) {
    const double ridge = 1e-9 * scale;
    ca.diagonal().array() += ridge;
    cb.diagonal().array() += ridge;
    mixed = 0.5 * (ca + cb);
    det_a = ca.determinant();
    det_b = cb.determinant();
    det_m = mixed.determinant();
  }

  const Eigen::Vector2d d = ma - mb;
  const double term_mean = 0.125 * d.dot(mixed.inverse() * d);
  const double term_cov = 0.5 * std::log(det_m / std::sqrt(det_a * det_b));
  return term_mean + term_cov;
}

GateDecision gate_threshold(std::span<const EegSegment> segments) {
  if (segments.size() < 10)
    throw std::invalid_argument("gate_threshold: need at least 10 segments");
  const std::size_t n = segments.size();

  Eigen::MatrixXd feats(n, 5);
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = segment_stats(segments[i]).as_array();
    for (int j = 0; j < 5; ++j) feats(static_cast<Eigen::Index>(i), j) = f[j];
  }

  // Standardize columns; constant columns carry no information and are zeroed.
  for (int j = 0; j < 5; ++j) {
    const double mean = feats.col(j).mean();
    feats.col(j).array() -= mean;
    const double sd = std::sqrt(feats.col(j).squaredNorm() / static_cast<double>(n));
    if (sd < 1e-12)
      feats.col(j).setZero();
    else
      feats.col(j) /= sd;
  }

  // PCA to 2D (top-2 eigenvectors of the feature covariance). Eigenvector
  // signs are pinned for determinism.
  const Eigen::MatrixXd cov =
      feats.transpose() * feats / static_cast<double>(n);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  Eigen::MatrixXd proj(5, 2);
  proj.col(0) = eig.eigenvectors().col(4);  // eigenvalues ascend
  proj.col(1) = eig.eigenvectors().col(3);
  for (int c = 0; c < 2; ++c) {
    Eigen::Index imax;
    proj.col(c).cwiseAbs().maxCoeff(&imax);
    if (proj(imax, c) < 0.0) proj.col(c) = -proj.col(c);
  }
  const Eigen::MatrixXd projected = feats * proj;  // n x 2

  GateDecision decision;
  double best = -1.0;
  for (int step = 1; step <= 19; ++step) {
    const double theta = 0.05 * step;
    std::vector<Eigen::Index> lo, hi;
    for (std::size_t i = 0; i < n; ++i)
      (segments[i].gate < theta ? lo : hi).push_back(static_cast<Eigen::Index>(i));
    if (lo.empty() || hi.empty()) continue;

    const auto fit_gaussian = [&](const std::vector<Eigen::Index>& idx) {
      Gaussian2d g;
      Eigen::Vector2d mean = Eigen::Vector2d::Zero();
      for (Eigen::Index i : idx) mean += projected.row(i).transpose();
      mean /= static_cast<double>(idx.size());
      Eigen::Matrix2d cv = Eigen::Matrix2d::Zero();
      for (Eigen::Index i : idx) {
        const Eigen::Vector2d d = projected.row(i).transpose() - mean;
        cv += d * d.transpose();
      }
      cv /= static_cast<double>(idx.size());
      g.mean = {mean(0), mean(1)};
      g.cov = {cv(0, 0), cv(0, 1), cv(1, 0), cv(1, 1)};
      return g;
    };

    const double dist =
        bhattacharyya_distance(fit_gaussian(lo), fit_gaussian(hi));
    decision.grid.push_back(theta);
    decision.distances.push_back(dist);
    if (dist > best + 1e-15) {
      best = dist;
      decision.theta_star = theta;
    }
  }

  if (decision.grid.empty() || best <= 1e-12) {
    // No separation measurable (identical feature distributions).
    decision.theta_star = 0.5;
    decision.warning = true;
  }
  return decision;
}

void apply_gate(std::vector<EegSegment>& segments,
                const GateDecision& decision) {
  for (auto& seg : segments) seg.clean = seg.gate < decision.theta_star;
}

Psd welch_psd(std::span<const EegSegment> segments, EegChannel channel) {
  if (segments.empty())
    throw std::invalid_argument("welch_psd: no segments");
  const std::size_t n = channel_of(segments.front(), channel).size();
  const int sr = static_cast<int>(n);  // 1-s segments: N == sample rate

  const std::vector<double> window = hann_window(n);
  const double win_power =
      std::inner_product(window.begin(), window.end(), window.begin(), 0.0);
  const double scale = 1.0 / (static_cast<double>(sr) * win_power);

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  std::vector<double> windowed(n);

  Psd psd;
  psd.sample_rate = sr;
  psd.values.assign(n / 2 + 1, 0.0);
  for (const auto& seg : segments) {
    const auto& x = channel_of(seg, channel);
    if (x.size() != n)
      throw std::invalid_argument("welch_psd: inconsistent segment lengths");
    for (std::size_t i = 0; i < n; ++i) windowed[i] = x[i] * window[i];
    fft.fwd(spectrum, windowed);
    for (std::size_t k = 0; k < psd.values.size(); ++k) {
      const double mag2 = std::norm(spectrum[k]);
      const bool interior = k > 0 && (n % 2 != 0 || k < n / 2);
      psd.values[k] += (interior ? 2.0 : 1.0) * mag2 * scale;
    }
  }
  for (double& v : psd.values) v /= static_cast<double>(segments.size());
  return psd;
}

double band_power(const Psd& psd, const Band& band) {
  if (band.lo_hz < 0 || band.hi_hz < band.lo_hz ||
      band.hi_hz >= static_cast<int>(psd.values.size()))
    throw std::invalid_argument("band_power: band outside PSD support");
  double acc = 0.0;
  for (int k = band.lo_hz; k <= band.hi_hz; ++k) acc += psd.values[k];
  return acc / static_cast<double>(band.hi_hz - band.lo_hz + 1);
}

BicoherenceMatrix::BicoherenceMatrix(int nyquist_hz)
    : nyquist_(nyquist_hz),
      values_(static_cast<std::size_t>(nyquist_hz + 1) * (nyquist_hz + 1), 0.0),
      defined_(values_.size(), 0) {}

std::size_t BicoherenceMatrix::index(int w1, int w2) const {
  if (w2 > w1) std::swap(w1, w2);
  if (w1 < 0 || w2 < 0 || w1 > nyquist_ || w1 + w2 > nyquist_)
    throw std::out_of_range("BicoherenceMatrix: frequency pair outside the principal domain");
  return static_cast<std::size_t>(w1) * (nyquist_ + 1) + w2;
}

bool BicoherenceMatrix::defined(int w1, int w2) const {
  return defined_[index(w1, w2)] != 0;
}

double BicoherenceMatrix::at(int w1, int w2) const {
  const std::size_t i = index(w1, w2);
  if (!defined_[i])
    throw std::runtime_error("BicoherenceMatrix: cell is masked");
  return values_[i];
}

void BicoherenceMatrix::set(int w1, int w2, double value) {
  const std::size_t i = index(w1, w2);
  values_[i] = value;
  defined_[i] = 1;
}

void BicoherenceMatrix::mask(int w1, int w2) {
  defined_[index(w1, w2)] = 0;
}

BicoherenceMatrix bicoherence(std::span<const EegSegment> segments,
                              EegChannel channel) {
  if (segments.size() < 8)
    throw std::invalid_argument(
        "bicoherence: need at least 8 segments for a meaningful estimate");
  const std::size_t n = channel_of(segments.front(), channel).size();
  const int nyq = static_cast<int>(n) / 2;

  const std::vector<double> window = hann_window(n);
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  std::vector<double> windowed(n);

  // Accumulate the bispectrum and power terms across segments, then
  // normalize once; fixed iteration order keeps the sums deterministic.
  const std::size_t cells = static_cast<std::size_t>(nyq + 1) * (nyq + 1);
  std::vector<std::complex<double>> bispec(cells, {0.0, 0.0});
  std::vector<double> power(static_cast<std::size_t>(nyq) + 1, 0.0);

  for (const auto& seg : segments) {
    const auto& x = channel_of(seg, channel);
    if (x.size() != n)
      throw std::invalid_argument("bicoherence: inconsistent segment lengths");
    for (std::size_t i = 0; i < n; ++i) windowed[i] = x[i] * window[i];
    fft.fwd(spectrum, windowed);
    for (int w = 0; w <= nyq; ++w) power[w] += std::norm(spectrum[w]);
    for (int w1 = 0; w1 <= nyq; ++w1)
      for (int w2 = 0; w2 <= w1 && w1 + w2 <= nyq; ++w2)
        bispec[static_cast<std::size_t>(w1) * (nyq + 1) + w2] +=
            spectrum[w1] * spectrum[w2] * std::conj(spectrum[w1 + w2]);
  }

  const double k = static_cast<double>(segments.size());
  double max_power = 0.0;
  for (double& p : power) {
    p /= k;
    max_power = std::max(max_power, p);
  }

  BicoherenceMatrix bc(nyq);
  const double floor = 1e-12 * max_power;
  for (int w1 = 0; w1 <= nyq; ++w1)
    for (int w2 = 0; w2 <= w1 && w1 + w2 <= nyq; ++w2) {
      if (power[w1] <= floor || power[w2] <= floor || power[w1 + w2] <= floor)
        continue;  // masked
      const std::complex<double> mean_b =
          bispec[static_cast<std::size_t>(w1) * (nyq + 1) + w2] / k;
      bc.set(w1, w2,
             std::abs(mean_b) /
                 std::sqrt(power[w1] * power[w2] * power[w1 + w2]));
    }
  return bc;
}

double band_mean_bicoherence(const BicoherenceMatrix& bc, const Band& q1,
                             const Band& q2) {
  double acc = 0.0;
  int count = 0;
  std::vector<std::uint8_t> seen(
      static_cast<std::size_t>(bc.nyquist() + 1) * (bc.nyquist() + 1), 0);
  for (int f1 = q1.lo_hz; f1 <= q1.hi_hz; ++f1)
    for (int f2 = q2.lo_hz; f2 <= q2.hi_hz; ++f2) {
      const int hi = std::max(f1, f2);
      const int lo = std::min(f1, f2);
      if (hi > bc.nyquist() || hi + lo > bc.nyquist()) continue;
      const std::size_t key = static_cast<std::size_t>(hi) * (bc.nyquist() + 1) + lo;
      if (seen[key]) continue;
      seen[key] = 1;
      if (!bc.defined(hi, lo)) continue;
      acc += bc.at(hi, lo);
      ++count;
    }
  if (count == 0)
    throw std::runtime_error(
        "band_mean_bicoherence: no defined cells in the band rectangle");
  return acc / count;
}

int band_cell_count(const BicoherenceMatrix& bc, const Band& q1,
                    const Band& q2) {
  int count = 0;
  std::vector<std::uint8_t> seen(
      static_cast<std::size_t>(bc.nyquist() + 1) * (bc.nyquist() + 1), 0);
  for (int f1 = q1.lo_hz; f1 <= q1.hi_hz; ++f1)
    for (int f2 = q2.lo_hz; f2 <= q2.hi_hz; ++f2) {
      const int hi = std::max(f1, f2);
      const int lo = std::min(f1, f2);
      if (hi > bc.nyquist() || hi + lo > bc.nyquist()) continue;
      const std::size_t key = static_cast<std::size_t>(hi) * (bc.nyquist() + 1) + lo;
      if (seen[key]) continue;
      seen[key] = 1;
      ++count;
    }
  return count;
}

EegFeaturesResult extract_eeg_features(const EegRecording& eeg,
                                       std::span<const double> gate_timestamps,
                                       std::span<const double> gate_values,
                                       double highpass_cutoff_hz) {
  const EegRecording filtered = highpass(eeg, highpass_cutoff_hz);
  std::vector<EegSegment> segments =
      segment(filtered, gate_timestamps, gate_values);

  EegFeaturesResult result;
  if (segments.size() >= 10) {
    result.decision = gate_threshold(segments);
  } else {
    result.decision.theta_star = 0.5;
    result.decision.warning = true;
  }
  apply_gate(segments, result.decision);

  std::vector<EegSegment> clean;
  for (const auto& s : segments)
    if (s.clean) clean.push_back(s);
  // An all-contaminated recording still needs features; fall back to every
  // segment rather than none.
  result.used_all_segments = clean.empty();
  const std::span<const EegSegment> used =
      clean.empty() ? std::span<const EegSegment>(segments)
                    : std::span<const EegSegment>(clean);
  result.clean_segments = static_cast<int>(clean.size());
  result.total_segments = static_cast<int>(segments.size());

  for (int c = 0; c < 2; ++c) {
    const EegChannel channel = c == 0 ? EegChannel::kF3 : EegChannel::kF4;
    EegFeatureSet& fs = result.channels[c];

    const Psd psd = welch_psd(used, channel);
    for (std::size_t b = 0; b < default_bands().size(); ++b)
      fs.psd_band_mean[b] = band_power(psd, default_bands()[b]);

    if (used.size() >= 8) {
      fs.bicoherence_available = true;
      const BicoherenceMatrix bc = bicoherence(used, channel);
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
          try {
            fs.bicoherence_mean[i][j] =
                band_mean_bicoherence(bc, default_bands()[i], default_bands()[j]);
            fs.bicoherence_defined[i][j] = true;
          } catch (const std::runtime_error&) {
            fs.bicoherence_mean[i][j] = 0.0;
            fs.bicoherence_defined[i][j] = false;
          }
        }
    }
  }

  result.segments_meta = std::move(segments);
  for (auto& s : result.segments_meta) {
    s.f3.clear();
    s.f4.clear();
  }
  return result;
}

}  // namespace asitu

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "asitu/ingest.hpp"

namespace asitu {

enum class EegChannel { kF3, kF4 };

/// One 1-s non-overlapping window of both EEG channels.
struct EegSegment {
  double start_time = 0.0;             // seconds
  std::vector<double> f3;              // exactly sample_rate samples
  std::vector<double> f4;
  double gate = 0.0;                   // mean device-motion gate over the window
  bool clean = false;                  // set by apply_gate
};

struct Band {
  std::string name;
  int lo_hz = 0;
  int hi_hz = 0;
};

/// theta 4-7, alpha 8-13, beta 14-29, gamma 30-45 Hz.
const std::array<Band, 4>& default_bands();

/// Clean-EEG descriptors in the order: mean power, max amplitude, amplitude
/// std, kurtosis (non-excess; Gaussian -> 3), skewness. Channels averaged.
struct SegmentStats {
  double mean_power = 0.0;
  double max_amplitude = 0.0;
  double amplitude_std = 0.0;
  double kurtosis = 3.0;
  double skewness = 0.0;
  bool zero_variance = false;

  std::array<double, 5> as_array() const {
    return {mean_power, max_amplitude, amplitude_std, kurtosis, skewness};
  }
};

struct Gaussian2d {
  std::array<double, 2> mean{0.0, 0.0};
  std::array<double, 4> cov{1.0, 0.0, 0.0, 1.0};  // row-major
};

struct GateDecision {
  double theta_star = 0.5;
  bool warning = false;  // no separation found; fell back to 0.5
  std::vector<double> grid;       // evaluated thresholds
  std::vector<double> distances;  // Bhattacharyya distance per threshold
};

/// Zero-phase (forward-backward) 4th-order Butterworth high-pass. Requires
/// sample_rate > 2 * cutoff.
EegRecording highpass(const EegRecording& eeg, double cutoff_hz = 2.0);

/// Splits the recording into 1-s windows; the device-motion gate (sampled at
/// frame timestamps) is averaged over each window. A trailing partial second
/// is dropped. Throws when the recording is shorter than 1 s.
std::vector<EegSegment> segment(const EegRecording& eeg,
                                std::span<const double> gate_timestamps,
                                std::span<const double> gate_values);

SegmentStats segment_stats(const EegSegment& seg);

/// Bhattacharyya distance between two Gaussians (closed form). Symmetric,
/// zero iff the distributions coincide.
double bhattacharyya_distance(const Gaussian2d& a, const Gaussian2d& b);

/// Standardizes the five segment features, projects them to 2D by PCA and
/// scans theta in {0.05, ..., 0.95} for the split (gate < theta vs >= theta)
/// that maximizes the Bhattacharyya distance. Ties take the smaller theta.
GateDecision gate_threshold(std::span<const EegSegment> segments);

/// Marks segments with gate < theta_star clean.
void apply_gate(std::vector<EegSegment>& segments, const GateDecision& decision);

/// Welch PSD at 1 Hz resolution: per-segment Hann-windowed periodogram with
/// window-power compensation, averaged across segments. One-sided, uV^2/Hz.
struct Psd {
  int sample_rate = 0;
  std::vector<double> values;  // index == frequency in Hz, 0..Nyquist
};

Psd welch_psd(std::span<const EegSegment> segments, EegChannel channel);

/// Mean PSD over integer bins [lo_hz, hi_hz] inclusive.
double band_power(const Psd& psd, const Band& band);

/// Bicoherence on the principal domain (w1 >= w2, w1 + w2 <= Nyquist) at
/// 1 Hz resolution. Cells whose power terms vanish are masked rather than
/// propagated as NaN.
class BicoherenceMatrix {
 public:
  BicoherenceMatrix(int nyquist_hz);

  bool defined(int w1_hz, int w2_hz) const;
  double at(int w1_hz, int w2_hz) const;  // canonicalizes the pair order
  int nyquist() const { return nyquist_; }

  void set(int w1_hz, int w2_hz, double value);
  void mask(int w1_hz, int w2_hz);

 private:
  std::size_t index(int w1, int w2) const;
  int nyquist_;
  std::vector<double> values_;
  std::vector<std::uint8_t> defined_;
};

/// Requires at least 8 segments; bispectrum and the three power terms are
/// averaged across segments before normalizing.
BicoherenceMatrix bicoherence(std::span<const EegSegment> segments,
                              EegChannel channel);

/// Mean over defined principal-domain cells of the (q1, q2) band rectangle;
/// overlapping rectangles are deduplicated. Throws when no cell is defined.
double band_mean_bicoherence(const BicoherenceMatrix& bc, const Band& q1,
                             const Band& q2);

/// Count of principal-domain cells for a band rectangle (defined or not);
/// exposed for diagnostics.
int band_cell_count(const BicoherenceMatrix& bc, const Band& q1, const Band& q2);

/// Per-channel spectral features with gate annotations.
struct EegFeatureSet {
  std::array<double, 4> psd_band_mean{};                // per default band
  std::array<std::array<double, 4>, 4> bicoherence_mean{};  // [q1][q2]
  std::array<std::array<bool, 4>, 4> bicoherence_defined{};
  bool bicoherence_available = false;  // needs >= 8 clean segments
};

struct EegFeaturesResult {
  std::array<EegFeatureSet, 2> channels;  // F3, F4
  GateDecision decision;
  int clean_segments = 0;
  int total_segments = 0;
  bool used_all_segments = false;  // gate rejected everything; fell back
  // (start time, gate, clean) per segment, for the gate report.
  std::vector<EegSegment> segments_meta;  // samples cleared, metadata only
};

EegFeaturesResult extract_eeg_features(const EegRecording& eeg,
                                       std::span<const double> gate_timestamps,
                                       std::span<const double> gate_values,
                                       double highpass_cutoff_hz = 2.0);

}  // namespace asitu

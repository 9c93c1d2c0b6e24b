#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "asitu/image.hpp"

namespace asitu {

/// Egocentric frame sequence. Frames share dimensions and timestamps are
/// strictly increasing; at least two frames.
struct FrameSequence {
  std::vector<Image> frames;
  std::vector<double> timestamps;     // seconds
  std::vector<std::string> names;     // source file stems (index carriers)
  double nominal_fps = 30.0;

  int width() const { return frames.empty() ? 0 : frames.front().width; }
  int height() const { return frames.empty() ? 0 : frames.front().height; }
  std::size_t size() const { return frames.size(); }
};

struct AccelSample {
  double ax = 0.0, ay = 0.0, az = 0.0;  // m/s^2
  double magnitude() const;
};

struct AccelSeries {
  std::vector<double> timestamps;  // seconds, non-decreasing
  std::vector<AccelSample> samples;
};

struct EegRecording {
  std::vector<double> timestamps;  // seconds
  std::vector<double> f3;          // microvolts
  std::vector<double> f4;
  int sample_rate = 250;           // Hz
  // Indices of samples synthesized by gap filling (set by assemble_situation).
  std::vector<std::size_t> interpolated;
};

/// One aligned spatiotemporal situation: frames plus accelerometer resampled
/// to frame timestamps and the EEG trimmed to the frame span.
struct Situation {
  std::string id;
  FrameSequence frames;
  AccelSeries accel_at_frames;  // one sample per frame
  EegRecording eeg;
  double duration_s = 0.0;
};

// Sensor dropouts longer than this are treated as unrecoverable rather than
// interpolated over.
inline constexpr double kMaxSensorGapS = 1.0;

/// Loads PGM frames matching `pattern` (shell-style '*' / '?') from a
/// directory, sorted by filename. Timestamps come from an optional
/// "timestamps.txt" sidecar (one float per line), otherwise they are
/// synthesized at nominal_fps.
FrameSequence load_frames(const std::filesystem::path& dir_path,
                          const std::string& pattern = "*.pgm",
                          double nominal_fps = 30.0);

/// CSV with header "t,ax,ay,az".
AccelSeries load_accel_csv(const std::filesystem::path& path);

/// CSV with header "t,f3,f4"; the sample rate is inferred as
/// round(1 / median(dt)).
EegRecording load_eeg_csv(const std::filesystem::path& path);

/// Aligns the sensors to the frame clock: accelerometer linearly interpolated
/// at each frame timestamp, EEG trimmed to the frame span with internal gaps
/// (> 2 sample periods) filled linearly and flagged. Idempotent.
Situation assemble_situation(const FrameSequence& frames,
                             const AccelSeries& accel, const EegRecording& eeg,
                             std::string id = {});

}  // namespace asitu

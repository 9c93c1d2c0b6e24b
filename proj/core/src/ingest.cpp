#include "asitu/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "asitu/csv.hpp"
#include "asitu/series.hpp"

namespace asitu {

namespace fs = std::filesystem;

double AccelSample::magnitude() const {
  return std::sqrt(ax * ax + ay * ay + az * az);
}

namespace {

// Shell-style match supporting '*' and '?'.
bool glob_match(const std::string& pattern, const std::string& name) {
  std::size_t p = 0, n = 0, star = std::string::npos, restart = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      restart = n;
    } else if (star != std::string::npos) {
      p = star + 1;
      n = ++restart;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

std::vector<double> read_timestamp_sidecar(const fs::path& file,
                                           std::size_t expected) {
  std::ifstream in(file);
  std::vector<double> ts;
  double v;
  while (in >> v) ts.push_back(v);
  if (ts.size() != expected)
    throw std::runtime_error("timestamp sidecar " + file.string() + " lists " +
                             std::to_string(ts.size()) + " entries for " +
                             std::to_string(expected) + " frames");
  return ts;
}

void check_strictly_increasing(const std::vector<double>& ts,
                               const std::string& what) {
  for (std::size_t i = 1; i < ts.size(); ++i)
    if (ts[i] <= ts[i - 1])
      throw std::runtime_error(what + ": timestamps not strictly increasing at index " +
                               std::to_string(i));
}

}  // namespace

FrameSequence load_frames(const fs::path& dir_path, const std::string& pattern,
                          double nominal_fps) {
  if (!fs::is_directory(dir_path))
    throw std::runtime_error("frame directory does not exist: " +
                             dir_path.string());
  if (nominal_fps <= 0.0)
    throw std::invalid_argument("load_frames: nominal_fps must be positive");

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir_path)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (glob_match(pattern, name)) files.push_back(entry.path());
  }
  if (files.empty())
    throw std::runtime_error("no frames matching '" + pattern + "' in " +
                             dir_path.string());
  // Zero-padded indices make lexicographic order the frame order.
  std::sort(files.begin(), files.end());

  FrameSequence seq;
  seq.nominal_fps = nominal_fps;
  seq.frames.reserve(files.size());
  for (const auto& f : files) {
    Image img = read_pgm(f);
    if (!seq.frames.empty() && !img.same_dims(seq.frames.front()))
      throw std::runtime_error("frame dimension mismatch: " + f.string());
    seq.frames.push_back(std::move(img));
    seq.names.push_back(f.stem().string());
  }
  if (seq.frames.size() < 2)
    throw std::runtime_error("a frame sequence needs at least 2 frames, got " +
                             std::to_string(seq.frames.size()));

  const fs::path sidecar = dir_path / "timestamps.txt";
  if (fs::exists(sidecar)) {
    seq.timestamps = read_timestamp_sidecar(sidecar, seq.frames.size());
  } else {
    seq.timestamps.resize(seq.frames.size());
    for (std::size_t i = 0; i < seq.frames.size(); ++i)
      seq.timestamps[i] = static_cast<double>(i) / nominal_fps;
  }
  check_strictly_increasing(seq.timestamps, "frames");
  return seq;
}

AccelSeries load_accel_csv(const fs::path& path) {
  const CsvTable table = read_numeric_csv(path);
  const int it = table.column_index("t");
  const int ix = table.column_index("ax");
  const int iy = table.column_index("ay");
  const int iz = table.column_index("az");
  if (it < 0 || ix < 0 || iy < 0 || iz < 0)
    throw std::runtime_error(path.string() +
                             ": accel CSV must have columns t,ax,ay,az");
  if (table.rows.size() < 2)
    throw std::runtime_error(path.string() + ": fewer than 2 accel samples");

  AccelSeries out;
  out.timestamps.reserve(table.rows.size());
  out.samples.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    out.timestamps.push_back(row[it]);
    out.samples.push_back({row[ix], row[iy], row[iz]});
  }
  for (std::size_t i = 1; i < out.timestamps.size(); ++i)
    if (out.timestamps[i] < out.timestamps[i - 1])
      throw std::runtime_error(path.string() +
                               ": accel timestamps must be non-decreasing");
  return out;
}

EegRecording load_eeg_csv(const fs::path& path) {
  const CsvTable table = read_numeric_csv(path);
  const int it = table.column_index("t");
  const int i3 = table.column_index("f3");
  const int i4 = table.column_index("f4");
  if (it < 0 || i3 < 0 || i4 < 0)
    throw std::runtime_error(path.string() +
                             ": EEG CSV must have columns t,f3,f4");
  if (table.rows.size() < 2)
    throw std::runtime_error(path.string() + ": fewer than 2 EEG samples");

  EegRecording out;
  out.timestamps.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    out.timestamps.push_back(row[it]);
    out.f3.push_back(row[i3]);
    out.f4.push_back(row[i4]);
  }
  check_strictly_increasing(out.timestamps, path.string());

  std::vector<double> dts(out.timestamps.size() - 1);
  for (std::size_t i = 1; i < out.timestamps.size(); ++i)
    dts[i - 1] = out.timestamps[i] - out.timestamps[i - 1];
  const double med = median(std::move(dts));
  if (med <= 0.0)
    throw std::runtime_error(path.string() + ": cannot infer EEG sample rate");
  out.sample_rate = static_cast<int>(std::lround(1.0 / med));
  if (out.sample_rate <= 0)
    throw std::runtime_error(path.string() + ": inferred non-positive sample rate");
  return out;
}

namespace {

bool ranges_overlap(double a0, double a1, double b0, double b1) {
  return std::max(a0, b0) <= std::min(a1, b1) + kTimeTolerance;
}

}  // namespace

Situation assemble_situation(const FrameSequence& frames,
                             const AccelSeries& accel, const EegRecording& eeg,
                             std::string id) {
  if (frames.size() < 2)
    throw std::invalid_argument("assemble_situation: need at least 2 frames");
  const double t0 = frames.timestamps.front();
  const double t1 = frames.timestamps.back();

  if (accel.timestamps.empty() ||
      !ranges_overlap(accel.timestamps.front(), accel.timestamps.back(), t0, t1))
    throw std::runtime_error(
        "assemble_situation: accelerometer does not overlap the frame span");
  if (eeg.timestamps.empty() ||
      !ranges_overlap(eeg.timestamps.front(), eeg.timestamps.back(), t0, t1))
    throw std::runtime_error(
        "assemble_situation: EEG does not overlap the frame span");

  Situation s;
  s.id = std::move(id);
  s.frames = frames;
  s.duration_s = t1 - t0;

  // Accelerometer resampled onto the frame clock.
  s.accel_at_frames.timestamps = frames.timestamps;
  s.accel_at_frames.samples.reserve(frames.size());
  std::vector<double> xs(accel.samples.size()), ys(accel.samples.size()),
      zs(accel.samples.size());
  for (std::size_t i = 0; i < accel.samples.size(); ++i) {
    xs[i] = accel.samples[i].ax;
    ys[i] = accel.samples[i].ay;
    zs[i] = accel.samples[i].az;
  }
  for (double t : frames.timestamps) {
    AccelSample sample;
    sample.ax = interp_linear(accel.timestamps, xs, t, kMaxSensorGapS);
    sample.ay = interp_linear(accel.timestamps, ys, t, kMaxSensorGapS);
    sample.az = interp_linear(accel.timestamps, zs, t, kMaxSensorGapS);
    s.accel_at_frames.samples.push_back(sample);
  }

  // EEG: trim to the frame span, then fill internal gaps on a uniform grid.
  EegRecording trimmed;
  trimmed.sample_rate = eeg.sample_rate;
  for (std::size_t i = 0; i < eeg.timestamps.size(); ++i) {
    const double t = eeg.timestamps[i];
    if (t >= t0 - kTimeTolerance && t <= t1 + kTimeTolerance) {
      trimmed.timestamps.push_back(t);
      trimmed.f3.push_back(eeg.f3[i]);
      trimmed.f4.push_back(eeg.f4[i]);
    }
  }
  if (trimmed.timestamps.size() < 2)
    throw std::runtime_error(
        "assemble_situation: fewer than 2 EEG samples inside the frame span");

  const double period = 1.0 / trimmed.sample_rate;
  EegRecording filled;
  filled.sample_rate = trimmed.sample_rate;
  for (std::size_t i = 0; i < trimmed.timestamps.size(); ++i) {
    if (i > 0) {
      const double gap = trimmed.timestamps[i] - trimmed.timestamps[i - 1];
      if (gap > kMaxSensorGapS)
        throw std::runtime_error("assemble_situation: EEG gap of " +
                                 std::to_string(gap) + " s exceeds the cap");
      if (gap > 2.0 * period + kTimeTolerance) {
        const int missing = static_cast<int>(std::lround(gap / period)) - 1;
        for (int k = 1; k <= missing; ++k) {
          const double t = trimmed.timestamps[i - 1] + k * period;
          if (t >= trimmed.timestamps[i] - kTimeTolerance) break;
          const double w =
              (t - trimmed.timestamps[i - 1]) /
              (trimmed.timestamps[i] - trimmed.timestamps[i - 1]);
          filled.interpolated.push_back(filled.timestamps.size());
          filled.timestamps.push_back(t);
          filled.f3.push_back(trimmed.f3[i - 1] +
                              w * (trimmed.f3[i] - trimmed.f3[i - 1]));
          filled.f4.push_back(trimmed.f4[i - 1] +
                              w * (trimmed.f4[i] - trimmed.f4[i - 1]));
        }
      }
    }
    filled.timestamps.push_back(trimmed.timestamps[i]);
    filled.f3.push_back(trimmed.f3[i]);
    filled.f4.push_back(trimmed.f4[i]);
  }
  s.eeg = std::move(filled);
  return s;
}

}  // namespace asitu

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace asitu {

/// Parameters for the generated test situation: a panning textured
/// background, a center object that rhythmically approaches and recedes
/// (zoom flow), a device-shake burst in the accelerometer, and two EEG
/// channels containing band oscillations, a quadratically coupled triad and
/// a motion-artifact burst aligned with the shake.
struct SynthConfig {
  std::string id = "synthetic_01";
  int n_frames = 1000;
  int width = 320;
  int height = 240;
  double fps = 30.0;
  double accel_rate_hz = 50.0;
  int eeg_rate_hz = 250;
  std::uint64_t seed = 7;
  bool emit_saliency = true;
  double shake_time_s = 20.0;  // burst start
  double shake_duration_s = 1.5;
};

/// Writes frames/, saliency maps, accel.csv, eeg.csv, ratings.csv and a
/// ready-to-run config.json under out_dir. Deterministic given the config.
void generate_synthetic_dataset(const std::filesystem::path& out_dir,
                                const SynthConfig& cfg = {});

}  // namespace asitu

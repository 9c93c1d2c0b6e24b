#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "asitu/affect.hpp"
#include "asitu/curve.hpp"
#include "asitu/flow.hpp"
#include "asitu/motivation.hpp"

namespace asitu {

struct SituationSource {
  std::string id;
  std::filesystem::path frames_dir;
  std::string frames_pattern = "frame_*.pgm";
  double nominal_fps = 30.0;
  std::filesystem::path accel_csv;
  std::filesystem::path eeg_csv;
  // When unset (or a frame's map file is missing) the center prior is used.
  std::optional<std::filesystem::path> saliency_dir;
};

struct SaliencyConfig {
  double threshold = 0.5;            // t_h for binarization
  double center_prior_sigma_frac = 0.25;
};

struct EegPipelineConfig {
  double highpass_cutoff_hz = 2.0;
  double gate_sigma_s = 0.5;  // accelerometer gate smoothing
};

struct OutputConfig {
  bool svg_plots = true;
  bool debug_flow_csv = false;
  bool debug_motivation_csv = false;
};

/// Every tunable of every stage; defaults match the documented parameter
/// set. Loaded from a single JSON file (relative paths resolve against the
/// config file's directory).
struct PipelineConfig {
  std::vector<SituationSource> situations;
  std::optional<std::filesystem::path> ratings_csv;
  FlowConfig flow;
  SaliencyConfig saliency;
  MotivationConfig motivation;
  AffectParams affect;
  CurveConfig curve;
  int curve_grid_points = 201;
  EegPipelineConfig eeg;
  OutputConfig output;
};

PipelineConfig load_pipeline_config(const std::filesystem::path& path);

struct SituationStatus {
  std::string id;
  bool ok = true;
  std::string stage;    // failing stage when !ok
  std::string message;
};

struct PipelineResult {
  bool all_ok = true;
  std::vector<SituationStatus> statuses;
};

/// Full pipeline: ingest -> flow/saliency/motivation -> affect -> curve ->
/// EEG features, all artifacts written under out_dir/<situation id>/.
/// Failures are per-situation; remaining situations still run.
PipelineResult run_pipeline(const PipelineConfig& config,
                            const std::filesystem::path& out_dir,
                            int workers = 1);

/// EEG-only path: ingest + gate + spectral features.
PipelineResult run_eeg_features(const PipelineConfig& config,
                                const std::filesystem::path& out_dir,
                                int workers = 1);

/// Rebuilds the evaluation report from previously written artifacts
/// (labels.csv and eeg_psd.csv under labels_dir) and a ratings CSV.
/// Returns false when no rated situation could be matched.
bool run_evaluate(const std::filesystem::path& labels_dir,
                  const std::filesystem::path& ratings_csv,
                  const std::filesystem::path& report_path);

}  // namespace asitu

// asitu: affective labeling pipeline for egocentric frame + accelerometer +
// EEG recordings. Subcommands: compute, eeg-features, evaluate, synth.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "asitu/pipeline.hpp"
#include "asitu/synth.hpp"

namespace fs = std::filesystem;

namespace {

int report_result(const asitu::PipelineResult& result) {
  for (const auto& s : result.statuses) {
    if (s.ok) {
      std::cout << "[ok]   " << s.id << "\n";
    } else {
      std::cerr << "[fail] " << s.id << " (stage: " << s.stage
                << "): " << s.message << "\n";
    }
  }
  return result.all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"A-Situ affective labeling pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  int workers = 1;
  std::uint64_t seed = 7;

  auto* compute = app.add_subcommand(
      "compute", "Run the full pipeline and write all artifacts");
  compute->add_option("--config", config_path, "Pipeline config JSON")
      ->required();
  compute->add_option("--out", out_dir, "Output directory");
  compute->add_option("--workers", workers, "Concurrent situations")
      ->check(CLI::PositiveNumber);

  auto* eeg = app.add_subcommand("eeg-features",
                                 "Extract EEG gate + spectral features only");
  eeg->add_option("--config", config_path, "Pipeline config JSON")->required();
  eeg->add_option("--out", out_dir, "Output directory");
  eeg->add_option("--workers", workers, "Concurrent situations")
      ->check(CLI::PositiveNumber);

  std::string labels_dir;
  std::string ratings_csv;
  std::string report_path = "eval_report.json";
  auto* evaluate = app.add_subcommand(
      "evaluate", "Build an evaluation report from computed artifacts");
  evaluate->add_option("--labels-dir", labels_dir,
                       "Directory written by 'compute'")
      ->required();
  evaluate->add_option("--ratings", ratings_csv, "Ratings CSV")->required();
  evaluate->add_option("--report", report_path, "Report output path");

  std::string synth_dir;
  int synth_frames = 1000;
  int synth_width = 320;
  int synth_height = 240;
  auto* synth = app.add_subcommand(
      "synth", "Generate the deterministic synthetic test situation");
  synth->add_option("--out", synth_dir, "Dataset directory")->required();
  synth->add_option("--frames", synth_frames, "Frame count")
      ->check(CLI::Range(2, 100000));
  synth->add_option("--width", synth_width, "Frame width");
  synth->add_option("--height", synth_height, "Frame height");
  synth->add_option("--seed", seed, "Generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (compute->parsed() || eeg->parsed()) {
      const asitu::PipelineConfig cfg =
          asitu::load_pipeline_config(config_path);
      const asitu::PipelineResult result =
          compute->parsed() ? asitu::run_pipeline(cfg, out_dir, workers)
                            : asitu::run_eeg_features(cfg, out_dir, workers);
      return report_result(result);
    }
    if (evaluate->parsed()) {
      if (!asitu::run_evaluate(labels_dir, ratings_csv, report_path)) {
        std::cerr << "evaluate: no rated situation matched any artifacts in "
                  << labels_dir << "\n";
        return 1;
      }
      std::cout << "wrote " << report_path << "\n";
      return 0;
    }
    if (synth->parsed()) {
      asitu::SynthConfig cfg;
      cfg.n_frames = synth_frames;
      cfg.width = synth_width;
      cfg.height = synth_height;
      cfg.seed = seed;
      asitu::generate_synthetic_dataset(synth_dir, cfg);
      std::cout << "wrote synthetic dataset to " << synth_dir << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

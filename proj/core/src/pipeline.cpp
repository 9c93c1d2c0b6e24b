#include "asitu/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "asitu/csv.hpp"
#include "asitu/eeg.hpp"
#include "asitu/eval.hpp"
#include "asitu/ingest.hpp"
#include "asitu/saliency.hpp"
#include "asitu/series.hpp"
#include "asitu/svg.hpp"

namespace asitu {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

fs::path resolve(const fs::path& base, const fs::path& p) {
  return p.is_absolute() ? p : base / p;
}

void require_known_keys(const json& obj, std::initializer_list<const char*> known,
                        const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find_if(known.begin(), known.end(), [&](const char* k) {
          return key == k;
        }) == known.end())
      throw std::runtime_error("config: unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

PipelineConfig load_pipeline_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open config file: " + path.string());
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config parse error in " + path.string() + ": " +
                             e.what());
  }

  const fs::path base = path.parent_path();
  require_known_keys(root,
                     {"situations", "ratings_csv", "flow", "saliency",
                      "motivation", "affect", "curve", "eeg", "output"},
                     "top level");

  PipelineConfig cfg;
  if (!root.contains("situations") || !root["situations"].is_array() ||
      root["situations"].empty())
    throw std::runtime_error("config: 'situations' must be a non-empty array");

  for (const auto& s : root["situations"]) {
    require_known_keys(s,
                       {"id", "frames_dir", "frames_pattern", "nominal_fps",
                        "accel_csv", "eeg_csv", "saliency_dir"},
                       "situation entry");
    SituationSource src;
    src.id = s.at("id").get<std::string>();
    src.frames_dir = resolve(base, s.at("frames_dir").get<std::string>());
    read_field(s, "frames_pattern", src.frames_pattern);
    read_field(s, "nominal_fps", src.nominal_fps);
    src.accel_csv = resolve(base, s.at("accel_csv").get<std::string>());
    src.eeg_csv = resolve(base, s.at("eeg_csv").get<std::string>());
    if (s.contains("saliency_dir") && !s["saliency_dir"].is_null())
      src.saliency_dir = resolve(base, s["saliency_dir"].get<std::string>());
    cfg.situations.push_back(std::move(src));
  }

  if (root.contains("ratings_csv") && !root["ratings_csv"].is_null())
    cfg.ratings_csv = resolve(base, root["ratings_csv"].get<std::string>());

  if (root.contains("flow")) {
    const auto& f = root["flow"];
    require_known_keys(
        f, {"block_size", "search_radius", "refine_radius", "pyramid_levels"},
        "flow");
    read_field(f, "block_size", cfg.flow.block_size);
    read_field(f, "search_radius", cfg.flow.search_radius);
    read_field(f, "refine_radius", cfg.flow.refine_radius);
    read_field(f, "pyramid_levels", cfg.flow.pyramid_levels);
  }
  if (root.contains("saliency")) {
    const auto& s = root["saliency"];
    require_known_keys(s, {"threshold", "center_prior_sigma_frac"}, "saliency");
    read_field(s, "threshold", cfg.saliency.threshold);
    read_field(s, "center_prior_sigma_frac", cfg.saliency.center_prior_sigma_frac);
  }
  if (root.contains("motivation")) {
    const auto& m = root["motivation"];
    require_known_keys(m, {"window_blocks", "epsilon", "kappa", "raw_ratio_mode"},
                       "motivation");
    read_field(m, "window_blocks", cfg.motivation.window_blocks);
    read_field(m, "epsilon", cfg.motivation.epsilon);
    read_field(m, "kappa", cfg.motivation.kappa);
    read_field(m, "raw_ratio_mode", cfg.motivation.raw_ratio_mode);
  }
  if (root.contains("affect")) {
    const auto& a = root["affect"];
    require_known_keys(a,
                       {"lambda1", "lambda2", "lambda3", "alpha1", "nu1",
                        "smoothing_window_s"},
                       "affect");
    read_field(a, "lambda1", cfg.affect.lambda1);
    read_field(a, "lambda2", cfg.affect.lambda2);
    read_field(a, "lambda3", cfg.affect.lambda3);
    read_field(a, "alpha1", cfg.affect.alpha1);
    read_field(a, "nu1", cfg.affect.nu1);
    read_field(a, "smoothing_window_s", cfg.affect.smoothing_window_s);
    if (cfg.affect.alpha1 < 0.0 || cfg.affect.alpha1 > 1.0 ||
        cfg.affect.nu1 < 0.0 || cfg.affect.nu1 > 1.0)
      throw std::runtime_error("config: alpha1 and nu1 must lie in [0, 1]");
  }
  if (root.contains("curve")) {
    const auto& c = root["curve"];
    require_known_keys(c,
                       {"noise_variance", "length_scale", "signal_variance",
                        "optimize_hyperparams", "grid_points"},
                       "curve");
    read_field(c, "noise_variance", cfg.curve.noise_variance);
    read_field(c, "length_scale", cfg.curve.length_scale);
    read_field(c, "signal_variance", cfg.curve.signal_variance);
    read_field(c, "optimize_hyperparams", cfg.curve.optimize_hyperparams);
    read_field(c, "grid_points", cfg.curve_grid_points);
    if (cfg.curve_grid_points < 2)
      throw std::runtime_error("config: curve.grid_points must be >= 2");
  }
  if (root.contains("eeg")) {
    const auto& e = root["eeg"];
    require_known_keys(e, {"highpass_cutoff_hz", "gate_sigma_s"}, "eeg");
    read_field(e, "highpass_cutoff_hz", cfg.eeg.highpass_cutoff_hz);
    read_field(e, "gate_sigma_s", cfg.eeg.gate_sigma_s);
  }
  if (root.contains("output")) {
    const auto& o = root["output"];
    require_known_keys(
        o, {"svg_plots", "debug_flow_csv", "debug_motivation_csv"}, "output");
    read_field(o, "svg_plots", cfg.output.svg_plots);
    read_field(o, "debug_flow_csv", cfg.output.debug_flow_csv);
    read_field(o, "debug_motivation_csv", cfg.output.debug_motivation_csv);
  }
  return cfg;
}

namespace {

struct SituationWork {
  const SituationSource* source = nullptr;
  SituationStatus status;
  Situation situation;
  std::vector<double> gate;                  // per frame
  ComponentSeries components;
  std::vector<MotivationResult> motivation;  // per frame pair
  std::vector<FlowField> flows;              // kept only for the debug dump
  std::vector<double> a_raw;
  std::vector<double> a_smoothed;
  LabelSeries labels;
  EegFeaturesResult eeg;
  bool eeg_ok = false;
  std::string eeg_error;
};

void fail(SituationWork& work, const std::string& stage,
          const std::string& message) {
  work.status.ok = false;
  work.status.stage = stage;
  work.status.message = message;
}

/// Frame stem -> saliency file name: the trailing digit run carries the
/// frame index ("frame_0042" -> "saliency_0042.pgm").
std::string saliency_name_for(const std::string& frame_stem,
                              std::size_t position) {
  std::size_t end = frame_stem.size();
  while (end > 0 && !std::isdigit(static_cast<unsigned char>(frame_stem[end - 1])))
    --end;
  std::size_t begin = end;
  while (begin > 0 && std::isdigit(static_cast<unsigned char>(frame_stem[begin - 1])))
    --begin;
  if (begin == end) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "saliency_%04zu.pgm", position);
    return buf;
  }
  return "saliency_" + frame_stem.substr(begin, end - begin) + ".pgm";
}

void ingest_stage(SituationWork& work) {
  const SituationSource& src = *work.source;
  try {
    const FrameSequence frames =
        load_frames(src.frames_dir, src.frames_pattern, src.nominal_fps);
    const AccelSeries accel = load_accel_csv(src.accel_csv);
    const EegRecording eeg = load_eeg_csv(src.eeg_csv);
    work.situation = assemble_situation(frames, accel, eeg, src.id);
  } catch (const std::exception& e) {
    fail(work, "ingest", e.what());
  }
}

void components_stage(SituationWork& work, const PipelineConfig& cfg) {
  const SituationSource& src = *work.source;
  const auto& frames = work.situation.frames;
  const std::size_t n = frames.size();

  try {
    work.gate =
        artifact_gate(work.situation.accel_at_frames, cfg.eeg.gate_sigma_s);
  } catch (const std::exception& e) {
    fail(work, "flow", std::string("artifact gate: ") + e.what());
    return;
  }

  // The center prior depends only on the frame size; build its region once.
  AttentiveRegion prior_region;
  bool prior_ready = false;
  const auto fallback_region = [&]() -> const AttentiveRegion& {
    if (!prior_ready) {
      const SaliencyMap prior =
          center_prior(frames.width(), frames.height(),
                       cfg.saliency.center_prior_sigma_frac);
      prior_region = attentive_region(binarize(prior, cfg.saliency.threshold));
      prior_ready = true;
    }
    return prior_region;
  };

  work.components.timestamps = frames.timestamps;
  work.components.m.assign(n, 0.0);
  work.components.log_o.assign(n, 0.0);
  work.components.l.assign(n, 0.0);
  work.motivation.resize(n - 1);

  const double v_max = cfg.flow.max_displacement();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    FlowField flow;
    try {
      flow = estimate_flow(frames.frames[k], frames.frames[k + 1], cfg.flow);
    } catch (const std::exception& e) {
      fail(work, "flow", "frame pair " + std::to_string(k) + ": " + e.what());
      return;
    }

    AttentiveRegion region;
    try {
      bool loaded = false;
      if (src.saliency_dir) {
        const fs::path file =
            *src.saliency_dir / saliency_name_for(frames.names[k], k);
        if (fs::exists(file)) {
          const SaliencyMap map =
              load_saliency(file, frames.width(), frames.height());
          region = attentive_region(binarize(map, cfg.saliency.threshold));
          loaded = true;
        }
      }
      if (!loaded) region = fallback_region();
    } catch (const std::exception& e) {
      fail(work, "saliency", "frame " + std::to_string(k) + ": " + e.what());
      return;
    }

    try {
      work.motivation[k] = motivation_component(flow, region, cfg.motivation);
    } catch (const std::exception& e) {
      fail(work, "motivation",
           "frame pair " + std::to_string(k) + ": " + e.what());
      return;
    }

    work.components.m[k] =
        motion_component(motion_activity(flow, v_max), work.gate[k]);
    work.components.log_o[k] = work.motivation[k].log_o;
    if (cfg.output.debug_flow_csv) work.flows.push_back(std::move(flow));
  }
  // The last frame has no successor pair; it repeats the previous value so
  // every series stays frame-aligned.
  work.components.m[n - 1] = work.components.m[n - 2];
  work.components.log_o[n - 1] = work.components.log_o[n - 2];

  for (std::size_t k = 0; k < n; ++k)
    work.components.l[k] = contentment_component(
        frames.timestamps[k] - frames.timestamps.front(), cfg.affect);
}

void eeg_stage(SituationWork& work, const PipelineConfig& cfg) {
  try {
    work.eeg = extract_eeg_features(work.situation.eeg,
                                    work.situation.frames.timestamps, work.gate,
                                    cfg.eeg.highpass_cutoff_hz);
    work.eeg_ok = true;
  } catch (const std::exception& e) {
    work.eeg_ok = false;
    work.eeg_error = e.what();
  }
}

/// Batch affect pass over every situation that survived phase one. Arousal
/// normalization bounds and the maxima are pooled across the batch.
void affect_stage(std::vector<SituationWork>& works,
                  const PipelineConfig& cfg) {
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < works.size(); ++i)
    if (works[i].status.ok) live.push_back(i);
  if (live.empty()) return;

  std::vector<ComponentSeries> batch;
  for (std::size_t i : live) batch.push_back(works[i].components);

  Maxima maxima = compute_maxima(batch);

  double raw_lo = std::numeric_limits<double>::infinity();
  double raw_hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i : live) {
    works[i].a_raw = arousal_raw(works[i].components, cfg.affect, maxima);
    for (double v : works[i].a_raw) {
      raw_lo = std::min(raw_lo, v);
      raw_hi = std::max(raw_hi, v);
    }
  }

  // Range dependence consumes the normalized but unsmoothed arousal; the
  // published arousal is smoothed first, then normalized.
  std::vector<std::vector<double>> r_batch;
  for (std::size_t i : live) {
    SituationWork& w = works[i];
    const std::vector<double> a_unsm =
        minmax_normalize(w.a_raw, raw_lo, raw_hi);
    std::vector<double> r(a_unsm.size());
    for (std::size_t k = 0; k < a_unsm.size(); ++k)
      r[k] = range_dependence(w.components.l[k], a_unsm[k]);
    r_batch.push_back(std::move(r));
  }
  maxima = compute_maxima(batch, r_batch);

  double smooth_lo = std::numeric_limits<double>::infinity();
  double smooth_hi = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < live.size(); ++j) {
    SituationWork& w = works[live[j]];
    const int window = smoothing_window_frames(w.components.timestamps,
                                               cfg.affect.smoothing_window_s);
    w.a_smoothed = moving_average(w.a_raw, window);
    for (double v : w.a_smoothed) {
      smooth_lo = std::min(smooth_lo, v);
      smooth_hi = std::max(smooth_hi, v);
    }
  }

  for (std::size_t j = 0; j < live.size(); ++j) {
    SituationWork& w = works[live[j]];
    w.labels.timestamps = w.components.timestamps;
    w.labels.arousal = minmax_normalize(w.a_smoothed, smooth_lo, smooth_hi);
    w.labels.valence =
        valence_series(r_batch[j], w.components.log_o,
                       w.components.timestamps, cfg.affect, maxima);
  }
}

std::ofstream open_artifact(const fs::path& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write artifact: " + path.string());
  return out;
}

void write_components_csv(const fs::path& path, const SituationWork& w) {
  auto out = open_artifact(path);
  out << "t,m,log_o,l,A,V\n";
  for (std::size_t k = 0; k < w.components.size(); ++k) {
    out << format_double(w.components.timestamps[k]) << ','
        << format_double(w.components.m[k]) << ','
        << format_double(w.components.log_o[k]) << ','
        << format_double(w.components.l[k]) << ','
        << format_double(w.labels.arousal[k]) << ','
        << format_double(w.labels.valence[k]) << '\n';
  }
}

void write_labels_csv(const fs::path& path, const SituationWork& w) {
  auto out = open_artifact(path);
  out << "t,v6,a6,state\n";
  for (std::size_t k = 0; k < w.labels.size(); ++k) {
    const SamScalePair pair =
        to_sam_scale(w.labels.valence[k], w.labels.arousal[k]);
    out << format_double(w.labels.timestamps[k]) << ','
        << format_double(pair.v6) << ',' << format_double(pair.a6) << ','
        << to_string(bin_state(pair)) << '\n';
  }
}

void write_states_json(const fs::path& path, const SituationWork& w) {
  json points = json::array();
  std::map<std::string, int> histogram;
  for (std::size_t k = 0; k < w.labels.size(); ++k) {
    const SamScalePair pair =
        to_sam_scale(w.labels.valence[k], w.labels.arousal[k]);
    const std::string state = to_string(bin_state(pair));
    ++histogram[state];
    points.push_back({{"t", w.labels.timestamps[k]},
                      {"v6", pair.v6},
                      {"a6", pair.a6},
                      {"state", state}});
  }
  json root;
  root["situation_id"] = w.status.id;
  root["points"] = std::move(points);
  root["state_histogram"] = histogram;
  auto out = open_artifact(path);
  out << root.dump(2) << '\n';
}

void write_curve_csv(const fs::path& path, const AffectiveCurve& curve,
                     int grid_points) {
  std::vector<double> grid(grid_points);
  for (int i = 0; i < grid_points; ++i)
    grid[i] = -1.0 + 2.0 * i / static_cast<double>(grid_points - 1);
  auto out = open_artifact(path);
  out << "v,mean_a,var_a\n";
  for (const CurveSample& s : curve.sample(grid))
    out << format_double(s.v) << ',' << format_double(s.mean_a) << ','
        << format_double(s.var_a) << '\n';
}

void write_eeg_csvs(const fs::path& dir, const SituationWork& w) {
  {
    auto out = open_artifact(dir / "eeg_psd.csv");
    out << "situation,channel,band,psd_mean\n";
    if (w.eeg_ok) {
      for (int c = 0; c < 2; ++c) {
        const char* name = c == 0 ? "F3" : "F4";
        for (std::size_t b = 0; b < default_bands().size(); ++b)
          out << w.status.id << ',' << name << ',' << default_bands()[b].name
              << ',' << format_double(w.eeg.channels[c].psd_band_mean[b])
              << '\n';
      }
    }
  }
  {
    auto out = open_artifact(dir / "eeg_bicoherence.csv");
    out << "situation,channel,q1,q2,bicoherence_mean\n";
    if (w.eeg_ok) {
      for (int c = 0; c < 2; ++c) {
        const char* name = c == 0 ? "F3" : "F4";
        const EegFeatureSet& fs = w.eeg.channels[c];
        if (!fs.bicoherence_available) continue;
        for (std::size_t i = 0; i < 4; ++i)
          for (std::size_t j = 0; j < 4; ++j) {
            if (!fs.bicoherence_defined[i][j]) continue;
            out << w.status.id << ',' << name << ','
                << default_bands()[i].name << ',' << default_bands()[j].name
                << ',' << format_double(fs.bicoherence_mean[i][j]) << '\n';
          }
      }
    }
  }
  {
    auto out = open_artifact(dir / "gate_report.csv");
    out << "segment_start,g,clean\n";
    if (w.eeg_ok) {
      for (const auto& seg : w.eeg.segments_meta)
        out << format_double(seg.start_time) << ',' << format_double(seg.gate)
            << ',' << (seg.clean ? 1 : 0) << '\n';
    }
  }
}

void artifacts_stage(SituationWork& w, const PipelineConfig& cfg,
                     const fs::path& out_dir) {
  const fs::path dir = out_dir / w.status.id;
  try {
    fs::create_directories(dir);
    write_components_csv(dir / "components.csv", w);
    write_labels_csv(dir / "labels.csv", w);
    write_states_json(dir / "states.json", w);
  } catch (const std::exception& e) {
    fail(w, "artifacts", e.what());
    return;
  }

  try {
    const AffectiveCurve curve =
        AffectiveCurve::fit(w.labels.valence, w.labels.arousal, cfg.curve);
    write_curve_csv(dir / "curve.csv", curve, cfg.curve_grid_points);
    if (cfg.output.svg_plots) {
      std::vector<double> grid(101);
      for (int i = 0; i <= 100; ++i) grid[i] = -1.0 + 0.02 * i;
      write_va_plot(dir / "va_plot.svg", w.labels.valence, w.labels.arousal,
                    curve.sample(grid));
    }
  } catch (const std::exception& e) {
    fail(w, "curve", e.what());
    return;
  }

  try {
    write_eeg_csvs(dir, w);
    if (!w.eeg_ok) {
      fail(w, "eeg", w.eeg_error);
      return;
    }
  } catch (const std::exception& e) {
    fail(w, "eeg", e.what());
    return;
  }

  try {
    if (cfg.output.svg_plots) {
      const std::vector<TracePlotSeries> traces{
          {"m", w.components.m},
          {"log_o", w.components.log_o},
          {"l", w.components.l},
          {"A", w.labels.arousal},
          {"V", w.labels.valence},
      };
      write_trace_plot(dir / "components_plot.svg",
                       w.components.timestamps, traces);
    }
    if (cfg.output.debug_flow_csv) {
      const fs::path flow_dir = dir / "flow_debug";
      fs::create_directories(flow_dir);
      for (std::size_t k = 0; k < w.flows.size(); ++k) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "flow_%04zu.csv", k);
        auto out = open_artifact(flow_dir / buf);
        write_flow_csv(out, w.flows[k]);
      }
    }
    if (cfg.output.debug_motivation_csv) {
      auto out = open_artifact(dir / "motivation_debug.csv");
      out << "frame,window_x,window_y,u1,u2,d1,d2,h1,h2,rho\n";
      for (std::size_t k = 0; k < w.motivation.size(); ++k)
        write_motivation_csv(out, static_cast<int>(k), w.motivation[k]);
    }
  } catch (const std::exception& e) {
    fail(w, "artifacts", e.what());
  }
}

/// Record feeding the evaluation report; assembled in memory by
/// run_pipeline and from artifacts by run_evaluate.
struct EvalRecord {
  std::string id;
  SamScalePair predicted;
  bool has_eeg = false;
  std::array<std::array<double, 4>, 2> band_power{};  // [channel][band]
  double mean_m = 0.0;
  double mean_log_o = 0.0;
  double mean_l = 0.0;
};

json correlation_tables(std::span<const EvalRecord> records,
                        std::span<const RatingRecord> ratings) {
  json tables;
  std::vector<std::size_t> with_eeg;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (records[i].has_eeg) with_eeg.push_back(i);

  const auto safe_corr = [](auto&& fn, std::span<const double> x,
                            std::span<const double> y) -> json {
    try {
      return fn(x, y);
    } catch (const std::exception&) {
      return nullptr;  // undefined (constant input or too short)
    }
  };

  json spearman_tbl;
  json pearson_tbl;
  for (int c = 0; c < 2; ++c) {
    const std::string channel = c == 0 ? "F3" : "F4";
    for (std::size_t b = 0; b < default_bands().size(); ++b) {
      std::vector<double> power, val, aro, m, lo, l;
      for (std::size_t i : with_eeg) {
        power.push_back(records[i].band_power[c][b]);
        val.push_back(ratings[i].valence);
        aro.push_back(ratings[i].arousal);
        m.push_back(records[i].mean_m);
        lo.push_back(records[i].mean_log_o);
        l.push_back(records[i].mean_l);
      }
      const std::string band = default_bands()[b].name;
      spearman_tbl[channel][band]["valence"] =
          safe_corr([](auto x, auto y) { return spearman(x, y); }, val, power);
      spearman_tbl[channel][band]["arousal"] =
          safe_corr([](auto x, auto y) { return spearman(x, y); }, aro, power);
      pearson_tbl[channel][band]["motion"] =
          safe_corr([](auto x, auto y) { return pearson(x, y); }, m, power);
      pearson_tbl[channel][band]["motivation"] =
          safe_corr([](auto x, auto y) { return pearson(x, y); }, lo, power);
      pearson_tbl[channel][band]["contentment"] =
          safe_corr([](auto x, auto y) { return pearson(x, y); }, l, power);
    }
  }
  tables["spearman_ratings_vs_bandpower"] = std::move(spearman_tbl);
  tables["pearson_components_vs_bandpower"] = std::move(pearson_tbl);
  return tables;
}

void write_eval_report(const fs::path& path,
                       std::span<const EvalRecord> records,
                       std::span<const RatingRecord> ratings) {
  std::vector<SamScalePair> predicted;
  for (const auto& r : records) predicted.push_back(r.predicted);
  const RmseReport report = rmse(predicted, ratings);

  json root;
  root["n_rated"] = report.n;
  root["rmse"] = {{"valence", report.valence_rmse},
                  {"arousal", report.arousal_rmse}};
  root["normalized_rmse_pct"] = {
      {"range6",
       {{"valence", report.valence_pct_range6},
        {"arousal", report.arousal_pct_range6}}},
      {"range7",
       {{"valence", report.valence_pct_range7},
        {"arousal", report.arousal_pct_range7}}}};
  json per = json::array();
  for (std::size_t i = 0; i < records.size(); ++i) {
    per.push_back({{"id", records[i].id},
                   {"pred_v6", records[i].predicted.v6},
                   {"pred_a6", records[i].predicted.a6},
                   {"truth_v6", ratings[i].valence + 3.0},
                   {"truth_a6", ratings[i].arousal}});
  }
  root["per_situation"] = std::move(per);
  for (auto& [k, v] : correlation_tables(records, ratings).items())
    root[k] = std::move(v);

  auto out = open_artifact(path);
  out << root.dump(2) << '\n';
}

void write_run_report(const fs::path& path, const PipelineResult& result) {
  json root;
  root["all_ok"] = result.all_ok;
  json list = json::array();
  for (const auto& s : result.statuses) {
    json entry{{"id", s.id}, {"ok", s.ok}};
    if (!s.ok) {
      entry["stage"] = s.stage;
      entry["message"] = s.message;
    }
    list.push_back(std::move(entry));
  }
  root["situations"] = std::move(list);
  auto out = open_artifact(path);
  out << root.dump(2) << '\n';
}

void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn) {
  const int count = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (count == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  threads.reserve(count);
  for (int t = 0; t < count; ++t)
    threads.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
        fn(i);
    });
  for (auto& t : threads) t.join();
}

double mean_of(std::span<const double> xs) {
  double acc = 0.0;
  for (double v : xs) acc += v;
  return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

void eval_stage(const PipelineConfig& cfg, std::vector<SituationWork>& works,
                const fs::path& out_dir) {
  if (!cfg.ratings_csv) return;
  const std::vector<RatingRecord> all_ratings = load_ratings_csv(*cfg.ratings_csv);

  std::vector<EvalRecord> records;
  std::vector<RatingRecord> matched;
  for (const auto& rating : all_ratings) {
    const auto it =
        std::find_if(works.begin(), works.end(), [&](const SituationWork& w) {
          return w.status.id == rating.situation_id && w.status.ok;
        });
    if (it == works.end()) continue;
    EvalRecord rec;
    rec.id = rating.situation_id;
    rec.predicted = situation_label_summary(it->labels);
    rec.mean_m = mean_of(it->components.m);
    rec.mean_log_o = mean_of(it->components.log_o);
    rec.mean_l = mean_of(it->components.l);
    if (it->eeg_ok) {
      rec.has_eeg = true;
      for (int c = 0; c < 2; ++c)
        rec.band_power[c] = it->eeg.channels[c].psd_band_mean;
    }
    records.push_back(std::move(rec));
    matched.push_back(rating);
  }
  if (!records.empty())
    write_eval_report(out_dir / "eval_report.json", records, matched);
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config,
                            const fs::path& out_dir, int workers) {
  fs::create_directories(out_dir);

  std::vector<SituationWork> works(config.situations.size());
  for (std::size_t i = 0; i < works.size(); ++i) {
    works[i].source = &config.situations[i];
    works[i].status.id = config.situations[i].id;
  }

  parallel_for(works.size(), workers, [&](std::size_t i) {
    SituationWork& w = works[i];
    ingest_stage(w);
    if (w.status.ok) components_stage(w, config);
    if (w.status.ok) eeg_stage(w, config);
  });

  affect_stage(works, config);

  parallel_for(works.size(), workers, [&](std::size_t i) {
    if (works[i].status.ok) artifacts_stage(works[i], config, out_dir);
  });

  PipelineResult result;
  for (auto& w : works) {
    result.all_ok = result.all_ok && w.status.ok;
    result.statuses.push_back(w.status);
  }

  try {
    eval_stage(config, works, out_dir);
  } catch (const std::exception& e) {
    result.all_ok = false;
    result.statuses.push_back({"<evaluation>", false, "evaluate", e.what()});
  }
  write_run_report(out_dir / "run_report.json", result);
  return result;
}

PipelineResult run_eeg_features(const PipelineConfig& config,
                                const fs::path& out_dir, int workers) {
  fs::create_directories(out_dir);

  std::vector<SituationWork> works(config.situations.size());
  for (std::size_t i = 0; i < works.size(); ++i) {
    works[i].source = &config.situations[i];
    works[i].status.id = config.situations[i].id;
  }

  parallel_for(works.size(), workers, [&](std::size_t i) {
    SituationWork& w = works[i];
    ingest_stage(w);
    if (!w.status.ok) return;
    try {
      w.gate = artifact_gate(w.situation.accel_at_frames, config.eeg.gate_sigma_s);
    } catch (const std::exception& e) {
      fail(w, "flow", std::string("artifact gate: ") + e.what());
      return;
    }
    eeg_stage(w, config);
    if (!w.eeg_ok) {
      fail(w, "eeg", w.eeg_error);
      return;
    }
    try {
      const fs::path dir = out_dir / w.status.id;
      fs::create_directories(dir);
      write_eeg_csvs(dir, w);
    } catch (const std::exception& e) {
      fail(w, "artifacts", e.what());
    }
  });

  PipelineResult result;
  for (auto& w : works) {
    result.all_ok = result.all_ok && w.status.ok;
    result.statuses.push_back(w.status);
  }
  write_run_report(out_dir / "run_report.json", result);
  return result;
}

bool run_evaluate(const fs::path& labels_dir, const fs::path& ratings_csv,
                  const fs::path& report_path) {
  const std::vector<RatingRecord> all_ratings = load_ratings_csv(ratings_csv);

  std::vector<EvalRecord> records;
  std::vector<RatingRecord> matched;
  for (const auto& rating : all_ratings) {
    const fs::path dir = labels_dir / rating.situation_id;
    const fs::path comp_path = dir / "components.csv";
    if (!fs::exists(comp_path)) continue;

    const CsvTable table = read_numeric_csv(comp_path);
    const int iv = table.column_index("v");
    const int ia = table.column_index("a");
    const int im = table.column_index("m");
    const int io = table.column_index("log_o");
    const int il = table.column_index("l");
    if (iv < 0 || ia < 0 || im < 0 || io < 0 || il < 0 || table.rows.empty())
      continue;

    EvalRecord rec;
    rec.id = rating.situation_id;
    double sv = 0.0, sa = 0.0, sm = 0.0, so = 0.0, sl = 0.0;
    for (const auto& row : table.rows) {
      sv += row[iv];
      sa += row[ia];
      sm += row[im];
      so += row[io];
      sl += row[il];
    }
    const double n = static_cast<double>(table.rows.size());
    rec.predicted = to_sam_scale(std::clamp(sv / n, -1.0, 1.0),
                                 std::clamp(sa / n, 0.0, 1.0));
    rec.mean_m = sm / n;
    rec.mean_log_o = so / n;
    rec.mean_l = sl / n;

    const fs::path psd_path = dir / "eeg_psd.csv";
    if (fs::exists(psd_path)) {
      std::ifstream in(psd_path);
      std::string line;
      std::getline(in, line);  // header
      bool any = false;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 4) continue;
        const int c = cells[1] == "F3" ? 0 : cells[1] == "F4" ? 1 : -1;
        int b = -1;
        for (std::size_t k = 0; k < default_bands().size(); ++k)
          if (default_bands()[k].name == cells[2]) b = static_cast<int>(k);
        if (c < 0 || b < 0) continue;
        rec.band_power[c][b] = std::stod(cells[3]);
        any = true;
      }
      rec.has_eeg = any;
    }
    records.push_back(std::move(rec));
    matched.push_back(rating);
  }

  if (records.empty()) return false;
  write_eval_report(report_path, records, matched);
  return true;
}

}  // namespace asitu

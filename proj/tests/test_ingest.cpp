#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "asitu/ingest.hpp"
#include "asitu/series.hpp"
#include "asitu/rng.hpp"
#include "helpers.hpp"

using namespace asitu;
using test::TempDir;

namespace {

void write_text(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p);
  out << body;
}

Image solid_frame(int w, int h, std::uint8_t v) { return Image(w, h, v); }

void write_frames(const std::filesystem::path& dir, int count, int w, int h) {
  std::filesystem::create_directories(dir);
  for (int i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04d.pgm", i);
    write_pgm(dir / name, solid_frame(w, h, static_cast<std::uint8_t>(i)));
  }
}

}  // namespace

TEST_CASE("pgm round trip preserves pixels") {
  TempDir tmp("pgm");
  Image img(9, 5);
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    img.pixels[i] = static_cast<std::uint8_t>((i * 37) % 256);
  write_pgm(tmp.path() / "x.pgm", img);
  const Image back = read_pgm(tmp.path() / "x.pgm");
  CHECK(back.width == 9);
  CHECK(back.height == 5);
  CHECK(back.pixels == img.pixels);
}

TEST_CASE("pgm reader rejects malformed input") {
  TempDir tmp("pgm_bad");
  write_text(tmp.path() / "bad.pgm", "P2\n3 3\n255\n");
  CHECK_THROWS(read_pgm(tmp.path() / "bad.pgm"));
  write_text(tmp.path() / "trunc.pgm", "P5\n4 4\n255\nab");
  CHECK_THROWS(read_pgm(tmp.path() / "trunc.pgm"));
  write_text(tmp.path() / "maxval.pgm", "P5\n1 1\n65535\nxx");
  CHECK_THROWS(read_pgm(tmp.path() / "maxval.pgm"));
}

TEST_CASE("load_frames synthesizes timestamps at the nominal rate") {
  TempDir tmp("frames");
  write_frames(tmp.path(), 10, 16, 12);
  const FrameSequence seq = load_frames(tmp.path(), "frame_*.pgm", 30.0);
  REQUIRE(seq.size() == 10);
  CHECK(seq.timestamps.front() == 0.0);
  CHECK(seq.timestamps[1] == doctest::Approx(1.0 / 30.0).epsilon(1e-12));
  CHECK(seq.timestamps.back() == doctest::Approx(9.0 / 30.0).epsilon(1e-12));
  CHECK(seq.names.front() == "frame_0000");
}

TEST_CASE("load_frames honors the timestamp sidecar") {
  TempDir tmp("sidecar");
  write_frames(tmp.path(), 2, 8, 8);
  write_text(tmp.path() / "timestamps.txt", "0.00\n0.04\n");
  const FrameSequence seq = load_frames(tmp.path());
  CHECK(seq.timestamps[0] == 0.00);
  CHECK(seq.timestamps[1] == 0.04);
}

TEST_CASE("load_frames error paths") {
  TempDir tmp("frames_err");
  CHECK_THROWS(load_frames(tmp.path() / "missing"));
  std::filesystem::create_directories(tmp.path() / "empty");
  CHECK_THROWS(load_frames(tmp.path() / "empty"));

  const auto dir = tmp.path() / "mismatch";
  std::filesystem::create_directories(dir);
  write_pgm(dir / "frame_0000.pgm", solid_frame(8, 8, 0));
  write_pgm(dir / "frame_0001.pgm", solid_frame(9, 8, 0));
  CHECK_THROWS_WITH_AS(static_cast<void>(load_frames(dir)),
                       doctest::Contains("dimension mismatch"),
                       std::runtime_error);
}

TEST_CASE("accel csv parsing") {
  TempDir tmp("accel");
  write_text(tmp.path() / "a.csv", "t,ax,ay,az\n0,0,0,9.81\n0.1,0,0,9.81\n");
  const AccelSeries accel = load_accel_csv(tmp.path() / "a.csv");
  REQUIRE(accel.samples.size() == 2);
  CHECK(accel.samples[0].magnitude() == doctest::Approx(9.81));
  CHECK(accel.samples[1].magnitude() == doctest::Approx(9.81));

  write_text(tmp.path() / "cols.csv", "t,ax,ay\n0,0,0\n1,1,1\n");
  CHECK_THROWS_WITH_AS(static_cast<void>(load_accel_csv(tmp.path() / "cols.csv")),
                       doctest::Contains("t,ax,ay,az"), std::runtime_error);

  write_text(tmp.path() / "badcell.csv", "t,ax,ay,az\n0,0,0,9.81\n0.1,zap,0,9.81\n");
  CHECK_THROWS_WITH_AS(static_cast<void>(load_accel_csv(tmp.path() / "badcell.csv")),
                       doctest::Contains("row 3"), std::runtime_error);

  write_text(tmp.path() / "short.csv", "t,ax,ay,az\n0,0,0,9.81\n");
  CHECK_THROWS(load_accel_csv(tmp.path() / "short.csv"));
}

TEST_CASE("eeg csv parsing infers the sample rate from median dt") {
  TempDir tmp("eeg");
  std::string body = "t,f3,f4\n";
  for (int i = 0; i < 100; ++i)
    body += format_double(i * 0.004) + ",1.0,-1.0\n";
  write_text(tmp.path() / "e.csv", body);
  const EegRecording eeg = load_eeg_csv(tmp.path() / "e.csv");
  CHECK(eeg.sample_rate == 250);
  CHECK(eeg.f3.size() == 100);
}

TEST_CASE("assemble_situation interpolates accel at frame timestamps") {
  FrameSequence frames;
  frames.frames = {solid_frame(8, 8, 0), solid_frame(8, 8, 1),
                   solid_frame(8, 8, 2)};
  frames.timestamps = {0.0, 1.0, 2.0};
  frames.names = {"f0", "f1", "f2"};

  AccelSeries accel;
  accel.timestamps = {0.0, 2.0};
  accel.samples = {{0.0, 0.0, 0.0}, {2.0, 0.0, 0.0}};

  EegRecording eeg;
  eeg.sample_rate = 4;
  for (int i = 0; i <= 8; ++i) {
    eeg.timestamps.push_back(i * 0.25);
    eeg.f3.push_back(i);
    eeg.f4.push_back(-i);
  }

  const Situation s = assemble_situation(frames, accel, eeg, "sit");
  REQUIRE(s.accel_at_frames.samples.size() == frames.size());
  CHECK(s.accel_at_frames.samples[1].ax == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.duration_s == 2.0);
  CHECK(s.eeg.f3.size() == 9);
}

TEST_CASE("assemble_situation rejects disjoint sensor spans") {
  FrameSequence frames;
  frames.frames = {solid_frame(8, 8, 0), solid_frame(8, 8, 1)};
  frames.timestamps = {0.0, 1.0};
  frames.names = {"f0", "f1"};

  AccelSeries far_accel;
  far_accel.timestamps = {10.0, 20.0};
  far_accel.samples = {{0, 0, 0}, {0, 0, 0}};

  EegRecording eeg;
  eeg.sample_rate = 10;
  for (int i = 0; i <= 10; ++i) {
    eeg.timestamps.push_back(i * 0.1);
    eeg.f3.push_back(0.0);
    eeg.f4.push_back(0.0);
  }
  CHECK_THROWS_WITH_AS(
      static_cast<void>(assemble_situation(frames, far_accel, eeg)),
      doctest::Contains("overlap"), std::runtime_error);
}

TEST_CASE("assemble_situation fills a single missing EEG sample and flags it") {
  FrameSequence frames;
  frames.frames = {solid_frame(8, 8, 0), solid_frame(8, 8, 1)};
  frames.timestamps = {0.0, 1.0};
  frames.names = {"f0", "f1"};

  AccelSeries accel;
  accel.timestamps = {0.0, 1.0};
  accel.samples = {{0, 0, 9.81}, {0, 0, 9.81}};

  // 10 Hz nominal with t=0.5 missing; neighbors 4 and 6 microvolts.
  EegRecording eeg;
  eeg.sample_rate = 10;
  for (int i = 0; i <= 10; ++i) {
    if (i == 5) continue;
    eeg.timestamps.push_back(i * 0.1);
    eeg.f3.push_back(i == 4 ? 4.0 : i == 6 ? 6.0 : 1.0);
    eeg.f4.push_back(0.0);
  }

  const Situation s = assemble_situation(frames, accel, eeg);
  REQUIRE(s.eeg.f3.size() == 11);
  REQUIRE(s.eeg.interpolated.size() == 1);
  const std::size_t idx = s.eeg.interpolated[0];
  CHECK(s.eeg.timestamps[idx] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(s.eeg.f3[idx] == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("assemble_situation is idempotent") {
  FrameSequence frames;
  for (int i = 0; i < 4; ++i) {
    frames.frames.push_back(solid_frame(8, 8, 0));
    frames.timestamps.push_back(i * 0.5);
    frames.names.push_back("f" + std::to_string(i));
  }
  AccelSeries accel;
  Rng rng(11);
  for (int i = 0; i <= 15; ++i) {
    accel.timestamps.push_back(i * 0.1);
    accel.samples.push_back({rng.gaussian(), rng.gaussian(), 9.8});
  }
  EegRecording eeg;
  eeg.sample_rate = 20;
  for (int i = 0; i <= 30; ++i) {
    eeg.timestamps.push_back(i * 0.05);
    eeg.f3.push_back(rng.gaussian());
    eeg.f4.push_back(rng.gaussian());
  }

  const Situation once = assemble_situation(frames, accel, eeg, "x");
  const Situation twice =
      assemble_situation(once.frames, once.accel_at_frames, once.eeg, "x");
  CHECK(twice.eeg.timestamps == once.eeg.timestamps);
  CHECK(twice.eeg.f3 == once.eeg.f3);
  CHECK(twice.eeg.f4 == once.eeg.f4);
  REQUIRE(twice.accel_at_frames.samples.size() ==
          once.accel_at_frames.samples.size());
  for (std::size_t i = 0; i < once.accel_at_frames.samples.size(); ++i) {
    CHECK(twice.accel_at_frames.samples[i].ax ==
          once.accel_at_frames.samples[i].ax);
    CHECK(twice.accel_at_frames.samples[i].az ==
          once.accel_at_frames.samples[i].az);
  }
}

TEST_CASE("interpolation at an existing sample timestamp is exact") {
  Rng rng(5);
  std::vector<double> ts, vs;
  double t = 0.0;
  for (int i = 0; i < 50; ++i) {
    ts.push_back(t);
    vs.push_back(rng.gaussian());
    t += 0.01 + 0.05 * rng.uniform();
  }
  for (std::size_t i = 0; i < ts.size(); ++i)
    CHECK(interp_linear(ts, vs, ts[i], 1.0) == vs[i]);
}

TEST_CASE("interpolation refuses to bridge oversized gaps") {
  const std::vector<double> ts{0.0, 0.1, 2.0};
  const std::vector<double> vs{1.0, 2.0, 3.0};
  CHECK_THROWS(interp_linear(ts, vs, 1.0, 1.0));
  CHECK(interp_linear(ts, vs, 1.0, 2.5) == doctest::Approx(2.0 + 0.9 / 1.9));
}

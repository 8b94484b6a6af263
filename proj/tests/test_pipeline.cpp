#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include "hcoseg/image_io.hpp"
#include "hcoseg/pipeline.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace hcoseg;

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  std::string cmd = std::string(HCOSEG_CLI_PATH) + " " + args + " 2>&1";
  std::FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buf[512];
  while (std::fgets(buf, sizeof(buf), pipe)) result.output += buf;
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void write_frames(const fixture::SyntheticVideo& video,
                  const std::string& dir) {
  fs::create_directories(dir);
  char name[32];
  for (const Frame& f : video.sequence.frames) {
    std::snprintf(name, sizeof(name), "frame_%06d.png", f.index);
    write_frame_png(f, (fs::path(dir) / name).string());
  }
}

PipelineConfig fast_config() {
  PipelineConfig cfg;
  cfg.depth = 2;
  cfg.backend.proc_width = 64;
  cfg.backend.proc_height = 64;
  cfg.refine.superpixel_target = 40;
  cfg.workers = 2;
  return cfg;
}

}  // namespace

TEST_CASE("config files parse and flags override") {
  fixture::TempDir tmp("config");
  {
    std::ofstream out(tmp.sub("run.conf"));
    out << "# pipeline settings\n";
    out << "depth = 3\n";
    out << "backend=baseline\n";
    out << "lambda_p=0.25\n";
    out << "recursive_refine = 1\n";
    out << "workers=4\n";
  }
  PipelineConfig cfg = load_config_file(tmp.sub("run.conf"));
  CHECK(cfg.depth == 3);
  CHECK(cfg.refine.lambda_p == 0.25);
  CHECK(cfg.recursive_refine);
  CHECK(cfg.workers == 4);

  apply_config_entry(cfg, "depth", "5");  // flag-style override
  CHECK(cfg.depth == 5);

  CHECK_THROWS_AS(apply_config_entry(cfg, "no_such_key", "1"), Error);
  CHECK_THROWS_AS(apply_config_entry(cfg, "depth", "abc"), Error);
  {
    std::ofstream out(tmp.sub("broken.conf"));
    out << "depth\n";
  }
  CHECK_THROWS_AS(load_config_file(tmp.sub("broken.conf")), Error);
}

TEST_CASE("frame loading demands a contiguous 6-digit sequence") {
  fixture::TempDir tmp("frames");
  fixture::SyntheticVideo video = fixture::moving_square_video(3, 48, 40, 12);
  write_frames(video, tmp.str());

  FrameSequence seq = load_frame_sequence(tmp.str());
  CHECK(seq.length() == 3);
  CHECK(seq.frames[2].index == 2);

  fs::remove(tmp.path() / "frame_000001.png");
  try {
    load_frame_sequence(tmp.str());
    FAIL("expected gap error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::validation);
    CHECK(std::string(e.what()).find("frame_000001.png") !=
          std::string::npos);
  }
}

TEST_CASE("segment writes maps and masks deterministically") {
  fixture::TempDir tmp("segment");
  fixture::SyntheticVideo video = fixture::moving_square_video(8, 48, 40, 12);
  write_frames(video, tmp.sub("frames"));

  PipelineConfig cfg = fast_config();
  SegmentSummary summary =
      run_segment(tmp.sub("frames"), tmp.sub("out_a"), cfg);
  CHECK(summary.frames == 8);
  CHECK(summary.effective_depth == 2);
  CHECK(summary.coseg_calls == 8);  // two sibling pairs of 2x2

  for (int i = 0; i < 8; ++i) {
    char mask_name[32], map_name[32];
    std::snprintf(mask_name, sizeof(mask_name), "mask_%06d.png", i);
    std::snprintf(map_name, sizeof(map_name), "prob_%06d.pfm", i);
    CHECK(fs::exists(fs::path(tmp.sub("out_a")) / mask_name));
    CHECK(fs::exists(fs::path(tmp.sub("out_a")) / map_name));
  }

  // Rerun with a different worker count: byte-identical artifacts.
  cfg.workers = 1;
  run_segment(tmp.sub("frames"), tmp.sub("out_b"), cfg);
  for (int i = 0; i < 8; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "mask_%06d.png", i);
    CHECK(read_bytes(tmp.sub("out_a") + "/" + name) ==
          read_bytes(tmp.sub("out_b") + "/" + name));
    std::snprintf(name, sizeof(name), "prob_%06d.pfm", i);
    CHECK(read_bytes(tmp.sub("out_a") + "/" + name) ==
          read_bytes(tmp.sub("out_b") + "/" + name));
  }
}

TEST_CASE("requested depth is clamped and reported") {
  fixture::TempDir tmp("clamp");
  fixture::SyntheticVideo video = fixture::moving_square_video(8, 48, 40, 12);
  write_frames(video, tmp.sub("frames"));

  PipelineConfig cfg = fast_config();
  cfg.depth = 10;
  SegmentSummary summary =
      run_segment(tmp.sub("frames"), tmp.sub("out"), cfg);
  CHECK(summary.effective_depth == 3);  // floor(log2 8)
  CHECK(summary.to_line().find("depth=3") != std::string::npos);
}

TEST_CASE("segment can dump adjacent-frame flows as text") {
  fixture::TempDir tmp("flows");
  fixture::SyntheticVideo video = fixture::moving_square_video(3, 48, 40, 12);
  write_frames(video, tmp.sub("frames"));

  run_segment(tmp.sub("frames"), tmp.sub("out"), fast_config(),
              tmp.sub("flows"));
  for (const char* name : {"flow_000000_000001.txt", "flow_000001_000000.txt",
                           "flow_000001_000002.txt", "flow_000002_000001.txt"})
    CHECK(fs::exists(fs::path(tmp.sub("flows")) / name));

  std::ifstream in(tmp.sub("flows") + "/flow_000000_000001.txt");
  int row, col;
  double weight;
  REQUIRE((in >> row >> col >> weight));
  CHECK(row >= 0);
  CHECK(weight > 0.0);
  CHECK(weight <= 1.0);
}

TEST_CASE("recursive refinement runs every merge level") {
  fixture::TempDir tmp("recursive");
  fixture::SyntheticVideo video = fixture::moving_square_video(8, 48, 40, 12);
  write_frames(video, tmp.sub("frames"));

  PipelineConfig cfg = fast_config();
  cfg.recursive_refine = true;
  SegmentSummary summary =
      run_segment(tmp.sub("frames"), tmp.sub("out"), cfg);
  CHECK(summary.frames == 8);
  CHECK(fs::exists(fs::path(tmp.sub("out")) / "mask_000007.png"));
}

TEST_CASE("eval scores a prediction tree against ground truth") {
  fixture::TempDir tmp("eval");
  fixture::Lcg rng(401);

  // Two videos with three annotated frames each.
  for (const char* video : {"veh_01", "veh_02"}) {
    fs::create_directories(fs::path(tmp.sub("gt")) / video);
    fs::create_directories(fs::path(tmp.sub("pred")) / video);
    fs::create_directories(fs::path(tmp.sub("empty")) / video);
    for (int i : {0, 15, 30}) {
      char name[32];
      std::snprintf(name, sizeof(name), "mask_%06d.png", i);
      BinaryMask gt = fixture::random_mask(12, 10, rng, 0.4);
      write_mask_png(gt, (fs::path(tmp.sub("gt")) / video / name).string());
      write_mask_png(gt, (fs::path(tmp.sub("pred")) / video / name).string());
      write_mask_png(BinaryMask(12, 10),
                     (fs::path(tmp.sub("empty")) / video / name).string());
    }
  }

  PipelineConfig cfg;
  EvalOutput perfect = run_eval(tmp.sub("pred"), tmp.sub("gt"), cfg);
  CHECK(perfect.scores.miou == doctest::Approx(1.0));
  CHECK(perfect.scores.mf == doctest::Approx(1.0));
  CHECK(perfect.records.size() == 6);
  CHECK(perfect.records[0].frame == 0);
  CHECK(perfect.records[1].frame == 15);

  EvalOutput nothing = run_eval(tmp.sub("empty"), tmp.sub("gt"), cfg);
  CHECK(nothing.scores.miou == doctest::Approx(0.0));

  write_eval_csv(perfect.records, tmp.sub("scores.csv"));
  std::string csv = read_bytes(tmp.sub("scores.csv"));
  CHECK(csv.rfind("video,frame,iou,f\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);

  SUBCASE("mixed fixture matches the oracle") {
    fixture::TempDir mixed("eval_mixed");
    std::vector<EvalRecord> expected;
    fixture::Lcg rng2(403);
    for (const char* video : {"a", "b"}) {
      fs::create_directories(fs::path(mixed.sub("gt")) / video);
      fs::create_directories(fs::path(mixed.sub("pred")) / video);
      for (int i : {0, 15}) {
        char name[32];
        std::snprintf(name, sizeof(name), "mask_%06d.png", i);
        BinaryMask gt = fixture::random_mask(14, 9, rng2, 0.5);
        BinaryMask pred = fixture::random_mask(14, 9, rng2, 0.5);
        write_mask_png(gt,
                       (fs::path(mixed.sub("gt")) / video / name).string());
        write_mask_png(pred,
                       (fs::path(mixed.sub("pred")) / video / name).string());
        expected.push_back(EvalRecord{video, i,
                                      oracle::iou_by_counting(pred, gt),
                                      oracle::f_by_counting(pred, gt, 0.3)});
      }
    }
    EvalOutput out = run_eval(mixed.sub("pred"), mixed.sub("gt"), cfg);
    auto [miou, mf] = oracle::two_stage_mean(expected);
    CHECK(out.scores.miou == doctest::Approx(miou).epsilon(1e-12));
    CHECK(out.scores.mf == doctest::Approx(mf).epsilon(1e-12));
  }

  SUBCASE("pfm predictions are binarized at the configured ratio") {
    fixture::TempDir soft("eval_soft");
    fs::create_directories(soft.sub("gt"));
    fs::create_directories(soft.sub("pred"));
    BinaryMask gt(8, 8);
    for (int y = 2; y < 6; ++y)
      for (int x = 2; x < 6; ++x) gt.set(x, y, true);
    write_mask_png(gt, soft.sub("gt/mask_000000.png"));
    ProbabilityMap map(8, 8, 0.05);
    for (int y = 2; y < 6; ++y)
      for (int x = 2; x < 6; ++x) map.at(x, y) = 0.9;
    write_map_pfm(map, soft.sub("pred/mask_000000.pfm"));
    EvalOutput out = run_eval(soft.sub("pred"), soft.sub("gt"), cfg);
    CHECK(out.scores.miou == doctest::Approx(1.0));
  }

  SUBCASE("missing prediction is an io error") {
    fs::remove(fs::path(tmp.sub("pred")) / "veh_02" / "mask_000030.png");
    try {
      run_eval(tmp.sub("pred"), tmp.sub("gt"), cfg);
      FAIL("expected io error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::io);
      CHECK(std::string(e.what()).find("veh_02") != std::string::npos);
    }
  }
}

TEST_CASE("stats reports Table-style fields over a mask tree") {
  fixture::TempDir tmp("stats");
  fs::create_directories(tmp.sub("gt/v0"));
  // Three masks: object counts 1, 1, 2; areas chosen by block sizes.
  BinaryMask one(20, 20);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 5; ++x) one.set(x, y, true);  // 20 px = 5%
  write_mask_png(one, tmp.sub("gt/v0/mask_000000.png"));
  write_mask_png(one, tmp.sub("gt/v0/mask_000015.png"));
  BinaryMask two = one;
  for (int y = 10; y < 14; ++y)
    for (int x = 10; x < 15; ++x) two.set(x, y, true);  // +20 px
  write_mask_png(two, tmp.sub("gt/v0/mask_000030.png"));

  StatsOutput out = run_stats(tmp.sub("gt"));
  CHECK(out.stats.annotated == 3);
  CHECK(out.stats.avg_objects == doctest::Approx(4.0 / 3.0));
  CHECK(out.report.find("#Annot: 3") != std::string::npos);
  CHECK(out.report.find("#Avg-Obj: 1.33 ± 0.47") != std::string::npos);
  CHECK(out.report.find("#Avg-Area(%)") != std::string::npos);

  write_stats_csv(out.records, tmp.sub("stats.csv"));
  CHECK(read_bytes(tmp.sub("stats.csv"))
            .rfind("video,frame,objects,area_pct\n", 0) == 0);
}

TEST_CASE("avgmap writes a normalized image") {
  fixture::TempDir tmp("avgmap");
  fs::create_directories(tmp.sub("gt"));
  BinaryMask half(10, 10);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 5; ++x) half.set(x, y, true);
  write_mask_png(half, tmp.sub("gt/mask_000000.png"));

  run_avgmap(tmp.sub("gt"), tmp.sub("avg.pfm"), 10, 10);
  ProbabilityMap avg = read_map_pfm(tmp.sub("avg.pfm"));
  double peak = 0.0;
  for (double v : avg.values) peak = std::max(peak, v);
  CHECK(peak == 1.0);

  run_avgmap(tmp.sub("gt"), tmp.sub("avg.png"), 10, 10);
  CHECK(fs::exists(tmp.sub("avg.png")));
}

TEST_CASE("overlay blends only where the mask is set") {
  fixture::TempDir tmp("overlay");
  fs::create_directories(tmp.sub("frames"));
  fs::create_directories(tmp.sub("masks"));

  Frame frame(4, 4, 0);
  fixture::Lcg rng(419);
  for (auto& b : frame.pixels)
    b = static_cast<std::uint8_t>(rng.next_int(0, 255));
  write_frame_png(frame, tmp.sub("frames/frame_000000.png"));

  SUBCASE("all-false mask keeps the frame bytes") {
    write_mask_png(BinaryMask(4, 4), tmp.sub("masks/frame_000000.png"));
    run_overlay(tmp.sub("frames"), tmp.sub("masks"), tmp.sub("out"));
    Frame out = read_frame_png(tmp.sub("out/frame_000000.png"));
    CHECK(out.pixels == frame.pixels);
  }

  SUBCASE("all-true mask blends every pixel at alpha 0.5") {
    write_mask_png(BinaryMask(4, 4, true), tmp.sub("masks/frame_000000.png"));
    run_overlay(tmp.sub("frames"), tmp.sub("masks"), tmp.sub("out"), 0.5,
                {255, 0, 0});
    Frame out = read_frame_png(tmp.sub("out/frame_000000.png"));
    for (std::size_t p = 0; p < frame.pixel_count(); ++p) {
      std::array<int, 3> color{255, 0, 0};
      for (int c = 0; c < 3; ++c) {
        int expected = static_cast<int>(
            std::lround(0.5 * frame.pixels[3 * p + c] + 0.5 * color[c]));
        CHECK(out.pixels[3 * p + c] == expected);
      }
    }
  }

  SUBCASE("mask_<idx> naming pairs with frame_<idx>") {
    write_mask_png(BinaryMask(4, 4, true), tmp.sub("masks/mask_000000.png"));
    run_overlay(tmp.sub("frames"), tmp.sub("masks"), tmp.sub("out"));
    CHECK(fs::exists(tmp.sub("out/frame_000000.png")));
  }

  SUBCASE("missing counterpart raises io") {
    try {
      run_overlay(tmp.sub("frames"), tmp.sub("masks"), tmp.sub("out"));
      FAIL("expected io error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::io);
    }
  }
}

TEST_CASE("complexity table delegates to the hierarchy counter") {
  auto rows = complexity_table(8, 1, 3);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::pair<int, long long>{1, 16});
  CHECK(rows[1] == std::pair<int, long long>{2, 8});
  CHECK(rows[2] == std::pair<int, long long>{3, 4});
  CHECK_THROWS_AS(complexity_table(8, 3, 1), Error);
  CHECK_THROWS_AS(complexity_table(8, 1, 9), Error);
}

// ---- CLI process behavior -------------------------------------------------

TEST_CASE("cli exit codes distinguish usage, io and validation") {
  CliResult usage = run_cli("");
  CHECK(usage.exit_code == 1);

  CliResult missing = run_cli("segment --frames /no/such/dir --out /tmp/x");
  CHECK(missing.exit_code == 2);

  fixture::TempDir tmp("cli");
  fixture::SyntheticVideo video = fixture::moving_square_video(3, 48, 40, 12);
  write_frames(video, tmp.sub("frames"));
  fs::remove(fs::path(tmp.sub("frames")) / "frame_000001.png");
  CliResult gap = run_cli("segment --frames " + tmp.sub("frames") +
                          " --out " + tmp.sub("out"));
  CHECK(gap.exit_code == 3);
  CHECK(gap.output.find("frame_000001.png") != std::string::npos);

  CliResult help = run_cli("--help");
  CHECK(help.exit_code == 0);

  CliResult complexity = run_cli("complexity --length 8 --min-depth 1 "
                                 "--max-depth 3");
  CHECK(complexity.exit_code == 0);
  CHECK(complexity.output.find("16") != std::string::npos);

  CliResult bad_range = run_cli("complexity --length 8 --min-depth 1 "
                                "--max-depth 12");
  CHECK(bad_range.exit_code == 3);

  CliResult dump = run_cli("slice-dump --length 8 --depth 2");
  CHECK(dump.exit_code == 0);
  CHECK(dump.output.find("residue 0: 0 4") != std::string::npos);
}

TEST_CASE("cli segment produces outputs and a summary line") {
  fixture::TempDir tmp("cli_seg");
  fixture::SyntheticVideo video = fixture::moving_square_video(8, 48, 40, 12);
  write_frames(video, tmp.sub("frames"));
  {
    std::ofstream out(tmp.sub("fast.conf"));
    out << "proc_width=64\nproc_height=64\nsuperpixel_target=40\n"
        << "workers=2\n";
  }

  CliResult seg = run_cli("segment --frames " + tmp.sub("frames") + " --out " +
                          tmp.sub("out") + " --config " + tmp.sub("fast.conf") +
                          " --depth 10");
  CHECK(seg.exit_code == 0);
  CHECK(seg.output.find("depth=3") != std::string::npos);
  CHECK(fs::exists(tmp.sub("out/mask_000007.png")));

  CliResult eval = run_cli("eval --pred " + tmp.sub("out") + " --gt " +
                           tmp.sub("out"));
  CHECK(eval.exit_code == 0);
  CHECK(eval.output.find("overall") != std::string::npos);
  CHECK(eval.output.find("1.0000") != std::string::npos);
}

// Batch front end: segment, eval, stats, avgmap, overlay, complexity,
// slice-dump. Exit codes: 0 ok, 1 usage, 2 I/O, 3 validation.

#include <CLI11.hpp>

#include <array>
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "hcoseg/image_io.hpp"
#include "hcoseg/pipeline.hpp"
#include "hcoseg/slice_tree.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitValidation = 3;

int exit_code_for(hcoseg::Errc code) {
  return code == hcoseg::Errc::io ? kExitIo : kExitValidation;
}

// Every tuning flag funnels through the same key=value channel as the
// config file; explicitly passed flags override file values.
struct Override {
  CLI::Option* option = nullptr;
  std::string key;
  std::string value;
};

class OverrideSet {
public:
  void add(CLI::App* cmd, const std::string& flag, const std::string& key,
           const std::string& help) {
    entries_.push_back(std::make_unique<Override>());
    Override* o = entries_.back().get();
    o->key = key;
    o->option = cmd->add_option(flag, o->value, help);
  }

  void apply(hcoseg::PipelineConfig& cfg) const {
    for (const auto& o : entries_)
      if (o->option->count() > 0) hcoseg::apply_config_entry(cfg, o->key, o->value);
  }

private:
  std::vector<std::unique_ptr<Override>> entries_;
};

hcoseg::PipelineConfig make_config(const std::string& config_path,
                                   const OverrideSet& overrides) {
  hcoseg::PipelineConfig cfg;
  if (!config_path.empty()) cfg = hcoseg::load_config_file(config_path);
  overrides.apply(cfg);
  return cfg;
}

std::array<std::uint8_t, 3> parse_color(const std::string& hex) {
  if (hex.size() != 6 ||
      hex.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos)
    hcoseg::raise(hcoseg::Errc::validation,
                  "color must be RRGGBB hex, got '" + hex + "'");
  auto byte = [&](int i) {
    return static_cast<std::uint8_t>(
        std::stoi(hex.substr(static_cast<std::size_t>(i) * 2, 2), nullptr, 16));
  };
  return {byte(0), byte(1), byte(2)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Primary video object segmentation via hierarchical odd-even "
               "slicing, frame-pair co-segmentation and superpixel flow "
               "refinement"};
  app.require_subcommand(1);

  // segment
  auto* seg = app.add_subcommand(
      "segment", "Segment a directory of frame_<6-digit>.png frames");
  std::string seg_frames, seg_out, seg_config, seg_flow_dump;
  seg->add_option("--frames", seg_frames, "Input frame directory")->required();
  seg->add_option("--out", seg_out, "Output directory for maps and masks")
      ->required();
  seg->add_option("--config", seg_config, "key=value config file");
  seg->add_option("--dump-flows", seg_flow_dump,
                  "Also dump adjacent-frame flow matrices as text here");
  OverrideSet seg_over;
  seg_over.add(seg, "--depth", "depth", "Requested slicing depth (default 5)");
  seg_over.add(seg, "--backend", "backend", "baseline or external");
  seg_over.add(seg, "--external-dir", "external_dir",
               "Directory of externally produced pair maps");
  seg_over.add(seg, "--proc-width", "proc_width", "Processing width");
  seg_over.add(seg, "--proc-height", "proc_height", "Processing height");
  seg_over.add(seg, "--color-bins", "color_bins", "Histogram bins per channel");
  seg_over.add(seg, "--border-fraction", "border_fraction",
               "Border band width fraction");
  seg_over.add(seg, "--lambda-p", "lambda_p", "Previous-frame weight");
  seg_over.add(seg, "--lambda-s", "lambda_s", "Subsequent-frame weight");
  seg_over.add(seg, "--threshold-ratio", "threshold_ratio",
               "Binarization ratio of the per-frame maximum");
  seg_over.add(seg, "--superpixel-target", "superpixel_target",
               "Superpixels per frame");
  seg_over.add(seg, "--slic-compactness", "slic_compactness",
               "Superpixel compactness");
  seg_over.add(seg, "--slic-iters", "slic_iters", "Superpixel iterations");
  seg_over.add(seg, "--knn-k", "knn_k", "Mutual neighborhood size");
  seg_over.add(seg, "--workers", "workers", "Worker threads (0 = all)");
  seg_over.add(seg, "--recursive-refine", "recursive_refine",
               "Refine every merge level up the tree (0/1)");

  // eval
  auto* ev = app.add_subcommand(
      "eval", "Score predictions against ground-truth masks");
  std::string ev_pred, ev_gt, ev_config, ev_csv;
  ev->add_option("--pred", ev_pred, "Prediction directory")->required();
  ev->add_option("--gt", ev_gt, "Ground-truth directory")->required();
  ev->add_option("--config", ev_config, "key=value config file");
  ev->add_option("--csv", ev_csv, "Write per-frame records to this CSV");
  OverrideSet ev_over;
  ev_over.add(ev, "--ratio", "binarization_ratio",
              "Binarization ratio for .pfm predictions");
  ev_over.add(ev, "--beta-sq", "f_beta_sq", "beta^2 of the F-measure");
  ev_over.add(ev, "--workers", "workers", "Worker threads (0 = all)");

  // stats
  auto* st = app.add_subcommand(
      "stats", "Object-count and area statistics over a mask tree");
  std::string st_gt, st_csv;
  st->add_option("--gt", st_gt, "Ground-truth directory")->required();
  st->add_option("--csv", st_csv, "Write per-mask records to this CSV");

  // avgmap
  auto* av = app.add_subcommand(
      "avgmap", "Average annotation map over a mask tree");
  std::string av_gt, av_out;
  int av_w = 320, av_h = 320;
  av->add_option("--gt", av_gt, "Ground-truth directory")->required();
  av->add_option("--out", av_out, "Output image (.png or .pfm)")->required();
  av->add_option("--width", av_w, "Output width");
  av->add_option("--height", av_h, "Output height");

  // overlay
  auto* ov = app.add_subcommand(
      "overlay", "Alpha-blend masks over their frames for inspection");
  std::string ov_frames, ov_masks, ov_out, ov_color = "ff0000";
  double ov_alpha = 0.5;
  ov->add_option("--frames", ov_frames, "Frame directory")->required();
  ov->add_option("--masks", ov_masks, "Mask directory")->required();
  ov->add_option("--out", ov_out, "Output directory")->required();
  ov->add_option("--alpha", ov_alpha, "Blend alpha (default 0.5)");
  ov->add_option("--color", ov_color, "Blend color as RRGGBB hex");

  // complexity
  auto* cx = app.add_subcommand(
      "complexity", "Co-segmentation call counts per slicing depth");
  int cx_len = 0, cx_min = 1, cx_max = 1;
  cx->add_option("--length", cx_len, "Sequence length")->required();
  cx->add_option("--min-depth", cx_min, "First depth")->required();
  cx->add_option("--max-depth", cx_max, "Last depth")->required();

  // slice-dump
  auto* sd = app.add_subcommand(
      "slice-dump", "Print the slice tree leaves for a sequence length");
  int sd_len = 0, sd_depth = 5;
  sd->add_option("--length", sd_len, "Sequence length")->required();
  sd->add_option("--depth", sd_depth, "Requested depth (default 5)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (seg->parsed()) {
      hcoseg::PipelineConfig cfg = make_config(seg_config, seg_over);
      hcoseg::SegmentSummary summary =
          hcoseg::run_segment(seg_frames, seg_out, cfg, seg_flow_dump);
      std::cout << summary.to_line() << "\n";
    } else if (ev->parsed()) {
      hcoseg::PipelineConfig cfg = make_config(ev_config, ev_over);
      hcoseg::EvalOutput out = hcoseg::run_eval(ev_pred, ev_gt, cfg);
      std::cout << out.report;
      if (!ev_csv.empty()) hcoseg::write_eval_csv(out.records, ev_csv);
    } else if (st->parsed()) {
      hcoseg::StatsOutput out = hcoseg::run_stats(st_gt);
      std::cout << out.report;
      if (!st_csv.empty()) hcoseg::write_stats_csv(out.records, st_csv);
    } else if (av->parsed()) {
      hcoseg::run_avgmap(av_gt, av_out, av_w, av_h);
    } else if (ov->parsed()) {
      hcoseg::run_overlay(ov_frames, ov_masks, ov_out, ov_alpha,
                          parse_color(ov_color));
    } else if (cx->parsed()) {
      auto rows = hcoseg::complexity_table(cx_len, cx_min, cx_max);
      std::printf("%8s %16s\n", "depth", "coseg_calls");
      for (auto [d, count] : rows)
        std::printf("%8d %16lld\n", d, count);
    } else if (sd->parsed()) {
      hcoseg::SliceTree tree = hcoseg::build_tree(sd_len, sd_depth);
      std::cout << "length " << tree.length << " depth " << tree.depth
                << " leaves " << tree.leaves.size() << "\n";
      std::cout << hcoseg::to_text(tree);
    }
  } catch (const hcoseg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

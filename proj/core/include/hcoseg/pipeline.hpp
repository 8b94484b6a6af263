#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "hcoseg/coseg.hpp"
#include "hcoseg/dataset_stats.hpp"
#include "hcoseg/image.hpp"
#include "hcoseg/metrics.hpp"
#include "hcoseg/refine.hpp"

namespace hcoseg {

struct PipelineConfig {
  int depth = 5;
  BackendConfig backend;
  RefinementParams refine;
  EvalConfig eval;
  std::string input_root;
  std::string output_root;
  bool recursive_refine = false;
  unsigned workers = 0;  // 0 = all hardware threads

  unsigned effective_workers() const;
  void validate() const;
};

/// Applies one "key=value" setting. Unknown keys raise Errc::validation.
void apply_config_entry(PipelineConfig& cfg, const std::string& key,
                        const std::string& value);

/// Flat key=value file; '#' starts a comment, blank lines are skipped.
PipelineConfig load_config_file(const std::string& path);

/// Loads frame_<6-digit>.png starting at 000000 from a directory; a gap in
/// the numbering raises Errc::validation naming the missing file.
FrameSequence load_frame_sequence(const std::string& dir);

struct SegmentSummary {
  std::size_t frames = 0;
  int effective_depth = 0;
  std::size_t coseg_calls = 0;
  double slice_seconds = 0.0;
  double init_seconds = 0.0;
  double refine_seconds = 0.0;
  double write_seconds = 0.0;

  std::string to_line() const;
};

/// Full pipeline over a frame directory: slice, initialize, refine, write
/// prob_<idx>.pfm and mask_<idx>.png into out_dir. When flow_dump_dir is
/// nonempty, adjacent-frame flows are also dumped there as text. Stage
/// failures carry a "segment/<stage>:" prefix.
SegmentSummary run_segment(const std::string& frames_dir,
                           const std::string& out_dir,
                           const PipelineConfig& cfg,
                           const std::string& flow_dump_dir = "");

struct EvalOutput {
  DatasetScores scores;
  std::vector<EvalRecord> records;
  std::string report;
};

/// Scores predictions against ground truth over matching video
/// subdirectories and filenames. Ground-truth masks define the evaluated
/// set; a prediction may be a .png mask or a .pfm map (binarized at the
/// configured ratio).
EvalOutput run_eval(const std::string& pred_dir, const std::string& gt_dir,
                    const PipelineConfig& cfg);
void write_eval_csv(std::span<const EvalRecord> records,
                    const std::string& path);

struct StatsOutput {
  DatasetStats stats;
  std::vector<MaskRecord> records;
  std::string report;
};

/// Object-count and area statistics over a ground-truth mask tree.
StatsOutput run_stats(const std::string& gt_dir);
void write_stats_csv(std::span<const MaskRecord> records,
                     const std::string& path);

/// Average annotation map over every mask under gt_dir, written as 8-bit
/// grayscale PNG or PFM depending on the output extension.
void run_avgmap(const std::string& gt_dir, const std::string& out_path,
                int out_w, int out_h);

/// Alpha-blends the mask region over each frame at a fixed color.
void run_overlay(const std::string& frames_dir, const std::string& masks_dir,
                 const std::string& out_dir, double alpha = 0.5,
                 std::array<std::uint8_t, 3> color = {255, 0, 0});

/// (depth, co-segmentation call count) rows for each depth in range.
std::vector<std::pair<int, long long>> complexity_table(int length,
                                                        int min_depth,
                                                        int max_depth);

}  // namespace hcoseg

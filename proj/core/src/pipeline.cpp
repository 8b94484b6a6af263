#include "hcoseg/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hcoseg/flow.hpp"
#include "hcoseg/image_io.hpp"
#include "hcoseg/parallel.hpp"
#include "hcoseg/slice_tree.hpp"
#include "hcoseg/superpixels.hpp"

namespace hcoseg {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string zero6(int v) {
  std::ostringstream out;
  out << std::setw(6) << std::setfill('0') << v;
  return out.str();
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    raise(Errc::validation, "config key '" + key + "': bad integer '" +
                                value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    raise(Errc::validation,
          "config key '" + key + "': bad number '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "on") return true;
  if (value == "0" || value == "false" || value == "off") return false;
  raise(Errc::validation,
        "config key '" + key + "': bad boolean '" + value + "'");
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Last run of digits in a filename stem, or -1.
long long frame_number(const std::string& stem) {
  int end = -1;
  for (int i = static_cast<int>(stem.size()) - 1; i >= 0; --i) {
    if (std::isdigit(static_cast<unsigned char>(stem[i]))) {
      end = i;
      break;
    }
  }
  if (end < 0) return -1;
  int begin = end;
  while (begin > 0 &&
         std::isdigit(static_cast<unsigned char>(stem[begin - 1])))
    --begin;
  return std::stoll(stem.substr(begin, end - begin + 1));
}

std::vector<fs::path> sorted_files(const fs::path& dir,
                                   const std::string& extension) {
  if (!fs::is_directory(dir))
    raise(Errc::io, "not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == extension)
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<fs::path> sorted_subdirs(const fs::path& dir) {
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

// A ground-truth tree is either one directory of masks or one
// subdirectory per video. Videos come back sorted by name.
struct VideoMasks {
  std::string video;
  std::vector<fs::path> files;
};

std::vector<VideoMasks> collect_mask_tree(const fs::path& root) {
  if (!fs::is_directory(root))
    raise(Errc::io, "not a directory: " + root.string());
  std::vector<VideoMasks> videos;
  std::vector<fs::path> direct = sorted_files(root, ".png");
  if (!direct.empty()) {
    videos.push_back({root.filename().string(), std::move(direct)});
    return videos;
  }
  for (const fs::path& sub : sorted_subdirs(root)) {
    std::vector<fs::path> files = sorted_files(sub, ".png");
    if (!files.empty())
      videos.push_back({sub.filename().string(), std::move(files)});
  }
  if (videos.empty())
    raise(Errc::validation, "no .png masks under " + root.string());
  return videos;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) raise(Errc::io, "cannot open for writing: " + tmp);
    out << content;
    if (!out) raise(Errc::io, "write failed: " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) raise(Errc::io, "cannot rename into place: " + path);
}

[[noreturn]] void rethrow_staged(const std::string& stage, const Error& e) {
  throw Error(e.code(), "segment/" + stage + ": " + e.what());
}

}  // namespace

unsigned PipelineConfig::effective_workers() const {
  return workers == 0 ? default_workers() : workers;
}

void PipelineConfig::validate() const {
  if (depth < 0) raise(Errc::validation, "depth must be >= 0");
  backend.validate();
  refine.validate();
  eval.validate();
}

void apply_config_entry(PipelineConfig& cfg, const std::string& key,
                        const std::string& value) {
  if (key == "depth") cfg.depth = parse_int(key, value);
  else if (key == "backend") {
    if (value == "baseline") cfg.backend.kind = BackendKind::baseline;
    else if (value == "external") cfg.backend.kind = BackendKind::external;
    else raise(Errc::validation, "backend must be baseline or external");
  }
  else if (key == "proc_width") cfg.backend.proc_width = parse_int(key, value);
  else if (key == "proc_height") cfg.backend.proc_height = parse_int(key, value);
  else if (key == "color_bins") cfg.backend.color_bins = parse_int(key, value);
  else if (key == "border_fraction") cfg.backend.border_fraction = parse_double(key, value);
  else if (key == "external_dir") cfg.backend.external_dir = value;
  else if (key == "lambda_p") cfg.refine.lambda_p = parse_double(key, value);
  else if (key == "lambda_s") cfg.refine.lambda_s = parse_double(key, value);
  else if (key == "threshold_ratio") cfg.refine.threshold_ratio = parse_double(key, value);
  else if (key == "superpixel_target") cfg.refine.superpixel_target = parse_int(key, value);
  else if (key == "slic_compactness") cfg.refine.slic_compactness = parse_double(key, value);
  else if (key == "slic_iters") cfg.refine.slic_iters = parse_int(key, value);
  else if (key == "knn_k") cfg.refine.knn_k = parse_int(key, value);
  else if (key == "binarization_ratio") cfg.eval.binarization_ratio = parse_double(key, value);
  else if (key == "f_beta_sq") cfg.eval.f_beta_sq = parse_double(key, value);
  else if (key == "keyframe_stride") cfg.eval.keyframe_stride = parse_int(key, value);
  else if (key == "input_root") cfg.input_root = value;
  else if (key == "output_root") cfg.output_root = value;
  else if (key == "recursive_refine") cfg.recursive_refine = parse_bool(key, value);
  else if (key == "workers") {
    int v = parse_int(key, value);
    if (v < 0) raise(Errc::validation, "workers must be >= 0");
    cfg.workers = static_cast<unsigned>(v);
  }
  else raise(Errc::validation, "unknown config key '" + key + "'");
}

PipelineConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io, "cannot open config file: " + path);
  PipelineConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    std::size_t eq = text.find('=');
    if (eq == std::string::npos)
      raise(Errc::validation, path + ":" + std::to_string(line_no) +
                                  ": expected key=value");
    apply_config_entry(cfg, trim(text.substr(0, eq)),
                       trim(text.substr(eq + 1)));
  }
  return cfg;
}

FrameSequence load_frame_sequence(const std::string& dir) {
  std::vector<fs::path> files = sorted_files(dir, ".png");
  std::vector<int> indices;
  for (const fs::path& f : files) {
    const std::string stem = f.stem().string();
    if (stem.rfind("frame_", 0) != 0 || stem.size() != 12) continue;
    bool digits = std::all_of(stem.begin() + 6, stem.end(), [](char c) {
      return std::isdigit(static_cast<unsigned char>(c));
    });
    if (digits) indices.push_back(std::stoi(stem.substr(6)));
  }
  if (indices.empty())
    raise(Errc::validation,
          "no frame_<6-digit>.png files found in " + dir);
  std::sort(indices.begin(), indices.end());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] != static_cast<int>(i))
      raise(Errc::validation,
            "gap in frame numbering: missing frame_" +
                zero6(static_cast<int>(i)) + ".png in " + dir);
  }

  FrameSequence seq;
  seq.source_id = fs::path(dir).filename().string();
  seq.frames.resize(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    fs::path path = fs::path(dir) / ("frame_" + zero6(static_cast<int>(i)) +
                                     ".png");
    seq.frames[i] = read_frame_png(path.string(), static_cast<int>(i));
  }
  return seq;
}

std::string SegmentSummary::to_line() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << "segment ok: frames=" << frames << " depth=" << effective_depth
      << " coseg_calls=" << coseg_calls << " slice=" << slice_seconds
      << "s init=" << init_seconds << "s refine=" << refine_seconds
      << "s write=" << write_seconds << "s";
  return out.str();
}

SegmentSummary run_segment(const std::string& frames_dir,
                           const std::string& out_dir,
                           const PipelineConfig& cfg,
                           const std::string& flow_dump_dir) {
  cfg.validate();
  const unsigned workers = cfg.effective_workers();
  SegmentSummary summary;

  FrameSequence seq;
  try {
    seq = load_frame_sequence(frames_dir);
    if (seq.length() < 2)
      raise(Errc::validation,
            "need at least 2 frames to co-segment, got " +
                std::to_string(seq.length()));
    for (const Frame& f : seq.frames) {
      if (f.width != seq.frames[0].width || f.height != seq.frames[0].height)
        raise(Errc::validation, "frames must share one resolution");
    }
  } catch (const Error& e) {
    rethrow_staged("load", e);
  }
  summary.frames = seq.length();

  Clock::time_point t0 = Clock::now();
  SliceTree tree;
  try {
    tree = build_tree(static_cast<int>(seq.length()), cfg.depth);
  } catch (const Error& e) {
    rethrow_staged("slice", e);
  }
  summary.effective_depth = tree.depth;
  summary.slice_seconds = seconds_since(t0);

  t0 = Clock::now();
  InitializationResult init;
  try {
    init = initialize_all(seq, tree, cfg.backend, workers);
  } catch (const Error& e) {
    rethrow_staged("init", e);
  }
  summary.coseg_calls = init.pair_evaluations;
  summary.init_seconds = seconds_since(t0);

  t0 = Clock::now();
  RefinementResult refined;
  try {
    if (cfg.recursive_refine && tree.depth > 1) {
      // Refine each merge level bottom-up; decompositions are shared.
      std::vector<SuperpixelDecomposition> decomps(seq.length());
      const SlicParams slic_params = cfg.refine.slic();
      parallel_for(seq.length(), workers, [&](std::size_t i) {
        decomps[i] = superpixels(seq.frames[i], slic_params);
      });
      std::vector<ProbabilityMap> maps = std::move(init.maps);
      for (int level = tree.depth - 1; level >= 1; --level) {
        SliceTree nodes = build_tree(static_cast<int>(seq.length()), level);
        for (const std::vector<int>& node : nodes.leaves) {
          RefinementResult r = refine_with_decompositions(
              decomps, node, maps, cfg.refine, workers);
          for (std::size_t k = 0; k < node.size(); ++k)
            maps[node[k]] = std::move(r.maps[k]);
        }
      }
      std::vector<int> order(seq.length());
      for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = static_cast<int>(i);
      refined = refine_with_decompositions(decomps, order, maps, cfg.refine,
                                           workers);
    } else {
      refined = refine_sequence(seq, init.maps, cfg.refine, workers);
    }
  } catch (const Error& e) {
    rethrow_staged("refine", e);
  }
  summary.refine_seconds = seconds_since(t0);

  t0 = Clock::now();
  try {
    fs::create_directories(out_dir);
    parallel_for(seq.length(), workers, [&](std::size_t i) {
      fs::path base = fs::path(out_dir);
      write_map_pfm(refined.maps[i],
                    (base / ("prob_" + zero6(static_cast<int>(i)) + ".pfm"))
                        .string());
      write_mask_png(refined.masks[i],
                     (base / ("mask_" + zero6(static_cast<int>(i)) + ".png"))
                         .string());
    });
    if (!flow_dump_dir.empty()) {
      fs::create_directories(flow_dump_dir);
      const SlicParams slic_params = cfg.refine.slic();
      const FlowParams flow_params{cfg.refine.knn_k, 15.0};
      std::vector<SuperpixelDecomposition> decomps(seq.length());
      parallel_for(seq.length(), workers, [&](std::size_t i) {
        decomps[i] = superpixels(seq.frames[i], slic_params);
      });
      for (std::size_t i = 0; i + 1 < seq.length(); ++i) {
        for (auto [u, v] : {std::pair{i, i + 1}, std::pair{i + 1, i}}) {
          Flow flow = build_flow(decomps[u], decomps[v], flow_params);
          std::ostringstream text;
          write_flow_text(flow, text);
          fs::path name = fs::path(flow_dump_dir) /
                          ("flow_" + zero6(static_cast<int>(u)) + "_" +
                           zero6(static_cast<int>(v)) + ".txt");
          write_text_atomic(name.string(), text.str());
        }
      }
    }
  } catch (const Error& e) {
    rethrow_staged("write", e);
  }
  summary.write_seconds = seconds_since(t0);
  return summary;
}

EvalOutput run_eval(const std::string& pred_dir, const std::string& gt_dir,
                    const PipelineConfig& cfg) {
  cfg.eval.validate();
  std::vector<VideoMasks> videos = collect_mask_tree(gt_dir);
  const bool per_video_dirs = sorted_files(fs::path(gt_dir), ".png").empty();

  struct Item {
    std::string video;
    fs::path gt;
    fs::path pred;
    bool pred_is_map = false;
    long long frame = -1;
  };
  std::vector<Item> items;
  for (const VideoMasks& v : videos) {
    fs::path pred_base = fs::path(pred_dir);
    // With per-video subdirectories the prediction tree mirrors them.
    if (per_video_dirs) {
      pred_base /= v.video;
      if (!fs::is_directory(pred_base))
        raise(Errc::io, "missing prediction directory for video '" + v.video +
                            "' under " + pred_dir);
    }
    long long position = 0;
    for (const fs::path& gt_file : v.files) {
      Item item;
      item.video = v.video;
      item.gt = gt_file;
      const std::string stem = gt_file.stem().string();
      fs::path mask = pred_base / (stem + ".png");
      fs::path map = pred_base / (stem + ".pfm");
      if (fs::exists(mask)) {
        item.pred = mask;
      } else if (fs::exists(map)) {
        item.pred = map;
        item.pred_is_map = true;
      } else {
        raise(Errc::io, "missing prediction for " + item.video + "/" + stem);
      }
      item.frame = frame_number(stem);
      if (item.frame < 0) item.frame = position;
      ++position;
      items.push_back(std::move(item));
    }
  }

  EvalOutput out;
  out.records.resize(items.size());
  parallel_for(items.size(), cfg.effective_workers(), [&](std::size_t i) {
    const Item& item = items[i];
    BinaryMask gt = read_mask_png(item.gt.string());
    BinaryMask pred;
    if (item.pred_is_map) {
      pred = binarize_for_eval(read_map_pfm(item.pred.string()),
                               cfg.eval.binarization_ratio);
    } else {
      pred = read_mask_png(item.pred.string());
    }
    EvalRecord rec;
    rec.video = item.video;
    rec.frame = item.frame;
    rec.iou = frame_iou(pred, gt);
    rec.f = frame_f(pred, gt, cfg.eval.f_beta_sq);
    out.records[i] = std::move(rec);
  });

  out.scores = dataset_scores(out.records);

  std::ostringstream report;
  report << std::fixed << std::setprecision(4);
  report << "F-measure: F_beta on binarized masks, beta^2 = "
         << std::setprecision(2) << cfg.eval.f_beta_sq << std::setprecision(4)
         << "\n";
  report << std::left << std::setw(24) << "video" << std::right
         << std::setw(8) << "frames" << std::setw(10) << "mIoU"
         << std::setw(10) << "F" << "\n";
  for (const VideoScore& v : out.scores.per_video) {
    report << std::left << std::setw(24) << v.video << std::right
           << std::setw(8) << v.frames << std::setw(10) << v.miou
           << std::setw(10) << v.mf << "\n";
  }
  report << std::left << std::setw(24) << "overall" << std::right
         << std::setw(8) << out.records.size() << std::setw(10)
         << out.scores.miou << std::setw(10) << out.scores.mf << "\n";
  out.report = report.str();
  return out;
}

void write_eval_csv(std::span<const EvalRecord> records,
                    const std::string& path) {
  std::ostringstream out;
  out << "video,frame,iou,f\n";
  out << std::setprecision(10);
  for (const EvalRecord& r : records)
    out << r.video << ',' << r.frame << ',' << r.iou << ',' << r.f << '\n';
  write_text_atomic(path, out.str());
}

StatsOutput run_stats(const std::string& gt_dir) {
  std::vector<VideoMasks> videos = collect_mask_tree(gt_dir);
  StatsOutput out;
  for (const VideoMasks& v : videos) {
    long long position = 0;
    for (const fs::path& file : v.files) {
      BinaryMask mask = read_mask_png(file.string());
      MaskRecord rec;
      rec.video = v.video;
      rec.frame = frame_number(file.stem().string());
      if (rec.frame < 0) rec.frame = position;
      ++position;
      rec.objects = count_objects(mask);
      rec.area_pct = area_fraction(mask);
      out.records.push_back(std::move(rec));
    }
  }
  out.stats = aggregate_stats(out.records);

  std::ostringstream report;
  report << "#Annot: " << out.stats.annotated << "\n";
  report << "#Avg-Obj: "
         << DatasetStats::mean_pm_std(out.stats.avg_objects,
                                      out.stats.std_objects)
         << "\n";
  report << "#Avg-Area(%): "
         << DatasetStats::mean_pm_std(out.stats.avg_area, out.stats.std_area)
         << "\n";
  out.report = report.str();
  return out;
}

void write_stats_csv(std::span<const MaskRecord> records,
                     const std::string& path) {
  std::ostringstream out;
  out << "video,frame,objects,area_pct\n";
  out << std::setprecision(10);
  for (const MaskRecord& r : records)
    out << r.video << ',' << r.frame << ',' << r.objects << ','
        << r.area_pct << '\n';
  write_text_atomic(path, out.str());
}

void run_avgmap(const std::string& gt_dir, const std::string& out_path,
                int out_w, int out_h) {
  if (out_w < 1 || out_h < 1)
    raise(Errc::validation, "output size must be >= 1x1");
  std::vector<VideoMasks> videos = collect_mask_tree(gt_dir);
  std::vector<BinaryMask> masks;
  for (const VideoMasks& v : videos)
    for (const fs::path& file : v.files)
      masks.push_back(read_mask_png(file.string()));

  ProbabilityMap avg = average_annotation_map(masks, out_w, out_h);
  if (fs::path(out_path).extension() == ".pfm") {
    write_map_pfm(avg, out_path);
    return;
  }
  Frame img(out_w, out_h);
  for (std::size_t p = 0; p < avg.values.size(); ++p) {
    std::uint8_t g =
        static_cast<std::uint8_t>(std::lround(avg.values[p] * 255.0));
    img.pixels[3 * p] = img.pixels[3 * p + 1] = img.pixels[3 * p + 2] = g;
  }
  write_frame_png(img, out_path);
}

void run_overlay(const std::string& frames_dir, const std::string& masks_dir,
                 const std::string& out_dir, double alpha,
                 std::array<std::uint8_t, 3> color) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    raise(Errc::validation, "alpha must lie in [0,1]");
  std::vector<fs::path> frames = sorted_files(frames_dir, ".png");
  if (frames.empty())
    raise(Errc::validation, "no .png frames in " + frames_dir);
  fs::create_directories(out_dir);

  for (const fs::path& frame_file : frames) {
    const std::string stem = frame_file.stem().string();
    fs::path mask_file = fs::path(masks_dir) / (stem + ".png");
    if (!fs::exists(mask_file)) {
      long long num = frame_number(stem);
      if (num >= 0) {
        fs::path indexed = fs::path(masks_dir) /
                           ("mask_" + zero6(static_cast<int>(num)) + ".png");
        if (fs::exists(indexed)) mask_file = indexed;
      }
    }
    if (!fs::exists(mask_file))
      raise(Errc::io, "missing mask counterpart for " + stem);

    Frame frame = read_frame_png(frame_file.string());
    BinaryMask mask = read_mask_png(mask_file.string());
    if (mask.width != frame.width || mask.height != frame.height)
      raise(Errc::dimension, "mask/frame size mismatch for " + stem);
    for (std::size_t p = 0; p < mask.bits.size(); ++p) {
      if (!mask.bits[p]) continue;
      for (int c = 0; c < 3; ++c) {
        double blended = (1.0 - alpha) * frame.pixels[3 * p + c] +
                         alpha * color[static_cast<std::size_t>(c)];
        frame.pixels[3 * p + c] =
            static_cast<std::uint8_t>(std::lround(blended));
      }
    }
    write_frame_png(frame, (fs::path(out_dir) / (stem + ".png")).string());
  }
}

std::vector<std::pair<int, long long>> complexity_table(int length,
                                                        int min_depth,
                                                        int max_depth_arg) {
  if (min_depth > max_depth_arg)
    raise(Errc::validation, "empty depth range");
  std::vector<std::pair<int, long long>> rows;
  for (int d = min_depth; d <= max_depth_arg; ++d)
    rows.emplace_back(d, coseg_call_count(length, d));
  return rows;
}

}  // namespace hcoseg

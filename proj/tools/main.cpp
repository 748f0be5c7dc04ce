#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "adnet/checkpoint.hpp"
#include "adnet/data.hpp"
#include "adnet/infer.hpp"
#include "adnet/metrics.hpp"
#include "adnet/pruning.hpp"
#include "adnet/synthdata.hpp"
#include "adnet/train.hpp"

namespace fs = std::filesystem;
using namespace adnet;

namespace {

std::vector<fs::path> video_dirs(const std::string& root, const char* what) {
  std::vector<fs::path> dirs;
  if (fs::is_directory(fs::path(root) / "frames")) {
    dirs.push_back(root);  // single video directory
    return dirs;
  }
  if (!fs::is_directory(root))
    throw std::runtime_error(std::string(what) + " '" + root +
                             "': not a directory");
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory() && fs::is_directory(e.path() / "frames"))
      dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty())
    throw std::runtime_error(std::string(what) + " '" + root +
                             "': no videos found");
  return dirs;
}

void write_segmentation(const std::string& out_dir,
                        const VideoSegmentation& seg) {
  fs::create_directories(fs::path(out_dir) / "heatmaps");
  fs::create_directories(fs::path(out_dir) / "masks");
  char name[32];
  for (std::size_t i = 0; i < seg.masks.size(); ++i) {
    std::snprintf(name, sizeof(name), "%05zu.pgm", i);
    write_heatmap_pgm((fs::path(out_dir) / "heatmaps" / name).string(),
                      seg.heatmaps[i]);
    write_mask_pgm((fs::path(out_dir) / "masks" / name).string(),
                   seg.masks[i]);
  }
}

std::vector<fs::path> sorted_pgms(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".pgm")
      out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_gen_data(const std::string& out, std::uint64_t seed, int train_videos,
                 int test_videos, int frames, int size) {
  BenchmarkConfig cfg;
  cfg.train_videos = train_videos;
  cfg.test_videos = test_videos;
  cfg.frame_count = frames;
  cfg.size = size;
  Benchmark b = gen_benchmark(cfg, seed);
  for (const auto& v : b.train)
    save_video((fs::path(out) / "train" / v.id).string(), v);
  for (const auto& v : b.test)
    save_video((fs::path(out) / "test" / v.id).string(), v);
  std::cout << "wrote " << b.train.size() << " train and " << b.test.size()
            << " test videos to " << out << "\n";
  return 0;
}

int cmd_train(const std::string& config_path, const std::string& dataset,
              const std::string& out, std::uint64_t seed,
              const std::string& variant) {
  TrainConfig cfg;
  if (!config_path.empty()) cfg = load_train_config(config_path);
  cfg.seed = seed;
  if (!variant.empty()) cfg.model.variant = variant_from_string(variant);
  const auto videos = load_dataset(dataset, /*require_masks=*/true);
  TrainResult res = train_loop(cfg, videos);
  save_checkpoint(out, res.params);
  write_loss_csv(out + ".loss.csv", res.history);
  std::cout << "trained " << variant_to_string(cfg.model.variant) << " for "
            << cfg.run_iters << " iterations, final loss "
            << (res.history.empty() ? 0.0 : res.history.back().loss) << "\n";
  return 0;
}

int cmd_infer(const std::string& checkpoint, const std::string& dataset,
              const std::string& out, const std::vector<double>& scales,
              bool no_mirror, double threshold) {
  AdNetBackend backend(load_checkpoint(checkpoint));
  InferenceConfig cfg;
  if (!scales.empty()) cfg.scales = scales;
  cfg.mirror = !no_mirror;
  cfg.threshold = threshold;
  cfg.validate();
  for (const auto& dir : video_dirs(dataset, "dataset")) {
    VideoSample v = load_video(dir.string(), /*require_masks=*/false);
    VideoSegmentation seg = segment_video(backend, v, cfg);
    write_segmentation((fs::path(out) / v.id).string(), seg);
  }
  return 0;
}

int cmd_prune(const std::string& dataset, const std::string& masks_root,
              const std::string& out) {
  for (const auto& dir : video_dirs(dataset, "dataset")) {
    VideoSample v = load_video(dir.string(), /*require_masks=*/false);
    const fs::path mask_dir =
        fs::is_directory(fs::path(masks_root) / v.id / "masks")
            ? fs::path(masks_root) / v.id / "masks"
            : fs::path(masks_root) / "masks";
    const auto files = sorted_pgms(mask_dir);
    if (files.size() != v.frames.size())
      throw std::runtime_error("video '" + v.id + "': " +
                               std::to_string(v.frames.size()) +
                               " frames but " + std::to_string(files.size()) +
                               " predicted masks under " + mask_dir.string());
    std::vector<Mask> pred;
    for (const auto& f : files) pred.push_back(read_mask_pgm(f.string()));
    const auto refined = apply_pruning(pred, v.detections);
    fs::create_directories(fs::path(out) / v.id / "masks");
    char name[32];
    for (std::size_t i = 0; i < refined.size(); ++i) {
      std::snprintf(name, sizeof(name), "%05zu.pgm", i);
      write_mask_pgm((fs::path(out) / v.id / "masks" / name).string(),
                     refined[i]);
    }
  }
  return 0;
}

int cmd_eval(const std::string& pred_root, const std::string& gt_root,
             const std::string& out) {
  const auto gt_dirs = video_dirs(gt_root, "ground truth");
  std::vector<std::pair<std::string, SequenceReport>> reports;
  std::vector<Heatmap> all_heat;
  std::vector<Mask> all_gt;
  for (const auto& dir : gt_dirs) {
    const std::string vid = dir.filename().string();
    VideoSample v = load_video(dir.string(), /*require_masks=*/true);
    const fs::path pdir = fs::path(pred_root) / vid;
    const auto mask_files = sorted_pgms(pdir / "masks");
    if (mask_files.size() != v.masks.size())
      throw std::runtime_error("video '" + vid + "': prediction/gt frame "
                               "count mismatch under " + pdir.string());
    std::vector<Mask> pred;
    for (const auto& f : mask_files) pred.push_back(read_mask_pgm(f.string()));
    std::vector<Heatmap> heat;
    for (const auto& f : sorted_pgms(pdir / "heatmaps"))
      heat.push_back(read_heatmap_pgm(f.string()));
    if (!heat.empty() && heat.size() != pred.size())
      throw std::runtime_error("video '" + vid + "': heatmap count mismatch");
    reports.emplace_back(vid, evaluate_sequence(pred, heat, v.masks));
    for (std::size_t i = 0; i < heat.size(); ++i) {
      all_heat.push_back(heat[i]);
      all_gt.push_back(v.masks[i]);
    }
  }
  fs::create_directories(out);
  write_report_csv((fs::path(out) / "report.csv").string(), reports);
  PrCurve curve;
  const bool have_heat = !all_heat.empty();
  if (have_heat) {
    curve = pr_curve(all_heat, all_gt);
    write_pr_csv((fs::path(out) / "pr_curve.csv").string(), curve);
  }
  write_summary((fs::path(out) / "summary.txt").string(), reports,
                have_heat ? &curve : nullptr);
  // echo the overall line for pipelines
  double jm = 0;
  for (const auto& [name, rep] : reports) jm += rep.j_stats.mean;
  std::printf("J mean %.3f over %zu sequences\n", jm / reports.size(),
              reports.size());
  return 0;
}

int cmd_drift(const std::string& checkpoint, const std::string& dataset,
              const std::string& out) {
  const AdNetParams params = load_checkpoint(checkpoint);
  VideoSample v = load_video(dataset, /*require_masks=*/true);
  write_drift_csv(out, embedding_drift(params, v));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AD-Net: anchor-diffusion video object segmentation"};
  app.require_subcommand(1);

  std::string dataset, out, checkpoint, config_path, variant, pred, gt, masks;
  std::uint64_t seed = 0;
  int train_videos = 20, test_videos = 8, frames = 16, size = 64;
  std::vector<double> scales;
  bool no_mirror = false;
  double threshold = 0.5;

  auto* gen = app.add_subcommand("gen-data", "generate a synthetic benchmark");
  gen->add_option("--out", out)->required();
  gen->add_option("--seed", seed)->required();
  gen->add_option("--train-videos", train_videos);
  gen->add_option("--test-videos", test_videos);
  gen->add_option("--frames", frames);
  gen->add_option("--size", size);

  auto* train = app.add_subcommand("train", "train a model");
  train->add_option("--config", config_path);
  train->add_option("--dataset", dataset)->required();
  train->add_option("--out", out)->required();
  train->add_option("--seed", seed)->required();
  train->add_option("--variant", variant);

  auto* infer = app.add_subcommand("infer", "segment videos");
  infer->add_option("--checkpoint", checkpoint)->required();
  infer->add_option("--dataset", dataset)->required();
  infer->add_option("--out", out)->required();
  infer->add_option("--scales", scales)->delimiter(',');
  infer->add_flag("--no-mirror", no_mirror);
  infer->add_option("--threshold", threshold);

  auto* prune = app.add_subcommand("prune", "instance-prune predicted masks");
  prune->add_option("--dataset", dataset)->required();
  prune->add_option("--masks", masks)->required();
  prune->add_option("--out", out)->required();

  auto* eval = app.add_subcommand("eval", "evaluate predictions");
  eval->add_option("--pred", pred)->required();
  eval->add_option("--gt", gt)->required();
  eval->add_option("--out", out)->required();

  auto* drift = app.add_subcommand("drift", "embedding drift analysis");
  drift->add_option("--checkpoint", checkpoint)->required();
  drift->add_option("--dataset", dataset)->required();
  drift->add_option("--out", out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_gen_data(out, seed, train_videos, test_videos, frames, size);
    if (train->parsed())
      return cmd_train(config_path, dataset, out, seed, variant);
    if (infer->parsed())
      return cmd_infer(checkpoint, dataset, out, scales, no_mirror, threshold);
    if (prune->parsed()) return cmd_prune(dataset, masks, out);
    if (eval->parsed()) return cmd_eval(pred, gt, out);
    if (drift->parsed()) return cmd_drift(checkpoint, dataset, out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adnet/data.hpp"
#include "adnet/model.hpp"

namespace adnet {

// Intersection-over-union; 1 when both masks are empty.
double region_similarity(const Mask& pred, const Mask& gt);

// Boundary F-measure: boundaries are mask minus 4-neighborhood erosion,
// matched within tol_radius (Euclidean). 1 when both boundaries empty,
// 0 when precision+recall is 0.
double contour_accuracy(const Mask& pred, const Mask& gt, double tol_radius);

// DAVIS convention default: ceil(0.8% of the image diagonal).
double default_contour_tolerance(int h, int w);

double mae(const Heatmap& heatmap, const Mask& gt);

struct SequenceStats {
  double mean, recall, decay;
};

// recall = fraction of frames with value > 0.5; decay = mean(first
// quartile) - mean(last quartile), quartiles by temporal position with
// ceil-sized bins.
SequenceStats sequence_stats(const std::vector<double>& values);

struct PrPoint {
  double threshold, precision, recall, f_measure;
};

struct PrCurve {
  std::vector<PrPoint> points;
  double max_f = 0.0;
};

// Dataset-level PR curve over a uniform threshold grid in (0,1);
// F_beta with beta^2 = 0.3 (saliency convention).
PrCurve pr_curve(const std::vector<Heatmap>& heatmaps,
                 const std::vector<Mask>& gts, int n_thresholds = 255);

struct FrameScore {
  int frame;
  double j, f, mae;
};

struct SequenceReport {
  std::vector<FrameScore> frames;
  SequenceStats j_stats{}, f_stats{};
  double mean_mae = 0.0;
};

SequenceReport evaluate_sequence(const std::vector<Mask>& pred_masks,
                                 const std::vector<Heatmap>& pred_heatmaps,
                                 const std::vector<Mask>& gt_masks);

// Per-frame scores as CSV: sequence,frame,j,f,mae.
void write_report_csv(const std::string& path,
                      const std::vector<std::pair<std::string, SequenceReport>>&
                          reports);
// Plain-text summary block: per-sequence and overall J/F mean, recall,
// decay, MAE, and (when available) max F-measure.
void write_summary(const std::string& path,
                   const std::vector<std::pair<std::string, SequenceReport>>&
                       reports,
                   const PrCurve* curve);
// threshold,precision,recall,f per line.
void write_pr_csv(const std::string& path, const PrCurve& curve);

// Cosine distance of each frame's mean foreground embedding (pre-fusion
// X_t) to the anchor frame's, foreground taken from gt downsampled to
// embedding resolution by majority vote. Frames with no foreground at
// embedding resolution yield nullopt.
std::vector<std::optional<double>> embedding_drift(
    const AdNetParams& params, const VideoSample& video);

void write_drift_csv(const std::string& path,
                     const std::vector<std::optional<double>>& drift);

}  // namespace adnet

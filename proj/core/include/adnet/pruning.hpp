#pragma once

#include <vector>

#include "adnet/data.hpp"

namespace adnet {

struct Track {
  int id = 0;
  std::vector<Detection> detections;  // strictly consecutive frames
};

// Intersection-over-union of two boxes ([x0,x1) x [y0,y1)).
double box_iou(const Detection& a, const Detection& b);

// Greedy frame-to-frame association: per transition, candidate pairs are
// matched in descending IoU order, each detection joins at most one track,
// pairs below link_iou start new tracks. Input must be sorted by frame.
std::vector<Track> link_trajectories(const std::vector<Detection>& detections,
                                     double link_iou = 0.5);

// Area of the n_frames-th largest detection (smallest when there are
// fewer detections than frames).
std::size_t size_low(const std::vector<Detection>& detections, int n_frames);

// Indices into `detections` of small, nearly static instances: detection i
// qualifies iff more than `support` detections overlap it with IoU >
// iou_thr (itself included) and its area is below size_thr.
std::vector<std::size_t> small_static(const std::vector<Detection>& detections,
                                      double iou_thr, double support,
                                      std::size_t size_thr);

// Keep mask for one frame: all-ones unless the frame's largest detection
// dominates (area above size_thr and more than twice the runner-up), in
// which case small-static instances on this frame smaller than a third of
// the dominant area are zeroed out.
Mask pruning_mask(int frame_idx, int h, int w,
                  const std::vector<Detection>& detections,
                  const std::vector<std::size_t>& small_static_set,
                  std::size_t size_thr);

// Full pipeline: size_low -> small_static(0.6, 0.5*N) -> per-frame keep
// masks -> refined = predicted AND keep.
std::vector<Mask> apply_pruning(const std::vector<Mask>& predicted_masks,
                                const std::vector<Detection>& detections);

}  // namespace adnet

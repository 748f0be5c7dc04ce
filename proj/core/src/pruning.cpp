#include "adnet/pruning.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace adnet {

double box_iou(const Detection& a, const Detection& b) {
  const int ix0 = std::max(a.x0, b.x0), iy0 = std::max(a.y0, b.y0);
  const int ix1 = std::min(a.x1, b.x1), iy1 = std::min(a.y1, b.y1);
  const long long iw = std::max(0, ix1 - ix0), ih = std::max(0, iy1 - iy0);
  const long long inter = iw * ih;
  const long long area_a =
      static_cast<long long>(a.x1 - a.x0) * (a.y1 - a.y0);
  const long long area_b =
      static_cast<long long>(b.x1 - b.x0) * (b.y1 - b.y0);
  const long long uni = area_a + area_b - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

std::vector<Track> link_trajectories(const std::vector<Detection>& detections,
                                     double link_iou) {
  std::vector<Track> tracks;
  if (detections.empty()) return tracks;
  for (std::size_t i = 1; i < detections.size(); ++i)
    if (detections[i].frame < detections[i - 1].frame)
      throw std::invalid_argument("link_trajectories: input not frame-sorted");

  // group indices by frame
  std::map<int, std::vector<std::size_t>> by_frame;
  for (std::size_t i = 0; i < detections.size(); ++i)
    by_frame[detections[i].frame].push_back(i);

  std::vector<std::size_t> open_tracks;  // indices into tracks, previous frame
  int prev_frame = -1;
  int next_id = 0;
  for (const auto& [frame, idxs] : by_frame) {
    std::vector<std::size_t> assigned_track(idxs.size(), SIZE_MAX);
    if (frame == prev_frame + 1 && !open_tracks.empty()) {
      struct Cand {
        double iou;
        std::size_t ti, di;
      };
      std::vector<Cand> cands;
      for (std::size_t ti = 0; ti < open_tracks.size(); ++ti)
        for (std::size_t di = 0; di < idxs.size(); ++di) {
          const double iou = box_iou(tracks[open_tracks[ti]].detections.back(),
                                     detections[idxs[di]]);
          if (iou >= link_iou) cands.push_back({iou, ti, di});
        }
      std::stable_sort(cands.begin(), cands.end(),
                       [](const Cand& a, const Cand& b) { return a.iou > b.iou; });
      std::vector<bool> track_used(open_tracks.size(), false);
      for (const auto& c : cands) {
        if (track_used[c.ti] || assigned_track[c.di] != SIZE_MAX) continue;
        track_used[c.ti] = true;
        assigned_track[c.di] = open_tracks[c.ti];
        tracks[open_tracks[c.ti]].detections.push_back(detections[idxs[c.di]]);
      }
    }
    std::vector<std::size_t> next_open;
    for (std::size_t di = 0; di < idxs.size(); ++di) {
      if (assigned_track[di] == SIZE_MAX) {
        Track t;
        t.id = next_id++;
        t.detections.push_back(detections[idxs[di]]);
        tracks.push_back(std::move(t));
        assigned_track[di] = tracks.size() - 1;
      }
      next_open.push_back(assigned_track[di]);
    }
    open_tracks = std::move(next_open);
    prev_frame = frame;
  }
  return tracks;
}

std::size_t size_low(const std::vector<Detection>& detections, int n_frames) {
  if (detections.empty())
    throw std::invalid_argument("size_low: no detections");
  std::vector<std::size_t> areas;
  areas.reserve(detections.size());
  for (const auto& d : detections) areas.push_back(d.area);
  std::sort(areas.begin(), areas.end());
  if (static_cast<int>(areas.size()) < n_frames) return areas.front();
  return areas[areas.size() - static_cast<std::size_t>(n_frames)];
}

std::vector<std::size_t> small_static(const std::vector<Detection>& detections,
                                      double iou_thr, double support,
                                      std::size_t size_thr) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (detections[i].area >= size_thr) continue;
    int count = 0;  // initialized once per b_i, before scanning all b_j
    for (std::size_t j = 0; j < detections.size(); ++j)
      if (box_iou(detections[i], detections[j]) > iou_thr) ++count;
    if (count > support) out.push_back(i);
  }
  return out;
}

Mask pruning_mask(int frame_idx, int h, int w,
                  const std::vector<Detection>& detections,
                  const std::vector<std::size_t>& small_static_set,
                  std::size_t size_thr) {
  Mask keep(h, w);
  std::fill(keep.v.begin(), keep.v.end(), std::uint8_t{1});

  // detections on this frame, sorted by area descending
  std::vector<const Detection*> on_frame;
  for (const auto& d : detections)
    if (d.frame == frame_idx) on_frame.push_back(&d);
  if (on_frame.empty()) return keep;
  std::sort(on_frame.begin(), on_frame.end(),
            [](const Detection* a, const Detection* b) {
              return a->area > b->area;
            });

  // dominance guard: a clearly-largest instance above the size threshold
  if (on_frame[0]->area <= size_thr) return keep;
  if (on_frame.size() > 1 && on_frame[0]->area <= 2 * on_frame[1]->area)
    return keep;
  const std::size_t target_size = on_frame[0]->area;

  for (std::size_t idx : small_static_set) {
    const Detection& d = detections[idx];
    if (d.frame != frame_idx) continue;
    if (3 * d.area >= target_size) continue;  // area < target/3
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (d.mask.at(y, x)) keep.at(y, x) = 0;
  }
  return keep;
}

std::vector<Mask> apply_pruning(const std::vector<Mask>& predicted_masks,
                                const std::vector<Detection>& detections) {
  if (detections.empty()) return predicted_masks;
  for (const auto& d : detections)
    if (d.frame < 0 ||
        d.frame >= static_cast<int>(predicted_masks.size()))
      throw std::invalid_argument(
          "apply_pruning: detection frame " + std::to_string(d.frame) +
          " out of range for " + std::to_string(predicted_masks.size()) +
          " masks");
  const int n_frames = static_cast<int>(predicted_masks.size());
  const std::size_t thr = size_low(detections, n_frames);
  const auto small = small_static(detections, 0.6, 0.5 * n_frames, thr);

  std::vector<Mask> out;
  out.reserve(predicted_masks.size());
  for (int t = 0; t < n_frames; ++t) {
    const Mask& pred = predicted_masks[static_cast<std::size_t>(t)];
    Mask keep = pruning_mask(t, pred.h, pred.w, detections, small, thr);
    Mask refined = pred;
    for (std::size_t i = 0; i < refined.v.size(); ++i)
      refined.v[i] = refined.v[i] && keep.v[i] ? 1 : 0;
    out.push_back(std::move(refined));
  }
  return out;
}

}  // namespace adnet

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adnet/image.hpp"
#include "adnet/tensor.hpp"

namespace adnet {

// One detected object instance on one frame.
struct Detection {
  int frame = 0;
  int track_hint = -1;          // detector-provided grouping hint, informational
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // box is [x0,x1) x [y0,y1)
  Mask mask;                    // full-frame instance mask
  std::size_t area = 0;         // cached mask pixel count
};

struct VideoSample {
  std::string id;
  std::vector<Tensor> frames;   // each [3,H,W]
  std::vector<Mask> masks;      // ground truth, may be empty in infer mode
  std::vector<Detection> detections;
};

// On-disk layout per video: frames/%05d.ppm, masks/%05d.pgm,
// detections.txt (one line per record:
// "frame_idx track_hint x0 y0 x1 y1 mask_path", mask_path relative to the
// video directory).

// Loads all videos under root (each subdirectory with a frames/ dir),
// sorted lexicographically by id. Masks are optional when require_masks is
// false; a frame/mask count mismatch is an error naming the video.
std::vector<VideoSample> load_dataset(const std::string& root,
                                      bool require_masks = true);

// Loads a single video directory.
VideoSample load_video(const std::string& dir, bool require_masks = true);

// Writes a video in the standard layout. Detections are written only when
// present.
void save_video(const std::string& dir, const VideoSample& video);

std::vector<Detection> load_detections(const std::string& path,
                                       const std::string& video_dir);
void save_detections(const std::string& path, const std::string& video_dir,
                     const std::vector<Detection>& dets);

// Tight bounding box of a mask; nullopt when empty.
struct Box {
  int x0, y0, x1, y1;  // [x0,x1) x [y0,y1)
};
std::optional<Box> tight_box(const Mask& m);

}  // namespace adnet

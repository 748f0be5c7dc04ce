#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "adnet/data.hpp"

namespace adnet {

enum class ShapeKind { kSquare, kCircle, kRect };

struct ObjectSpec {
  ShapeKind kind = ShapeKind::kSquare;
  int size_w = 16, size_h = 16;    // footprint bounding size in pixels
  int start_x = 0, start_y = 0;    // top-left at first visible frame
  int vel_x = 0, vel_y = 0;        // integer pixels per frame, bounces
  int visible_from = 0;            // first frame the object appears on
  double base_r = 0.8, base_g = 0.2, base_b = 0.2;
  double texture_noise = 0.08;     // amplitude of the per-texel noise
  std::uint64_t texture_seed = 0;
};

struct SceneSpec {
  int width = 64, height = 64;
  int frame_count = 16;
  ObjectSpec foreground;           // must be visible from frame 0
  std::vector<ObjectSpec> distractors;
  std::uint64_t background_seed = 0;
  double background_noise = 0.22;  // amplitude around mid-gray
  bool dynamic_background = true;  // resample background every frame
};

// Renders a scene: frames, exact foreground masks, and detection records
// (tight box + instance mask) for every visible object including
// distractors. Fully determined by the spec.
VideoSample gen_video(const SceneSpec& spec, const std::string& video_id);

struct BenchmarkConfig {
  int train_videos = 20;
  int test_videos = 8;
  int frame_count = 16;
  int size = 64;
};

struct Benchmark {
  std::vector<VideoSample> train, test;
};

// Deterministic train/test benchmark; the two splits draw from disjoint
// seed streams.
Benchmark gen_benchmark(const BenchmarkConfig& cfg, std::uint64_t seed);

// Scene with one large moving object and one small static distractor sized
// to trigger the instance-pruning rule (distractor area < dominant/3).
SceneSpec pruning_scene(std::uint64_t seed);

// Renders pruning_scene and attaches a curated detection set modelling an
// imperfect detector: the foreground is missed on frame 0 and one medium
// false positive appears mid-video. The curation pins the pruning area
// threshold strictly between the distractor and the dominant object.
VideoSample pruning_scene_video(std::uint64_t seed);

}  // namespace adnet

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "adnet/data.hpp"
#include "adnet/synthdata.hpp"

using namespace adnet;

namespace {

SceneSpec simple_scene() {
  SceneSpec s;
  s.width = 48;
  s.height = 40;
  s.frame_count = 6;
  s.foreground.kind = ShapeKind::kSquare;
  s.foreground.size_w = 16;
  s.foreground.size_h = 16;
  s.foreground.start_x = 4;
  s.foreground.start_y = 4;
  s.foreground.vel_x = 3;
  s.foreground.vel_y = 2;
  s.background_seed = 7;
  return s;
}

}  // namespace

TEST_CASE("generation is deterministic") {
  SceneSpec s = simple_scene();
  VideoSample a = gen_video(s, "a");
  VideoSample b = gen_video(s, "a");
  REQUIRE(a.frames.size() == 6);
  for (std::size_t t = 0; t < 6; ++t) {
    CHECK(a.frames[t].data() == b.frames[t].data());
    CHECK(a.masks[t] == b.masks[t]);
  }
  s.background_seed = 8;
  VideoSample c = gen_video(s, "a");
  CHECK(a.frames[0].data() != c.frames[0].data());
}

TEST_CASE("square foreground conserves its area while bouncing") {
  SceneSpec s = simple_scene();
  s.frame_count = 24;  // long enough to bounce off several walls
  VideoSample v = gen_video(s, "sq");
  for (const auto& m : v.masks) CHECK(m.count() == 256);
}

TEST_CASE("masks stay inside the frame and track the motion") {
  SceneSpec s = simple_scene();
  VideoSample v = gen_video(s, "m");
  auto b0 = tight_box(v.masks[0]);
  auto b1 = tight_box(v.masks[1]);
  REQUIRE(b0.has_value());
  REQUIRE(b1.has_value());
  CHECK(b0->x0 == 4);
  CHECK(b0->y0 == 4);
  CHECK(b0->x1 == 20);
  CHECK(b1->x0 == 7);  // moved by vel_x
  CHECK(b1->y0 == 6);  // moved by vel_y
}

TEST_CASE("dynamic background changes even with a static object") {
  SceneSpec s = simple_scene();
  s.foreground.vel_x = 0;
  s.foreground.vel_y = 0;
  VideoSample v = gen_video(s, "bg");
  CHECK(v.masks[0] == v.masks[1]);
  CHECK(v.frames[0].data() != v.frames[1].data());
  s.dynamic_background = false;
  VideoSample w = gen_video(s, "bg");
  CHECK(w.frames[0].data() == w.frames[1].data());
}

TEST_CASE("detections cover every visible object with tight boxes") {
  SceneSpec s = simple_scene();
  ObjectSpec d;
  d.kind = ShapeKind::kCircle;
  d.size_w = 8;
  d.size_h = 8;
  d.start_x = 36;
  d.start_y = 28;
  d.visible_from = 2;
  d.texture_seed = 5;
  s.distractors.push_back(d);
  VideoSample v = gen_video(s, "det");

  int fg = 0, dis = 0;
  for (const auto& det : v.detections) {
    auto tb = tight_box(det.mask);
    REQUIRE(tb.has_value());
    CHECK(tb->x0 == det.x0);
    CHECK(tb->y0 == det.y0);
    CHECK(tb->x1 == det.x1);
    CHECK(tb->y1 == det.y1);
    CHECK(det.area == det.mask.count());
    if (det.track_hint == 0) {
      ++fg;
      CHECK(det.mask == v.masks[det.frame]);
    } else {
      ++dis;
      CHECK(det.frame >= 2);
    }
  }
  CHECK(fg == 6);
  CHECK(dis == 4);
  // sorted by frame
  for (std::size_t i = 1; i < v.detections.size(); ++i)
    CHECK(v.detections[i].frame >= v.detections[i - 1].frame);
}

TEST_CASE("benchmark has the advertised size and disjoint splits") {
  BenchmarkConfig cfg;
  cfg.train_videos = 4;
  cfg.test_videos = 3;
  cfg.frame_count = 5;
  cfg.size = 32;
  Benchmark b = gen_benchmark(cfg, 42);
  REQUIRE(b.train.size() == 4);
  REQUIRE(b.test.size() == 3);
  std::set<std::string> ids;
  for (const auto& v : b.train) {
    REQUIRE(v.frames.size() == 5);
    REQUIRE(v.masks.size() == 5);
    CHECK(v.masks[0].count() > 0);
    ids.insert(v.id);
  }
  for (const auto& v : b.test) ids.insert(v.id);
  CHECK(ids.size() == 7);
  // No identical first frames across the whole benchmark.
  std::set<std::vector<double>> firsts;
  for (const auto& v : b.train) firsts.insert(v.frames[0].data());
  for (const auto& v : b.test) firsts.insert(v.frames[0].data());
  CHECK(firsts.size() == 7);
  // Deterministic in the seed.
  Benchmark b2 = gen_benchmark(cfg, 42);
  CHECK(b2.train[0].frames[0].data() == b.train[0].frames[0].data());
  Benchmark b3 = gen_benchmark(cfg, 43);
  CHECK(b3.train[0].frames[0].data() != b.train[0].frames[0].data());
}

TEST_CASE("distractors never appear on the anchor frame in random scenes") {
  BenchmarkConfig cfg;
  cfg.train_videos = 10;
  cfg.test_videos = 5;
  cfg.frame_count = 8;
  cfg.size = 48;
  Benchmark b = gen_benchmark(cfg, 7);
  auto check_video = [](const VideoSample& v) {
    for (const auto& det : v.detections)
      if (det.frame == 0) CHECK(det.track_hint == 0);
  };
  for (const auto& v : b.train) check_video(v);
  for (const auto& v : b.test) check_video(v);
}

TEST_CASE("curated pruning preset pins the area threshold") {
  VideoSample v = pruning_scene_video(5);
  REQUIRE(v.frames.size() == 10);

  std::size_t fg_area = 0, distractor_area = 0, fp_area = 0;
  int fg_count = 0, frame0 = 0;
  for (const auto& d : v.detections) {
    if (d.frame == 0) ++frame0;
    if (d.track_hint == 0) {
      fg_area = d.area;
      ++fg_count;
    } else if (d.track_hint == 99) {
      fp_area = d.area;
    } else {
      distractor_area = d.area;
    }
  }
  CHECK(frame0 == 0);          // detector misses the anchor frame
  CHECK(fg_count == 9);
  CHECK(fg_area == 576);
  CHECK(distractor_area == 36);
  CHECK(fp_area == 225);
  // ground truth still covers all 10 frames
  for (const auto& m : v.masks) CHECK(m.count() == 576);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "adnet/metrics.hpp"
#include "adnet/pruning.hpp"
#include "adnet/synthdata.hpp"

using namespace adnet;

namespace {

Detection make_det(int frame, int x0, int y0, int x1, int y1,
                   int img = 64) {
  Detection d;
  d.frame = frame;
  d.x0 = x0;
  d.y0 = y0;
  d.x1 = x1;
  d.y1 = y1;
  d.mask = Mask(img, img);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) d.mask.at(y, x) = 1;
  d.area = static_cast<std::size_t>(x1 - x0) * (y1 - y0);
  return d;
}

// Independent double-loop re-statement of the small-static rule.
std::vector<std::size_t> small_static_oracle(
    const std::vector<Detection>& dets, double iou_thr, double support,
    std::size_t size_thr) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < dets.size(); ++j)
      if (box_iou(dets[i], dets[j]) > iou_thr) ++count;
    if (static_cast<double>(count) > support && dets[i].area < size_thr)
      out.push_back(i);
  }
  return out;
}

}  // namespace

TEST_CASE("box iou closed forms") {
  Detection a = make_det(0, 0, 0, 4, 4);
  Detection b = make_det(0, 2, 0, 6, 4);
  CHECK(box_iou(a, a) == doctest::Approx(1.0));
  CHECK(box_iou(a, b) == doctest::Approx(8.0 / 24.0).epsilon(1e-12));
  Detection c = make_det(0, 10, 10, 12, 12);
  CHECK(box_iou(a, c) == 0.0);
  // Touching boxes have zero intersection.
  Detection d = make_det(0, 4, 0, 8, 4);
  CHECK(box_iou(a, d) == 0.0);
}

TEST_CASE("link_trajectories follows a moving box and splits on jumps") {
  std::vector<Detection> dets;
  for (int t = 0; t < 6; ++t) dets.push_back(make_det(t, t, 0, t + 10, 10));
  auto tracks = link_trajectories(dets);
  REQUIRE(tracks.size() == 1);
  CHECK(tracks[0].detections.size() == 6);

  // A second object far away forms its own track.
  for (int t = 0; t < 6; ++t) dets.push_back(make_det(t, 40, 40, 50, 50));
  std::stable_sort(dets.begin(), dets.end(),
                   [](const Detection& a, const Detection& b) {
                     return a.frame < b.frame;
                   });
  tracks = link_trajectories(dets);
  REQUIRE(tracks.size() == 2);
  CHECK(tracks[0].detections.size() == 6);
  CHECK(tracks[1].detections.size() == 6);

  // Teleporting box: every detection is a singleton.
  std::vector<Detection> jumps;
  jumps.push_back(make_det(0, 0, 0, 8, 8));
  jumps.push_back(make_det(1, 40, 40, 48, 48));
  jumps.push_back(make_det(2, 0, 40, 8, 48));
  auto singles = link_trajectories(jumps);
  CHECK(singles.size() == 3);

  // A frame gap breaks the chain even with identical boxes.
  std::vector<Detection> gap;
  gap.push_back(make_det(0, 0, 0, 8, 8));
  gap.push_back(make_det(2, 0, 0, 8, 8));
  CHECK(link_trajectories(gap).size() == 2);

  std::vector<Detection> unsorted = {make_det(3, 0, 0, 8, 8),
                                     make_det(1, 0, 0, 8, 8)};
  CHECK_THROWS_AS(link_trajectories(unsorted), std::invalid_argument);
}

TEST_CASE("link_trajectories prefers the highest-IoU pairing") {
  // Track A at x=0 width 10; track B overlapping at x=4. On frame 1 a
  // single detection at x=1 overlaps both; greedy assigns it to A.
  std::vector<Detection> dets;
  dets.push_back(make_det(0, 0, 0, 10, 10));
  dets.push_back(make_det(0, 4, 0, 14, 10));
  dets.push_back(make_det(1, 1, 0, 11, 10));
  auto tracks = link_trajectories(dets, 0.1);
  REQUIRE(tracks.size() == 2);
  CHECK(tracks[0].detections.size() == 2);  // x=0 track extended
  CHECK(tracks[1].detections.size() == 1);
  CHECK(tracks[0].detections[1].x0 == 1);
}

TEST_CASE("size_low picks the n-th largest area") {
  std::vector<Detection> dets;
  dets.push_back(make_det(0, 0, 0, 1, 10));   // 10
  dets.push_back(make_det(1, 0, 0, 2, 10));   // 20
  dets.push_back(make_det(2, 0, 0, 3, 10));   // 30
  dets.push_back(make_det(3, 0, 0, 4, 10));   // 40
  CHECK(size_low(dets, 2) == 30);
  CHECK(size_low(dets, 4) == 10);
  // Fewer detections than frames: fall back to the smallest.
  CHECK(size_low(dets, 9) == 10);
  CHECK_THROWS_AS(size_low({}, 3), std::invalid_argument);
}

TEST_CASE("small_static hand scene") {
  std::vector<Detection> dets;
  // Static small box on 6 of 8 frames.
  for (int t = 0; t < 6; ++t) dets.push_back(make_det(t, 50, 50, 56, 56));
  // Moving large box, no self-overlap above 0.6 across distant frames.
  for (int t = 0; t < 8; ++t)
    dets.push_back(make_det(t, 5 * t, 0, 5 * t + 20, 20));
  std::stable_sort(dets.begin(), dets.end(),
                   [](const Detection& a, const Detection& b) {
                     return a.frame < b.frame;
                   });
  auto small = small_static(dets, 0.6, 4.0, 100);
  REQUIRE(small.size() == 6);
  for (auto i : small) CHECK(dets[i].area == 36);
  // Raising the support above the static count empties the set.
  CHECK(small_static(dets, 0.6, 6.0, 100).empty());
  // A size threshold at or below the static area empties it too (strict <).
  CHECK(small_static(dets, 0.6, 4.0, 36).empty());
}

TEST_CASE("small_static matches the oracle on random detection sets") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pos(0, 48), len(2, 16), frame(0, 9);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Detection> dets;
    const int n = 1 + static_cast<int>(rng() % 20);
    for (int i = 0; i < n; ++i) {
      const int x0 = pos(rng), y0 = pos(rng);
      dets.push_back(make_det(frame(rng), x0, y0, x0 + len(rng), y0 + len(rng)));
    }
    const double iou_thr = 0.3 + 0.1 * (trial % 5);
    const double support = trial % 7;
    const std::size_t thr = 20 + 15 * (trial % 11);
    CHECK(small_static(dets, iou_thr, support, thr) ==
          small_static_oracle(dets, iou_thr, support, thr));
  }
}

TEST_CASE("pruning_mask dominance guard and removal rule") {
  // Dominant 24x24 (=576) + small static 6x6 (=36) on frame 0.
  std::vector<Detection> dets;
  dets.push_back(make_det(0, 4, 4, 28, 28));
  dets.push_back(make_det(0, 50, 50, 56, 56));
  std::vector<std::size_t> small = {1};

  Mask keep = pruning_mask(0, 64, 64, dets, small, 200);
  CHECK(keep.at(52, 52) == 0);        // distractor zone removed
  CHECK(keep.at(10, 10) == 1);        // dominant untouched
  CHECK(keep.count() == 64 * 64 - 36);

  // Guard fails when the largest is not above the size threshold.
  CHECK(pruning_mask(0, 64, 64, dets, small, 576).count() == 64 * 64);
  // Guard fails without a 2x margin over the runner-up.
  std::vector<Detection> close;
  close.push_back(make_det(0, 0, 0, 24, 24));   // 576
  close.push_back(make_det(0, 30, 30, 47, 47)); // 289 -> 576 <= 2*289
  CHECK(pruning_mask(0, 64, 64, close, {1}, 200).count() == 64 * 64);
  // Small instance at or above a third of the dominant area survives.
  std::vector<Detection> third;
  third.push_back(make_det(0, 0, 0, 24, 24));        // 576
  third.push_back(make_det(0, 40, 40, 54, 54));      // 196 -> 3*196 >= 576
  CHECK(pruning_mask(0, 64, 64, third, {1}, 300).count() == 64 * 64);
  // No detections on the frame: keep everything.
  CHECK(pruning_mask(5, 64, 64, dets, small, 200).count() == 64 * 64);
}

TEST_CASE("apply_pruning end-to-end on the curated scene") {
  VideoSample video = pruning_scene_video(123);
  const int n = static_cast<int>(video.frames.size());
  REQUIRE(n == 10);
  REQUIRE(!video.detections.empty());

  // Simulated prediction: gt plus every distractor pixel.
  std::vector<Mask> pred = video.masks;
  for (const auto& d : video.detections)
    if (d.track_hint != 0)
      for (std::size_t i = 0; i < d.mask.v.size(); ++i)
        if (d.mask.v[i]) pred[d.frame].v[i] = 1;

  double j_before = 0;
  for (int t = 0; t < n; ++t)
    j_before += region_similarity(pred[t], video.masks[t]);
  j_before /= n;

  auto refined = apply_pruning(pred, video.detections);
  REQUIRE(refined.size() == pred.size());
  double j_after = 0;
  for (int t = 0; t < n; ++t)
    j_after += region_similarity(refined[t], video.masks[t]);
  j_after /= n;
  CHECK(j_after > j_before);

  // The distractor is gone everywhere it appears; the target survives.
  for (const auto& d : video.detections) {
    if (d.track_hint == 0 || d.track_hint == 99) continue;
    for (std::size_t i = 0; i < d.mask.v.size(); ++i)
      if (d.mask.v[i]) CHECK(refined[d.frame].v[i] == 0);
  }
  for (int t = 0; t < n; ++t)
    for (std::size_t i = 0; i < video.masks[t].v.size(); ++i)
      if (video.masks[t].v[i]) CHECK(refined[t].v[i] == 1);

  // Idempotence: a second pass changes nothing.
  auto twice = apply_pruning(refined, video.detections);
  for (int t = 0; t < n; ++t) CHECK(twice[t] == refined[t]);
}

TEST_CASE("apply_pruning is a passthrough without detections") {
  std::vector<Mask> pred(3, Mask(8, 8));
  pred[1].at(2, 2) = 1;
  auto out = apply_pruning(pred, {});
  REQUIRE(out.size() == 3);
  for (int t = 0; t < 3; ++t) CHECK(out[t] == pred[t]);
}

TEST_CASE("apply_pruning never adds pixels and validates frames") {
  std::mt19937_64 rng(11);
  std::vector<Mask> pred;
  for (int t = 0; t < 4; ++t) {
    Mask m(32, 32);
    for (auto& v : m.v) v = static_cast<std::uint8_t>(rng() % 2);
    pred.push_back(m);
  }
  std::vector<Detection> dets;
  for (int t = 0; t < 4; ++t) {
    dets.push_back(make_det(t, 2, 2, 22, 22, 32));
    dets.push_back(make_det(t, 25, 25, 29, 29, 32));
  }
  auto out = apply_pruning(pred, dets);
  for (int t = 0; t < 4; ++t)
    for (std::size_t i = 0; i < pred[t].v.size(); ++i)
      CHECK(out[t].v[i] <= pred[t].v[i]);

  std::vector<Detection> bad = {make_det(7, 0, 0, 4, 4, 32)};
  CHECK_THROWS_AS(apply_pruning(pred, bad), std::invalid_argument);
}

#include "adnet/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace adnet {

namespace {

// Footprint of a shape inside its size_w x size_h bounding box.
bool in_footprint(const ObjectSpec& o, int lx, int ly) {
  switch (o.kind) {
    case ShapeKind::kSquare:
    case ShapeKind::kRect:
      return true;
    case ShapeKind::kCircle: {
      const double cx = (o.size_w - 1) / 2.0, cy = (o.size_h - 1) / 2.0;
      const double rx = o.size_w / 2.0, ry = o.size_h / 2.0;
      const double dx = (lx - cx) / rx, dy = (ly - cy) / ry;
      return dx * dx + dy * dy <= 1.0;
    }
  }
  return false;
}

// Object position at frame t, bouncing off the scene borders so the
// footprint stays fully inside.
void position_at(const ObjectSpec& o, const SceneSpec& s, int t, int& px,
                 int& py) {
  px = o.start_x;
  py = o.start_y;
  int vx = o.vel_x, vy = o.vel_y;
  for (int k = o.visible_from; k < t; ++k) {
    int nx = px + vx;
    if (nx < 0 || nx + o.size_w > s.width) {
      vx = -vx;
      nx = px + vx;
    }
    int ny = py + vy;
    if (ny < 0 || ny + o.size_h > s.height) {
      vy = -vy;
      ny = py + vy;
    }
    px = std::clamp(nx, 0, s.width - o.size_w);
    py = std::clamp(ny, 0, s.height - o.size_h);
  }
}

struct Texture {
  int w, h;
  std::vector<double> rgb;  // 3 * w * h, texel-major
};

Texture make_texture(const ObjectSpec& o) {
  std::mt19937_64 rng(o.texture_seed);
  std::uniform_real_distribution<double> noise(-o.texture_noise,
                                               o.texture_noise);
  Texture t{o.size_w, o.size_h, {}};
  t.rgb.resize(static_cast<std::size_t>(o.size_w) * o.size_h * 3);
  const double base[3] = {o.base_r, o.base_g, o.base_b};
  for (std::size_t i = 0; i < t.rgb.size(); ++i)
    t.rgb[i] = std::clamp(base[i % 3] + noise(rng), 0.0, 1.0);
  return t;
}

void render_object(Tensor& frame, Mask* mask, const ObjectSpec& o,
                   const Texture& tex, int px, int py, int h, int w) {
  for (int ly = 0; ly < o.size_h; ++ly)
    for (int lx = 0; lx < o.size_w; ++lx) {
      if (!in_footprint(o, lx, ly)) continue;
      const int y = py + ly, x = px + lx;
      for (int c = 0; c < 3; ++c)
        frame.data()[(c * h + y) * w + x] =
            tex.rgb[(static_cast<std::size_t>(ly) * o.size_w + lx) * 3 + c];
      if (mask) mask->at(y, x) = 1;
    }
}

void check_fits(const ObjectSpec& o, const SceneSpec& s, const char* role) {
  if (o.size_w > s.width || o.size_h > s.height)
    throw std::invalid_argument(std::string(role) +
                                " shape larger than the frame");
  if (o.start_x < 0 || o.start_y < 0 || o.start_x + o.size_w > s.width ||
      o.start_y + o.size_h > s.height)
    throw std::invalid_argument(std::string(role) +
                                " start position out of bounds");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 step
  std::uint64_t z = seed + salt * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

VideoSample gen_video(const SceneSpec& spec, const std::string& video_id) {
  check_fits(spec.foreground, spec, "foreground");
  if (spec.foreground.visible_from != 0)
    throw std::invalid_argument("foreground must be visible on frame 0");
  for (const auto& d : spec.distractors) check_fits(d, spec, "distractor");

  const int h = spec.height, w = spec.width;
  VideoSample v;
  v.id = video_id;

  const Texture fg_tex = make_texture(spec.foreground);
  std::vector<Texture> dist_tex;
  for (const auto& d : spec.distractors) dist_tex.push_back(make_texture(d));

  std::mt19937_64 bg_rng(spec.background_seed);
  std::uniform_real_distribution<double> bg_noise(-spec.background_noise,
                                                  spec.background_noise);
  Tensor static_bg;
  if (!spec.dynamic_background) {
    static_bg = Tensor({3, h, w});
    for (auto& p : static_bg.data())
      p = std::clamp(0.5 + bg_noise(bg_rng), 0.0, 1.0);
  }

  for (int t = 0; t < spec.frame_count; ++t) {
    Tensor frame({3, h, w});
    if (spec.dynamic_background) {
      for (auto& p : frame.data())
        p = std::clamp(0.5 + bg_noise(bg_rng), 0.0, 1.0);
    } else {
      frame.data() = static_bg.data();
    }
    Mask gt(h, w);

    // distractors first, foreground on top
    for (std::size_t i = 0; i < spec.distractors.size(); ++i) {
      const auto& d = spec.distractors[i];
      if (t < d.visible_from) continue;
      int px, py;
      position_at(d, spec, t, px, py);
      Mask inst(h, w);
      render_object(frame, &inst, d, dist_tex[i], px, py, h, w);
      Detection det;
      det.frame = t;
      det.track_hint = static_cast<int>(i) + 1;
      const auto box = tight_box(inst);
      det.x0 = box->x0;
      det.y0 = box->y0;
      det.x1 = box->x1;
      det.y1 = box->y1;
      det.mask = std::move(inst);
      det.area = det.mask.count();
      v.detections.push_back(std::move(det));
    }
    {
      int px, py;
      position_at(spec.foreground, spec, t, px, py);
      Mask inst(h, w);
      render_object(frame, &inst, spec.foreground, fg_tex, px, py, h, w);
      gt = inst;
      Detection det;
      det.frame = t;
      det.track_hint = 0;
      const auto box = tight_box(inst);
      det.x0 = box->x0;
      det.y0 = box->y0;
      det.x1 = box->x1;
      det.y1 = box->y1;
      det.mask = std::move(inst);
      det.area = det.mask.count();
      v.detections.push_back(std::move(det));
    }
    v.frames.push_back(std::move(frame));
    v.masks.push_back(std::move(gt));
  }
  std::stable_sort(v.detections.begin(), v.detections.end(),
                   [](const Detection& a, const Detection& b) {
                     return a.frame < b.frame;
                   });
  return v;
}

namespace {

SceneSpec random_scene(const BenchmarkConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform_int = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto uniform_real = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto random_color = [&](ObjectSpec& o) {
    // one dominant channel so textures are colorful but varied
    const int dom = uniform_int(0, 2);
    double c[3];
    for (int i = 0; i < 3; ++i)
      c[i] = i == dom ? uniform_real(0.65, 0.95) : uniform_real(0.05, 0.4);
    o.base_r = c[0];
    o.base_g = c[1];
    o.base_b = c[2];
  };
  // Slow motion: the anchor-diffusion branch associates evidence with the
  // anchor frame's object location, so foregrounds behave like the large,
  // centred, slowly-moving objects of real VOS benchmarks.
  auto random_velocity = [&](int& vx, int& vy) {
    do {
      vx = uniform_int(-1, 1);
      vy = uniform_int(-1, 1);
    } while (vx == 0 && vy == 0);
  };

  SceneSpec s;
  s.width = cfg.size;
  s.height = cfg.size;
  s.frame_count = cfg.frame_count;
  s.background_seed = mix_seed(seed, 0xb6);

  ObjectSpec& fg = s.foreground;
  fg.kind = static_cast<ShapeKind>(uniform_int(0, 2));
  fg.size_w = uniform_int(16, 24);
  fg.size_h = fg.kind == ShapeKind::kRect ? uniform_int(12, 20) : fg.size_w;
  // Start in the central region so the object stays near its anchor
  // location throughout the clip.
  fg.start_x = uniform_int(s.width / 4, std::max(s.width / 4, 3 * s.width / 4 - fg.size_w));
  fg.start_y = uniform_int(s.height / 4, std::max(s.height / 4, 3 * s.height / 4 - fg.size_h));
  random_velocity(fg.vel_x, fg.vel_y);
  random_color(fg);
  fg.texture_seed = mix_seed(seed, 0xf6);

  const int n_dist = uniform_int(1, 2);
  for (int i = 0; i < n_dist; ++i) {
    ObjectSpec d;
    d.kind = static_cast<ShapeKind>(uniform_int(0, 2));
    d.size_w = uniform_int(12, 20);
    d.size_h = d.kind == ShapeKind::kRect ? uniform_int(10, 16) : d.size_w;
    d.start_x = uniform_int(0, s.width - d.size_w);
    d.start_y = uniform_int(0, s.height - d.size_h);
    // Distractors enter after the anchor frame, so the anchor carries the
    // only reliable evidence of which object is foreground.
    d.visible_from = uniform_int(2, std::max(2, s.frame_count / 2));
    if (uniform_int(0, 2) == 0) {
      d.vel_x = 0;
      d.vel_y = 0;
    } else {
      random_velocity(d.vel_x, d.vel_y);
    }
    random_color(d);
    d.texture_seed = mix_seed(seed, 0xd0 + static_cast<std::uint64_t>(i));
    s.distractors.push_back(d);
  }
  return s;
}

}  // namespace

Benchmark gen_benchmark(const BenchmarkConfig& cfg, std::uint64_t seed) {
  if (cfg.train_videos < 1 || cfg.test_videos < 1)
    throw std::invalid_argument("benchmark needs at least one video per split");
  Benchmark b;
  char id[32];
  for (int i = 0; i < cfg.train_videos; ++i) {
    std::snprintf(id, sizeof(id), "train%03d", i);
    b.train.push_back(gen_video(
        random_scene(cfg, mix_seed(seed, 0x1000 + static_cast<std::uint64_t>(i))),
        id));
  }
  for (int i = 0; i < cfg.test_videos; ++i) {
    std::snprintf(id, sizeof(id), "test%03d", i);
    b.test.push_back(gen_video(
        random_scene(cfg, mix_seed(seed, 0x2000000 + static_cast<std::uint64_t>(i))),
        id));
  }
  return b;
}

SceneSpec pruning_scene(std::uint64_t seed) {
  SceneSpec s;
  s.width = 64;
  s.height = 64;
  s.frame_count = 10;
  s.background_seed = mix_seed(seed, 0xb6);

  ObjectSpec& fg = s.foreground;
  fg.kind = ShapeKind::kSquare;
  fg.size_w = fg.size_h = 24;  // area 576
  fg.start_x = 4;
  fg.start_y = 20;
  fg.vel_x = 3;
  fg.vel_y = 0;
  fg.base_r = 0.85;
  fg.base_g = 0.3;
  fg.base_b = 0.2;
  fg.texture_seed = mix_seed(seed, 0xf6);

  ObjectSpec d;  // small static distractor, area 36 < 576/3
  d.kind = ShapeKind::kSquare;
  d.size_w = d.size_h = 6;
  d.start_x = 52;
  d.start_y = 4;
  d.vel_x = 0;
  d.vel_y = 0;
  d.visible_from = 1;
  d.base_r = 0.2;
  d.base_g = 0.3;
  d.base_b = 0.85;
  d.texture_seed = mix_seed(seed, 0xd0);
  s.distractors.push_back(d);
  return s;
}

VideoSample pruning_scene_video(std::uint64_t seed) {
  const SceneSpec spec = pruning_scene(seed);
  VideoSample v = gen_video(spec, "pruning_scene");

  // Detector model: no detections on frame 0, so the N-th largest area
  // (N = frame count) lands on the false positive rather than on the
  // smallest dominant-object detection.
  std::erase_if(v.detections, [](const Detection& d) { return d.frame == 0; });

  // One 15x15 false positive on frame 5, area 225: above the distractor
  // (36) and below half of the dominant object (576).
  Detection fp;
  fp.frame = 5;
  fp.track_hint = 99;
  fp.mask = Mask(spec.height, spec.width);
  for (int y = 40; y < 55; ++y)
    for (int x = 2; x < 17; ++x) fp.mask.at(y, x) = 1;
  const auto box = tight_box(fp.mask);
  fp.x0 = box->x0;
  fp.y0 = box->y0;
  fp.x1 = box->x1;
  fp.y1 = box->y1;
  fp.area = fp.mask.count();
  v.detections.push_back(std::move(fp));
  std::stable_sort(v.detections.begin(), v.detections.end(),
                   [](const Detection& a, const Detection& b) {
                     return a.frame < b.frame;
                   });
  return v;
}

}  // namespace adnet

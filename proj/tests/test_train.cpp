#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "adnet/synthdata.hpp"
#include "adnet/train.hpp"

using namespace adnet;
namespace fs = std::filesystem;

namespace {

VideoSample tiny_video(int frames, int size, std::uint64_t seed) {
  SceneSpec s;
  s.width = size;
  s.height = size;
  s.frame_count = frames;
  s.foreground.size_w = size / 3;
  s.foreground.size_h = size / 3;
  s.foreground.start_x = 2;
  s.foreground.start_y = 2;
  s.foreground.vel_x = 1;
  s.foreground.vel_y = 1;
  s.background_seed = seed;
  s.foreground.texture_seed = seed + 1;
  return gen_video(s, "tiny");
}

}  // namespace

TEST_CASE("poly schedule frozen values and monotonicity") {
  TrainConfig cfg;  // base_lr 0.005, max_iter 40000, power 0.9
  CHECK(poly_lr(cfg, 0) == doctest::Approx(0.005).epsilon(1e-15));
  CHECK(poly_lr(cfg, cfg.max_iter) == 0.0);
  CHECK(poly_lr(cfg, 20000) ==
        doctest::Approx(0.005 * std::pow(0.5, 0.9)).epsilon(1e-12));
  CHECK(poly_lr(cfg, 20000) == doctest::Approx(0.0026794337).epsilon(1e-6));
  for (int it = 1; it <= cfg.max_iter; it += 997)
    CHECK(poly_lr(cfg, it) < poly_lr(cfg, it - 1));
  // past the horizon: clamped to zero rather than going negative
  CHECK(poly_lr(cfg, cfg.max_iter + 500) == 0.0);
  CHECK_THROWS_AS(poly_lr(cfg, -1), std::invalid_argument);
}

TEST_CASE("config file round trip and error reporting") {
  const fs::path p = fs::temp_directory_path() / "adnet_train_cfg.txt";
  {
    std::ofstream out(p);
    out << "# comment line\n";
    out << "base_lr = 0.01\n";
    out << "run_iters = 17  # trailing comment\n";
    out << "augment_rotate = false\n";
    out << "variant = anchor-diffusion\n";
    out << "embed_dim = 16\n";
  }
  TrainConfig cfg = load_train_config(p.string());
  CHECK(cfg.base_lr == doctest::Approx(0.01));
  CHECK(cfg.run_iters == 17);
  CHECK(cfg.augment_rotate == false);
  CHECK(cfg.augment_crop == true);  // untouched default
  CHECK(cfg.model.variant == Variant::kAnchorDiffusion);
  CHECK(cfg.model.embed_dim == 16);

  {
    std::ofstream out(p);
    out << "not_a_key = 3\n";
  }
  CHECK_THROWS_WITH_AS(load_train_config(p.string()),
                       doctest::Contains("not_a_key"), std::runtime_error);
  {
    std::ofstream out(p);
    out << "base_lr 0.01\n";
  }
  CHECK_THROWS_AS(load_train_config(p.string()), std::runtime_error);
  fs::remove(p);
}

TEST_CASE("config validation rejects bad values") {
  TrainConfig cfg;
  cfg.input_size = 60;  // not divisible by the encoder stride
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.base_lr = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("pair sampling anchors frame zero and is uniform over targets") {
  VideoSample v = tiny_video(16, 24, 3);
  std::mt19937_64 rng(5);
  std::array<int, 16> counts{};
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    TrainPair p = sample_pair(v, rng);
    CHECK(p.anchor_index == 0);
    CHECK(p.anchor_frame.data() == v.frames[0].data());
    counts[static_cast<std::size_t>(p.target_index)]++;
  }
  // Each frame expected 625 times; 3 sigma ~ 73.
  for (int c : counts) {
    CHECK(c > 625 - 73);
    CHECK(c < 625 + 73);
  }
}

TEST_CASE("rotations: exactness for right angles, zero-fill for diagonals") {
  VideoSample v = tiny_video(2, 24, 7);
  const Tensor& img = v.frames[0];
  const Mask& m = v.masks[0];

  CHECK(rotate_frame(img, 0).data() == img.data());
  CHECK(rotate_frame(rotate_frame(img, 4), 4).data() == img.data());
  Tensor q = img;
  for (int i = 0; i < 4; ++i) q = rotate_frame(q, 2);
  CHECK(q.data() == img.data());
  CHECK(rotate_mask(rotate_mask(m, 2), 6) == m);
  CHECK(rotate_mask(m, 2).count() == m.count());
  CHECK(rotate_mask(m, 4).count() == m.count());

  // Diagonal rotation resamples; area approximately conserved for an
  // interior object.
  const double a0 = static_cast<double>(m.count());
  const double a1 = static_cast<double>(rotate_mask(m, 1).count());
  CHECK(std::abs(a1 - a0) / a0 < 0.25);

  // One 90-degree step sends the top-right corner to the top-left and the
  // opposite step undoes it.
  Mask corner(4, 4);
  corner.at(0, 3) = 1;
  Mask r = rotate_mask(corner, 2);
  CHECK(r.at(0, 0) == 1);
  CHECK(r.count() == 1);
  CHECK(rotate_mask(r, 6) == corner);
}

TEST_CASE("rotation frequencies follow the biased distribution") {
  VideoSample v = tiny_video(2, 16, 9);
  TrainConfig cfg;
  cfg.augment_crop = false;
  cfg.augment_rotate = true;
  cfg.input_size = 16;
  std::mt19937_64 rng(11);
  TrainPair base = sample_pair(v, rng);

  // Precompute the 8 rotations of the anchor mask; they must be pairwise
  // distinct so the drawn k can be read back from the output.
  std::array<Mask, 8> rot;
  for (int k = 0; k < 8; ++k) rot[static_cast<std::size_t>(k)] = rotate_mask(base.anchor_mask, k);
  for (int a = 0; a < 8; ++a)
    for (int b = a + 1; b < 8; ++b)
      REQUIRE(rot[static_cast<std::size_t>(a)] != rot[static_cast<std::size_t>(b)]);

  std::array<int, 8> counts{};
  const int trials = 50000;
  for (int i = 0; i < trials; ++i) {
    TrainPair p = augment(base, cfg, rng);
    int k = -1;
    for (int c = 0; c < 8; ++c)
      if (p.anchor_mask == rot[static_cast<std::size_t>(c)]) {
        k = c;
        break;
      }
    REQUIRE(k >= 0);
    counts[static_cast<std::size_t>(k)]++;
  }
  CHECK(std::abs(counts[0] / 50000.0 - 0.51) < 0.01);
  for (int k = 1; k < 8; ++k)
    CHECK(std::abs(counts[static_cast<std::size_t>(k)] / 50000.0 - 0.07) < 0.01);
}

TEST_CASE("crop keeps the full foreground and resizes to the input size") {
  VideoSample v = tiny_video(4, 32, 13);
  TrainConfig cfg;
  cfg.augment_crop = true;
  cfg.augment_rotate = false;
  cfg.input_size = 24;
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    TrainPair p = augment(sample_pair(v, rng), cfg, rng);
    CHECK(p.anchor_frame.shape() == std::vector<int>{3, 24, 24});
    CHECK(p.anchor_mask.h == 24);
    CHECK(p.anchor_mask.w == 24);
    CHECK(p.target_mask.count() > 0);
    CHECK(p.anchor_mask.count() > 0);
    // Cropping zooms in: the foreground never shrinks relative to the frame.
    const double before = static_cast<double>(v.masks[0].count()) / (32.0 * 32.0);
    const double after =
        static_cast<double>(p.anchor_mask.count()) / (24.0 * 24.0);
    CHECK(after > before - 1e-9);
  }
}

TEST_CASE("segmentation loss matches closed forms after upsampling") {
  Mask gt(2, 2);
  gt.at(0, 0) = gt.at(0, 1) = 1;
  Tensor half({2, 2}, std::vector<double>(4, 0.5));
  CHECK(segmentation_loss(half, gt).item() ==
        doctest::Approx(0.6931471805599453).epsilon(1e-12));
  // Constant heatmap upsampled from [1,1] stays constant.
  Tensor one({1, 1}, std::vector<double>{0.5});
  CHECK(segmentation_loss(one, gt).item() ==
        doctest::Approx(0.6931471805599453).epsilon(1e-12));
  CHECK_THROWS_AS(segmentation_loss(Tensor({1, 2, 2}), gt),
                  std::invalid_argument);
}

TEST_CASE("train loop determinism, lr scaling and weight decay arithmetic") {
  std::vector<VideoSample> data = {tiny_video(3, 16, 21)};
  TrainConfig cfg;
  cfg.model.embed_dim = 4;
  cfg.model.fusion_dim = 4;
  cfg.model.dropout_rate = 0.0;
  cfg.input_size = 16;
  cfg.augment_crop = false;
  cfg.augment_rotate = false;
  cfg.batch_size = 1;
  cfg.run_iters = 1;
  cfg.weight_decay = 0.0;
  cfg.seed = 5;
  cfg.base_lr = 0.01;

  const AdNetParams init = AdNetParams::init(cfg.model, cfg.seed);
  TrainResult r1 = train_loop(cfg, data);
  TrainResult r1b = train_loop(cfg, data);
  auto n1 = r1.params.named(), n1b = r1b.params.named(), n0 = init.named();
  for (std::size_t i = 0; i < n1.size(); ++i)
    CHECK(n1[i].second.data() == n1b[i].second.data());  // bit-identical

  // Doubling the learning rate exactly doubles the first step.
  cfg.base_lr = 0.02;
  TrainResult r2 = train_loop(cfg, data);
  auto n2 = r2.params.named();
  bool moved = false;
  for (std::size_t i = 0; i < n1.size(); ++i)
    for (std::size_t j = 0; j < n1[i].second.size(); ++j) {
      const double s1 = n1[i].second.data()[j] - n0[i].second.data()[j];
      const double s2 = n2[i].second.data()[j] - n0[i].second.data()[j];
      CHECK(s2 == doctest::Approx(2.0 * s1).epsilon(1e-9));
      if (std::abs(s1) > 1e-12) moved = true;
    }
  CHECK(moved);

  // Weight decay adds exactly -lr*wd*w0 to each step.
  cfg.base_lr = 0.01;
  cfg.weight_decay = 0.1;
  TrainResult r3 = train_loop(cfg, data);
  auto n3 = r3.params.named();
  for (std::size_t i = 0; i < n1.size(); ++i)
    for (std::size_t j = 0; j < n1[i].second.size(); ++j) {
      const double expect = n1[i].second.data()[j] -
                            0.01 * 0.1 * n0[i].second.data()[j];
      CHECK(n3[i].second.data()[j] == doctest::Approx(expect).epsilon(1e-12));
    }

  // Zero executed iterations leave the initialization untouched.
  cfg.run_iters = 0;
  TrainResult r4 = train_loop(cfg, data);
  auto n4 = r4.params.named();
  for (std::size_t i = 0; i < n0.size(); ++i)
    CHECK(n4[i].second.data() == n0[i].second.data());
}

TEST_CASE("short training run reduces the loss") {
  // Stride-aligned static square on a quiet background: the easiest
  // possible fit, so a few hundred iterations must cut the loss deeply.
  SceneSpec s;
  s.width = 64;
  s.height = 64;
  s.frame_count = 2;
  s.foreground.size_w = 16;
  s.foreground.size_h = 16;
  s.foreground.start_x = 8;
  s.foreground.start_y = 8;
  s.background_seed = 33;
  s.foreground.texture_seed = 34;
  s.background_noise = 0.05;
  s.dynamic_background = false;
  std::vector<VideoSample> data = {gen_video(s, "tiny")};
  TrainConfig cfg;
  cfg.model.embed_dim = 16;
  cfg.model.fusion_dim = 32;
  cfg.model.dropout_rate = 0.0;
  cfg.input_size = 64;
  cfg.augment_crop = false;
  cfg.augment_rotate = false;
  cfg.batch_size = 1;
  cfg.run_iters = 400;
  cfg.base_lr = 0.2;
  cfg.log_every = 10;
  cfg.seed = 2;
  TrainResult r = train_loop(cfg, data);
  REQUIRE(r.history.size() >= 2);
  CHECK(r.history.front().iter == 0);
  CHECK(r.history.back().iter == 399);
  CHECK(r.history.back().loss < 0.1);
  CHECK(r.history.back().loss < 0.25 * r.history.front().loss);
  for (const auto& rec : r.history) CHECK(std::isfinite(rec.loss));
}

TEST_CASE("loss csv format") {
  const fs::path p = fs::temp_directory_path() / "adnet_loss.csv";
  write_loss_csv(p.string(), {{0, 0.005, 0.7}, {50, 0.004, 0.3}});
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  CHECK(line == "iteration,lr,loss");
  std::getline(in, line);
  CHECK(line.substr(0, 2) == "0,");
  std::getline(in, line);
  CHECK(line.substr(0, 3) == "50,");
  fs::remove(p);
}

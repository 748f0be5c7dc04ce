#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "adnet/data.hpp"
#include "adnet/model.hpp"

namespace adnet {

struct TrainConfig {
  double base_lr = 0.005;
  int max_iter = 40000;      // poly schedule horizon
  int run_iters = 2000;      // iterations actually executed
  double poly_power = 0.9;
  double weight_decay = 0.0005;
  int batch_size = 4;
  std::uint64_t seed = 0;
  bool augment_crop = true;
  bool augment_rotate = true;
  int input_size = 64;       // network input after crop/resize
  int log_every = 50;
  ModelConfig model;

  void validate() const;
};

// Plain-text `key = value` config file mirroring TrainConfig fields
// (base_lr, max_iter, run_iters, poly_power, weight_decay, batch_size,
// seed, augment_crop, augment_rotate, input_size, log_every, embed_dim,
// fusion_dim, leaky_slope, dropout_rate, variant). Unknown keys are an
// error.
TrainConfig load_train_config(const std::string& path);

struct TrainPair {
  Tensor anchor_frame;
  Mask anchor_mask;
  Tensor target_frame;
  Mask target_mask;
  std::string video_id;
  int anchor_index = 0;
  int target_index = 0;
};

// base_lr * (1 - iter/max_iter)^power; clamps to 0 (with a warning on
// stderr) past the horizon.
double poly_lr(const TrainConfig& cfg, int iter);

// Anchor = frame 0, target drawn uniformly over all frames (0 included).
TrainPair sample_pair(const VideoSample& video, std::mt19937_64& rng);

// Foreground-enclosing random crop (resized to cfg.input_size) and random
// rotation in 45-degree increments, applied to frame and mask identically.
// Crops and rotations are drawn independently for anchor and target.
TrainPair augment(const TrainPair& pair, const TrainConfig& cfg,
                  std::mt19937_64& rng);

// Rotation by k*45 degrees about the image center; exact remap for
// multiples of 90, resampled (bilinear frame / nearest mask, zero fill)
// for diagonals.
Tensor rotate_frame(const Tensor& img, int k);
Mask rotate_mask(const Mask& m, int k);

// Upsamples the [h,w] heatmap tensor to the mask size and takes mean BCE.
Tensor segmentation_loss(const Tensor& heatmap, const Mask& gt);

struct LossRecord {
  int iter;
  double lr;
  double loss;
};

struct TrainResult {
  AdNetParams params;
  std::vector<LossRecord> history;
};

TrainResult train_loop(const TrainConfig& cfg,
                       const std::vector<VideoSample>& dataset);

void write_loss_csv(const std::string& path,
                    const std::vector<LossRecord>& history);

}  // namespace adnet

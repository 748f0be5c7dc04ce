#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "adnet/tensor.hpp"

namespace adnet {

// Which embeddings reach the terminal concatenation layer.
enum class Variant {
  kBaseline,         // current-frame embedding only
  kIntra,            // + intra-frame non-local features
  kAnchor,           // + raw anchor embedding
  kAnchorDiffusion,  // + diffused current-frame embedding
  kAdNet,            // + intra-frame and diffused (full model)
};

Variant variant_from_string(const std::string& s);
std::string variant_to_string(Variant v);

struct ModelConfig {
  int embed_dim = 32;       // c, channels of the pixel embeddings
  int fusion_dim = 128;     // channels after the fusion 1x1 conv
  double leaky_slope = 0.01;
  double dropout_rate = 0.1;
  Variant variant = Variant::kAdNet;

  // Encoder: four 3x3 conv layers, the first three with stride 2.
  static constexpr int kStride = 8;
  int stride() const { return kStride; }
  // Channel count entering the fusion conv, depends on branch count.
  int fusion_in_channels() const;
};

// Per-frame pixel-embedding matrix X in R^(hw x c).
struct FrameEmbedding {
  Tensor x;  // [hw, c]
  int h = 0, w = 0;
};

struct AdNetParams {
  ModelConfig cfg;
  std::vector<Tensor> enc_w;  // 4 kernels [Co,Ci,3,3]
  std::vector<Tensor> enc_b;  // 4 biases [Co]
  Tensor fuse_w;              // [fusion_in, fusion_dim]
  Tensor fuse_b;              // [fusion_dim]
  Tensor cls_w;               // [fusion_dim, 1]
  Tensor cls_b;               // [1]

  static AdNetParams init(const ModelConfig& cfg, std::uint64_t seed);

  // Stable name -> tensor listing, the order used by checkpoints and SGD.
  std::vector<std::pair<std::string, Tensor>> named() const;
  void zero_grads();
};

// frame: [3,H,W], H and W divisible by the encoder stride.
FrameEmbedding encode(const Tensor& frame, const AdNetParams& params);

// P = softmax_rows(X0 * Xt^T / sqrt(c)), row-stochastic [hw, hw].
Tensor transition_matrix(const FrameEmbedding& x0, const FrameEmbedding& xt);

// X~t = P * Xt
Tensor anchor_diffuse(const Tensor& p, const FrameEmbedding& xt);

// Self-attention with the same scaled-softmax operator.
Tensor intra_frame(const FrameEmbedding& xt);

// Concat branches along channels -> 1x1 conv -> LeakyReLU -> dropout (train)
// -> 1x1 conv to one channel -> sigmoid. Returns probabilities [hw, 1].
Tensor fuse_and_classify(const std::vector<Tensor>& branches,
                         const AdNetParams& params, bool train,
                         std::mt19937_64* rng);

// Full pipeline; returns probabilities reshaped to [h, w]. In train mode
// `rng` drives dropout and must be non-null.
Tensor forward(const Tensor& anchor, const Tensor& current,
               const AdNetParams& params, bool train,
               std::mt19937_64* rng = nullptr);

}  // namespace adnet

#include "adnet/model.hpp"

#include <cmath>
#include <stdexcept>

namespace adnet {

namespace {

// Encoder channel plan: 3 -> 16 -> 32 -> c -> c.
std::vector<int> encoder_channels(int embed_dim) {
  return {3, 16, 32, embed_dim, embed_dim};
}

constexpr int kEncStrides[4] = {2, 2, 2, 1};

Tensor init_uniform(std::vector<int> shape, int fan_in, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Tensor t(std::move(shape), /*requires_grad=*/true);
  for (auto& v : t.data()) v = dist(rng);
  return t;
}

}  // namespace

Variant variant_from_string(const std::string& s) {
  if (s == "baseline") return Variant::kBaseline;
  if (s == "intra") return Variant::kIntra;
  if (s == "anchor") return Variant::kAnchor;
  if (s == "anchor-diffusion") return Variant::kAnchorDiffusion;
  if (s == "adnet") return Variant::kAdNet;
  throw std::invalid_argument("unknown variant '" + s + "'");
}

std::string variant_to_string(Variant v) {
  switch (v) {
    case Variant::kBaseline: return "baseline";
    case Variant::kIntra: return "intra";
    case Variant::kAnchor: return "anchor";
    case Variant::kAnchorDiffusion: return "anchor-diffusion";
    case Variant::kAdNet: return "adnet";
  }
  throw std::logic_error("bad variant");
}

int ModelConfig::fusion_in_channels() const {
  switch (variant) {
    case Variant::kBaseline: return embed_dim;
    case Variant::kIntra:
    case Variant::kAnchor:
    case Variant::kAnchorDiffusion: return 2 * embed_dim;
    case Variant::kAdNet: return 3 * embed_dim;
  }
  throw std::logic_error("bad variant");
}

AdNetParams AdNetParams::init(const ModelConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  AdNetParams p;
  p.cfg = cfg;
  const auto ch = encoder_channels(cfg.embed_dim);
  for (int l = 0; l < 4; ++l) {
    const int ci = ch[l], co = ch[l + 1];
    p.enc_w.push_back(init_uniform({co, ci, 3, 3}, ci * 9, rng));
    p.enc_b.push_back(init_uniform({co}, ci * 9, rng));
  }
  const int fin = cfg.fusion_in_channels();
  p.fuse_w = init_uniform({fin, cfg.fusion_dim}, fin, rng);
  p.fuse_b = init_uniform({cfg.fusion_dim}, fin, rng);
  p.cls_w = init_uniform({cfg.fusion_dim, 1}, cfg.fusion_dim, rng);
  p.cls_b = init_uniform({1}, cfg.fusion_dim, rng);
  return p;
}

std::vector<std::pair<std::string, Tensor>> AdNetParams::named() const {
  std::vector<std::pair<std::string, Tensor>> out;
  for (std::size_t l = 0; l < enc_w.size(); ++l) {
    out.emplace_back("enc" + std::to_string(l) + ".w", enc_w[l]);
    out.emplace_back("enc" + std::to_string(l) + ".b", enc_b[l]);
  }
  out.emplace_back("fuse.w", fuse_w);
  out.emplace_back("fuse.b", fuse_b);
  out.emplace_back("cls.w", cls_w);
  out.emplace_back("cls.b", cls_b);
  return out;
}

void AdNetParams::zero_grads() {
  for (auto& [name, t] : named()) {
    (void)name;
    const_cast<Tensor&>(t).zero_grad();
  }
}

FrameEmbedding encode(const Tensor& frame, const AdNetParams& params) {
  if (frame.rank() != 3 || frame.dim(0) != 3)
    throw std::invalid_argument("encode expects a [3,H,W] frame");
  const int stride = params.cfg.stride();
  if (frame.dim(1) % stride != 0 || frame.dim(2) % stride != 0)
    throw std::invalid_argument(
        "frame size " + std::to_string(frame.dim(1)) + "x" +
        std::to_string(frame.dim(2)) + " not divisible by encoder stride " +
        std::to_string(stride) + "; pad the input");
  Tensor x = frame;
  for (int l = 0; l < 4; ++l) {
    x = conv2d(x, params.enc_w[l], params.enc_b[l], kEncStrides[l], 1);
    x = leaky_relu(x, params.cfg.leaky_slope);
  }
  FrameEmbedding e;
  e.h = x.dim(1);
  e.w = x.dim(2);
  const int c = x.dim(0), hw = e.h * e.w;
  e.x = transpose(reshape(x, {c, hw}));  // [hw, c]
  return e;
}

Tensor transition_matrix(const FrameEmbedding& x0, const FrameEmbedding& xt) {
  if (x0.x.shape() != xt.x.shape() || x0.h != xt.h || x0.w != xt.w)
    throw std::invalid_argument("transition_matrix embedding shape mismatch: " +
                                shape_str(x0.x.shape()) + " vs " +
                                shape_str(xt.x.shape()));
  const int c = x0.x.dim(1);
  Tensor logits = scale(matmul(x0.x, transpose(xt.x)),
                        1.0 / std::sqrt(static_cast<double>(c)));
  return softmax_rows(logits);
}

Tensor anchor_diffuse(const Tensor& p, const FrameEmbedding& xt) {
  return matmul(p, xt.x);
}

Tensor intra_frame(const FrameEmbedding& xt) {
  return anchor_diffuse(transition_matrix(xt, xt), xt);
}

Tensor fuse_and_classify(const std::vector<Tensor>& branches,
                         const AdNetParams& params, bool train,
                         std::mt19937_64* rng) {
  Tensor feat = concat_cols(branches);
  if (feat.dim(1) != params.cfg.fusion_in_channels())
    throw std::invalid_argument("fuse_and_classify channel mismatch: got " +
                                shape_str(feat.shape()));
  Tensor fused = leaky_relu(add_bias_cols(matmul(feat, params.fuse_w),
                                          params.fuse_b),
                            params.cfg.leaky_slope);
  if (train && params.cfg.dropout_rate > 0.0) {
    if (!rng)
      throw std::invalid_argument("train-mode forward requires an rng");
    const double keep = 1.0 - params.cfg.dropout_rate;
    std::bernoulli_distribution dist(keep);
    std::vector<double> coeff(fused.size());
    for (auto& c : coeff) c = dist(*rng) ? 1.0 / keep : 0.0;  // inverted
    fused = mul_const(fused, std::move(coeff));
  }
  Tensor logits = add_bias_cols(matmul(fused, params.cls_w), params.cls_b);
  return sigmoid(logits);  // [hw, 1]
}

Tensor forward(const Tensor& anchor, const Tensor& current,
               const AdNetParams& params, bool train, std::mt19937_64* rng) {
  if (anchor.shape() != current.shape())
    throw std::invalid_argument("forward: anchor/current size mismatch");
  FrameEmbedding xt = encode(current, params);
  std::vector<Tensor> branches = {xt.x};
  switch (params.cfg.variant) {
    case Variant::kBaseline:
      break;
    case Variant::kIntra:
      branches.push_back(intra_frame(xt));
      break;
    case Variant::kAnchor: {
      FrameEmbedding x0 = encode(anchor, params);
      branches.push_back(x0.x);
      break;
    }
    case Variant::kAnchorDiffusion: {
      FrameEmbedding x0 = encode(anchor, params);
      branches.push_back(anchor_diffuse(transition_matrix(x0, xt), xt));
      break;
    }
    case Variant::kAdNet: {
      FrameEmbedding x0 = encode(anchor, params);
      branches.push_back(anchor_diffuse(transition_matrix(x0, xt), xt));
      branches.push_back(intra_frame(xt));
      break;
    }
  }
  Tensor prob = fuse_and_classify(branches, params, train, rng);  // [hw,1]
  return reshape(prob, {xt.h, xt.w});
}

}  // namespace adnet

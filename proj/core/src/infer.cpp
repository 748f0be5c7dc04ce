#include "adnet/infer.hpp"

#include <cmath>
#include <stdexcept>

namespace adnet {

void InferenceConfig::validate() const {
  if (scales.empty())
    throw std::invalid_argument("inference scales must be non-empty");
  for (double s : scales)
    if (s <= 0) throw std::invalid_argument("inference scales must be > 0");
  if (threshold <= 0 || threshold >= 1)
    throw std::invalid_argument("threshold must be in (0,1)");
}

FrameEmbedding AdNetBackend::encode_frame(const Tensor& img) {
  return encode(img, params_);
}

Heatmap AdNetBackend::head(const FrameEmbedding& anchor,
                           const FrameEmbedding& current) {
  std::vector<Tensor> branches = {current.x};
  switch (params_.cfg.variant) {
    case Variant::kBaseline:
      break;
    case Variant::kIntra:
      branches.push_back(intra_frame(current));
      break;
    case Variant::kAnchor:
      branches.push_back(anchor.x);
      break;
    case Variant::kAnchorDiffusion:
      branches.push_back(
          anchor_diffuse(transition_matrix(anchor, current), current));
      break;
    case Variant::kAdNet:
      branches.push_back(
          anchor_diffuse(transition_matrix(anchor, current), current));
      branches.push_back(intra_frame(current));
      break;
  }
  Tensor prob = fuse_and_classify(branches, params_, /*train=*/false, nullptr);
  Heatmap out(current.h, current.w);
  out.v = prob.data();
  return out;
}

int scaled_size(int size, double scale, int stride) {
  const int n = static_cast<int>(std::lround(size * scale / stride));
  return std::max(1, n) * stride;
}

namespace {

Tensor resize_frame(const Tensor& img, int h, int w) {
  if (img.dim(1) == h && img.dim(2) == w) return img;
  return bilinear_resize(img, h, w);
}

Heatmap resize_heatmap(const Heatmap& hm, int h, int w) {
  if (hm.h == h && hm.w == w) return hm;
  Tensor t({1, hm.h, hm.w}, hm.v);
  Tensor r = bilinear_resize(t, h, w);
  Heatmap out(h, w);
  out.v = r.data();
  return out;
}

struct TtaVariant {
  double scale;
  bool mirrored;
};

std::vector<TtaVariant> tta_variants(const InferenceConfig& cfg) {
  std::vector<TtaVariant> out;
  for (double s : cfg.scales) {
    out.push_back({s, false});
    if (cfg.mirror) out.push_back({s, true});
  }
  return out;
}

}  // namespace

Heatmap tta_aggregate(SegmenterBackend& backend, const Tensor& anchor,
                      const Tensor& frame, const InferenceConfig& cfg) {
  cfg.validate();
  const int h = frame.dim(1), w = frame.dim(2);
  Heatmap acc(h, w);
  const auto variants = tta_variants(cfg);
  for (const auto& v : variants) {
    const int sh = scaled_size(h, v.scale, backend.stride());
    const int sw = scaled_size(w, v.scale, backend.stride());
    Tensor a = resize_frame(anchor, sh, sw);
    Tensor f = resize_frame(frame, sh, sw);
    if (v.mirrored) {
      a = hflip(a);  // both frames, preserving correspondence geometry
      f = hflip(f);
    }
    FrameEmbedding ea = backend.encode_frame(a);
    FrameEmbedding ef = backend.encode_frame(f);
    Heatmap hm = backend.head(ea, ef);
    if (v.mirrored) hm = hflip(hm);
    hm = resize_heatmap(hm, h, w);
    for (std::size_t i = 0; i < acc.v.size(); ++i) acc.v[i] += hm.v[i];
  }
  for (auto& p : acc.v) p /= static_cast<double>(variants.size());
  return acc;
}

VideoSegmentation segment_video(SegmenterBackend& backend,
                                const VideoSample& video,
                                const InferenceConfig& cfg) {
  cfg.validate();
  if (video.frames.empty())
    throw std::invalid_argument("segment_video: empty video '" + video.id +
                                "'");
  const int h = video.frames[0].dim(1), w = video.frames[0].dim(2);
  for (const auto& f : video.frames)
    if (f.dim(1) != h || f.dim(2) != w)
      throw std::invalid_argument("segment_video: frame size mismatch in '" +
                                  video.id + "'");

  const Tensor& anchor = video.frames[0];
  const auto variants = tta_variants(cfg);

  // write-once anchor cache, one embedding per TTA variant
  std::vector<FrameEmbedding> anchor_cache;
  if (cfg.cache_anchor) {
    for (const auto& v : variants) {
      const int sh = scaled_size(h, v.scale, backend.stride());
      const int sw = scaled_size(w, v.scale, backend.stride());
      Tensor a = resize_frame(anchor, sh, sw);
      if (v.mirrored) a = hflip(a);
      anchor_cache.push_back(backend.encode_frame(a));
    }
  }

  VideoSegmentation out;
  for (const auto& frame : video.frames) {
    Heatmap acc(h, w);
    for (std::size_t vi = 0; vi < variants.size(); ++vi) {
      const auto& v = variants[vi];
      const int sh = scaled_size(h, v.scale, backend.stride());
      const int sw = scaled_size(w, v.scale, backend.stride());
      Tensor f = resize_frame(frame, sh, sw);
      if (v.mirrored) f = hflip(f);
      FrameEmbedding ef = backend.encode_frame(f);
      Heatmap hm;
      if (cfg.cache_anchor) {
        hm = backend.head(anchor_cache[vi], ef);
      } else {
        Tensor a = resize_frame(anchor, sh, sw);
        if (v.mirrored) a = hflip(a);
        FrameEmbedding ea = backend.encode_frame(a);
        hm = backend.head(ea, ef);
      }
      if (v.mirrored) hm = hflip(hm);
      hm = resize_heatmap(hm, h, w);
      for (std::size_t i = 0; i < acc.v.size(); ++i) acc.v[i] += hm.v[i];
    }
    for (auto& p : acc.v) p /= static_cast<double>(variants.size());
    out.masks.push_back(binarize(acc, cfg.threshold));
    out.heatmaps.push_back(std::move(acc));
  }
  return out;
}

}  // namespace adnet

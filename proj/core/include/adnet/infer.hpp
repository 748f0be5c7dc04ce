#pragma once

#include <memory>
#include <vector>

#include "adnet/data.hpp"
#include "adnet/model.hpp"

namespace adnet {

struct InferenceConfig {
  std::vector<double> scales = {0.75, 1.00, 1.50};
  bool mirror = true;
  double threshold = 0.5;
  bool cache_anchor = true;  // compute anchor features once per variant

  void validate() const;
};

// Encoder/head split so anchor features can be cached per (scale, mirror)
// variant. Implementations must be pure: identical inputs give identical
// outputs.
class SegmenterBackend {
 public:
  virtual ~SegmenterBackend() = default;
  virtual int stride() const = 0;
  virtual FrameEmbedding encode_frame(const Tensor& img) = 0;
  virtual Heatmap head(const FrameEmbedding& anchor,
                       const FrameEmbedding& current) = 0;
};

// AD-Net backend over trained parameters (eval mode, dropout off).
class AdNetBackend : public SegmenterBackend {
 public:
  explicit AdNetBackend(AdNetParams params) : params_(std::move(params)) {}
  int stride() const override { return params_.cfg.stride(); }
  FrameEmbedding encode_frame(const Tensor& img) override;
  Heatmap head(const FrameEmbedding& anchor,
               const FrameEmbedding& current) override;
  const AdNetParams& params() const { return params_; }

 private:
  AdNetParams params_;
};

struct VideoSegmentation {
  std::vector<Heatmap> heatmaps;  // one per frame, original resolution
  std::vector<Mask> masks;
};

// Multi-scale + mirror aggregation for one frame against one anchor, no
// caching. Scaled sizes are rounded to the nearest multiple of the
// encoder stride.
Heatmap tta_aggregate(SegmenterBackend& backend, const Tensor& anchor,
                      const Tensor& frame, const InferenceConfig& cfg);

// Segments every frame (including frame 0) against the video's first
// frame. With cache_anchor the anchor is encoded once per (scale, mirror)
// variant; outputs are identical either way.
VideoSegmentation segment_video(SegmenterBackend& backend,
                                const VideoSample& video,
                                const InferenceConfig& cfg);

// Scaled size helper shared with tests: nearest multiple of `stride`, at
// least one stride.
int scaled_size(int size, double scale, int stride);

}  // namespace adnet

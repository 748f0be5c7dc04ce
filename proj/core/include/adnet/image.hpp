#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adnet/tensor.hpp"

namespace adnet {

// Binary mask, row-major, values 0/1.
struct Mask {
  int h = 0, w = 0;
  std::vector<std::uint8_t> v;

  Mask() = default;
  Mask(int h_, int w_) : h(h_), w(w_), v(static_cast<std::size_t>(h_) * w_, 0) {}
  std::uint8_t& at(int y, int x) { return v[static_cast<std::size_t>(y) * w + x]; }
  std::uint8_t at(int y, int x) const { return v[static_cast<std::size_t>(y) * w + x]; }
  std::size_t count() const;
  bool operator==(const Mask&) const = default;
};

// Real-valued heatmap in [0,1], row-major.
struct Heatmap {
  int h = 0, w = 0;
  std::vector<double> v;

  Heatmap() = default;
  Heatmap(int h_, int w_) : h(h_), w(w_), v(static_cast<std::size_t>(h_) * w_, 0.0) {}
  double& at(int y, int x) { return v[static_cast<std::size_t>(y) * w + x]; }
  double at(int y, int x) const { return v[static_cast<std::size_t>(y) * w + x]; }
  bool operator==(const Heatmap&) const = default;
};

// RGB frames are Tensors of shape [3,H,W] with values in [0,1].

// --- portable pixmap / graymap IO ---
// Frames: binary PPM (P6, maxval 255). Masks: binary PGM (P5, maxval 255),
// written as 0/255, binarized at 128 on read. Heatmaps: 16-bit PGM (P5,
// maxval 65535), value = round(p * 65535).

void write_ppm(const std::string& path, const Tensor& img);
Tensor read_ppm(const std::string& path);

void write_mask_pgm(const std::string& path, const Mask& m);
Mask read_mask_pgm(const std::string& path);

void write_heatmap_pgm(const std::string& path, const Heatmap& h);
Heatmap read_heatmap_pgm(const std::string& path);

// Horizontal flip helpers (used by mirrored inference).
Tensor hflip(const Tensor& img);        // [C,H,W]
Heatmap hflip(const Heatmap& h);

Mask binarize(const Heatmap& h, double threshold);  // foreground iff p >= thr

// Nearest-neighbor mask resize (preserves binarity).
Mask resize_nearest(const Mask& m, int out_h, int out_w);

}  // namespace adnet

#include "adnet/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace adnet {

void TrainConfig::validate() const {
  if (base_lr <= 0) throw std::invalid_argument("base_lr must be > 0");
  if (poly_power <= 0) throw std::invalid_argument("poly_power must be > 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (run_iters < 0) throw std::invalid_argument("run_iters must be >= 0");
  if (input_size % ModelConfig::kStride != 0)
    throw std::invalid_argument("input_size must be divisible by the stride");
}

TrainConfig load_train_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  TrainConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string key, eq, value;
    if (!(ss >> key)) continue;
    if (!(ss >> eq >> value) || eq != "=")
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 'key = value'");
    try {
      if (key == "base_lr") cfg.base_lr = std::stod(value);
      else if (key == "max_iter") cfg.max_iter = std::stoi(value);
      else if (key == "run_iters") cfg.run_iters = std::stoi(value);
      else if (key == "poly_power") cfg.poly_power = std::stod(value);
      else if (key == "weight_decay") cfg.weight_decay = std::stod(value);
      else if (key == "batch_size") cfg.batch_size = std::stoi(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "augment_crop") cfg.augment_crop = value == "1" || value == "true";
      else if (key == "augment_rotate") cfg.augment_rotate = value == "1" || value == "true";
      else if (key == "input_size") cfg.input_size = std::stoi(value);
      else if (key == "log_every") cfg.log_every = std::stoi(value);
      else if (key == "embed_dim") cfg.model.embed_dim = std::stoi(value);
      else if (key == "fusion_dim") cfg.model.fusion_dim = std::stoi(value);
      else if (key == "leaky_slope") cfg.model.leaky_slope = std::stod(value);
      else if (key == "dropout_rate") cfg.model.dropout_rate = std::stod(value);
      else if (key == "variant") cfg.model.variant = variant_from_string(value);
      else
        throw std::runtime_error("unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": bad value for '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

double poly_lr(const TrainConfig& cfg, int iter) {
  if (iter < 0) throw std::invalid_argument("poly_lr: negative iteration");
  if (iter > cfg.max_iter) {
    std::cerr << "warning: iteration " << iter << " past schedule horizon "
              << cfg.max_iter << ", learning rate clamped to 0\n";
    return 0.0;
  }
  const double frac = 1.0 - static_cast<double>(iter) / cfg.max_iter;
  return cfg.base_lr * std::pow(frac, cfg.poly_power);
}

TrainPair sample_pair(const VideoSample& video, std::mt19937_64& rng) {
  if (video.frames.empty())
    throw std::invalid_argument("sample_pair: empty video '" + video.id + "'");
  if (video.masks.size() != video.frames.size())
    throw std::invalid_argument("sample_pair: video '" + video.id +
                                "' lacks masks");
  std::uniform_int_distribution<std::size_t> dist(0, video.frames.size() - 1);
  const std::size_t t = dist(rng);
  TrainPair p;
  p.anchor_frame = video.frames[0];
  p.anchor_mask = video.masks[0];
  p.target_frame = video.frames[t];
  p.target_mask = video.masks[t];
  p.video_id = video.id;
  p.anchor_index = 0;
  p.target_index = static_cast<int>(t);
  return p;
}

namespace {

// Crop a region enclosing the foreground box, expanded per side by a
// factor in [1,2], then resize to size x size (bilinear frame, nearest
// mask).
void crop_one(Tensor& frame, Mask& mask, int out_size, std::mt19937_64& rng) {
  const int h = mask.h, w = mask.w;
  const auto box = tight_box(mask);
  int x0 = 0, y0 = 0, x1 = w, y1 = h;
  if (box) {
    std::uniform_real_distribution<double> f(1.0, 2.0);
    const double bw = box->x1 - box->x0, bh = box->y1 - box->y0;
    x0 = std::max(0, static_cast<int>(std::floor(box->x0 - (f(rng) - 1.0) * bw / 2)));
    x1 = std::min(w, static_cast<int>(std::ceil(box->x1 + (f(rng) - 1.0) * bw / 2)));
    y0 = std::max(0, static_cast<int>(std::floor(box->y0 - (f(rng) - 1.0) * bh / 2)));
    y1 = std::min(h, static_cast<int>(std::ceil(box->y1 + (f(rng) - 1.0) * bh / 2)));
  }
  const int cw = x1 - x0, ch = y1 - y0;
  Tensor cropped({3, ch, cw});
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < ch; ++y)
      for (int x = 0; x < cw; ++x)
        cropped.data()[(c * ch + y) * cw + x] =
            frame.data()[(c * h + y0 + y) * w + x0 + x];
  Mask mcrop(ch, cw);
  for (int y = 0; y < ch; ++y)
    for (int x = 0; x < cw; ++x) mcrop.at(y, x) = mask.at(y0 + y, x0 + x);
  frame = bilinear_resize(cropped, out_size, out_size);
  mask = resize_nearest(mcrop, out_size, out_size);
}

int sample_rotation(std::mt19937_64& rng) {
  // k=0 with probability 0.51, each of k=1..7 with probability 0.07
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double v = u(rng);
  if (v < 0.51) return 0;
  return std::min(7, 1 + static_cast<int>((v - 0.51) / 0.07));
}

}  // namespace

Tensor rotate_frame(const Tensor& img, int k) {
  k = ((k % 8) + 8) % 8;
  if (k == 0) return img;
  const int c = img.dim(0), h = img.dim(1), w = img.dim(2);
  Tensor out({c, h, w});
  if (k % 2 == 0) {
    // exact remap for 90/180/270
    for (int ch = 0; ch < c; ++ch)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          int sy, sx;
          switch (k) {
            case 2: sy = x; sx = h - 1 - y; break;           // 90 ccw src
            case 4: sy = h - 1 - y; sx = w - 1 - x; break;   // 180
            default: sy = w - 1 - x; sx = y; break;          // 270
          }
          out.data()[(ch * h + y) * w + x] = img.data()[(ch * h + sy) * w + sx];
        }
    return out;
  }
  const double theta = k * (std::acos(-1.0) / 4.0);
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cy = (h - 1) / 2.0, cx = (w - 1) / 2.0;
  for (int ch = 0; ch < c; ++ch)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        // inverse rotation of the output coordinate
        const double dy = y - cy, dx = x - cx;
        const double sy = ct * dy + st * dx + cy;
        const double sx = -st * dy + ct * dx + cx;
        double v = 0.0;
        if (sy >= 0 && sy <= h - 1 && sx >= 0 && sx <= w - 1) {
          const int y0 = static_cast<int>(std::floor(sy));
          const int x0 = static_cast<int>(std::floor(sx));
          const int y1 = std::min(y0 + 1, h - 1), x1 = std::min(x0 + 1, w - 1);
          const double fy = sy - y0, fx = sx - x0;
          const double* p = img.data().data() + static_cast<std::size_t>(ch) * h * w;
          v = (1 - fy) * ((1 - fx) * p[y0 * w + x0] + fx * p[y0 * w + x1]) +
              fy * ((1 - fx) * p[y1 * w + x0] + fx * p[y1 * w + x1]);
        }
        out.data()[(ch * h + y) * w + x] = v;
      }
  return out;
}

Mask rotate_mask(const Mask& m, int k) {
  k = ((k % 8) + 8) % 8;
  if (k == 0) return m;
  const int h = m.h, w = m.w;
  Mask out(h, w);
  if (k % 2 == 0) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        int sy, sx;
        switch (k) {
          case 2: sy = x; sx = h - 1 - y; break;
          case 4: sy = h - 1 - y; sx = w - 1 - x; break;
          default: sy = w - 1 - x; sx = y; break;
        }
        out.at(y, x) = m.at(sy, sx);
      }
    return out;
  }
  const double theta = k * (std::acos(-1.0) / 4.0);
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cy = (h - 1) / 2.0, cx = (w - 1) / 2.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double dy = y - cy, dx = x - cx;
      const double sy = ct * dy + st * dx + cy;
      const double sx = -st * dy + ct * dx + cx;
      const int ny = static_cast<int>(std::lround(sy));
      const int nx = static_cast<int>(std::lround(sx));
      out.at(y, x) =
          (ny >= 0 && ny < h && nx >= 0 && nx < w) ? m.at(ny, nx) : 0;
    }
  return out;
}

TrainPair augment(const TrainPair& pair, const TrainConfig& cfg,
                  std::mt19937_64& rng) {
  TrainPair out = pair;
  if (cfg.augment_crop) {
    crop_one(out.anchor_frame, out.anchor_mask, cfg.input_size, rng);
    crop_one(out.target_frame, out.target_mask, cfg.input_size, rng);
  }
  if (cfg.augment_rotate) {
    const int ka = sample_rotation(rng);
    out.anchor_frame = rotate_frame(out.anchor_frame, ka);
    out.anchor_mask = rotate_mask(out.anchor_mask, ka);
    const int kt = sample_rotation(rng);
    out.target_frame = rotate_frame(out.target_frame, kt);
    out.target_mask = rotate_mask(out.target_mask, kt);
  }
  return out;
}

Tensor segmentation_loss(const Tensor& heatmap, const Mask& gt) {
  if (heatmap.rank() != 2)
    throw std::invalid_argument("segmentation_loss expects an [h,w] heatmap");
  Tensor pred = heatmap;
  if (heatmap.dim(0) != gt.h || heatmap.dim(1) != gt.w) {
    pred = bilinear_resize(reshape(heatmap, {1, heatmap.dim(0), heatmap.dim(1)}),
                           gt.h, gt.w);
  }
  std::vector<double> target(gt.v.begin(), gt.v.end());
  return bce_mean(pred, target);
}

TrainResult train_loop(const TrainConfig& cfg,
                       const std::vector<VideoSample>& dataset) {
  cfg.validate();
  if (dataset.empty()) throw std::invalid_argument("train_loop: empty dataset");
  TrainResult res;
  res.params = AdNetParams::init(cfg.model, cfg.seed);
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<std::size_t> pick(0, dataset.size() - 1);

  auto named = res.params.named();
  for (int iter = 0; iter < cfg.run_iters; ++iter) {
    const double lr = poly_lr(cfg, iter);
    res.params.zero_grads();
    double loss_sum = 0.0;
    for (int b = 0; b < cfg.batch_size; ++b) {
      const VideoSample& video = dataset[pick(rng)];
      TrainPair pair = sample_pair(video, rng);
      if (cfg.augment_crop || cfg.augment_rotate)
        pair = augment(pair, cfg, rng);
      Tensor heat = forward(pair.anchor_frame, pair.target_frame, res.params,
                            /*train=*/true, &rng);
      Tensor loss = segmentation_loss(heat, pair.target_mask);
      if (!std::isfinite(loss.item()))
        throw std::runtime_error("non-finite loss at iteration " +
                                 std::to_string(iter) + " on video '" +
                                 pair.video_id + "'");
      loss_sum += loss.item();
      backward(loss, 1.0 / cfg.batch_size);  // batch mean
    }
    for (auto& [name, t] : named) {
      Tensor& w = const_cast<Tensor&>(t);
      if (!w.has_grad()) continue;
      for (std::size_t i = 0; i < w.size(); ++i)
        w.data()[i] -= lr * (w.grad()[i] + cfg.weight_decay * w.data()[i]);
    }
    const double mean_loss = loss_sum / cfg.batch_size;
    if (iter % cfg.log_every == 0 || iter + 1 == cfg.run_iters)
      res.history.push_back({iter, lr, mean_loss});
  }
  return res;
}

void write_loss_csv(const std::string& path,
                    const std::vector<LossRecord>& history) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "iteration,lr,loss\n";
  out.precision(12);
  for (const auto& r : history)
    out << r.iter << "," << r.lr << "," << r.loss << "\n";
}

}  // namespace adnet

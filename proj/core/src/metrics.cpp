#include "adnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace adnet {

namespace {

void check_same_shape(const Mask& a, const Mask& b, const char* op) {
  if (a.h != b.h || a.w != b.w)
    throw std::invalid_argument(std::string(op) + ": mask shape mismatch");
}

// Boundary = mask minus its 4-neighborhood erosion. Pixels at the image
// border with a foreground value count as boundary (erosion treats
// outside as background).
Mask boundary(const Mask& m) {
  Mask b(m.h, m.w);
  for (int y = 0; y < m.h; ++y)
    for (int x = 0; x < m.w; ++x) {
      if (!m.at(y, x)) continue;
      const bool interior = y > 0 && y < m.h - 1 && x > 0 && x < m.w - 1 &&
                            m.at(y - 1, x) && m.at(y + 1, x) &&
                            m.at(y, x - 1) && m.at(y, x + 1);
      b.at(y, x) = interior ? 0 : 1;
    }
  return b;
}

struct Pt {
  int y, x;
};

std::vector<Pt> boundary_points(const Mask& m) {
  const Mask b = boundary(m);
  std::vector<Pt> pts;
  for (int y = 0; y < b.h; ++y)
    for (int x = 0; x < b.w; ++x)
      if (b.at(y, x)) pts.push_back({y, x});
  return pts;
}

// Fraction of points in `a` within tol of any point in `b`.
double matched_fraction(const std::vector<Pt>& a, const std::vector<Pt>& b,
                        double tol) {
  if (a.empty()) return 0.0;
  const double tol2 = tol * tol;
  std::size_t hit = 0;
  for (const auto& p : a) {
    for (const auto& q : b) {
      const double dy = p.y - q.y, dx = p.x - q.x;
      if (dy * dy + dx * dx <= tol2) {
        ++hit;
        break;
      }
    }
  }
  return static_cast<double>(hit) / static_cast<double>(a.size());
}

}  // namespace

double region_similarity(const Mask& pred, const Mask& gt) {
  check_same_shape(pred, gt, "region_similarity");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < pred.v.size(); ++i) {
    const bool p = pred.v[i] != 0, g = gt.v[i] != 0;
    inter += p && g;
    uni += p || g;
  }
  if (uni == 0) return 1.0;  // reward correct absence
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double contour_accuracy(const Mask& pred, const Mask& gt, double tol_radius) {
  check_same_shape(pred, gt, "contour_accuracy");
  const auto pb = boundary_points(pred);
  const auto gb = boundary_points(gt);
  if (pb.empty() && gb.empty()) return 1.0;
  const double precision = matched_fraction(pb, gb, tol_radius);
  const double recall = matched_fraction(gb, pb, tol_radius);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double default_contour_tolerance(int h, int w) {
  return std::ceil(0.008 * std::sqrt(static_cast<double>(h) * h +
                                     static_cast<double>(w) * w));
}

double mae(const Heatmap& heatmap, const Mask& gt) {
  if (heatmap.h != gt.h || heatmap.w != gt.w)
    throw std::invalid_argument("mae: shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < gt.v.size(); ++i)
    acc += std::abs(heatmap.v[i] - static_cast<double>(gt.v[i]));
  return acc / static_cast<double>(gt.v.size());
}

SequenceStats sequence_stats(const std::vector<double>& values) {
  if (values.empty())
    throw std::invalid_argument("sequence_stats: empty value list");
  const std::size_t n = values.size();
  double mean = 0.0;
  std::size_t over = 0;
  for (double v : values) {
    mean += v;
    over += v > 0.5;
  }
  mean /= static_cast<double>(n);
  const std::size_t q = (n + 3) / 4;  // ceil(n/4)
  double first = 0.0, last = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    first += values[i];
    last += values[n - q + i];
  }
  return {mean, static_cast<double>(over) / static_cast<double>(n),
          (first - last) / static_cast<double>(q)};
}

PrCurve pr_curve(const std::vector<Heatmap>& heatmaps,
                 const std::vector<Mask>& gts, int n_thresholds) {
  if (heatmaps.empty() || heatmaps.size() != gts.size())
    throw std::invalid_argument("pr_curve: empty or mismatched dataset");
  constexpr double kBeta2 = 0.3;
  PrCurve curve;
  for (int k = 0; k < n_thresholds; ++k) {
    const double tau = static_cast<double>(k + 1) / (n_thresholds + 1);
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t s = 0; s < heatmaps.size(); ++s) {
      const Heatmap& h = heatmaps[s];
      const Mask& g = gts[s];
      if (h.h != g.h || h.w != g.w)
        throw std::invalid_argument("pr_curve: shape mismatch");
      for (std::size_t i = 0; i < h.v.size(); ++i) {
        const bool p = h.v[i] >= tau, y = g.v[i] != 0;
        tp += p && y;
        fp += p && !y;
        fn += !p && y;
      }
    }
    const double precision =
        tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 1.0;
    const double recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 1.0;
    const double denom = kBeta2 * precision + recall;
    const double f =
        denom > 0 ? (1.0 + kBeta2) * precision * recall / denom : 0.0;
    curve.points.push_back({tau, precision, recall, f});
    curve.max_f = std::max(curve.max_f, f);
  }
  return curve;
}

SequenceReport evaluate_sequence(const std::vector<Mask>& pred_masks,
                                 const std::vector<Heatmap>& pred_heatmaps,
                                 const std::vector<Mask>& gt_masks) {
  if (pred_masks.size() != gt_masks.size())
    throw std::invalid_argument("evaluate_sequence: frame count mismatch");
  if (!pred_heatmaps.empty() && pred_heatmaps.size() != gt_masks.size())
    throw std::invalid_argument("evaluate_sequence: heatmap count mismatch");
  SequenceReport rep;
  std::vector<double> js, fs;
  for (std::size_t t = 0; t < pred_masks.size(); ++t) {
    const Mask& gt = gt_masks[t];
    const double tol = default_contour_tolerance(gt.h, gt.w);
    FrameScore sc;
    sc.frame = static_cast<int>(t);
    sc.j = region_similarity(pred_masks[t], gt);
    sc.f = contour_accuracy(pred_masks[t], gt, tol);
    sc.mae = pred_heatmaps.empty() ? 0.0 : mae(pred_heatmaps[t], gt);
    rep.mean_mae += sc.mae;
    js.push_back(sc.j);
    fs.push_back(sc.f);
    rep.frames.push_back(sc);
  }
  rep.mean_mae /= static_cast<double>(pred_masks.size());
  rep.j_stats = sequence_stats(js);
  rep.f_stats = sequence_stats(fs);
  return rep;
}

void write_report_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, SequenceReport>>& reports) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "sequence,frame,j,f,mae\n";
  out.precision(12);
  for (const auto& [name, rep] : reports)
    for (const auto& fs : rep.frames)
      out << name << "," << fs.frame << "," << fs.j << "," << fs.f << ","
          << fs.mae << "\n";
}

void write_summary(
    const std::string& path,
    const std::vector<std::pair<std::string, SequenceReport>>& reports,
    const PrCurve* curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out.precision(6);
  out << std::fixed;
  double jm = 0, jr = 0, jd = 0, fm = 0, fr = 0, fd = 0, me = 0;
  for (const auto& [name, rep] : reports) {
    out << "sequence " << name << ": J mean " << rep.j_stats.mean
        << " recall " << rep.j_stats.recall << " decay " << rep.j_stats.decay
        << " | F mean " << rep.f_stats.mean << " recall "
        << rep.f_stats.recall << " decay " << rep.f_stats.decay << " | MAE "
        << rep.mean_mae << "\n";
    jm += rep.j_stats.mean;
    jr += rep.j_stats.recall;
    jd += rep.j_stats.decay;
    fm += rep.f_stats.mean;
    fr += rep.f_stats.recall;
    fd += rep.f_stats.decay;
    me += rep.mean_mae;
  }
  const double n = static_cast<double>(reports.size());
  out << "overall: J mean " << jm / n << " recall " << jr / n << " decay "
      << jd / n << " | F mean " << fm / n << " recall " << fr / n << " decay "
      << fd / n << " | MAE " << me / n << "\n";
  if (curve) out << "max F-measure " << curve->max_f << "\n";
}

void write_pr_csv(const std::string& path, const PrCurve& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "threshold,precision,recall,f\n";
  out.precision(12);
  for (const auto& p : curve.points)
    out << p.threshold << "," << p.precision << "," << p.recall << ","
        << p.f_measure << "\n";
}

std::vector<std::optional<double>> embedding_drift(const AdNetParams& params,
                                                   const VideoSample& video) {
  if (video.masks.size() != video.frames.size())
    throw std::invalid_argument("embedding_drift: ground-truth masks required");
  std::vector<std::optional<double>> out;
  std::vector<double> anchor_mean;
  for (std::size_t t = 0; t < video.frames.size(); ++t) {
    FrameEmbedding e = encode(video.frames[t], params);
    const int c = e.x.dim(1);
    // majority-vote downsample of the gt mask to embedding resolution
    const Mask& gt = video.masks[t];
    const int cell_h = gt.h / e.h, cell_w = gt.w / e.w;
    std::vector<double> mean(static_cast<std::size_t>(c), 0.0);
    std::size_t fg_cells = 0;
    for (int ey = 0; ey < e.h; ++ey)
      for (int ex = 0; ex < e.w; ++ex) {
        std::size_t fg = 0;
        for (int y = ey * cell_h; y < (ey + 1) * cell_h; ++y)
          for (int x = ex * cell_w; x < (ex + 1) * cell_w; ++x)
            fg += gt.at(y, x);
        if (2 * fg <= static_cast<std::size_t>(cell_h) * cell_w) continue;
        ++fg_cells;
        const double* row =
            e.x.data().data() + static_cast<std::size_t>(ey * e.w + ex) * c;
        for (int k = 0; k < c; ++k) mean[static_cast<std::size_t>(k)] += row[k];
      }
    if (fg_cells == 0) {
      out.push_back(std::nullopt);  // recorded as missing, not zero
      if (t == 0)
        throw std::invalid_argument(
            "embedding_drift: no foreground on the anchor frame at "
            "embedding resolution");
      continue;
    }
    for (auto& v : mean) v /= static_cast<double>(fg_cells);
    if (t == 0) {
      anchor_mean = mean;
      out.push_back(0.0);  // self-distance, exactly
      continue;
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (int k = 0; k < c; ++k) {
      dot += anchor_mean[static_cast<std::size_t>(k)] * mean[static_cast<std::size_t>(k)];
      na += anchor_mean[static_cast<std::size_t>(k)] * anchor_mean[static_cast<std::size_t>(k)];
      nb += mean[static_cast<std::size_t>(k)] * mean[static_cast<std::size_t>(k)];
    }
    const double denom = std::sqrt(na) * std::sqrt(nb);
    out.push_back(denom > 0 ? 1.0 - dot / denom
                            : std::optional<double>(std::nullopt));
  }
  return out;
}

void write_drift_csv(const std::string& path,
                     const std::vector<std::optional<double>>& drift) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "frame,cosine_distance\n";
  out.precision(12);
  for (std::size_t t = 0; t < drift.size(); ++t) {
    out << t << ",";
    if (drift[t]) out << *drift[t];
    out << "\n";
  }
}

}  // namespace adnet

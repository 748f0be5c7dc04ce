#include "adnet/data.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace adnet {

namespace {

std::vector<fs::path> sorted_files(const fs::path& dir,
                                   const std::string& ext) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ext)
      out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::optional<Box> tight_box(const Mask& m) {
  int x0 = m.w, y0 = m.h, x1 = 0, y1 = 0;
  for (int y = 0; y < m.h; ++y)
    for (int x = 0; x < m.w; ++x)
      if (m.at(y, x)) {
        x0 = std::min(x0, x);
        y0 = std::min(y0, y);
        x1 = std::max(x1, x + 1);
        y1 = std::max(y1, y + 1);
      }
  if (x1 <= x0) return std::nullopt;
  return Box{x0, y0, x1, y1};
}

VideoSample load_video(const std::string& dir, bool require_masks) {
  VideoSample v;
  v.id = fs::path(dir).filename().string();
  const auto frame_files = sorted_files(fs::path(dir) / "frames", ".ppm");
  if (frame_files.empty())
    throw std::runtime_error(dir + ": no frames found");
  for (const auto& f : frame_files) v.frames.push_back(read_ppm(f.string()));

  const auto mask_files = sorted_files(fs::path(dir) / "masks", ".pgm");
  if (!mask_files.empty() || require_masks) {
    if (mask_files.size() != frame_files.size())
      throw std::runtime_error("video '" + v.id + "': " +
                               std::to_string(frame_files.size()) +
                               " frames but " +
                               std::to_string(mask_files.size()) + " masks");
    for (const auto& f : mask_files) v.masks.push_back(read_mask_pgm(f.string()));
  }

  const fs::path det = fs::path(dir) / "detections.txt";
  if (fs::exists(det)) v.detections = load_detections(det.string(), dir);
  return v;
}

std::vector<VideoSample> load_dataset(const std::string& root,
                                      bool require_masks) {
  if (!fs::is_directory(root))
    throw std::runtime_error(root + ": not a directory");
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory() && fs::is_directory(e.path() / "frames"))
      dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty())
    throw std::runtime_error(root + ": no video directories found");
  std::vector<VideoSample> out;
  for (const auto& d : dirs) out.push_back(load_video(d.string(), require_masks));
  return out;
}

void save_video(const std::string& dir, const VideoSample& video) {
  fs::create_directories(fs::path(dir) / "frames");
  if (!video.masks.empty()) fs::create_directories(fs::path(dir) / "masks");
  char name[32];
  for (std::size_t i = 0; i < video.frames.size(); ++i) {
    std::snprintf(name, sizeof(name), "%05zu.ppm", i);
    write_ppm((fs::path(dir) / "frames" / name).string(), video.frames[i]);
  }
  for (std::size_t i = 0; i < video.masks.size(); ++i) {
    std::snprintf(name, sizeof(name), "%05zu.pgm", i);
    write_mask_pgm((fs::path(dir) / "masks" / name).string(), video.masks[i]);
  }
  if (!video.detections.empty())
    save_detections((fs::path(dir) / "detections.txt").string(), dir,
                    video.detections);
}

std::vector<Detection> load_detections(const std::string& path,
                                       const std::string& video_dir) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::vector<Detection> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    Detection d;
    std::string mask_path;
    if (!(ss >> d.frame >> d.track_hint >> d.x0 >> d.y0 >> d.x1 >> d.y1 >>
          mask_path))
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed detection record");
    d.mask = read_mask_pgm((fs::path(video_dir) / mask_path).string());
    d.area = d.mask.count();
    if (d.area == 0)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": empty instance mask");
    out.push_back(std::move(d));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Detection& a, const Detection& b) {
                     return a.frame < b.frame;
                   });
  return out;
}

void save_detections(const std::string& path, const std::string& video_dir,
                     const std::vector<Detection>& dets) {
  fs::create_directories(fs::path(video_dir) / "instances");
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  char name[48];
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const Detection& d = dets[i];
    std::snprintf(name, sizeof(name), "instances/%05zu.pgm", i);
    write_mask_pgm((fs::path(video_dir) / name).string(), d.mask);
    out << d.frame << " " << d.track_hint << " " << d.x0 << " " << d.y0 << " "
        << d.x1 << " " << d.y1 << " " << name << "\n";
  }
}

}  // namespace adnet

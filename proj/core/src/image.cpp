#include "adnet/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace adnet {

namespace {

[[noreturn]] void io_fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

struct PnmHeader {
  std::string magic;
  int w = 0, h = 0, maxval = 0;
};

PnmHeader read_pnm_header(std::istream& in, const std::string& path) {
  PnmHeader hd;
  in >> hd.magic;
  if (hd.magic != "P5" && hd.magic != "P6")
    io_fail(path, "corrupt graymap/pixmap header (magic '" + hd.magic + "')");
  auto next_int = [&](int& out) {
    // skip whitespace and '#' comments
    for (;;) {
      int c = in.peek();
      if (c == '#') {
        std::string line;
        std::getline(in, line);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    if (!(in >> out)) io_fail(path, "corrupt header (missing field)");
  };
  next_int(hd.w);
  next_int(hd.h);
  next_int(hd.maxval);
  if (hd.w <= 0 || hd.h <= 0 || hd.maxval <= 0 || hd.maxval > 65535)
    io_fail(path, "corrupt header (bad dimensions)");
  in.get();  // single whitespace before raster
  return hd;
}

}  // namespace

std::size_t Mask::count() const {
  return static_cast<std::size_t>(
      std::count_if(v.begin(), v.end(), [](std::uint8_t b) { return b != 0; }));
}

void write_ppm(const std::string& path, const Tensor& img) {
  if (img.rank() != 3 || img.dim(0) != 3)
    throw std::invalid_argument("write_ppm expects [3,H,W]");
  const int h = img.dim(1), w = img.dim(2);
  std::ofstream out(path, std::ios::binary);
  if (!out) io_fail(path, "cannot open for writing");
  out << "P6\n" << w << " " << h << "\n255\n";
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(h) * w * 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        const double v = std::clamp(img.data()[(c * h + y) * w + x], 0.0, 1.0);
        buf[(static_cast<std::size_t>(y) * w + x) * 3 + c] =
            static_cast<std::uint8_t>(std::lround(v * 255.0));
      }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
}

Tensor read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail(path, "cannot open");
  PnmHeader hd = read_pnm_header(in, path);
  if (hd.magic != "P6") io_fail(path, "expected P6 pixmap");
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(hd.h) * hd.w * 3);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size()))
    io_fail(path, "truncated raster");
  Tensor img({3, hd.h, hd.w});
  for (int y = 0; y < hd.h; ++y)
    for (int x = 0; x < hd.w; ++x)
      for (int c = 0; c < 3; ++c)
        img.data()[(c * hd.h + y) * hd.w + x] =
            buf[(static_cast<std::size_t>(y) * hd.w + x) * 3 + c] / 255.0;
  return img;
}

void write_mask_pgm(const std::string& path, const Mask& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) io_fail(path, "cannot open for writing");
  out << "P5\n" << m.w << " " << m.h << "\n255\n";
  std::vector<std::uint8_t> buf(m.v.size());
  for (std::size_t i = 0; i < m.v.size(); ++i) buf[i] = m.v[i] ? 255 : 0;
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
}

Mask read_mask_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail(path, "cannot open");
  PnmHeader hd = read_pnm_header(in, path);
  if (hd.magic != "P5") io_fail(path, "expected P5 graymap");
  if (hd.maxval > 255) io_fail(path, "expected 8-bit graymap for masks");
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(hd.h) * hd.w);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size()))
    io_fail(path, "truncated raster");
  Mask m(hd.h, hd.w);
  for (std::size_t i = 0; i < buf.size(); ++i) m.v[i] = buf[i] >= 128 ? 1 : 0;
  return m;
}

void write_heatmap_pgm(const std::string& path, const Heatmap& h) {
  std::ofstream out(path, std::ios::binary);
  if (!out) io_fail(path, "cannot open for writing");
  out << "P5\n" << h.w << " " << h.h << "\n65535\n";
  std::vector<std::uint8_t> buf(h.v.size() * 2);
  for (std::size_t i = 0; i < h.v.size(); ++i) {
    const double p = std::clamp(h.v[i], 0.0, 1.0);
    const auto q = static_cast<std::uint16_t>(std::lround(p * 65535.0));
    buf[2 * i] = static_cast<std::uint8_t>(q >> 8);  // PNM is big-endian
    buf[2 * i + 1] = static_cast<std::uint8_t>(q & 0xff);
  }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
}

Heatmap read_heatmap_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail(path, "cannot open");
  PnmHeader hd = read_pnm_header(in, path);
  if (hd.magic != "P5") io_fail(path, "expected P5 graymap");
  Heatmap h(hd.h, hd.w);
  if (hd.maxval > 255) {
    std::vector<std::uint8_t> buf(h.v.size() * 2);
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
      io_fail(path, "truncated raster");
    for (std::size_t i = 0; i < h.v.size(); ++i) {
      const int q = (buf[2 * i] << 8) | buf[2 * i + 1];
      h.v[i] = static_cast<double>(q) / hd.maxval;
    }
  } else {
    std::vector<std::uint8_t> buf(h.v.size());
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
      io_fail(path, "truncated raster");
    for (std::size_t i = 0; i < h.v.size(); ++i)
      h.v[i] = static_cast<double>(buf[i]) / hd.maxval;
  }
  return h;
}

Tensor hflip(const Tensor& img) {
  if (img.rank() != 3) throw std::invalid_argument("hflip expects [C,H,W]");
  const int c = img.dim(0), h = img.dim(1), w = img.dim(2);
  Tensor out(img.shape());
  for (int ch = 0; ch < c; ++ch)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        out.data()[(ch * h + y) * w + x] =
            img.data()[(ch * h + y) * w + (w - 1 - x)];
  return out;
}

Heatmap hflip(const Heatmap& hm) {
  Heatmap out(hm.h, hm.w);
  for (int y = 0; y < hm.h; ++y)
    for (int x = 0; x < hm.w; ++x) out.at(y, x) = hm.at(y, hm.w - 1 - x);
  return out;
}

Mask binarize(const Heatmap& h, double threshold) {
  Mask m(h.h, h.w);
  for (std::size_t i = 0; i < h.v.size(); ++i)
    m.v[i] = h.v[i] >= threshold ? 1 : 0;
  return m;
}

Mask resize_nearest(const Mask& m, int out_h, int out_w) {
  Mask out(out_h, out_w);
  for (int y = 0; y < out_h; ++y)
    for (int x = 0; x < out_w; ++x) {
      int sy = std::min(static_cast<int>((y + 0.5) * m.h / out_h), m.h - 1);
      int sx = std::min(static_cast<int>((x + 0.5) * m.w / out_w), m.w - 1);
      out.at(y, x) = m.at(sy, sx);
    }
  return out;
}

}  // namespace adnet

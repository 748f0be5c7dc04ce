#include "adnet/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace adnet {

namespace {

constexpr char kMagic[8] = {'A', 'D', 'N', 'E', 'T', 'C', 'P', '1'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::string& path) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error(path + ": truncated checkpoint");
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const AdNetParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.cfg.stride()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.cfg.embed_dim));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.cfg.fusion_dim));
  put<double>(out, params.cfg.leaky_slope);
  put<double>(out, params.cfg.dropout_rate);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.cfg.variant));

  const auto named = params.named();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(named.size()));
  for (const auto& [name, t] : named) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
    for (int d : t.shape()) put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    out.write(reinterpret_cast<const char*>(t.data().data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

AdNetParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error(path + ": not an AD-Net checkpoint");
  const auto version = get<std::uint32_t>(in, path);
  if (version != kVersion)
    throw std::runtime_error(path + ": unsupported checkpoint version " +
                             std::to_string(version));
  ModelConfig cfg;
  const auto stride = get<std::uint32_t>(in, path);
  if (stride != static_cast<std::uint32_t>(ModelConfig::kStride))
    throw std::runtime_error(path + ": unsupported encoder stride");
  cfg.embed_dim = static_cast<int>(get<std::uint32_t>(in, path));
  cfg.fusion_dim = static_cast<int>(get<std::uint32_t>(in, path));
  cfg.leaky_slope = get<double>(in, path);
  cfg.dropout_rate = get<double>(in, path);
  cfg.variant = static_cast<Variant>(get<std::uint32_t>(in, path));

  AdNetParams params = AdNetParams::init(cfg, /*seed=*/0);
  auto named = params.named();
  const auto count = get<std::uint32_t>(in, path);
  if (count != named.size())
    throw std::runtime_error(path + ": tensor count mismatch");
  for (auto& [name, t] : named) {
    const auto nlen = get<std::uint32_t>(in, path);
    std::string rname(nlen, '\0');
    in.read(rname.data(), nlen);
    if (!in || rname != name)
      throw std::runtime_error(path + ": unexpected tensor '" + rname +
                               "' (wanted '" + name + "')");
    const auto rank = get<std::uint32_t>(in, path);
    std::vector<int> dims(rank);
    for (auto& d : dims) d = static_cast<int>(get<std::uint32_t>(in, path));
    if (dims != t.shape())
      throw std::runtime_error(path + ": shape mismatch for '" + name + "'");
    Tensor& dst = const_cast<Tensor&>(t);
    in.read(reinterpret_cast<char*>(dst.data().data()),
            static_cast<std::streamsize>(dst.size() * sizeof(double)));
    if (!in) throw std::runtime_error(path + ": truncated checkpoint");
  }
  return params;
}

}  // namespace adnet

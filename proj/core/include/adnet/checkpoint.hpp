#pragma once

#include <string>

#include "adnet/model.hpp"

namespace adnet {

// Binary checkpoint, bit-exact round trip.
// Layout: magic "ADNETCP1", u32 version, config block (encoder stride,
// embed_dim, fusion_dim, leaky slope, dropout rate, variant), u32 tensor
// count, then per tensor: u32 name length, name bytes, u32 rank, u32 dims,
// raw little-endian f64 data.
void save_checkpoint(const std::string& path, const AdNetParams& params);
AdNetParams load_checkpoint(const std::string& path);

}  // namespace adnet

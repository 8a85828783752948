#pragma once

#include <string>

#include "cropweed/model.hpp"

namespace cropweed {

// CWNN weight file: magic "CWNN", u32 LE format version (1), u32 LE key
// length + canonical genotype key, u32 LE head size, then every parameter
// tensor in layer order as little-endian float32. Weights are quantized
// f64 -> f32 on save; the input side is recovered from the array length
// (param_count is strictly increasing in it), keeping the file fully
// self-describing. Byte layout documented in docs/weight-format.md.
void save_weights(Model& model, const std::string& path);
Model load_weights(const std::string& path);

constexpr uint32_t kWeightFormatVersion = 1;

}  // namespace cropweed

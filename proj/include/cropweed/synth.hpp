#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cropweed/dataset.hpp"
#include "cropweed/image.hpp"
#include "cropweed/segmentation.hpp"

namespace cropweed {

// Synthetic field: vegetation-colored blobs on soil, plus optional
// distractors sized to fall below the segmentation filters (specks under
// t_size, bands under t_ratio) while still surviving the 5x5 opening.
struct FieldSpec {
  int width = 256;
  int height = 256;
  int n_blobs = 3;
  int n_specks = 0;
  int n_bands = 0;
  uint64_t seed = 0;
};

struct TruthBlob {
  std::string kind;  // "blob" | "speck" | "band"
  Bbox bbox;
};

struct FieldImage {
  RgbImage image;
  std::vector<TruthBlob> truth;
};

FieldImage gen_synthetic_field(const FieldSpec& spec);

// Synthetic plant cut-outs: 64x64, two crops (green disk, green triangle)
// and two weeds (green cross, green ring), same color distribution for all
// categories so shape is the only signal. ambiguous_fraction injects
// intermediate morph shapes (annulus between disk and ring, triangle-cross
// overlay between triangle and cross) labeled 60:40 weed:crop — a shared
// visual cluster no per-category rule can split.
struct PlantsSpec {
  int per_category = 200;
  uint64_t seed = 0;
  double ambiguous_fraction = 0.0;
  int side = 64;
};

// Renders images under <out_dir>/images and writes <out_dir>/manifest.csv;
// returns the dataset with paths resolved to the written files.
Dataset gen_synthetic_plants(const PlantsSpec& spec, const std::string& out_dir);

// The fixed 2-crop/2-weed taxonomy the generator emits.
Taxonomy plants_taxonomy();

}  // namespace cropweed

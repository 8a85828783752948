#pragma once

#include <string>
#include <vector>

#include "cropweed/image.hpp"

namespace cropweed {

// Half-open-left channel interval: value passes iff lo < value <= hi.
struct ChannelRange {
  double lo = 0.0;
  double hi = 255.0;
  bool contains(double v) const { return v > lo && v <= hi; }
};

struct SegmentationParams {
  ChannelRange h_range{45.0, 95.0};
  ChannelRange s_range{55.0, 255.0};
  ChannelRange v_range{55.0, 255.0};
  double t_size = 0.001;   // min bbox area as fraction of image area
  double t_ratio = 0.2;    // min side ratio min(w,h)/max(w,h)
  int open_kernel_side = 5;

  void validate() const;
};

struct Bbox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  long long area() const { return static_cast<long long>(w) * h; }
};

double bbox_iou(const Bbox& a, const Bbox& b);

struct Component {
  std::vector<int> pixels;  // linear indices y*width+x, in discovery order
  Bbox bbox;
};

struct PlantSegment {
  RgbImage image;        // sharpened cut with background zeroed
  Bbox bbox;             // in source-image coordinates
  double area_fraction;  // bbox area / source area
  double shape_ratio;    // min(w,h) / max(w,h)
};

BinaryMask mask_vegetation(const HsvImage& hsv, const SegmentationParams& params);

BinaryMask erode(const BinaryMask& mask, int kernel_side);
BinaryMask dilate(const BinaryMask& mask, int kernel_side);

// Erosion then dilation with a square element; out-of-bounds treated as 0.
BinaryMask morphology_open(const BinaryMask& mask, int kernel_side);

// Maximal 8-connected components of 1-bits, ordered by top-left-most pixel
// in row-major scan order. Bounding boxes are tight.
std::vector<Component> find_components(const BinaryMask& mask);

// 3x3 kernel [[0,-1,0],[-1,5,-1],[0,-1,0]] per channel, clamped, replicate borders.
RgbImage sharpen(const RgbImage& img);

std::vector<PlantSegment> segment_field_image(const RgbImage& img,
                                              const SegmentationParams& params);

// Writes `<stem>_seg<k>.png` files into dir and returns one CSV row per
// segment: stem,k,x,y,w,h,area_fraction,shape_ratio.
std::vector<std::string> save_segments(const std::string& dir, const std::string& stem,
                                       const std::vector<PlantSegment>& segments);

}  // namespace cropweed

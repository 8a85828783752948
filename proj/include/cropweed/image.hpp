#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cropweed {

// 8-bit RGB image, row major, interleaved channels.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;  // 3 * width * height

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), pixels(static_cast<size_t>(w) * h * 3, 0) {
    if (w < 1 || h < 1) throw std::invalid_argument("RgbImage: dimensions must be >= 1");
  }

  uint8_t* at(int x, int y) { return &pixels[(static_cast<size_t>(y) * width + x) * 3]; }
  const uint8_t* at(int x, int y) const {
    return &pixels[(static_cast<size_t>(y) * width + x) * 3];
  }
};

// HSV on the byte scale: H in [0,180), S and V in [0,255].
struct HsvImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;  // 3 * width * height, (H,S,V)

  HsvImage() = default;
  HsvImage(int w, int h) : width(w), height(h), pixels(static_cast<size_t>(w) * h * 3, 0) {}

  uint8_t* at(int x, int y) { return &pixels[(static_cast<size_t>(y) * width + x) * 3]; }
  const uint8_t* at(int x, int y) const {
    return &pixels[(static_cast<size_t>(y) * width + x) * 3];
  }
};

struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> bits;  // 0 or 1

  BinaryMask() = default;
  BinaryMask(int w, int h) : width(w), height(h), bits(static_cast<size_t>(w) * h, 0) {}

  uint8_t get(int x, int y) const { return bits[static_cast<size_t>(y) * width + x]; }
  void set(int x, int y, uint8_t v) { bits[static_cast<size_t>(y) * width + x] = v; }
  size_t count() const;
};

void rgb_to_hsv_pixel(uint8_t r, uint8_t g, uint8_t b, uint8_t& h, uint8_t& s, uint8_t& v);
void hsv_to_rgb_pixel(double h, double s, double v, uint8_t& r, uint8_t& g, uint8_t& b);

HsvImage rgb_to_hsv(const RgbImage& img);

// Exact inverse convention of rgb_to_hsv, used by generators and round-trip checks.
RgbImage hsv_to_rgb(const HsvImage& img);

RgbImage resize_bilinear(const RgbImage& img, int out_w, int out_h);

}  // namespace cropweed

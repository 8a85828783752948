#include "cropweed/image.hpp"

#include <algorithm>
#include <cmath>

namespace cropweed {

size_t BinaryMask::count() const {
  size_t n = 0;
  for (uint8_t b : bits) n += b;
  return n;
}

void rgb_to_hsv_pixel(uint8_t r, uint8_t g, uint8_t b, uint8_t& h, uint8_t& s, uint8_t& v) {
  int mx = std::max({r, g, b});
  int mn = std::min({r, g, b});
  int delta = mx - mn;
  v = static_cast<uint8_t>(mx);
  if (mx == 0) {
    s = 0;
  } else {
    s = static_cast<uint8_t>(std::lround(255.0 * delta / mx));
  }
  if (delta == 0) {
    h = 0;
    return;
  }
  double hdeg;
  if (mx == r) {
    hdeg = 60.0 * (g - b) / delta;
    if (hdeg < 0) hdeg += 360.0;
  } else if (mx == g) {
    hdeg = 120.0 + 60.0 * (b - r) / delta;
  } else {
    hdeg = 240.0 + 60.0 * (r - g) / delta;
  }
  h = static_cast<uint8_t>(std::lround(hdeg / 2.0) % 180);
}

void hsv_to_rgb_pixel(double h, double s, double v, uint8_t& r, uint8_t& g, uint8_t& b) {
  double hdeg = h * 2.0;
  double sf = s / 255.0;
  double vf = v / 255.0;
  double c = vf * sf;
  double hp = hdeg / 60.0;
  double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double rf = 0, gf = 0, bf = 0;
  int sector = static_cast<int>(hp) % 6;
  switch (sector) {
    case 0: rf = c; gf = x; break;
    case 1: rf = x; gf = c; break;
    case 2: gf = c; bf = x; break;
    case 3: gf = x; bf = c; break;
    case 4: rf = x; bf = c; break;
    default: rf = c; bf = x; break;
  }
  double m = vf - c;
  r = static_cast<uint8_t>(std::lround(std::clamp(rf + m, 0.0, 1.0) * 255.0));
  g = static_cast<uint8_t>(std::lround(std::clamp(gf + m, 0.0, 1.0) * 255.0));
  b = static_cast<uint8_t>(std::lround(std::clamp(bf + m, 0.0, 1.0) * 255.0));
}

HsvImage rgb_to_hsv(const RgbImage& img) {
  HsvImage out(img.width, img.height);
  const size_t n = static_cast<size_t>(img.width) * img.height;
  for (size_t i = 0; i < n; ++i) {
    rgb_to_hsv_pixel(img.pixels[3 * i], img.pixels[3 * i + 1], img.pixels[3 * i + 2],
                     out.pixels[3 * i], out.pixels[3 * i + 1], out.pixels[3 * i + 2]);
  }
  return out;
}

RgbImage hsv_to_rgb(const HsvImage& img) {
  RgbImage out(img.width, img.height);
  const size_t n = static_cast<size_t>(img.width) * img.height;
  for (size_t i = 0; i < n; ++i) {
    hsv_to_rgb_pixel(img.pixels[3 * i], img.pixels[3 * i + 1], img.pixels[3 * i + 2],
                     out.pixels[3 * i], out.pixels[3 * i + 1], out.pixels[3 * i + 2]);
  }
  return out;
}

RgbImage resize_bilinear(const RgbImage& img, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) throw std::invalid_argument("resize_bilinear: bad target size");
  if (out_w == img.width && out_h == img.height) return img;
  RgbImage out(out_w, out_h);
  const double sx = static_cast<double>(img.width) / out_w;
  const double sy = static_cast<double>(img.height) / out_h;
  for (int y = 0; y < out_h; ++y) {
    double fy = (y + 0.5) * sy - 0.5;
    fy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
    int y0 = static_cast<int>(fy);
    int y1 = std::min(y0 + 1, img.height - 1);
    double wy = fy - y0;
    for (int x = 0; x < out_w; ++x) {
      double fx = (x + 0.5) * sx - 0.5;
      fx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
      int x0 = static_cast<int>(fx);
      int x1 = std::min(x0 + 1, img.width - 1);
      double wx = fx - x0;
      const uint8_t* p00 = img.at(x0, y0);
      const uint8_t* p10 = img.at(x1, y0);
      const uint8_t* p01 = img.at(x0, y1);
      const uint8_t* p11 = img.at(x1, y1);
      uint8_t* q = out.at(x, y);
      for (int c = 0; c < 3; ++c) {
        double top = p00[c] * (1.0 - wx) + p10[c] * wx;
        double bot = p01[c] * (1.0 - wx) + p11[c] * wx;
        q[c] = static_cast<uint8_t>(std::lround(top * (1.0 - wy) + bot * wy));
      }
    }
  }
  return out;
}

}  // namespace cropweed

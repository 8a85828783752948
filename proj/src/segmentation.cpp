#include "cropweed/segmentation.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "cropweed/png_io.hpp"

namespace cropweed {

void SegmentationParams::validate() const {
  for (const auto& r : {h_range, s_range, v_range}) {
    if (!(r.lo < r.hi)) throw std::invalid_argument("SegmentationParams: range lo must be < hi");
  }
  if (t_size < 0.0 || t_size > 1.0) throw std::invalid_argument("SegmentationParams: t_size outside [0,1]");
  if (t_ratio < 0.0 || t_ratio > 1.0) throw std::invalid_argument("SegmentationParams: t_ratio outside [0,1]");
  if (open_kernel_side < 1 || open_kernel_side % 2 == 0)
    throw std::invalid_argument("SegmentationParams: open_kernel_side must be odd and >= 1");
}

double bbox_iou(const Bbox& a, const Bbox& b) {
  int x0 = std::max(a.x, b.x);
  int y0 = std::max(a.y, b.y);
  int x1 = std::min(a.x + a.w, b.x + b.w);
  int y1 = std::min(a.y + a.h, b.y + b.h);
  long long inter = 0;
  if (x1 > x0 && y1 > y0) inter = static_cast<long long>(x1 - x0) * (y1 - y0);
  long long uni = a.area() + b.area() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

BinaryMask mask_vegetation(const HsvImage& hsv, const SegmentationParams& params) {
  BinaryMask out(hsv.width, hsv.height);
  const size_t n = static_cast<size_t>(hsv.width) * hsv.height;
  for (size_t i = 0; i < n; ++i) {
    double h = hsv.pixels[3 * i];
    double s = hsv.pixels[3 * i + 1];
    double v = hsv.pixels[3 * i + 2];
    out.bits[i] = params.h_range.contains(h) && params.s_range.contains(s) &&
                          params.v_range.contains(v)
                      ? 1
                      : 0;
  }
  return out;
}

namespace {

void check_kernel(int kernel_side) {
  if (kernel_side < 1 || kernel_side % 2 == 0)
    throw std::invalid_argument("morphology: kernel side must be odd and >= 1");
}

// Square elements are separable: run the 1-D pass along rows, then columns.
BinaryMask pass_1d(const BinaryMask& in, int radius, bool horizontal, bool is_erode) {
  BinaryMask out(in.width, in.height);
  const int limit = horizontal ? in.width : in.height;
  const int other = horizontal ? in.height : in.width;
  for (int o = 0; o < other; ++o) {
    for (int i = 0; i < limit; ++i) {
      uint8_t acc = is_erode ? 1 : 0;
      for (int d = -radius; d <= radius; ++d) {
        int j = i + d;
        uint8_t v = 0;  // out of bounds counts as 0
        if (j >= 0 && j < limit) v = horizontal ? in.get(j, o) : in.get(o, j);
        if (is_erode) {
          if (!v) { acc = 0; break; }
        } else {
          if (v) { acc = 1; break; }
        }
      }
      if (horizontal) out.set(i, o, acc);
      else out.set(o, i, acc);
    }
  }
  return out;
}

}  // namespace

BinaryMask erode(const BinaryMask& mask, int kernel_side) {
  check_kernel(kernel_side);
  int r = kernel_side / 2;
  if (r == 0) return mask;
  return pass_1d(pass_1d(mask, r, true, true), r, false, true);
}

BinaryMask dilate(const BinaryMask& mask, int kernel_side) {
  check_kernel(kernel_side);
  int r = kernel_side / 2;
  if (r == 0) return mask;
  return pass_1d(pass_1d(mask, r, true, false), r, false, false);
}

BinaryMask morphology_open(const BinaryMask& mask, int kernel_side) {
  return dilate(erode(mask, kernel_side), kernel_side);
}

std::vector<Component> find_components(const BinaryMask& mask) {
  std::vector<Component> comps;
  std::vector<uint8_t> seen(mask.bits.size(), 0);
  std::vector<int> stack;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      int idx = y * mask.width + x;
      if (!mask.bits[idx] || seen[idx]) continue;
      Component c;
      c.bbox = {x, y, 1, 1};
      int min_x = x, min_y = y, max_x = x, max_y = y;
      stack.clear();
      stack.push_back(idx);
      seen[idx] = 1;
      while (!stack.empty()) {
        int cur = stack.back();
        stack.pop_back();
        c.pixels.push_back(cur);
        int cx = cur % mask.width;
        int cy = cur / mask.width;
        min_x = std::min(min_x, cx);
        max_x = std::max(max_x, cx);
        min_y = std::min(min_y, cy);
        max_y = std::max(max_y, cy);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            int nx = cx + dx;
            int ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= mask.width || ny >= mask.height) continue;
            int nidx = ny * mask.width + nx;
            if (mask.bits[nidx] && !seen[nidx]) {
              seen[nidx] = 1;
              stack.push_back(nidx);
            }
          }
        }
      }
      c.bbox = {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
      comps.push_back(std::move(c));
    }
  }
  return comps;
}

RgbImage sharpen(const RgbImage& img) {
  RgbImage out(img.width, img.height);
  auto clampi = [&](int v, int hi) { return std::clamp(v, 0, hi); };
  for (int y = 0; y < img.height; ++y) {
    int yu = clampi(y - 1, img.height - 1);
    int yd = clampi(y + 1, img.height - 1);
    for (int x = 0; x < img.width; ++x) {
      int xl = clampi(x - 1, img.width - 1);
      int xr = clampi(x + 1, img.width - 1);
      const uint8_t* c = img.at(x, y);
      const uint8_t* u = img.at(x, yu);
      const uint8_t* d = img.at(x, yd);
      const uint8_t* l = img.at(xl, y);
      const uint8_t* r = img.at(xr, y);
      uint8_t* q = out.at(x, y);
      for (int ch = 0; ch < 3; ++ch) {
        int v = 5 * c[ch] - u[ch] - d[ch] - l[ch] - r[ch];
        q[ch] = static_cast<uint8_t>(std::clamp(v, 0, 255));
      }
    }
  }
  return out;
}

std::vector<PlantSegment> segment_field_image(const RgbImage& img,
                                              const SegmentationParams& params) {
  params.validate();
  HsvImage hsv = rgb_to_hsv(img);
  BinaryMask mask = mask_vegetation(hsv, params);
  BinaryMask opened = morphology_open(mask, params.open_kernel_side);
  std::vector<Component> comps = find_components(opened);

  const double img_area = static_cast<double>(img.width) * img.height;
  std::vector<PlantSegment> segments;
  for (const Component& c : comps) {
    double area_fraction = static_cast<double>(c.bbox.area()) / img_area;
    if (area_fraction < params.t_size) continue;
    double shape_ratio = static_cast<double>(std::min(c.bbox.w, c.bbox.h)) /
                         static_cast<double>(std::max(c.bbox.w, c.bbox.h));
    if (shape_ratio < params.t_ratio) continue;

    // cut from the original image, sharpen, then zero everything outside
    // the component mask
    RgbImage cut(c.bbox.w, c.bbox.h);
    for (int y = 0; y < c.bbox.h; ++y) {
      const uint8_t* src = img.at(c.bbox.x, c.bbox.y + y);
      std::copy(src, src + static_cast<size_t>(c.bbox.w) * 3, cut.at(0, y));
    }
    RgbImage sharp = sharpen(cut);
    BinaryMask local(c.bbox.w, c.bbox.h);
    for (int idx : c.pixels) {
      int px = idx % img.width - c.bbox.x;
      int py = idx / img.width - c.bbox.y;
      local.set(px, py, 1);
    }
    for (int y = 0; y < c.bbox.h; ++y) {
      for (int x = 0; x < c.bbox.w; ++x) {
        if (!local.get(x, y)) {
          uint8_t* p = sharp.at(x, y);
          p[0] = p[1] = p[2] = 0;
        }
      }
    }
    segments.push_back({std::move(sharp), c.bbox, area_fraction, shape_ratio});
  }
  return segments;
}

std::vector<std::string> save_segments(const std::string& dir, const std::string& stem,
                                       const std::vector<PlantSegment>& segments) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> rows;
  for (size_t k = 0; k < segments.size(); ++k) {
    const PlantSegment& s = segments[k];
    std::string name = stem + "_seg" + std::to_string(k) + ".png";
    write_png((std::filesystem::path(dir) / name).string(), s.image);
    char row[256];
    std::snprintf(row, sizeof(row), "%s,%zu,%d,%d,%d,%d,%.6f,%.6f", stem.c_str(), k, s.bbox.x,
                  s.bbox.y, s.bbox.w, s.bbox.h, s.area_fraction, s.shape_ratio);
    rows.emplace_back(row);
  }
  return rows;
}

}  // namespace cropweed

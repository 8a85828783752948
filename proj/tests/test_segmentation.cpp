#include <algorithm>
#include <queue>
#include <set>
#include <vector>

#include "doctest.h"

#include "cropweed/image.hpp"
#include "cropweed/rng.hpp"
#include "cropweed/segmentation.hpp"

using namespace cropweed;

namespace {

BinaryMask random_mask(int w, int h, double fill, uint64_t seed) {
  BinaryMask m(w, h);
  Rng rng = make_rng(seed, "mask");
  for (auto& b : m.bits) b = rand_unit(rng) < fill ? 1 : 0;
  return m;
}

// Independent 8-connected labelling via BFS, for cross-checking
// find_components. Deliberately a different algorithm (queue, visited set).
std::vector<std::set<int>> bfs_components(const BinaryMask& m) {
  std::vector<char> seen(m.bits.size(), 0);
  std::vector<std::set<int>> out;
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      int start = y * m.width + x;
      if (!m.bits[start] || seen[start]) continue;
      std::set<int> comp;
      std::queue<std::pair<int, int>> q;
      q.push({x, y});
      seen[start] = 1;
      while (!q.empty()) {
        auto [cx, cy] = q.front();
        q.pop();
        comp.insert(cy * m.width + cx);
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= m.width || ny >= m.height) continue;
            int ni = ny * m.width + nx;
            if (m.bits[ni] && !seen[ni]) {
              seen[ni] = 1;
              q.push({nx, ny});
            }
          }
      }
      out.push_back(std::move(comp));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("mask_vegetation applies the open-left window per channel") {
  HsvImage hsv(4, 1);
  SegmentationParams p;  // (45,95] x (55,255] x (55,255]
  auto put = [&](int x, uint8_t h, uint8_t s, uint8_t v) {
    hsv.at(x, 0)[0] = h;
    hsv.at(x, 0)[1] = s;
    hsv.at(x, 0)[2] = v;
  };
  put(0, 70, 128, 128);  // inside
  put(1, 45, 128, 128);  // H on the open lower bound -> excluded
  put(2, 95, 128, 128);  // H on the closed upper bound -> included
  put(3, 70, 55, 128);   // S on the open lower bound -> excluded
  BinaryMask m = mask_vegetation(hsv, p);
  CHECK(m.get(0, 0) == 1);
  CHECK(m.get(1, 0) == 0);
  CHECK(m.get(2, 0) == 1);
  CHECK(m.get(3, 0) == 0);
}

TEST_CASE("erode/dilate against brute-force window min/max") {
  BinaryMask m = random_mask(21, 13, 0.5, 99);
  for (int k : {3, 5}) {
    BinaryMask er = erode(m, k);
    BinaryMask di = dilate(m, k);
    int r = k / 2;
    for (int y = 0; y < m.height; ++y)
      for (int x = 0; x < m.width; ++x) {
        int mn = 1, mx = 0;
        for (int dy = -r; dy <= r; ++dy)
          for (int dx = -r; dx <= r; ++dx) {
            int nx = x + dx, ny = y + dy;
            int v = (nx < 0 || ny < 0 || nx >= m.width || ny >= m.height)
                        ? 0  // out of bounds counts as background
                        : m.get(nx, ny);
            mn = std::min(mn, v);
            mx = std::max(mx, v);
          }
        CHECK(er.get(x, y) == mn);
        CHECK(di.get(x, y) == mx);
      }
  }
}

TEST_CASE("opening is anti-extensive and idempotent") {
  for (uint64_t seed : {1, 2, 3, 4}) {
    BinaryMask m = random_mask(40, 30, 0.45, seed);
    BinaryMask once = morphology_open(m, 5);
    for (size_t i = 0; i < m.bits.size(); ++i) CHECK(once.bits[i] <= m.bits[i]);
    BinaryMask twice = morphology_open(once, 5);
    CHECK(twice.bits == once.bits);
  }
}

TEST_CASE("opening removes speckle smaller than the element, keeps larger blocks") {
  BinaryMask m(32, 32);
  for (int y = 2; y < 5; ++y)  // 3x3 speck, below the 5x5 element
    for (int x = 2; x < 5; ++x) m.set(x, y, 1);
  for (int y = 12; y < 22; ++y)  // 10x10 block survives
    for (int x = 12; x < 22; ++x) m.set(x, y, 1);
  BinaryMask o = morphology_open(m, 5);
  auto comps = find_components(o);
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].bbox.x == 12);
  CHECK(comps[0].bbox.y == 12);
  CHECK(comps[0].bbox.w == 10);
  CHECK(comps[0].bbox.h == 10);
}

TEST_CASE("find_components matches an independent BFS labelling") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    BinaryMask m = random_mask(48, 36, 0.35, seed);
    auto got = find_components(m);
    auto want = bfs_components(m);
    REQUIRE(got.size() == want.size());
    for (size_t i = 0; i < got.size(); ++i) {
      std::set<int> pix(got[i].pixels.begin(), got[i].pixels.end());
      CHECK(pix == want[i]);  // same ordering: first pixel in scan order
      // Tight bbox.
      int minx = m.width, miny = m.height, maxx = -1, maxy = -1;
      for (int idx : pix) {
        minx = std::min(minx, idx % m.width);
        maxx = std::max(maxx, idx % m.width);
        miny = std::min(miny, idx / m.width);
        maxy = std::max(maxy, idx / m.width);
      }
      CHECK(got[i].bbox.x == minx);
      CHECK(got[i].bbox.y == miny);
      CHECK(got[i].bbox.w == maxx - minx + 1);
      CHECK(got[i].bbox.h == maxy - miny + 1);
    }
  }
}

TEST_CASE("components are reported in row-major discovery order") {
  BinaryMask m(20, 10);
  m.set(15, 0, 1);  // first row, right
  m.set(2, 3, 1);   // later row, left
  m.set(2, 4, 1);
  auto comps = find_components(m);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].bbox.y == 0);
  CHECK(comps[0].bbox.x == 15);
  CHECK(comps[1].bbox.x == 2);
}

TEST_CASE("bbox_iou handles overlap, containment and disjointness") {
  Bbox a{0, 0, 10, 10};
  CHECK(bbox_iou(a, a) == doctest::Approx(1.0));
  CHECK(bbox_iou(a, Bbox{10, 10, 5, 5}) == doctest::Approx(0.0));  // touching corners
  CHECK(bbox_iou(a, Bbox{2, 2, 4, 4}) == doctest::Approx(16.0 / 100.0));
  CHECK(bbox_iou(a, Bbox{5, 0, 10, 10}) == doctest::Approx(50.0 / 150.0));
}

TEST_CASE("sharpen keeps constant regions and boosts an isolated bright pixel") {
  RgbImage img(9, 9);
  for (auto& p : img.pixels) p = 100;
  RgbImage flat = sharpen(img);
  CHECK(flat.pixels == img.pixels);  // 5*100 - 4*100 = 100

  img.at(4, 4)[1] = 140;
  RgbImage sharp = sharpen(img);
  CHECK(sharp.at(4, 4)[1] == 255);  // 5*140 - 4*100 = 300, clamped
  CHECK(sharp.at(4, 3)[1] < 100);  // neighbors dip: 5*100 - (3*100 + 140) = 60
  CHECK(sharp.at(4, 3)[1] == 60);
}

TEST_CASE("segment filters drop small-bbox and thin components independently") {
  SegmentationParams p;
  p.t_size = 0.01;   // bbox >= 100 px^2 on a 100x100 image
  p.t_ratio = 0.5;   // min/max side >= 0.5
  p.open_kernel_side = 1;  // no morphology, isolate the filter logic

  RgbImage img(100, 100);
  // Paint background dark red (fails the hue window).
  for (int y = 0; y < 100; ++y)
    for (int x = 0; x < 100; ++x) {
      img.at(x, y)[0] = 120;
      img.at(x, y)[1] = 30;
      img.at(x, y)[2] = 30;
    }
  auto paint_green = [&](int x0, int y0, int w, int h) {
    for (int y = y0; y < y0 + h; ++y)
      for (int x = x0; x < x0 + w; ++x) {
        img.at(x, y)[0] = 40;
        img.at(x, y)[1] = 180;
        img.at(x, y)[2] = 60;
      }
  };
  paint_green(5, 5, 20, 20);    // passes both
  paint_green(40, 40, 6, 6);    // bbox 36 < 100 -> t_size drop
  paint_green(60, 60, 30, 4);   // ratio 4/30 < 0.5 -> t_ratio drop
  auto segs = segment_field_image(img, p);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].bbox.x == 5);
  CHECK(segs[0].bbox.w == 20);
  CHECK(segs[0].area_fraction == doctest::Approx(400.0 / 10000.0));
  CHECK(segs[0].shape_ratio == doctest::Approx(1.0));
  // The cut-out zeroes non-mask pixels and keeps size = bbox.
  CHECK(segs[0].image.width == 20);
  CHECK(segs[0].image.height == 20);
}

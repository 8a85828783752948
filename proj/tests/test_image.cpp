#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "doctest.h"

#include "cropweed/image.hpp"
#include "cropweed/png_io.hpp"
#include "cropweed/rng.hpp"

using namespace cropweed;

TEST_CASE("rgb->hsv matches known anchor colors") {
  uint8_t h, s, v;
  rgb_to_hsv_pixel(255, 0, 0, h, s, v);  // pure red
  CHECK(h == 0);
  CHECK(s == 255);
  CHECK(v == 255);
  rgb_to_hsv_pixel(0, 255, 0, h, s, v);  // pure green sits at H=60 on the 180 scale
  CHECK(h == 60);
  CHECK(s == 255);
  CHECK(v == 255);
  rgb_to_hsv_pixel(0, 0, 255, h, s, v);
  CHECK(h == 120);
  rgb_to_hsv_pixel(128, 128, 128, h, s, v);  // grey: hue undefined -> 0, saturation 0
  CHECK(s == 0);
  CHECK(v == 128);
}

TEST_CASE("hsv->rgb->hsv round trip stays within quantization error") {
  // The generators rely on this: a vegetation color painted in HSV must land
  // back inside the segmentation window after the RGB encode/decode. Hue
  // resolution degrades as ~30/chroma units, so the guarantee only holds at
  // the chroma the painters actually use (s, v in (90, 215]).
  Rng rng = make_rng(7, "hsv-roundtrip");
  for (int i = 0; i < 2000; ++i) {
    double h = rand_range(rng, 0.0, 179.0);
    double s = rand_range(rng, 90.0, 215.0);
    double v = rand_range(rng, 90.0, 215.0);
    uint8_t r, g, b;
    hsv_to_rgb_pixel(h, s, v, r, g, b);
    uint8_t h2, s2, v2;
    rgb_to_hsv_pixel(r, g, b, h2, s2, v2);
    double dh = std::fabs(h - h2);
    dh = std::min(dh, 180.0 - dh);  // hue wraps
    CHECK(dh <= 2.0);
    CHECK(std::abs(int(s) - int(s2)) <= 3);
    CHECK(std::abs(int(v) - int(v2)) <= 1);
  }
}

TEST_CASE("resize_bilinear preserves constant images and size contracts") {
  RgbImage img(10, 6);
  for (auto& p : img.pixels) p = 77;
  RgbImage up = resize_bilinear(img, 64, 64);
  CHECK(up.width == 64);
  CHECK(up.height == 64);
  for (uint8_t p : up.pixels) CHECK(p == 77);

  RgbImage same = resize_bilinear(img, 10, 6);
  CHECK(same.pixels == img.pixels);
}

TEST_CASE("resize_bilinear interpolates between the two halves") {
  RgbImage img(2, 1);
  img.at(0, 0)[0] = 0;
  img.at(1, 0)[0] = 200;
  RgbImage wide = resize_bilinear(img, 5, 1);
  // Midpoint column must sit strictly between the endpoints.
  CHECK(wide.at(2, 0)[0] > 0);
  CHECK(wide.at(2, 0)[0] < 200);
  CHECK(wide.at(0, 0)[0] == 0);
  CHECK(wide.at(4, 0)[0] == 200);
}

TEST_CASE("png write/read round trip is lossless for RGB") {
  Rng rng = make_rng(3, "png");
  RgbImage img(23, 17);
  for (auto& p : img.pixels) p = static_cast<uint8_t>(rand_below(rng, 256));
  std::filesystem::path path = std::filesystem::temp_directory_path() / "cw_png_rt.png";
  write_png(path.string(), img);
  RgbImage back = read_png(path.string());
  CHECK(back.width == img.width);
  CHECK(back.height == img.height);
  CHECK(back.pixels == img.pixels);
  std::filesystem::remove(path);
}

TEST_CASE("read_png rejects non-PNG bytes with a clear error") {
  std::filesystem::path path = std::filesystem::temp_directory_path() / "cw_not_png.txt";
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  std::fputs("just text\n", f);
  std::fclose(f);
  CHECK_THROWS_WITH_AS(read_png(path.string()),
                       doctest::Contains("not a PNG"), std::runtime_error);
  std::filesystem::remove(path);
}

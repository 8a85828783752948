#include "cropweed/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "cropweed/png_io.hpp"
#include "cropweed/rng.hpp"

namespace fs = std::filesystem;

namespace cropweed {

namespace {

// Soil: hue ~10 on the byte scale, far outside the vegetation H window.
void paint_soil(RgbImage& img, Rng& rng) {
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      uint8_t* px = img.at(x, y);
      int jitter = static_cast<int>(rand_below(rng, 31)) - 15;
      px[0] = static_cast<uint8_t>(std::clamp(122 + jitter, 0, 255));
      px[1] = static_cast<uint8_t>(std::clamp(86 + jitter, 0, 255));
      px[2] = static_cast<uint8_t>(std::clamp(58 + jitter, 0, 255));
    }
}

// Vegetation color drawn well inside the mask windows (H (45,95], S/V
// (55,255]) so the RGB->HSV round trip cannot leak across a boundary.
void vegetation_color(Rng& rng, uint8_t& r, uint8_t& g, uint8_t& b) {
  double h = rand_range(rng, 52.0, 88.0);
  double s = rand_range(rng, 90.0, 215.0);
  double v = rand_range(rng, 90.0, 215.0);
  hsv_to_rgb_pixel(h, s, v, r, g, b);
}

struct Placement {
  Bbox box;       // painted extent
  Bbox inflated;  // extent + merge margin
};

bool boxes_overlap(const Bbox& a, const Bbox& b) {
  return a.x < b.x + b.w && b.x < a.x + a.w && a.y < b.y + b.h && b.y < a.y + a.h;
}

Bbox inflate(const Bbox& b, int margin) {
  return {b.x - margin, b.y - margin, b.w + 2 * margin, b.h + 2 * margin};
}

// Finds a top-left position for a w x h box that keeps `margin` pixels of
// clearance from every placed shape and from the border.
Bbox place_box(Rng& rng, int img_w, int img_h, int w, int h, int margin,
               const std::vector<Placement>& placed, const char* what) {
  for (int attempt = 0; attempt < 2000; ++attempt) {
    int x = margin + static_cast<int>(rand_below(rng, std::max(1, img_w - w - 2 * margin)));
    int y = margin + static_cast<int>(rand_below(rng, std::max(1, img_h - h - 2 * margin)));
    Bbox cand{x, y, w, h};
    Bbox cand_inf = inflate(cand, margin);
    bool clash = false;
    for (const Placement& p : placed)
      if (boxes_overlap(cand_inf, p.box) || boxes_overlap(cand, p.inflated)) {
        clash = true;
        break;
      }
    if (!clash) return cand;
  }
  throw std::runtime_error(std::string("gen_synthetic_field: cannot place ") + what +
                           " without overlap; reduce counts or enlarge the field");
}

}  // namespace

FieldImage gen_synthetic_field(const FieldSpec& spec) {
  if (spec.width < 64 || spec.height < 64)
    throw std::invalid_argument("gen_synthetic_field: field must be at least 64x64");
  if (spec.n_blobs < 0 || spec.n_specks < 0 || spec.n_bands < 0)
    throw std::invalid_argument("gen_synthetic_field: negative shape count");

  Rng rng = make_rng(spec.seed, "field");
  FieldImage out;
  out.image = RgbImage(spec.width, spec.height);
  paint_soil(out.image, rng);

  // Clearance: the 5x5 opening dilates by 2 px; 8 keeps shapes from merging.
  const int margin = 8;
  std::vector<Placement> placed;

  auto record = [&](const std::string& kind, const Bbox& box) {
    placed.push_back({box, inflate(box, margin)});
    out.truth.push_back({kind, box});
  };

  for (int i = 0; i < spec.n_blobs; ++i) {
    // Semi-axes >= 14 px: the opening's corner rounding then costs the bbox
    // at most ~1 px per side, keeping IoU against truth high.
    int a = 14 + static_cast<int>(rand_below(rng, 17));
    int b = 14 + static_cast<int>(rand_below(rng, 17));
    Bbox box = place_box(rng, spec.width, spec.height, 2 * a + 1, 2 * b + 1, margin, placed,
                         "ellipse blob");
    double cx = box.x + a, cy = box.y + b;
    int min_x = spec.width, min_y = spec.height, max_x = -1, max_y = -1;
    for (int y = box.y; y < box.y + box.h; ++y)
      for (int x = box.x; x < box.x + box.w; ++x) {
        double dx = (x - cx) / a, dy = (y - cy) / b;
        if (dx * dx + dy * dy > 1.0) continue;
        uint8_t* px = out.image.at(x, y);
        vegetation_color(rng, px[0], px[1], px[2]);
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
      }
    record("blob", {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1});
  }

  for (int i = 0; i < spec.n_specks; ++i) {
    // 7x7: survives the 5x5 opening, but bbox area 49 sits under
    // t_size = 0.001 for any field of 64x64 or larger... only for fields
    // >= ~222x222; the caller's spec dictates field size, default 256.
    Bbox box = place_box(rng, spec.width, spec.height, 7, 7, margin, placed, "speck");
    for (int y = box.y; y < box.y + 7; ++y)
      for (int x = box.x; x < box.x + 7; ++x) {
        uint8_t* px = out.image.at(x, y);
        vegetation_color(rng, px[0], px[1], px[2]);
      }
    record("speck", box);
  }

  for (int i = 0; i < spec.n_bands; ++i) {
    // 8 px thick, long: survives opening, side ratio < t_ratio = 0.2.
    int len = 70 + static_cast<int>(rand_below(rng, 41));
    bool horizontal = rand_below(rng, 2) == 0;
    int w = horizontal ? len : 8, h = horizontal ? 8 : len;
    Bbox box = place_box(rng, spec.width, spec.height, w, h, margin, placed, "band");
    for (int y = box.y; y < box.y + h; ++y)
      for (int x = box.x; x < box.x + w; ++x) {
        uint8_t* px = out.image.at(x, y);
        vegetation_color(rng, px[0], px[1], px[2]);
      }
    record("band", box);
  }

  return out;
}

namespace {

struct Rot {
  double c, s;
  void apply(double x, double y, double& ox, double& oy) const {
    ox = c * x + s * y;
    oy = -s * x + c * y;
  }
};

bool in_disk(double x, double y, double r) { return x * x + y * y <= r * r; }

bool in_annulus(double x, double y, double r_out, double r_in) {
  double d = x * x + y * y;
  return d <= r_out * r_out && d >= r_in * r_in;
}

// Equilateral triangle of circumradius R rotated by rot; inside-test via the
// three edge half-planes.
bool in_triangle(double x, double y, double R, const Rot& rot) {
  double rx, ry;
  rot.apply(x, y, rx, ry);
  double vx[3], vy[3];
  for (int k = 0; k < 3; ++k) {
    double ang = M_PI / 2 + 2.0 * M_PI * k / 3.0;
    vx[k] = R * std::cos(ang);
    vy[k] = R * std::sin(ang);
  }
  for (int k = 0; k < 3; ++k) {
    int j = (k + 1) % 3;
    double ex = vx[j] - vx[k], ey = vy[j] - vy[k];
    double px = rx - vx[k], py = ry - vy[k];
    if (ex * py - ey * px < 0) return false;
  }
  return true;
}

bool in_cross(double x, double y, double arm_len, double arm_halfw, const Rot& rot) {
  double rx, ry;
  rot.apply(x, y, rx, ry);
  bool horiz = std::abs(ry) <= arm_halfw && std::abs(rx) <= arm_len;
  bool vert = std::abs(rx) <= arm_halfw && std::abs(ry) <= arm_len;
  return horiz || vert;
}

enum class Shape { Disk, Triangle, Cross, Ring, Annulus, TriangleCross };

void render_plant(RgbImage& img, Shape shape, Rng& rng) {
  const int side = img.width;
  paint_soil(img, rng);
  double cx = side / 2.0 + rand_range(rng, -6.0, 6.0);
  double cy = side / 2.0 + rand_range(rng, -6.0, 6.0);
  double theta = rand_range(rng, 0.0, 2.0 * M_PI);
  Rot rot{std::cos(theta), std::sin(theta)};
  double scale = side / 64.0;
  double r = rand_range(rng, 11.0, 15.0) * scale;        // disk/ring/annulus outer
  double R = rand_range(rng, 13.0, 17.0) * scale;        // triangle circumradius
  double arm = rand_range(rng, 12.0, 16.0) * scale;      // cross arm length
  double halfw = rand_range(rng, 2.0, 3.0) * scale;      // cross arm half width

  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x) {
      double dx = x - cx, dy = y - cy;
      bool inside = false;
      switch (shape) {
        case Shape::Disk: inside = in_disk(dx, dy, r); break;
        case Shape::Ring: inside = in_annulus(dx, dy, r, 0.65 * r); break;
        case Shape::Annulus: inside = in_annulus(dx, dy, r, 0.40 * r); break;
        case Shape::Triangle: inside = in_triangle(dx, dy, R, rot); break;
        case Shape::Cross: inside = in_cross(dx, dy, arm, halfw, rot); break;
        case Shape::TriangleCross:
          inside = in_cross(dx, dy, arm, halfw, rot) || in_triangle(dx, dy, 0.55 * R, rot);
          break;
      }
      if (!inside) continue;
      uint8_t* px = img.at(x, y);
      vegetation_color(rng, px[0], px[1], px[2]);
    }

  // 5% salt noise: random pixels swapped for arbitrary colors.
  size_t flips = static_cast<size_t>(0.05 * side * side);
  for (size_t i = 0; i < flips; ++i) {
    int x = static_cast<int>(rand_below(rng, side));
    int y = static_cast<int>(rand_below(rng, side));
    uint8_t* px = img.at(x, y);
    px[0] = static_cast<uint8_t>(rand_below(rng, 256));
    px[1] = static_cast<uint8_t>(rand_below(rng, 256));
    px[2] = static_cast<uint8_t>(rand_below(rng, 256));
  }
}

}  // namespace

Taxonomy plants_taxonomy() {
  return Taxonomy({"crop_disk", "crop_triangle"}, {"weed_cross", "weed_ring"});
}

Dataset gen_synthetic_plants(const PlantsSpec& spec, const std::string& out_dir) {
  if (spec.per_category < 1)
    throw std::invalid_argument("gen_synthetic_plants: per_category must be positive");
  if (spec.ambiguous_fraction < 0 || spec.ambiguous_fraction > 0.4)
    throw std::invalid_argument("gen_synthetic_plants: ambiguous_fraction must be in [0, 0.4]");
  if (spec.side < 16) throw std::invalid_argument("gen_synthetic_plants: side must be >= 16");

  fs::create_directories(fs::path(out_dir) / "images");

  struct CategoryPlan {
    const char* name;
    Group group;
    Shape pure;
    Shape morph;     // the shared intermediate shape of its crop/weed pair
    double amb_mult; // weed-leaning 60:40 split of the ambiguous cluster
  };
  const CategoryPlan plans[] = {
      {"crop_disk", Group::Crop, Shape::Disk, Shape::Annulus, 0.8},
      {"crop_triangle", Group::Crop, Shape::Triangle, Shape::TriangleCross, 0.8},
      {"weed_cross", Group::Weed, Shape::Cross, Shape::TriangleCross, 1.2},
      {"weed_ring", Group::Weed, Shape::Ring, Shape::Annulus, 1.2},
  };

  Dataset ds;
  ds.taxonomy = plants_taxonomy();
  ds.kind = DatasetKind::CD;
  char name[64];
  for (const CategoryPlan& plan : plans) {
    int n_amb = static_cast<int>(
        std::llround(spec.ambiguous_fraction * plan.amb_mult * spec.per_category));
    n_amb = std::min(n_amb, spec.per_category);
    for (int i = 0; i < spec.per_category; ++i) {
      bool ambiguous = i >= spec.per_category - n_amb;
      // Per-image stream: one image's parameters never shift its neighbors',
      // so changing ambiguous_fraction only re-renders the tail indices.
      Rng rng = make_rng(spec.seed, std::string("plants/") + plan.name + "/" + std::to_string(i));
      RgbImage img(spec.side, spec.side);
      render_plant(img, ambiguous ? plan.morph : plan.pure, rng);
      std::snprintf(name, sizeof name, "images/%s_%04d.png", plan.name, i);
      std::string rel = name;
      write_png((fs::path(out_dir) / rel).string(), img);
      ds.samples.push_back({rel, plan.name, plan.group});
      ds.taxonomy.add(plan.name, plan.group);  // no-op after first sight
    }
  }
  write_manifest((fs::path(out_dir) / "manifest.csv").string(), ds);
  return ds;
}

}  // namespace cropweed

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cropweed {

// Dense NCHW tensor of doubles. Kept deliberately small: the networks here
// are tiny and every layer works on contiguous spans, so a shape + flat
// buffer is all that is needed.
struct Tensor {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int n_, int c_, int h_, int w_)
      : n(n_), c(c_), h(h_), w(w_), data(static_cast<size_t>(n_) * c_ * h_ * w_, 0.0) {
    if (n_ < 0 || c_ < 0 || h_ < 0 || w_ < 0)
      throw std::invalid_argument("Tensor: negative dimension");
  }

  size_t size() const { return data.size(); }
  size_t plane() const { return static_cast<size_t>(h) * w; }

  double& at(int in, int ic, int iy, int ix) {
    return data[((static_cast<size_t>(in) * c + ic) * h + iy) * w + ix];
  }
  double at(int in, int ic, int iy, int ix) const {
    return data[((static_cast<size_t>(in) * c + ic) * h + iy) * w + ix];
  }

  double* channel(int in, int ic) { return data.data() + (static_cast<size_t>(in) * c + ic) * plane(); }
  const double* channel(int in, int ic) const {
    return data.data() + (static_cast<size_t>(in) * c + ic) * plane();
  }

  bool same_shape(const Tensor& o) const { return n == o.n && c == o.c && h == o.h && w == o.w; }
  std::string shape_str() const {
    return "[" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," +
           std::to_string(w) + "]";
  }
  void zero() { std::fill(data.begin(), data.end(), 0.0); }
};

}  // namespace cropweed

#include "cropweed/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cropweed {

namespace {

// dst[i] += w * src[i]; contiguous, so -O3 turns this into FMA SIMD.
inline void axpy(double w, const double* src, double* dst, int n) {
  for (int i = 0; i < n; ++i) dst[i] += w * src[i];
}

// Four independent accumulators break the dependency chain without giving
// the compiler license to reassociate on its own — the summation order is
// fixed by this code, so results are reproducible across runs.
inline double dot4(const double* a, const double* b, int n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

double he_limit(int fan_in) { return std::sqrt(6.0 / fan_in); }

void fill_he_uniform(Tensor& t, int fan_in, Rng& rng) {
  double lim = he_limit(fan_in);
  for (double& v : t.data) v = rand_range(rng, -lim, lim);
}

}  // namespace

Conv2d::Conv2d(int in_ch, int out_ch, int kernel, int dilation)
    : in_ch_(in_ch),
      out_ch_(out_ch),
      kernel_(kernel),
      dilation_(dilation),
      pad_((kernel - 1) * dilation / 2),
      weight_(out_ch, in_ch, kernel, kernel),
      bias_(out_ch, 1, 1, 1),
      dweight_(out_ch, in_ch, kernel, kernel),
      dbias_(out_ch, 1, 1, 1) {
  if (in_ch < 1 || out_ch < 1 || kernel < 1 || kernel % 2 == 0 || dilation < 1)
    throw std::invalid_argument("Conv2d: channels positive, kernel odd, dilation >= 1");
}

void Conv2d::init_weights(Rng& rng) {
  fill_he_uniform(weight_, in_ch_ * kernel_ * kernel_, rng);
  bias_.zero();
}

std::string Conv2d::describe() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "conv%dx%d %d->%d d%d", kernel_, kernel_, in_ch_, out_ch_,
                dilation_);
  return buf;
}

Tensor Conv2d::forward(const Tensor& x) {
  if (x.c != in_ch_)
    throw std::invalid_argument("Conv2d: expected " + std::to_string(in_ch_) + " channels, got " +
                                x.shape_str());
  x_ = x;
  const int H = x.h, W = x.w;
  Tensor out(x.n, out_ch_, H, W);
  for (int n = 0; n < x.n; ++n) {
    for (int co = 0; co < out_ch_; ++co) {
      double* dst_plane = out.channel(n, co);
      std::fill(dst_plane, dst_plane + out.plane(), bias_.data[co]);
      for (int ci = 0; ci < in_ch_; ++ci) {
        const double* src_plane = x.channel(n, ci);
        for (int ky = 0; ky < kernel_; ++ky) {
          const int oy = ky * dilation_ - pad_;
          const int y0 = std::max(0, -oy), y1 = std::min(H, H - oy);
          for (int kx = 0; kx < kernel_; ++kx) {
            const int ox = kx * dilation_ - pad_;
            const int x0 = std::max(0, -ox), x1 = std::min(W, W - ox);
            if (x0 >= x1) continue;
            const double w = weight_.at(co, ci, ky, kx);
            for (int y = y0; y < y1; ++y)
              axpy(w, src_plane + (y + oy) * W + ox + x0, dst_plane + y * W + x0, x1 - x0);
          }
        }
      }
    }
  }
  return out;
}

Tensor Conv2d::backward(const Tensor& dy) {
  const int H = x_.h, W = x_.w;
  if (dy.n != x_.n || dy.c != out_ch_ || dy.h != H || dy.w != W)
    throw std::invalid_argument("Conv2d backward: gradient shape " + dy.shape_str());
  Tensor dx(x_.n, in_ch_, H, W);
  for (int n = 0; n < x_.n; ++n) {
    for (int co = 0; co < out_ch_; ++co) {
      const double* g_plane = dy.channel(n, co);
      double bsum = 0;
      for (size_t i = 0; i < dy.plane(); ++i) bsum += g_plane[i];
      dbias_.data[co] += bsum;
      for (int ci = 0; ci < in_ch_; ++ci) {
        const double* src_plane = x_.channel(n, ci);
        double* dx_plane = dx.channel(n, ci);
        for (int ky = 0; ky < kernel_; ++ky) {
          const int oy = ky * dilation_ - pad_;
          const int y0 = std::max(0, -oy), y1 = std::min(H, H - oy);
          for (int kx = 0; kx < kernel_; ++kx) {
            const int ox = kx * dilation_ - pad_;
            const int x0 = std::max(0, -ox), x1 = std::min(W, W - ox);
            if (x0 >= x1) continue;
            const double w = weight_.at(co, ci, ky, kx);
            double wacc = 0;
            for (int y = y0; y < y1; ++y) {
              const double* g = g_plane + y * W + x0;
              const double* s = src_plane + (y + oy) * W + ox + x0;
              double* d = dx_plane + (y + oy) * W + ox + x0;
              wacc += dot4(g, s, x1 - x0);
              axpy(w, g, d, x1 - x0);
            }
            dweight_.at(co, ci, ky, kx) += wacc;
          }
        }
      }
    }
  }
  return dx;
}

Tensor ReLU::forward(const Tensor& x) {
  x_ = x;
  Tensor out = x;
  for (double& v : out.data)
    if (v < 0) v = 0;
  return out;
}

Tensor ReLU::backward(const Tensor& dy) {
  if (!dy.same_shape(x_)) throw std::invalid_argument("ReLU backward: shape mismatch");
  Tensor dx = dy;
  for (size_t i = 0; i < dx.data.size(); ++i)
    if (x_.data[i] <= 0) dx.data[i] = 0;
  return dx;
}

Tensor MaxPool2::forward(const Tensor& x) {
  if (x.h % 2 != 0 || x.w % 2 != 0)
    throw std::invalid_argument("MaxPool2: odd input dims " + x.shape_str());
  in_h_ = x.h;
  in_w_ = x.w;
  channels_ = x.c;
  Tensor out(x.n, x.c, x.h / 2, x.w / 2);
  argmax_.assign(out.size(), 0);
  size_t cell = 0;
  for (int n = 0; n < x.n; ++n)
    for (int c = 0; c < x.c; ++c) {
      const double* src = x.channel(n, c);
      double* dst = out.channel(n, c);
      for (int y = 0; y < out.h; ++y)
        for (int xx = 0; xx < out.w; ++xx, ++cell) {
          int base = 2 * y * in_w_ + 2 * xx;
          int best = base;
          double bv = src[base];
          for (int d : {1, in_w_, in_w_ + 1}) {
            if (src[base + d] > bv) {
              bv = src[base + d];
              best = base + d;
            }
          }
          dst[y * out.w + xx] = bv;
          argmax_[cell] = best;
        }
    }
  return out;
}

Tensor MaxPool2::backward(const Tensor& dy) {
  if (dy.h != in_h_ / 2 || dy.w != in_w_ / 2 || dy.c != channels_)
    throw std::invalid_argument("MaxPool2 backward: shape mismatch");
  Tensor dx(dy.n, channels_, in_h_, in_w_);
  size_t cell = 0;
  for (int n = 0; n < dy.n; ++n)
    for (int c = 0; c < channels_; ++c) {
      const double* g = dy.channel(n, c);
      double* d = dx.channel(n, c);
      for (size_t i = 0; i < dy.plane(); ++i, ++cell) d[argmax_[cell]] += g[i];
    }
  return dx;
}

Tensor Flatten::forward(const Tensor& x) {
  c_ = x.c;
  h_ = x.h;
  w_ = x.w;
  Tensor out(x.n, x.c * x.h * x.w, 1, 1);
  out.data = x.data;  // NCHW is already contiguous per sample
  return out;
}

Tensor Flatten::backward(const Tensor& dy) {
  Tensor dx(dy.n, c_, h_, w_);
  if (dy.size() != dx.size()) throw std::invalid_argument("Flatten backward: size mismatch");
  dx.data = dy.data;
  return dx;
}

Dense::Dense(int in_features, int out_features)
    : in_f_(in_features),
      out_f_(out_features),
      weight_(out_features, in_features, 1, 1),
      bias_(out_features, 1, 1, 1),
      dweight_(out_features, in_features, 1, 1),
      dbias_(out_features, 1, 1, 1) {
  if (in_features < 1 || out_features < 1)
    throw std::invalid_argument("Dense: features must be positive");
}

void Dense::init_weights(Rng& rng) {
  fill_he_uniform(weight_, in_f_, rng);
  bias_.zero();
}

std::string Dense::describe() const {
  return "dense " + std::to_string(in_f_) + "->" + std::to_string(out_f_);
}

Tensor Dense::forward(const Tensor& x) {
  if (x.c != in_f_ || x.h != 1 || x.w != 1)
    throw std::invalid_argument("Dense: expected (N," + std::to_string(in_f_) + ",1,1), got " +
                                x.shape_str());
  x_ = x;
  Tensor out(x.n, out_f_, 1, 1);
  for (int n = 0; n < x.n; ++n) {
    const double* xv = x.data.data() + static_cast<size_t>(n) * in_f_;
    double* yv = out.data.data() + static_cast<size_t>(n) * out_f_;
    for (int o = 0; o < out_f_; ++o)
      yv[o] = bias_.data[o] + dot4(weight_.data.data() + static_cast<size_t>(o) * in_f_, xv, in_f_);
  }
  return out;
}

Tensor Dense::backward(const Tensor& dy) {
  if (dy.n != x_.n || dy.c != out_f_)
    throw std::invalid_argument("Dense backward: shape mismatch " + dy.shape_str());
  Tensor dx(x_.n, in_f_, 1, 1);
  for (int n = 0; n < x_.n; ++n) {
    const double* xv = x_.data.data() + static_cast<size_t>(n) * in_f_;
    const double* g = dy.data.data() + static_cast<size_t>(n) * out_f_;
    double* dxv = dx.data.data() + static_cast<size_t>(n) * in_f_;
    for (int o = 0; o < out_f_; ++o) {
      dbias_.data[o] += g[o];
      axpy(g[o], weight_.data.data() + static_cast<size_t>(o) * in_f_, dxv, in_f_);
      axpy(g[o], xv, dweight_.data.data() + static_cast<size_t>(o) * in_f_, in_f_);
    }
  }
  return dx;
}

Tensor softmax_rows(const Tensor& logits) {
  Tensor probs = logits;
  const int k = logits.c;
  for (int n = 0; n < logits.n; ++n) {
    double* row = probs.data.data() + static_cast<size_t>(n) * k;
    double mx = row[0];
    for (int j = 1; j < k; ++j) mx = std::max(mx, row[j]);
    double sum = 0;
    for (int j = 0; j < k; ++j) {
      row[j] = std::exp(row[j] - mx);
      sum += row[j];
    }
    for (int j = 0; j < k; ++j) row[j] /= sum;
  }
  return probs;
}

Tensor Model::forward_logits(const Tensor& x) {
  Tensor t = x;
  for (auto& layer : layers) t = layer->forward(t);
  if (t.c != head_classes || t.h != 1 || t.w != 1)
    throw std::logic_error("model head produced " + t.shape_str() + ", expected (N," +
                           std::to_string(head_classes) + ",1,1)");
  return t;
}

Tensor Model::forward_probs(const Tensor& x) { return softmax_rows(forward_logits(x)); }

void Model::backward_from_probs(const Tensor& probs, const Tensor& dprobs) {
  if (!probs.same_shape(dprobs))
    throw std::invalid_argument("backward_from_probs: probs/dprobs shape mismatch");
  const int k = probs.c;
  Tensor dlogits(probs.n, k, 1, 1);
  for (int n = 0; n < probs.n; ++n) {
    const double* p = probs.data.data() + static_cast<size_t>(n) * k;
    const double* g = dprobs.data.data() + static_cast<size_t>(n) * k;
    double dot = 0;
    for (int j = 0; j < k; ++j) dot += g[j] * p[j];
    double* d = dlogits.data.data() + static_cast<size_t>(n) * k;
    for (int j = 0; j < k; ++j) d[j] = p[j] * (g[j] - dot);
  }
  Tensor t = dlogits;
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) t = (*it)->backward(t);
}

std::vector<Tensor*> Model::params() {
  std::vector<Tensor*> out;
  for (auto& l : layers)
    for (Tensor* t : l->params()) out.push_back(t);
  return out;
}

std::vector<Tensor*> Model::grads() {
  std::vector<Tensor*> out;
  for (auto& l : layers)
    for (Tensor* t : l->grads()) out.push_back(t);
  return out;
}

void Model::zero_grads() {
  for (Tensor* g : grads()) g->zero();
}

long long Model::num_params() {
  long long total = 0;
  for (Tensor* p : params()) total += static_cast<long long>(p->size());
  return total;
}

Model realize(const Genotype& g, int head_classes, uint64_t seed, int input_side) {
  validate_genotype(g);
  if (head_classes < 2) throw std::invalid_argument("realize: head_classes must be >= 2");
  long long count = param_count(g, head_classes, input_side);
  if (count > kParamBudget)
    throw std::runtime_error("parameter budget violation: " + genotype_key(g) + " realizes to " +
                             std::to_string(count) + " parameters > " +
                             std::to_string(kParamBudget));
  Model m;
  m.genotype = g;
  m.head_classes = head_classes;
  m.input_side = input_side;
  m.meta.seed = seed;

  int cin = 3;
  int side = input_side;
  for (const GeneUnit& u : g.units) {
    m.layers.push_back(std::make_unique<Conv2d>(cin, u.channels, u.kernel));
    m.layers.push_back(std::make_unique<ReLU>());
    if (g.family != Family::Vanilla) {
      m.layers.push_back(std::make_unique<Conv2d>(u.channels, u.channels, 3,
                                                  g.family == Family::Dilated ? u.dilation : 1));
      m.layers.push_back(std::make_unique<ReLU>());
    }
    m.layers.push_back(std::make_unique<MaxPool2>());
    cin = u.channels;
    side /= 2;
  }
  m.layers.push_back(std::make_unique<Flatten>());
  int flat = cin * side * side;
  if (g.family == Family::Vanilla) {
    m.layers.push_back(std::make_unique<Dense>(flat, g.dense_hidden));
    m.layers.push_back(std::make_unique<ReLU>());
    m.layers.push_back(std::make_unique<Dense>(g.dense_hidden, head_classes));
  } else {
    m.layers.push_back(std::make_unique<Dense>(flat, head_classes));
  }

  Rng rng = make_rng(seed, "init/" + genotype_key(g) + "/h" + std::to_string(head_classes));
  for (auto& layer : m.layers) layer->init_weights(rng);
  return m;
}

}  // namespace cropweed

#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "signbench/error.hpp"
#include "signbench/rng.hpp"
#include "signbench/tensor.hpp"

namespace signbench::nn {

template <typename T>
using MatRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapRM = Eigen::Map<MatRM<T>>;
template <typename T>
using CMapRM = Eigen::Map<const MatRM<T>>;

template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;
  bool trainable = true;

  void zero_grad() { std::fill(grad.vec().begin(), grad.vec().end(), T(0)); }
};

// A layer owns its parameters and caches whatever forward state backward
// needs. backward() consumes the gradient w.r.t. the layer output, adds into
// the parameter gradients, and returns the gradient w.r.t. the input.
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor<T> forward(const Tensor<T>& x, bool training) = 0;
  virtual Tensor<T> backward(const Tensor<T>& grad_out) = 0;
  virtual void collect_params(std::vector<Parameter<T>*>& out) { (void)out; }
  virtual const char* kind() const = 0;
};

// ---------------------------------------------------------------------------
// initialization

template <typename T>
void fill_he_normal(Tensor<T>& t, std::size_t fan_in, Rng& rng) {
  const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
  for (auto& v : t.vec()) v = static_cast<T>(rng.normal(0.0, stddev));
}

template <typename T>
void fill_xavier_normal(Tensor<T>& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in + fan_out));
  for (auto& v : t.vec()) v = static_cast<T>(rng.normal(0.0, stddev));
}

// ---------------------------------------------------------------------------
// convolution

template <typename T>
class Conv2d : public Layer<T> {
 public:
  Conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
         std::size_t stride = 1, std::size_t padding = 0, std::size_t groups = 1,
         bool with_bias = true)
      : in_c_(in_channels),
        out_c_(out_channels),
        k_(kernel),
        stride_(stride),
        pad_(padding),
        groups_(groups),
        with_bias_(with_bias) {
    if (groups_ == 0 || in_c_ % groups_ != 0 || out_c_ % groups_ != 0) {
      raise(ErrorCode::ShapeError, "conv2d channel counts not divisible by groups");
    }
    weight_.name = "weight";
    weight_.value = Tensor<T>({out_c_, in_c_ / groups_, k_, k_});
    weight_.grad = Tensor<T>({out_c_, in_c_ / groups_, k_, k_});
    if (with_bias_) {
      bias_.name = "bias";
      bias_.value = Tensor<T>({out_c_});
      bias_.grad = Tensor<T>({out_c_});
    }
  }

  void init(Rng& rng) {
    fill_he_normal(weight_.value, in_c_ / groups_ * k_ * k_, rng);
    if (with_bias_) std::fill(bias_.value.vec().begin(), bias_.value.vec().end(), T(0));
  }

  Tensor<T> forward(const Tensor<T>& x, bool training) override {
    check_input(x);
    if (training) cached_input_ = x;
    const std::size_t batch = x.dim(0), h = x.dim(2), w = x.dim(3);
    const std::size_t oh = out_dim(h), ow = out_dim(w);
    Tensor<T> y({batch, out_c_, oh, ow});

    const std::size_t in_cg = in_c_ / groups_, out_cg = out_c_ / groups_;
    const std::size_t col_rows = in_cg * k_ * k_;
    std::vector<T> cols(col_rows * oh * ow);
    for (std::size_t n = 0; n < batch; ++n) {
      for (std::size_t g = 0; g < groups_; ++g) {
        im2col(x.data() + ((n * in_c_) + g * in_cg) * h * w, h, w, in_cg, oh, ow, cols.data());
        CMapRM<T> wm(weight_.value.data() + g * out_cg * col_rows, out_cg, col_rows);
        CMapRM<T> cm(cols.data(), col_rows, oh * ow);
        MapRM<T> ym(y.data() + ((n * out_c_) + g * out_cg) * oh * ow, out_cg, oh * ow);
        ym.noalias() = wm * cm;
      }
      if (with_bias_) {
        for (std::size_t c = 0; c < out_c_; ++c) {
          T* row = y.data() + ((n * out_c_) + c) * oh * ow;
          const T b = bias_.value[c];
          for (std::size_t i = 0; i < oh * ow; ++i) row[i] += b;
        }
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& grad_out) override {
    const Tensor<T>& x = cached_input_;
    if (x.empty()) raise(ErrorCode::ShapeError, "conv2d backward without cached forward");
    const std::size_t batch = x.dim(0), h = x.dim(2), w = x.dim(3);
    const std::size_t oh = out_dim(h), ow = out_dim(w);
    Tensor<T> dx({batch, in_c_, h, w});

    const std::size_t in_cg = in_c_ / groups_, out_cg = out_c_ / groups_;
    const std::size_t col_rows = in_cg * k_ * k_;
    std::vector<T> cols(col_rows * oh * ow);
    std::vector<T> dcols(col_rows * oh * ow);
    for (std::size_t n = 0; n < batch; ++n) {
      for (std::size_t g = 0; g < groups_; ++g) {
        const T* x_g = x.data() + ((n * in_c_) + g * in_cg) * h * w;
        const T* dy_g = grad_out.data() + ((n * out_c_) + g * out_cg) * oh * ow;
        im2col(x_g, h, w, in_cg, oh, ow, cols.data());
        CMapRM<T> dym(dy_g, out_cg, oh * ow);
        CMapRM<T> cm(cols.data(), col_rows, oh * ow);
        MapRM<T> dwm(weight_.grad.data() + g * out_cg * col_rows, out_cg, col_rows);
        dwm.noalias() += dym * cm.transpose();

        CMapRM<T> wm(weight_.value.data() + g * out_cg * col_rows, out_cg, col_rows);
        MapRM<T> dcm(dcols.data(), col_rows, oh * ow);
        dcm.noalias() = wm.transpose() * dym;
        col2im(dcols.data(), h, w, in_cg, oh, ow,
               dx.data() + ((n * in_c_) + g * in_cg) * h * w);
      }
      if (with_bias_) {
        for (std::size_t c = 0; c < out_c_; ++c) {
          const T* row = grad_out.data() + ((n * out_c_) + c) * oh * ow;
          T sum = 0;
          for (std::size_t i = 0; i < oh * ow; ++i) sum += row[i];
          bias_.grad[c] += sum;
        }
      }
    }
    return dx;
  }

  void collect_params(std::vector<Parameter<T>*>& out) override {
    out.push_back(&weight_);
    if (with_bias_) out.push_back(&bias_);
  }

  const char* kind() const override { return "conv2d"; }

  std::size_t in_channels() const { return in_c_; }
  std::size_t out_channels() const { return out_c_; }

 private:
  void check_input(const Tensor<T>& x) const {
    if (x.rank() != 4 || x.dim(1) != in_c_) {
      raise(ErrorCode::InputShapeError,
            "conv2d expects (N," + std::to_string(in_c_) + ",H,W), got " + x.shape_str());
    }
    if (x.dim(2) + 2 * pad_ < k_ || x.dim(3) + 2 * pad_ < k_) {
      raise(ErrorCode::InputShapeError, "conv2d input smaller than kernel");
    }
  }

  std::size_t out_dim(std::size_t in) const { return (in + 2 * pad_ - k_) / stride_ + 1; }

  void im2col(const T* src, std::size_t h, std::size_t w, std::size_t channels, std::size_t oh,
              std::size_t ow, T* cols) const {
    std::size_t r = 0;
    for (std::size_t c = 0; c < channels; ++c) {
      for (std::size_t ky = 0; ky < k_; ++ky) {
        for (std::size_t kx = 0; kx < k_; ++kx, ++r) {
          T* dst = cols + r * oh * ow;
          for (std::size_t oy = 0; oy < oh; ++oy) {
            const std::ptrdiff_t iy =
                static_cast<std::ptrdiff_t>(oy * stride_ + ky) - static_cast<std::ptrdiff_t>(pad_);
            for (std::size_t ox = 0; ox < ow; ++ox) {
              const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * stride_ + kx) -
                                        static_cast<std::ptrdiff_t>(pad_);
              const bool inside = iy >= 0 && iy < static_cast<std::ptrdiff_t>(h) && ix >= 0 &&
                                  ix < static_cast<std::ptrdiff_t>(w);
              dst[oy * ow + ox] =
                  inside ? src[c * h * w + static_cast<std::size_t>(iy) * w +
                               static_cast<std::size_t>(ix)]
                         : T(0);
            }
          }
        }
      }
    }
  }

  void col2im(const T* cols, std::size_t h, std::size_t w, std::size_t channels, std::size_t oh,
              std::size_t ow, T* dst) const {
    std::size_t r = 0;
    for (std::size_t c = 0; c < channels; ++c) {
      for (std::size_t ky = 0; ky < k_; ++ky) {
        for (std::size_t kx = 0; kx < k_; ++kx, ++r) {
          const T* src = cols + r * oh * ow;
          for (std::size_t oy = 0; oy < oh; ++oy) {
            const std::ptrdiff_t iy =
                static_cast<std::ptrdiff_t>(oy * stride_ + ky) - static_cast<std::ptrdiff_t>(pad_);
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) continue;
            for (std::size_t ox = 0; ox < ow; ++ox) {
              const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * stride_ + kx) -
                                        static_cast<std::ptrdiff_t>(pad_);
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(w)) continue;
              dst[c * h * w + static_cast<std::size_t>(iy) * w + static_cast<std::size_t>(ix)] +=
                  src[oy * ow + ox];
            }
          }
        }
      }
    }
  }

  std::size_t in_c_, out_c_, k_, stride_, pad_, groups_;
  bool with_bias_;
  Parameter<T> weight_;
  Parameter<T> bias_;
  Tensor<T> cached_input_;
};

// ---------------------------------------------------------------------------
// per-channel affine (folded batch norm)

template <typename T>
class ScaleShift : public Layer<T> {
 public:
  explicit ScaleShift(std::size_t channels) : channels_(channels) {
    scale_.name = "scale";
    scale_.value = Tensor<T>::full({channels}, T(1));
    scale_.grad = Tensor<T>({channels});
    shift_.name = "shift";
    shift_.value = Tensor<T>({channels});
    shift_.grad = Tensor<T>({channels});
  }

  Tensor<T> forward(const Tensor<T>& x, bool training) override {
    if (x.rank() != 4 || x.dim(1) != channels_) {
      raise(ErrorCode::InputShapeError, "scale_shift channel mismatch: " + x.shape_str());
    }
    if (training) cached_input_ = x;
    Tensor<T> y(x.shape());
    const std::size_t plane = x.dim(2) * x.dim(3);
    for (std::size_t n = 0; n < x.dim(0); ++n) {
      for (std::size_t c = 0; c < channels_; ++c) {
        const T* src = x.data() + (n * channels_ + c) * plane;
        T* dst = y.data() + (n * channels_ + c) * plane;
        const T s = scale_.value[c], b = shift_.value[c];
        for (std::size_t i = 0; i < plane; ++i) dst[i] = src[i] * s + b;
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& grad_out) override {
    const Tensor<T>& x = cached_input_;
    if (x.empty()) raise(ErrorCode::ShapeError, "scale_shift backward without cached forward");
    Tensor<T> dx(x.shape());
    const std::size_t plane = x.dim(2) * x.dim(3);
    for (std::size_t n = 0; n < x.dim(0); ++n) {
      for (std::size_t c = 0; c < channels_; ++c) {
        const std::size_t off = (n * channels_ + c) * plane;
        const T s = scale_.value[c];
        T dscale = 0, dshift = 0;
        for (std::size_t i = 0; i < plane; ++i) {
          const T g = grad_out[off + i];
          dscale += g * x[off + i];
          dshift += g;
          dx[off + i] = g * s;
        }
        scale_.grad[c] += dscale;
        shift_.grad[c] += dshift;
      }
    }
    return dx;
  }

  void collect_params(std::vector<Parameter<T>*>& out) override {
    out.push_back(&scale_);
    out.push_back(&shift_);
  }

  const char* kind() const override { return "scale_shift"; }

 private:
  std::size_t channels_;
  Parameter<T> scale_, shift_;
  Tensor<T> cached_input_;
};

// ---------------------------------------------------------------------------
// activations

template <typename T>
class ReLU : public Layer<T> {
 public:
  explicit ReLU(T cap = T(0)) : cap_(cap) {}  // cap > 0 gives ReLU6-style clamping

  Tensor<T> forward(const Tensor<T>& x, bool training) override {
    Tensor<T> y(x.shape());
    if (training) mask_.assign(x.numel(), 0);
    for (std::size_t i = 0; i < x.numel(); ++i) {
      T v = x[i] > T(0) ? x[i] : T(0);
      if (cap_ > T(0) && v > cap_) v = cap_;
      y[i] = v;
      if (training) mask_[i] = (x[i] > T(0) && (cap_ <= T(0) || x[i] < cap_)) ? 1 : 0;
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& grad_out) override {
    if (mask_.size() != grad_out.numel()) {
      raise(ErrorCode::ShapeError, "relu backward without cached forward");
    }
    Tensor<T> dx(grad_out.shape());
    for (std::size_t i = 0; i < grad_out.numel(); ++i) dx[i] = mask_[i] ? grad_out[i] : T(0);
    return dx;
  }

  const char* kind() const override { return cap_ > T(0) ? "relu6" : "relu"; }

 private:
  T cap_;
  std::vector<std::uint8_t> mask_;
};

// ---------------------------------------------------------------------------
// pooling

template <typename T>
class MaxPool2d : public Layer<T> {
 public:
  MaxPool2d(std::size_t kernel, std::size_t stride) : k_(kernel), stride_(stride) {}

  Tensor<T> forward(const Tensor<T>& x, bool training) override {
    if (x.rank() != 4) raise(ErrorCode::InputShapeError, "maxpool expects rank-4 input");
    const std::size_t batch = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    if (h < k_ || w < k_) raise(ErrorCode::InputShapeError, "maxpool input smaller than kernel");
    const std::size_t oh = (h - k_) / stride_ + 1, ow = (w - k_) / stride_ + 1;
    Tensor<T> y({batch, c, oh, ow});
    if (training) {
      in_shape_ = x.shape();
      argmax_.assign(y.numel(), 0);
    }
    for (std::size_t n = 0; n < batch; ++n) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        const T* plane = x.data() + (n * c + ch) * h * w;
        T* out_plane = y.data() + (n * c + ch) * oh * ow;
        for (std::size_t oy = 0; oy < oh; ++oy) {
          for (std::size_t ox = 0; ox < ow; ++ox) {
            std::size_t best = (oy * stride_) * w + ox * stride_;
            T best_v = plane[best];
            for (std::size_t ky = 0; ky < k_; ++ky) {
              for (std::size_t kx = 0; kx < k_; ++kx) {
                const std::size_t idx = (oy * stride_ + ky) * w + (ox * stride_ + kx);
                if (plane[idx] > best_v) {
                  best_v = plane[idx];
                  best = idx;
                }
              }
            }
            out_plane[oy * ow + ox] = best_v;
            if (training) argmax_[(n * c + ch) * oh * ow + oy * ow + ox] = best;
          }
        }
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& grad_out) override {
    if (in_shape_.empty()) raise(ErrorCode::ShapeError, "maxpool backward without cached forward");
    Tensor<T> dx(in_shape_);
    const std::size_t c = in_shape_[1], h = in_shape_[2], w = in_shape_[3];
    const std::size_t per_plane_out = grad_out.dim(2) * grad_out.dim(3);
    for (std::size_t n = 0; n < grad_out.dim(0); ++n) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        const std::size_t base = (n * c + ch) * per_plane_out;
        T* dplane = dx.data() + (n * c + ch) * h * w;
        for (std::size_t i = 0; i < per_plane_out; ++i) {
          dplane[argmax_[base + i]] += grad_out[base + i];
        }
      }
    }
    return dx;
  }

  const char* kind() const override { return "maxpool"; }

 private:
  std::size_t k_, stride_;
  std::vector<std::size_t> in_shape_;
  std::vector<std::size_t> argmax_;
};

template <typename T>
class GlobalAvgPool : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, bool training) override {
    if (x.rank() != 4) raise(ErrorCode::InputShapeError, "global avg pool expects rank-4 input");
    if (training) in_shape_ = x.shape();
    const std::size_t batch = x.dim(0), c = x.dim(1), plane = x.dim(2) * x.dim(3);
    Tensor<T> y({batch, c});
    for (std::size_t n = 0; n < batch; ++n) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        const T* src = x.data() + (n * c + ch) * plane;
        T sum = 0;
        for (std::size_t i = 0; i < plane; ++i) sum += src[i];
        y.at(n, ch) = sum / static_cast<T>(plane);
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& grad_out) override {
    if (in_shape_.empty()) {
      raise(ErrorCode::ShapeError, "global avg pool backward without cached forward");
    }
    Tensor<T> dx(in_shape_);
    const std::size_t c = in_shape_[1], plane = in_shape_[2] * in_shape_[3];
    for (std::size_t n = 0; n < grad_out.dim(0); ++n) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        const T g = grad_out.at(n, ch) / static_cast<T>(plane);
        T* dst = dx.data() + (n * c + ch) * plane;
        for (std::size_t i = 0; i < plane; ++i) dst[i] = g;
      }
    }
    return dx;
  }

  const char* kind() const override { return "global_avg_pool"; }

 private:
  std::vector<std::size_t> in_shape_;
};

template <typename T>
class Flatten : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, bool training) override {
    if (training) in_shape_ = x.shape();
    std::size_t features = 1;
    for (std::size_t i = 1; i < x.rank(); ++i) features *= x.dim(i);
    return Tensor<T>({x.dim(0), features}, x.vec());
  }

  Tensor<T> backward(const Tensor<T>& grad_out) override {
    if (in_shape_.empty()) raise(ErrorCode::ShapeError, "flatten backward without cached forward");
    return Tensor<T>(in_shape_, grad_out.vec());
  }

  const char* kind() const override { return "flatten"; }

 private:
  std::vector<std::size_t> in_shape_;
};

// ---------------------------------------------------------------------------
// linear

template <typename T>
class Linear : public Layer<T> {
 public:
  Linear(std::size_t in_features, std::size_t out_features)
      : in_f_(in_features), out_f_(out_features) {
    weight_.name = "weight";
    weight_.value = Tensor<T>({out_f_, in_f_});
    weight_.grad = Tensor<T>({out_f_, in_f_});
    bias_.name = "bias";
    bias_.value = Tensor<T>({out_f_});
    bias_.grad = Tensor<T>({out_f_});
  }

  void init(Rng& rng) {
    fill_xavier_normal(weight_.value, in_f_, out_f_, rng);
    std::fill(bias_.value.vec().begin(), bias_.value.vec().end(), T(0));
  }

  Tensor<T> forward(const Tensor<T>& x, bool training) override {
    if (x.rank() != 2 || x.dim(1) != in_f_) {
      raise(ErrorCode::InputShapeError,
            "linear expects (N," + std::to_string(in_f_) + "), got " + x.shape_str());
    }
    if (training) cached_input_ = x;
    const std::size_t batch = x.dim(0);
    Tensor<T> y({batch, out_f_});
    CMapRM<T> xm(x.data(), batch, in_f_);
    CMapRM<T> wm(weight_.value.data(), out_f_, in_f_);
    MapRM<T> ym(y.data(), batch, out_f_);
    ym.noalias() = xm * wm.transpose();
    for (std::size_t n = 0; n < batch; ++n) {
      for (std::size_t f = 0; f < out_f_; ++f) y.at(n, f) += bias_.value[f];
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& grad_out) override {
    const Tensor<T>& x = cached_input_;
    if (x.empty()) raise(ErrorCode::ShapeError, "linear backward without cached forward");
    const std::size_t batch = x.dim(0);
    CMapRM<T> dym(grad_out.data(), batch, out_f_);
    CMapRM<T> xm(x.data(), batch, in_f_);
    MapRM<T> dwm(weight_.grad.data(), out_f_, in_f_);
    dwm.noalias() += dym.transpose() * xm;
    for (std::size_t n = 0; n < batch; ++n) {
      for (std::size_t f = 0; f < out_f_; ++f) bias_.grad[f] += grad_out.at(n, f);
    }
    Tensor<T> dx({batch, in_f_});
    CMapRM<T> wm(weight_.value.data(), out_f_, in_f_);
    MapRM<T> dxm(dx.data(), batch, in_f_);
    dxm.noalias() = dym * wm;
    return dx;
  }

  void collect_params(std::vector<Parameter<T>*>& out) override {
    out.push_back(&weight_);
    out.push_back(&bias_);
  }

  const char* kind() const override { return "linear"; }

  std::size_t in_features() const { return in_f_; }
  std::size_t out_features() const { return out_f_; }

 private:
  std::size_t in_f_, out_f_;
  Parameter<T> weight_, bias_;
  Tensor<T> cached_input_;
};

// ---------------------------------------------------------------------------
// residual container: y = inner(x) + proj(x)   (proj defaults to identity)

template <typename T>
class Residual : public Layer<T> {
 public:
  explicit Residual(std::vector<std::unique_ptr<Layer<T>>> inner,
                    std::unique_ptr<Layer<T>> projection = nullptr)
      : inner_(std::move(inner)), projection_(std::move(projection)) {}

  Tensor<T> forward(const Tensor<T>& x, bool training) override {
    Tensor<T> y = x;
    for (auto& layer : inner_) y = layer->forward(y, training);
    Tensor<T> skip = projection_ ? projection_->forward(x, training) : x;
    if (!y.same_shape(skip)) {
      raise(ErrorCode::ShapeError, "residual branch shape " + y.shape_str() +
                                       " does not match skip shape " + skip.shape_str());
    }
    for (std::size_t i = 0; i < y.numel(); ++i) y[i] += skip[i];
    return y;
  }

  Tensor<T> backward(const Tensor<T>& grad_out) override {
    Tensor<T> g = grad_out;
    for (auto it = inner_.rbegin(); it != inner_.rend(); ++it) g = (*it)->backward(g);
    Tensor<T> skip_grad = projection_ ? projection_->backward(grad_out) : grad_out;
    if (!g.same_shape(skip_grad)) raise(ErrorCode::ShapeError, "residual gradient shape mismatch");
    for (std::size_t i = 0; i < g.numel(); ++i) g[i] += skip_grad[i];
    return g;
  }

  void collect_params(std::vector<Parameter<T>*>& out) override {
    for (auto& layer : inner_) layer->collect_params(out);
    if (projection_) projection_->collect_params(out);
  }

  const char* kind() const override { return "residual"; }

 private:
  std::vector<std::unique_ptr<Layer<T>>> inner_;
  std::unique_ptr<Layer<T>> projection_;
};

// ---------------------------------------------------------------------------
// network: named blocks of layers (the freeze policy works at block level)

template <typename T>
struct Block {
  std::string name;
  std::vector<std::unique_ptr<Layer<T>>> layers;
};

template <typename T>
class Network {
 public:
  Network() = default;

  Block<T>& add_block(std::string name) {
    blocks_.push_back(Block<T>{std::move(name), {}});
    return blocks_.back();
  }

  Tensor<T> forward(const Tensor<T>& x, bool training) {
    Tensor<T> y = x;
    for (auto& block : blocks_) {
      for (auto& layer : block.layers) y = layer->forward(y, training);
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& grad_out) {
    Tensor<T> g = grad_out;
    for (auto bit = blocks_.rbegin(); bit != blocks_.rend(); ++bit) {
      for (auto lit = bit->layers.rbegin(); lit != bit->layers.rend(); ++lit) {
        g = (*lit)->backward(g);
      }
    }
    return g;
  }

  std::size_t block_count() const { return blocks_.size(); }
  std::vector<Block<T>>& blocks() { return blocks_; }
  const std::vector<Block<T>>& blocks() const { return blocks_; }

  // Parameters of one block, in declaration order.
  std::vector<Parameter<T>*> block_params(std::size_t block_index) {
    std::vector<Parameter<T>*> out;
    for (auto& layer : blocks_[block_index].layers) layer->collect_params(out);
    return out;
  }

  std::vector<Parameter<T>*> all_params() {
    std::vector<Parameter<T>*> out;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      auto params = block_params(b);
      out.insert(out.end(), params.begin(), params.end());
    }
    return out;
  }

 private:
  std::vector<Block<T>> blocks_;
};

}  // namespace signbench::nn

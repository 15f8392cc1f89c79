#pragma once

#include <cmath>
#include <cstdint>

#include "signbench/error.hpp"
#include "signbench/nn.hpp"
#include "signbench/tensor.hpp"

namespace signbench {

struct AdamHyperParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First/second moment accumulators for one parameter tensor.
template <typename T>
struct AdamState {
  Tensor<T> m;
  Tensor<T> v;
  std::int64_t step = 0;
};

// One bias-corrected Adam update. Only trainable parameters may be passed in;
// the trainer never routes frozen tensors here.
template <typename T>
void adam_step(nn::Parameter<T>& param, AdamState<T>& state, double lr,
               const AdamHyperParams& hp = {}) {
  if (!param.value.same_shape(param.grad)) {
    raise(ErrorCode::ShapeError, "adam_step: gradient shape does not match parameter");
  }
  if (state.m.numel() == 0) {
    state.m = Tensor<T>(param.value.shape());
    state.v = Tensor<T>(param.value.shape());
  }
  if (!state.m.same_shape(param.value)) {
    raise(ErrorCode::ShapeError, "adam_step: optimizer state shape does not match parameter");
  }

  state.step += 1;
  const double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < param.value.numel(); ++i) {
    const double g = static_cast<double>(param.grad[i]);
    const double m = hp.beta1 * static_cast<double>(state.m[i]) + (1.0 - hp.beta1) * g;
    const double v = hp.beta2 * static_cast<double>(state.v[i]) + (1.0 - hp.beta2) * g * g;
    state.m[i] = static_cast<T>(m);
    state.v[i] = static_cast<T>(v);
    const double m_hat = m / bc1;
    const double v_hat = v / bc2;
    param.value[i] =
        static_cast<T>(static_cast<double>(param.value[i]) - lr * m_hat / (std::sqrt(v_hat) + hp.epsilon));
  }
}

}  // namespace signbench

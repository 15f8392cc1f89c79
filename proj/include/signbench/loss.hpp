#pragma once

#include <cmath>
#include <vector>

#include "signbench/error.hpp"
#include "signbench/tensor.hpp"

namespace signbench {

// Mean softmax cross-entropy over a batch, computed with max-subtracted
// log-sum-exp so large logits stay finite.
template <typename T>
T cross_entropy(const Tensor<T>& logits, const std::vector<int>& labels) {
  if (logits.rank() != 2 || logits.dim(0) != labels.size() || labels.empty()) {
    raise(ErrorCode::ShapeError, "cross_entropy expects (B,C) logits and B labels");
  }
  const std::size_t batch = logits.dim(0), classes = logits.dim(1);
  double total = 0.0;
  for (std::size_t n = 0; n < batch; ++n) {
    const int label = labels[n];
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      raise(ErrorCode::LabelRangeError,
            "label " + std::to_string(label) + " outside [0," + std::to_string(classes) + ")");
    }
    const T* row = logits.data() + n * classes;
    T max_logit = row[0];
    for (std::size_t c = 1; c < classes; ++c) max_logit = std::max(max_logit, row[c]);
    double sum_exp = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      sum_exp += std::exp(static_cast<double>(row[c] - max_logit));
    }
    const double log_prob =
        static_cast<double>(row[static_cast<std::size_t>(label)] - max_logit) - std::log(sum_exp);
    total -= log_prob;
  }
  return static_cast<T>(total / static_cast<double>(batch));
}

// Loss plus gradient w.r.t. the logits: (softmax - onehot) / B.
template <typename T>
std::pair<T, Tensor<T>> cross_entropy_with_grad(const Tensor<T>& logits,
                                                const std::vector<int>& labels) {
  const T loss = cross_entropy(logits, labels);  // also validates shape and labels
  const std::size_t batch = logits.dim(0), classes = logits.dim(1);
  Tensor<T> grad(logits.shape());
  for (std::size_t n = 0; n < batch; ++n) {
    const T* row = logits.data() + n * classes;
    T* grow = grad.data() + n * classes;
    T max_logit = row[0];
    for (std::size_t c = 1; c < classes; ++c) max_logit = std::max(max_logit, row[c]);
    double sum_exp = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      sum_exp += std::exp(static_cast<double>(row[c] - max_logit));
    }
    for (std::size_t c = 0; c < classes; ++c) {
      const double softmax = std::exp(static_cast<double>(row[c] - max_logit)) / sum_exp;
      grow[c] = static_cast<T>(softmax / static_cast<double>(batch));
    }
    grow[labels[n]] -= static_cast<T>(1.0 / static_cast<double>(batch));
  }
  return {loss, std::move(grad)};
}

}  // namespace signbench

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "signbench/error.hpp"
#include "signbench/tensor.hpp"

namespace signbench {

// Argmax decision rule; ties resolve to the lowest index.
template <typename T>
std::vector<int> predict_labels(const Tensor<T>& logits) {
  if (logits.rank() != 2) raise(ErrorCode::ShapeError, "predict_labels expects (B,C) logits");
  const std::size_t batch = logits.dim(0), classes = logits.dim(1);
  std::vector<int> out(batch, 0);
  for (std::size_t n = 0; n < batch; ++n) {
    const T* row = logits.data() + n * classes;
    std::size_t best = 0;
    for (std::size_t c = 1; c < classes; ++c) {
      if (row[c] > row[best]) best = c;
    }
    out[n] = static_cast<int>(best);
  }
  return out;
}

// Fraction of predictions equal to labels (micro accuracy; the integer count
// is divided only at the end).
inline double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size() || predictions.empty()) {
    raise(ErrorCode::LengthMismatch,
          "predictions (" + std::to_string(predictions.size()) + ") and labels (" +
              std::to_string(labels.size()) + ") must have equal nonzero length");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

// Full C x C confusion matrix plus per-class one-vs-rest counts.
struct ConfusionCounts {
  int num_classes = 0;
  std::size_t total = 0;
  std::vector<std::int64_t> matrix;  // matrix[true * C + predicted]

  std::int64_t at(int true_class, int predicted) const {
    return matrix[static_cast<std::size_t>(true_class) * num_classes + predicted];
  }
  std::int64_t true_positives(int c) const { return at(c, c); }
  std::int64_t false_negatives(int c) const {
    std::int64_t row = 0;
    for (int p = 0; p < num_classes; ++p) row += at(c, p);
    return row - true_positives(c);
  }
  std::int64_t false_positives(int c) const {
    std::int64_t col = 0;
    for (int m = 0; m < num_classes; ++m) col += at(m, c);
    return col - true_positives(c);
  }
  std::int64_t true_negatives(int c) const {
    return static_cast<std::int64_t>(total) - true_positives(c) - false_negatives(c) -
           false_positives(c);
  }
  std::int64_t trace() const {
    std::int64_t t = 0;
    for (int c = 0; c < num_classes; ++c) t += true_positives(c);
    return t;
  }
  // One-vs-rest accuracy for a single class: (TP + TN) / (TP + TN + FP + FN).
  double per_class_accuracy(int c) const {
    return static_cast<double>(true_positives(c) + true_negatives(c)) /
           static_cast<double>(total);
  }
};

inline ConfusionCounts confusion(const std::vector<int>& predictions,
                                 const std::vector<int>& labels, int num_classes) {
  if (predictions.size() != labels.size() || predictions.empty()) {
    raise(ErrorCode::LengthMismatch, "predictions and labels must have equal nonzero length");
  }
  ConfusionCounts counts;
  counts.num_classes = num_classes;
  counts.total = labels.size();
  counts.matrix.assign(static_cast<std::size_t>(num_classes) * num_classes, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes || predictions[i] < 0 ||
        predictions[i] >= num_classes) {
      raise(ErrorCode::LabelRangeError, "entry " + std::to_string(i) + " outside [0," +
                                            std::to_string(num_classes) + ")");
    }
    ++counts.matrix[static_cast<std::size_t>(labels[i]) * num_classes + predictions[i]];
  }
  return counts;
}

struct EvalReport {
  double accuracy = 0.0;  // trace(confusion) / N
  ConfusionCounts confusion;
  std::size_t sample_count = 0;
  std::string split_name;
};

inline EvalReport evaluate_predictions(const std::vector<int>& predictions,
                                       const std::vector<int>& labels, int num_classes,
                                       std::string split_name) {
  EvalReport report;
  report.confusion = confusion(predictions, labels, num_classes);
  report.sample_count = labels.size();
  report.split_name = std::move(split_name);
  report.accuracy = static_cast<double>(report.confusion.trace()) /
                    static_cast<double>(report.sample_count);
  return report;
}

}  // namespace signbench

#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "signbench/error.hpp"

namespace signbench {

// Step decay: lr = base_lr * gamma^floor(epoch / step_epochs). Evaluated by
// repeated multiplication, which for the stock 0.001/0.1/10 schedule yields
// the exact decimal doubles 1e-3, 1e-4, 1e-5 over the first 30 epochs.
inline double step_lr(std::size_t epoch, double base_lr, double gamma, std::size_t step_epochs) {
  if (step_epochs == 0) raise(ErrorCode::ConfigError, "lr_step_epochs must be >= 1");
  double lr = base_lr;
  for (std::size_t k = 0; k < epoch / step_epochs; ++k) lr *= gamma;
  return lr;
}

// True iff the last `patience` entries never improved on the best value seen
// strictly before them ("improve" = strictly greater). Needs at least
// patience + 1 entries to fire.
inline bool early_stop_check(const std::vector<double>& val_acc_history, std::size_t patience) {
  if (patience < 1) raise(ErrorCode::ConfigError, "patience must be >= 1");
  if (val_acc_history.empty()) raise(ErrorCode::ConfigError, "history must be non-empty");
  const std::size_t n = val_acc_history.size();
  if (n <= patience) return false;
  double best_before = val_acc_history[0];
  for (std::size_t i = 1; i < n - patience; ++i) {
    best_before = std::max(best_before, val_acc_history[i]);
  }
  for (std::size_t i = n - patience; i < n; ++i) {
    if (val_acc_history[i] > best_before) return false;
  }
  return true;
}

}  // namespace signbench

#pragma once

#include "core/matrix.hpp"

namespace dyad {

struct LossResult {
  double loss = 0.0;  // mean over the batch of -log softmax(logits)[target]
  Matrix dlogits;     // (softmax(logits) - targets) / batch
};

// Numerically stabilized by per-row max subtraction (log-sum-exp form).
// Every target row must be one-hot.
LossResult softmax_cross_entropy(const Matrix& logits, const Matrix& targets);

Matrix softmax_rows(const Matrix& logits);

}  // namespace dyad

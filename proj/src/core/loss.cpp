#include "core/loss.hpp"

#include <cmath>

namespace dyad {

Matrix softmax_rows(const Matrix& logits) {
  Matrix p = logits;
  for (size_t i = 0; i < p.rows; ++i) {
    double* row = &p.data[i * p.cols];
    double mx = row[0];
    for (size_t j = 1; j < p.cols; ++j) mx = std::max(mx, row[j]);
    double sum = 0.0;
    for (size_t j = 0; j < p.cols; ++j) {
      row[j] = std::exp(row[j] - mx);
      sum += row[j];
    }
    for (size_t j = 0; j < p.cols; ++j) row[j] /= sum;
  }
  return p;
}

LossResult softmax_cross_entropy(const Matrix& logits, const Matrix& targets) {
  require(logits.same_shape(targets), Err::ShapeMismatch, "softmax_cross_entropy shapes");
  require(logits.cols >= 2, Err::InvalidArgument, "need at least two classes");
  require(logits.rows >= 1, Err::EmptyInput, "empty batch");

  const size_t batch = logits.rows;
  const size_t classes = logits.cols;

  LossResult res;
  res.dlogits = Matrix(batch, classes);
  double total = 0.0;

  for (size_t i = 0; i < batch; ++i) {
    const double* trow = &targets.data[i * classes];
    size_t target = classes;
    for (size_t j = 0; j < classes; ++j) {
      if (trow[j] == 1.0) {
        require(target == classes, Err::InvalidTarget,
                "target row " + std::to_string(i) + " has more than one 1");
        target = j;
      } else {
        require(trow[j] == 0.0, Err::InvalidTarget,
                "target row " + std::to_string(i) + " is not one-hot");
      }
    }
    require(target < classes, Err::InvalidTarget,
            "target row " + std::to_string(i) + " has no 1");

    const double* lrow = &logits.data[i * classes];
    double mx = lrow[0];
    for (size_t j = 1; j < classes; ++j) mx = std::max(mx, lrow[j]);
    double sum = 0.0;
    for (size_t j = 0; j < classes; ++j) sum += std::exp(lrow[j] - mx);
    double log_sum_exp = mx + std::log(sum);
    total += log_sum_exp - lrow[target];

    double* drow = &res.dlogits.data[i * classes];
    for (size_t j = 0; j < classes; ++j)
      drow[j] = std::exp(lrow[j] - mx) / sum / static_cast<double>(batch);
    drow[target] -= 1.0 / static_cast<double>(batch);
  }

  res.loss = total / static_cast<double>(batch);
  return res;
}

}  // namespace dyad

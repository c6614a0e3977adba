#include "core/layers.hpp"

#include <cmath>

namespace dyad {

namespace {

void softmax_rows_inplace(Matrix& m) {
  for (size_t i = 0; i < m.rows; ++i) {
    double* row = &m.data[i * m.cols];
    double mx = row[0];
    for (size_t j = 1; j < m.cols; ++j) mx = std::max(mx, row[j]);
    double sum = 0.0;
    for (size_t j = 0; j < m.cols; ++j) {
      row[j] = std::exp(row[j] - mx);
      sum += row[j];
    }
    for (size_t j = 0; j < m.cols; ++j) row[j] /= sum;
  }
}

}  // namespace

Matrix dense_forward(const DenseLayer& layer, const Matrix& x, DenseCache* cache) {
  require(x.cols == layer.w.cols, Err::ShapeMismatch,
          "dense_forward: input width " + std::to_string(x.cols) + " vs layer fan-in " +
              std::to_string(layer.w.cols));
  Matrix z = matmul_nt(x, layer.w);
  add_row_inplace(z, layer.b);
  if (cache) {
    cache->x = x;
    cache->z = z;
  }
  switch (layer.activation) {
    case Activation::Linear:
      break;
    case Activation::ReLU:
      for (double& v : z.data) v = v > 0.0 ? v : 0.0;
      break;
    case Activation::Softmax:
      softmax_rows_inplace(z);
      break;
  }
  return z;
}

DenseGrads dense_backward(const DenseLayer& layer, const DenseCache& cache, const Matrix& d_out) {
  require(d_out.rows == cache.z.rows && d_out.cols == cache.z.cols, Err::ShapeMismatch,
          "dense_backward: gradient shape");
  Matrix dz = d_out;
  if (layer.activation == Activation::ReLU) {
    for (size_t i = 0; i < dz.size(); ++i)
      if (cache.z.data[i] <= 0.0) dz.data[i] = 0.0;
  }
  DenseGrads g;
  g.dw = matmul_tn(dz, cache.x);
  g.db = col_sums(dz);
  g.dx = matmul(dz, layer.w);
  return g;
}

Matrix dropout_forward(const Matrix& x, double rate, SplitMix64& rng, bool training,
                       Matrix* mask_out) {
  require(rate >= 0.0 && rate < 1.0, Err::InvalidArgument, "dropout rate must lie in [0,1)");
  if (!training || rate == 0.0) {
    if (mask_out) *mask_out = Matrix(x.rows, x.cols, 1.0);
    return x;
  }
  const double scale = 1.0 / (1.0 - rate);
  Matrix mask(x.rows, x.cols);
  for (double& m : mask.data) m = rng.next_double() < rate ? 0.0 : scale;
  Matrix y = dropout_apply_mask(x, mask);
  if (mask_out) *mask_out = std::move(mask);
  return y;
}

Matrix dropout_apply_mask(const Matrix& x, const Matrix& mask) {
  require(x.same_shape(mask), Err::ShapeMismatch, "dropout mask shape");
  Matrix y = x;
  for (size_t i = 0; i < y.size(); ++i) y.data[i] *= mask.data[i];
  return y;
}

Matrix dropout_backward(const Matrix& d_out, const Matrix& mask) {
  return dropout_apply_mask(d_out, mask);
}

void sgd_step(Matrix& param, const Matrix& grad, double learning_rate, double l2_lambda) {
  require(param.same_shape(grad), Err::ShapeMismatch, "sgd_step matrix shape");
  for (size_t i = 0; i < param.size(); ++i)
    param.data[i] -= learning_rate * (grad.data[i] + l2_lambda * param.data[i]);
}

void sgd_step(Vector& param, const Vector& grad, double learning_rate) {
  require(param.size() == grad.size(), Err::ShapeMismatch, "sgd_step vector shape");
  for (size_t i = 0; i < param.size(); ++i) param[i] -= learning_rate * grad[i];
}

}  // namespace dyad

#pragma once

#include "core/matrix.hpp"
#include "core/rng.hpp"

namespace dyad {

enum class Activation { ReLU, Softmax, Linear };

struct DenseLayer {
  Matrix w;  // out x in
  Vector b;  // out
  Activation activation = Activation::Linear;
};

struct DenseCache {
  Matrix x;  // batch x in
  Matrix z;  // batch x out, pre-activation
};

// y = act(x * w^T + b). Softmax is applied per row with max subtraction.
Matrix dense_forward(const DenseLayer& layer, const Matrix& x, DenseCache* cache = nullptr);

struct DenseGrads {
  Matrix dx;
  Matrix dw;
  Vector db;
};

// d_out is the gradient w.r.t. the layer output for ReLU/Linear. A Softmax
// output layer is trained through softmax_cross_entropy, whose dlogits is
// already the pre-activation gradient, so Softmax backward treats d_out as
// the pre-activation gradient directly.
DenseGrads dense_backward(const DenseLayer& layer, const DenseCache& cache, const Matrix& d_out);

// Inverted dropout. In training mode each entry is zeroed independently with
// probability `rate` and survivors are scaled by 1/(1-rate); the mask stores
// that scale (0 for dropped entries), drawn row-major from `rng`. Inference
// mode is the identity with an all-ones mask.
Matrix dropout_forward(const Matrix& x, double rate, SplitMix64& rng, bool training,
                       Matrix* mask_out = nullptr);

// Replays a stored mask; used by training backward and by gradient checks.
Matrix dropout_apply_mask(const Matrix& x, const Matrix& mask);
Matrix dropout_backward(const Matrix& d_out, const Matrix& mask);

// p <- p - lr * (g + l2 * p). Biases are updated with l2 = 0.
void sgd_step(Matrix& param, const Matrix& grad, double learning_rate, double l2_lambda);
void sgd_step(Vector& param, const Vector& grad, double learning_rate);

}  // namespace dyad

#pragma once

#include "core/matrix.hpp"

namespace dyad {

// Standard LSTM cell, sequence-to-one:
//   i = sigmoid(Wi x + Ui h + bi)   f = sigmoid(Wf x + Uf h + bf)
//   g = tanh   (Wg x + Ug h + bg)   o = sigmoid(Wo x + Uo h + bo)
//   c_t = f . c_{t-1} + i . g       h_t = o . tanh(c_t)
// Hidden and cell state start at zero; only the final hidden state feeds the
// next layer.
struct LstmLayer {
  size_t input_size = 0;
  size_t hidden_size = 0;
  Matrix wi, wf, wg, wo;  // hidden x input
  Matrix ui, uf, ug, uo;  // hidden x hidden
  Vector bi, bf, bg, bo;  // hidden
};

LstmLayer make_lstm_layer(size_t input_size, size_t hidden_size);

struct LstmStepCache {
  Vector x, i, f, g, o, c, tanh_c, c_prev, h_prev;
};

struct LstmCache {
  std::vector<LstmStepCache> steps;
};

Vector lstm_forward(const LstmLayer& layer, const std::vector<Vector>& sequence,
                    LstmCache* cache = nullptr);

// Gradients for all 12 parameter blocks.
struct LstmGrads {
  Matrix dwi, dwf, dwg, dwo;
  Matrix dui, duf, dug, duo;
  Vector dbi, dbf, dbg, dbo;
};

LstmGrads make_lstm_grads(const LstmLayer& layer);
void accumulate(LstmGrads& into, const LstmGrads& from);

// Full backpropagation through time from a gradient on the final hidden
// state; no truncation.
LstmGrads lstm_backward(const LstmLayer& layer, const LstmCache& cache, const Vector& dh_last);

}  // namespace dyad

#include "core/lstm.hpp"

#include <cmath>

namespace dyad {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Vector gate_preact(const Matrix& w, const Matrix& u, const Vector& b, const Vector& x,
                   const Vector& h) {
  Vector a = matvec(w, x);
  Vector uh = matvec(u, h);
  for (size_t k = 0; k < a.size(); ++k) a[k] += uh[k] + b[k];
  return a;
}

}  // namespace

LstmLayer make_lstm_layer(size_t input_size, size_t hidden_size) {
  LstmLayer l;
  l.input_size = input_size;
  l.hidden_size = hidden_size;
  l.wi = l.wf = l.wg = l.wo = Matrix(hidden_size, input_size);
  l.ui = l.uf = l.ug = l.uo = Matrix(hidden_size, hidden_size);
  l.bi = l.bf = l.bg = l.bo = Vector(hidden_size, 0.0);
  return l;
}

Vector lstm_forward(const LstmLayer& layer, const std::vector<Vector>& sequence,
                    LstmCache* cache) {
  require(!sequence.empty(), Err::EmptySequence, "lstm_forward: empty sequence");
  const size_t H = layer.hidden_size;
  Vector h(H, 0.0), c(H, 0.0);
  if (cache) {
    cache->steps.clear();
    cache->steps.reserve(sequence.size());
  }

  for (const Vector& x : sequence) {
    require(x.size() == layer.input_size, Err::ShapeMismatch,
            "lstm_forward: step width " + std::to_string(x.size()) + " vs input size " +
                std::to_string(layer.input_size));
    Vector ai = gate_preact(layer.wi, layer.ui, layer.bi, x, h);
    Vector af = gate_preact(layer.wf, layer.uf, layer.bf, x, h);
    Vector ag = gate_preact(layer.wg, layer.ug, layer.bg, x, h);
    Vector ao = gate_preact(layer.wo, layer.uo, layer.bo, x, h);

    LstmStepCache step;
    step.x = x;
    step.c_prev = c;
    step.h_prev = h;
    step.i.resize(H);
    step.f.resize(H);
    step.g.resize(H);
    step.o.resize(H);
    step.c.resize(H);
    step.tanh_c.resize(H);

    for (size_t k = 0; k < H; ++k) {
      step.i[k] = sigmoid(ai[k]);
      step.f[k] = sigmoid(af[k]);
      step.g[k] = std::tanh(ag[k]);
      step.o[k] = sigmoid(ao[k]);
      step.c[k] = step.f[k] * step.c_prev[k] + step.i[k] * step.g[k];
      step.tanh_c[k] = std::tanh(step.c[k]);
      h[k] = step.o[k] * step.tanh_c[k];
    }
    c = step.c;
    if (cache) cache->steps.push_back(std::move(step));
  }
  return h;
}

LstmGrads make_lstm_grads(const LstmLayer& layer) {
  LstmGrads g;
  g.dwi = g.dwf = g.dwg = g.dwo = Matrix(layer.hidden_size, layer.input_size);
  g.dui = g.duf = g.dug = g.duo = Matrix(layer.hidden_size, layer.hidden_size);
  g.dbi = g.dbf = g.dbg = g.dbo = Vector(layer.hidden_size, 0.0);
  return g;
}

void accumulate(LstmGrads& into, const LstmGrads& from) {
  auto addm = [](Matrix& a, const Matrix& b) {
    for (size_t i = 0; i < a.size(); ++i) a.data[i] += b.data[i];
  };
  addm(into.dwi, from.dwi);
  addm(into.dwf, from.dwf);
  addm(into.dwg, from.dwg);
  addm(into.dwo, from.dwo);
  addm(into.dui, from.dui);
  addm(into.duf, from.duf);
  addm(into.dug, from.dug);
  addm(into.duo, from.duo);
  add_inplace(into.dbi, from.dbi);
  add_inplace(into.dbf, from.dbf);
  add_inplace(into.dbg, from.dbg);
  add_inplace(into.dbo, from.dbo);
}

LstmGrads lstm_backward(const LstmLayer& layer, const LstmCache& cache, const Vector& dh_last) {
  require(!cache.steps.empty(), Err::EmptySequence, "lstm_backward: empty cache");
  require(dh_last.size() == layer.hidden_size, Err::ShapeMismatch, "lstm_backward: dh size");

  const size_t H = layer.hidden_size;
  LstmGrads g = make_lstm_grads(layer);

  Vector dh = dh_last;
  Vector dc(H, 0.0);
  Vector dai(H), daf(H), dag(H), dao(H);

  for (size_t t = cache.steps.size(); t-- > 0;) {
    const LstmStepCache& s = cache.steps[t];
    for (size_t k = 0; k < H; ++k) {
      double tc = s.tanh_c[k];
      dao[k] = dh[k] * tc * s.o[k] * (1.0 - s.o[k]);
      dc[k] += dh[k] * s.o[k] * (1.0 - tc * tc);
      dai[k] = dc[k] * s.g[k] * s.i[k] * (1.0 - s.i[k]);
      daf[k] = dc[k] * s.c_prev[k] * s.f[k] * (1.0 - s.f[k]);
      dag[k] = dc[k] * s.i[k] * (1.0 - s.g[k] * s.g[k]);
    }

    add_outer_inplace(g.dwi, dai, s.x);
    add_outer_inplace(g.dwf, daf, s.x);
    add_outer_inplace(g.dwg, dag, s.x);
    add_outer_inplace(g.dwo, dao, s.x);
    add_outer_inplace(g.dui, dai, s.h_prev);
    add_outer_inplace(g.duf, daf, s.h_prev);
    add_outer_inplace(g.dug, dag, s.h_prev);
    add_outer_inplace(g.duo, dao, s.h_prev);
    add_inplace(g.dbi, dai);
    add_inplace(g.dbf, daf);
    add_inplace(g.dbg, dag);
    add_inplace(g.dbo, dao);

    Vector dh_prev = matvec_t(layer.ui, dai);
    Vector tmp = matvec_t(layer.uf, daf);
    add_inplace(dh_prev, tmp);
    tmp = matvec_t(layer.ug, dag);
    add_inplace(dh_prev, tmp);
    tmp = matvec_t(layer.uo, dao);
    add_inplace(dh_prev, tmp);

    for (size_t k = 0; k < H; ++k) dc[k] *= s.f[k];
    dh = std::move(dh_prev);
  }
  return g;
}

}  // namespace dyad

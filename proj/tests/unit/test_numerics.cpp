#include <doctest.h>

#include <cmath>

#include "core/layers.hpp"
#include "core/loss.hpp"
#include "core/network.hpp"
#include "core/rng.hpp"
#include "core/selftest.hpp"

using namespace dyad;

namespace {

Matrix random_matrix(size_t r, size_t c, SplitMix64& rng, double scale = 1.0) {
  Matrix m(r, c);
  for (double& v : m.data) v = rng.uniform(-scale, scale);
  return m;
}

}  // namespace

TEST_CASE("dense_forward: identity weights") {
  DenseLayer l;
  l.w = Matrix(2, 2);
  l.w(0, 0) = l.w(1, 1) = 1.0;
  l.b = Vector(2, 0.0);
  Matrix x(1, 2);
  x(0, 0) = 1.0;
  x(0, 1) = -2.0;

  l.activation = Activation::Linear;
  Matrix y = dense_forward(l, x);
  CHECK(y(0, 0) == 1.0);
  CHECK(y(0, 1) == -2.0);

  l.activation = Activation::ReLU;
  y = dense_forward(l, x);
  CHECK(y(0, 0) == 1.0);
  CHECK(y(0, 1) == 0.0);
}

TEST_CASE("dense_forward: softmax of uniform logits") {
  DenseLayer l;
  l.w = Matrix(4, 3);  // zero weights
  l.b = Vector(4, 0.0);
  l.activation = Activation::Softmax;
  Matrix x(2, 3, 1.5);
  Matrix y = dense_forward(l, x);
  for (size_t i = 0; i < y.size(); ++i) CHECK(y.data[i] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("dense_forward matches a scalar triple-loop oracle") {
  SplitMix64 rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    size_t batch = 1 + rng.next_below(6);
    size_t in = 1 + rng.next_below(8);
    size_t out = 1 + rng.next_below(8);
    DenseLayer l;
    l.w = random_matrix(out, in, rng);
    l.b = Vector(out);
    for (double& v : l.b) v = rng.uniform(-1, 1);
    l.activation = Activation::Linear;
    Matrix x = random_matrix(batch, in, rng);
    Matrix y = dense_forward(l, x);
    for (size_t i = 0; i < batch; ++i)
      for (size_t j = 0; j < out; ++j) {
        double acc = l.b[j];
        for (size_t k = 0; k < in; ++k) acc += x(i, k) * l.w(j, k);
        CHECK(std::fabs(y(i, j) - acc) <= 1e-12 * std::max(1.0, std::fabs(acc)));
      }
  }
}

TEST_CASE("dense_forward: shape mismatch raises") {
  DenseLayer l;
  l.w = Matrix(2, 3);
  l.b = Vector(2, 0.0);
  Matrix x(1, 4);
  CHECK_THROWS_AS(dense_forward(l, x), Error);
}

TEST_CASE("softmax rows sum to one with entries in (0,1)") {
  SplitMix64 rng(66);
  Matrix logits = random_matrix(16, 5, rng, 10.0);
  Matrix p = softmax_rows(logits);
  for (size_t i = 0; i < p.rows; ++i) {
    double sum = 0;
    for (size_t j = 0; j < p.cols; ++j) {
      CHECK(p(i, j) > 0.0);
      CHECK(p(i, j) < 1.0);
      sum += p(i, j);
    }
    CHECK(std::fabs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("softmax_cross_entropy: uniform logits give ln C") {
  Matrix logits(3, 4);
  Matrix targets(3, 4);
  targets(0, 0) = targets(1, 2) = targets(2, 3) = 1.0;
  LossResult res = softmax_cross_entropy(logits, targets);
  CHECK(std::fabs(res.loss - std::log(4.0)) < 1e-12);
  CHECK(res.loss == doctest::Approx(1.3862944).epsilon(1e-6));
}

TEST_CASE("softmax_cross_entropy: saturated correct prediction") {
  Matrix logits(1, 4);
  logits(0, 0) = 30.0;
  Matrix targets(1, 4);
  targets(0, 0) = 1.0;
  LossResult res = softmax_cross_entropy(logits, targets);
  CHECK(res.loss < 1e-12);
  CHECK(res.loss >= 0.0);
}

TEST_CASE("softmax_cross_entropy: extreme logits stay finite") {
  Matrix logits(2, 3);
  logits(0, 0) = 1000.0;
  logits(0, 1) = -1000.0;
  logits(1, 2) = 900.0;
  Matrix targets(2, 3);
  targets(0, 1) = 1.0;
  targets(1, 2) = 1.0;
  LossResult res = softmax_cross_entropy(logits, targets);
  CHECK(std::isfinite(res.loss));
  for (double v : res.dlogits.data) CHECK(std::isfinite(v));
}

TEST_CASE("softmax_cross_entropy: non-one-hot targets are rejected") {
  Matrix logits(1, 3);
  Matrix targets(1, 3);
  CHECK_THROWS_AS(softmax_cross_entropy(logits, targets), Error);  // no 1
  targets(0, 0) = targets(0, 1) = 1.0;
  CHECK_THROWS_AS(softmax_cross_entropy(logits, targets), Error);  // two 1s
  targets(0, 1) = 0.5;
  CHECK_THROWS_AS(softmax_cross_entropy(logits, targets), Error);  // fractional
  try {
    softmax_cross_entropy(logits, targets);
  } catch (const Error& e) {
    CHECK(e.code() == Err::InvalidTarget);
  }
}

TEST_CASE("softmax_cross_entropy gradient matches finite differences at 1e-6") {
  GradCheckResult res = check_softmax_ce_gradients(0xCE11, 10, 1e-6);
  CHECK(res.checked > 0);
  CHECK(res.max_rel_err < 1e-6);
}

TEST_CASE("dense and dropout-composed gradients match finite differences") {
  GradCheckResult dense = check_dense_gradients(0xAB01, 8, 1e-5);
  CHECK(dense.max_rel_err < 1e-5);
  GradCheckResult dropped = check_dropout_gradients(0xAB02, 8, 1e-5);
  CHECK(dropped.max_rel_err < 1e-5);
}

TEST_CASE("dropout: degenerate rate and inference mode are the identity") {
  SplitMix64 rng(4);
  Matrix x = random_matrix(4, 6, rng);
  Matrix mask;
  Matrix y = dropout_forward(x, 0.0, rng, true, &mask);
  CHECK(y.data == x.data);
  for (double v : mask.data) CHECK(v == 1.0);

  Matrix z = dropout_forward(x, 0.9, rng, false, &mask);
  CHECK(z.data == x.data);
  for (double v : mask.data) CHECK(v == 1.0);
}

TEST_CASE("dropout: sampling statistics at rate 0.15") {
  SplitMix64 rng(8);
  Matrix x(1000, 1000, 1.0);
  Matrix mask;
  Matrix y = dropout_forward(x, 0.15, rng, true, &mask);
  size_t zeros = 0;
  double mean = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    if (mask.data[i] == 0.0) ++zeros;
    mean += y.data[i];
  }
  double frac = static_cast<double>(zeros) / static_cast<double>(y.size());
  mean /= static_cast<double>(y.size());
  CHECK(std::fabs(frac - 0.15) < 0.002);
  CHECK(std::fabs(mean - 1.0) < 0.01);  // inverted scaling preserves the mean
}

TEST_CASE("relu is idempotent") {
  SplitMix64 rng(21);
  DenseLayer id;
  id.w = Matrix(5, 5);
  for (size_t i = 0; i < 5; ++i) id.w(i, i) = 1.0;
  id.b = Vector(5, 0.0);
  id.activation = Activation::ReLU;
  Matrix x = random_matrix(9, 5, rng, 3.0);
  Matrix once = dense_forward(id, x);
  Matrix twice = dense_forward(id, once);
  CHECK(once.data == twice.data);
}

TEST_CASE("sgd_step: fixed point, closed form, weight decay") {
  Matrix p(1, 1);
  p(0, 0) = 0.75;
  Matrix zero_grad(1, 1);
  sgd_step(p, zero_grad, 0.5, 0.0);
  CHECK(p(0, 0) == 0.75);  // no gradient, no decay: untouched

  p(0, 0) = 1.0;
  sgd_step(p, zero_grad, 0.1, 1.0);
  CHECK(p(0, 0) == doctest::Approx(0.9).epsilon(1e-15));

  // with decay alone every weight magnitude strictly shrinks
  SplitMix64 rng(31);
  Matrix w = random_matrix(4, 4, rng);
  Matrix before = w;
  sgd_step(w, Matrix(4, 4), 0.01, 0.1);
  for (size_t i = 0; i < w.size(); ++i)
    if (before.data[i] != 0.0) CHECK(std::fabs(w.data[i]) < std::fabs(before.data[i]));
}

TEST_CASE("sgd on a quadratic bowl shrinks the parameter norm monotonically") {
  // loss 0.5*||p||^2 has gradient p
  SplitMix64 rng(37);
  Matrix p = random_matrix(3, 3, rng, 5.0);
  double prev = 1e300;
  for (int step = 0; step < 200; ++step) {
    double norm = 0;
    for (double v : p.data) norm += v * v;
    CHECK(norm < prev);
    prev = norm;
    Matrix grad = p;
    sgd_step(p, grad, 0.1, 0.0);
  }
  CHECK(prev < 1e-8);
}

TEST_CASE("fresh networks start at ln C loss") {
  for (uint32_t classes : {2u, 4u}) {
    NetworkSpec spec;
    spec.name = "t";
    spec.hidden_sizes = {25, 12};
    spec.output_size = classes;
    spec.learning_rate = 1e-4;
    spec.epochs = 1;
    Network net = build(spec, 7);

    SplitMix64 rng(9);
    Matrix x = random_matrix(32, kFeatureCount, rng);
    Matrix targets(32, classes);
    for (size_t i = 0; i < 32; ++i) targets(i, rng.next_below(classes)) = 1.0;

    auto loss_of = [&](const Network& n) {
      Matrix cur = x;
      for (size_t li = 0; li < n.dense.size(); ++li) {
        DenseCache cache;
        cur = dense_forward(n.dense[li], cur, &cache);
        if (li + 1 == n.dense.size()) cur = cache.z;
      }
      return softmax_cross_entropy(cur, targets).loss;
    };

    double lnc = std::log(static_cast<double>(classes));
    CHECK(std::fabs(loss_of(net) - lnc) / lnc < 0.05);  // He-uniform init stays near uniform

    for (double& v : net.dense.back().w.data) v = 0.0;
    for (double& v : net.dense.back().b) v = 0.0;
    CHECK(std::fabs(loss_of(net) - lnc) < 1e-9);  // exactly ln C with a zeroed head
  }
}

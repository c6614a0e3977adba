#include <doctest.h>

#include <cmath>

#include "core/features.hpp"
#include "core/rng.hpp"

using namespace dyad;

namespace {

TrajectoryReading random_reading(SplitMix64& rng, double t) {
  TrajectoryReading r;
  r.t = t;
  for (auto& v : r.p1) v = rng.uniform(-20, 20);
  for (auto& v : r.p2) v = rng.uniform(-20, 20);
  for (auto& v : r.v1) v = rng.uniform(-3, 3);
  for (auto& v : r.v2) v = rng.uniform(-3, 3);
  r.vt1 = rng.uniform(0, 3);
  r.vt2 = rng.uniform(0, 3);
  return r;
}

// brute-force oracle: the three derived quantities recomputed scalar by
// scalar, no shared code with the implementation
void oracle_derived(const TrajectoryReading& r, double& dist, double& vel_rel, double& vel_tot) {
  double acc = 0.0;
  double deltas[3] = {r.p2[0] - r.p1[0], r.p2[1] - r.p1[1], r.p2[2] - r.p1[2]};
  for (double d : deltas) acc += d * d;
  dist = std::sqrt(acc);
  vel_rel = r.vt1 > r.vt2 ? r.vt1 - r.vt2 : r.vt2 - r.vt1;
  vel_tot = 0.5 * r.vt1 + 0.5 * r.vt2;
}

}  // namespace

TEST_CASE("derived features: 3-4-5 triangle") {
  TrajectoryReading r;
  r.p1 = {0, 0, 0};
  r.p2 = {3, 4, 0};
  r.vt1 = 1.2;
  r.vt2 = 1.0;
  DerivedFeatures d = derived_features(r);
  CHECK(d.dist == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(d.vel_relative == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(d.vel_total == doctest::Approx(1.1).epsilon(1e-12));
}

TEST_CASE("derived features: coincident pedestrians") {
  TrajectoryReading r;
  r.p1 = {2.5, -1.0, 1.0};
  r.p2 = r.p1;
  r.vt1 = 1.3;
  r.vt2 = 1.3;
  DerivedFeatures d = derived_features(r);
  CHECK(d.dist == 0.0);
  CHECK(d.vel_relative == 0.0);
  CHECK(d.vel_total == 1.3);
}

TEST_CASE("derived features match the scalar-loop oracle on 1000 random readings") {
  SplitMix64 rng(42);
  for (int i = 0; i < 1000; ++i) {
    TrajectoryReading r = random_reading(rng, i);
    DerivedFeatures d = derived_features(r);
    double dist, vel_rel, vel_tot;
    oracle_derived(r, dist, vel_rel, vel_tot);
    CHECK(std::fabs(d.dist - dist) <= 1e-12 * std::max(1.0, dist));
    CHECK(std::fabs(d.vel_relative - vel_rel) <= 1e-12 * std::max(1.0, vel_rel));
    CHECK(std::fabs(d.vel_total - vel_tot) <= 1e-12 * std::max(1.0, vel_tot));
  }
}

TEST_CASE("derived features: translation invariance and pedestrian symmetry") {
  SplitMix64 rng(7);
  for (int i = 0; i < 200; ++i) {
    TrajectoryReading r = random_reading(rng, i);
    DerivedFeatures d = derived_features(r);

    TrajectoryReading shifted = r;
    double off[3] = {rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50)};
    for (int k = 0; k < 3; ++k) {
      shifted.p1[k] += off[k];
      shifted.p2[k] += off[k];
    }
    DerivedFeatures ds = derived_features(shifted);
    CHECK(std::fabs(ds.dist - d.dist) <= 1e-12 * std::max(1.0, d.dist));

    TrajectoryReading swapped = r;
    std::swap(swapped.p1, swapped.p2);
    std::swap(swapped.v1, swapped.v2);
    std::swap(swapped.vt1, swapped.vt2);
    DerivedFeatures dw = derived_features(swapped);
    CHECK(dw.dist == d.dist);
    CHECK(dw.vel_relative == d.vel_relative);
    CHECK(dw.vel_total == d.vel_total);

    CHECK(d.vel_total >= std::min(r.vt1, r.vt2));
    CHECK(d.vel_total <= std::max(r.vt1, r.vt2));
  }
}

TEST_CASE("experiment_to_vector: single reading") {
  SplitMix64 rng(3);
  Experiment e;
  e.id = "x";
  e.readings.push_back(random_reading(rng, 4.0));
  FeatureVector f = experiment_to_vector(e);
  CHECK(f[0] == 0.0);  // duration of a single reading
  const TrajectoryReading& r = e.readings[0];
  CHECK(f[1] == r.p1[0]);
  CHECK(f[11] == r.vt1);
  DerivedFeatures d = derived_features(r);
  CHECK(f[13] == d.dist);
  CHECK(f[14] == d.vel_relative);
  CHECK(f[15] == d.vel_total);
}

TEST_CASE("experiment_to_vector: duration and means") {
  Experiment e;
  e.id = "x";
  TrajectoryReading a, b;
  a.t = 1.0;
  a.p1 = {0, 0, 0};
  b.t = 3.5;
  b.p1 = {2, 0, 0};
  e.readings = {a, b};
  FeatureVector f = experiment_to_vector(e);
  CHECK(f[0] == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(f[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("experiment_to_vector matches an accumulation oracle on random experiments") {
  SplitMix64 rng(11);
  Experiment e;
  e.id = "r";
  for (int i = 0; i < 50; ++i) e.readings.push_back(random_reading(rng, i * 0.5));
  FeatureVector f = experiment_to_vector(e);

  // independent accumulation over explicit slots
  double sums[16] = {0};
  for (const auto& r : e.readings) {
    double dist, vel_rel, vel_tot;
    oracle_derived(r, dist, vel_rel, vel_tot);
    double slots[16] = {0,       r.p1[0], r.p1[1], r.p1[2], r.p2[0], r.p2[1], r.p2[2], r.v1[0],
                        r.v1[1], r.v2[0], r.v2[1], r.vt1,   r.vt2,   dist,    vel_rel, vel_tot};
    for (int k = 1; k < 16; ++k) sums[k] += slots[k];
  }
  for (int k = 1; k < 16; ++k) {
    double expected = sums[k] / 50.0;
    CHECK(std::fabs(f[k] - expected) <= 1e-12 * std::max(1.0, std::fabs(expected)));
  }
  CHECK(f[0] == e.readings.back().t - e.readings.front().t);
}

TEST_CASE("experiment_to_vector: slots 2-16 are permutation-invariant, slot 1 is not") {
  SplitMix64 rng(13);
  Experiment e;
  e.id = "p";
  for (int i = 0; i < 10; ++i) e.readings.push_back(random_reading(rng, i + 1.0));
  FeatureVector f = experiment_to_vector(e);

  Experiment rev = e;
  // keep times increasing to preserve validity, permute everything else
  for (size_t i = 0; i < rev.readings.size(); ++i) {
    rev.readings[i] = e.readings[e.readings.size() - 1 - i];
    rev.readings[i].t = e.readings[i].t;
  }
  FeatureVector g = experiment_to_vector(rev);
  for (int k = 1; k < 16; ++k)
    CHECK(std::fabs(f[k] - g[k]) <= 1e-12 * std::max(1.0, std::fabs(f[k])));
}

TEST_CASE("experiment_to_sequence preserves length and per-step features") {
  SplitMix64 rng(17);
  Experiment e;
  e.id = "s";
  e.label = RelationshipLabel::Couple;
  for (int i = 0; i < 7; ++i) e.readings.push_back(random_reading(rng, i * 0.5));
  FeatureSequence seq = experiment_to_sequence(e);
  REQUIRE(seq.steps.size() == 7);
  CHECK(seq.label == RelationshipLabel::Couple);
  for (size_t i = 0; i < 7; ++i) {
    CHECK(seq.steps[i][0] == e.readings[i].t);  // raw detection time in slot 1
    DerivedFeatures d = derived_features(e.readings[i]);
    CHECK(seq.steps[i][13] == d.dist);
    CHECK(seq.steps[i][14] == d.vel_relative);
    CHECK(seq.steps[i][15] == d.vel_total);
  }
}

TEST_CASE("standardizer: two-point example") {
  FeatureVector zeros, twos;
  zeros.v.fill(0.0);
  twos.v.fill(2.0);
  std::vector<FeatureVector> xs = {zeros, twos};
  Standardizer s = fit_standardizer(xs);
  for (int i = 0; i < kFeatureCount; ++i) {
    CHECK(s.mean[i] == 1.0);
    CHECK(s.stddev[i] == 1.0);
  }
  FeatureVector applied = apply_standardizer(s, zeros);
  for (int i = 0; i < kFeatureCount; ++i) CHECK(applied[i] == -1.0);
}

TEST_CASE("standardizer: centering and unit variance on random data") {
  SplitMix64 rng(23);
  std::vector<FeatureVector> xs(200);
  for (auto& x : xs)
    for (int i = 0; i < kFeatureCount; ++i) x[i] = rng.normal(5.0 * i, 1.0 + 0.2 * i);
  Standardizer s = fit_standardizer(xs);

  double mean[kFeatureCount] = {0};
  double var[kFeatureCount] = {0};
  for (const auto& x : xs) {
    FeatureVector z = apply_standardizer(s, x);
    for (int i = 0; i < kFeatureCount; ++i) mean[i] += z[i];
  }
  for (int i = 0; i < kFeatureCount; ++i) mean[i] /= 200.0;
  for (const auto& x : xs) {
    FeatureVector z = apply_standardizer(s, x);
    for (int i = 0; i < kFeatureCount; ++i) var[i] += (z[i] - mean[i]) * (z[i] - mean[i]);
  }
  for (int i = 0; i < kFeatureCount; ++i) {
    CHECK(std::fabs(mean[i]) < 1e-12);
    CHECK(std::fabs(var[i] / 200.0 - 1.0) < 1e-10);
  }
}

TEST_CASE("standardizer: zero-variance component shifts only") {
  std::vector<FeatureVector> xs(5);
  for (auto& x : xs) x.v.fill(3.0);
  Standardizer s = fit_standardizer(xs);
  CHECK(s.stddev[0] == 1.0);
  FeatureVector z = apply_standardizer(s, xs[0]);
  CHECK(z[0] == 0.0);
}

TEST_CASE("standardizer: empty fit is rejected") {
  std::vector<FeatureVector> xs;
  CHECK_THROWS_AS(fit_standardizer(xs), Error);
}

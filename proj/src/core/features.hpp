#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "core/dataset.hpp"

namespace dyad {

inline constexpr int kFeatureCount = 16;

// Fixed slot order of the 16-component input representation:
//   [0]  duration (averaged vectors) or raw detection time t (sequence steps)
//   [1..3]  p1x p1y p1z      [4..6]  p2x p2y p2z
//   [7..8]  v1x v1y          [9..10] v2x v2y
//   [11] vt1   [12] vt2
//   [13] dist  [14] vel_relative  [15] vel_total
struct FeatureVector {
  std::array<double, kFeatureCount> v{};

  double& operator[](size_t i) { return v[i]; }
  double operator[](size_t i) const { return v[i]; }
};

struct FeatureSequence {
  std::vector<FeatureVector> steps;
  RelationshipLabel label = RelationshipLabel::Colleagues;
};

struct DerivedFeatures {
  double dist;          // interpersonal distance, 3-component Euclidean norm
  double vel_relative;  // |vt1 - vt2|
  double vel_total;     // (vt1 + vt2) / 2
};

DerivedFeatures derived_features(const TrajectoryReading& r);

// Per-experiment averaging: slots 1..15 are arithmetic means over readings,
// slot 0 is t_last - t_first.
FeatureVector experiment_to_vector(const Experiment& e);

// Per-reading assembly for the recurrent models: one step per reading, slot 0
// carries the raw detection time.
FeatureSequence experiment_to_sequence(const Experiment& e);

// Z-score standardization fitted on training data only. Population form
// (divisor n); zero-variance components keep stddev 1 so apply() only
// centers them.
struct Standardizer {
  std::array<double, kFeatureCount> mean{};
  std::array<double, kFeatureCount> stddev{};

  Standardizer() {
    mean.fill(0.0);
    stddev.fill(1.0);
  }
};

Standardizer fit_standardizer(std::span<const FeatureVector> vectors);
FeatureVector apply_standardizer(const Standardizer& s, const FeatureVector& x);

inline constexpr const char* kFeaturesCsvHeader =
    "duration,p1x,p1y,p1z,p2x,p2y,p2z,v1x,v1y,v2x,v2y,vt1,vt2,dist,vel_rel,vel_tot,label";

// One averaged feature row per experiment plus its label.
void write_features_csv(const Dataset& ds, const std::string& path);

}  // namespace dyad

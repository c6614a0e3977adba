#include "core/features.hpp"

#include <cmath>
#include <fstream>

#include "core/text.hpp"

namespace dyad {

DerivedFeatures derived_features(const TrajectoryReading& r) {
  double dx = r.p2[0] - r.p1[0];
  double dy = r.p2[1] - r.p1[1];
  double dz = r.p2[2] - r.p1[2];
  DerivedFeatures d;
  d.dist = std::sqrt(dx * dx + dy * dy + dz * dz);
  d.vel_relative = std::fabs(r.vt1 - r.vt2);
  d.vel_total = (r.vt1 + r.vt2) / 2.0;
  return d;
}

namespace {

FeatureVector reading_features(const TrajectoryReading& r, double slot0) {
  DerivedFeatures d = derived_features(r);
  FeatureVector f;
  f.v = {slot0,   r.p1[0], r.p1[1], r.p1[2], r.p2[0], r.p2[1],        r.p2[2], r.v1[0],
         r.v1[1], r.v2[0], r.v2[1], r.vt1,   r.vt2,   d.dist, d.vel_relative, d.vel_total};
  return f;
}

}  // namespace

FeatureVector experiment_to_vector(const Experiment& e) {
  validate_experiment(e);
  FeatureVector acc;
  for (const auto& r : e.readings) {
    FeatureVector step = reading_features(r, 0.0);
    for (int i = 1; i < kFeatureCount; ++i) acc[i] += step[i];
  }
  const double n = static_cast<double>(e.readings.size());
  for (int i = 1; i < kFeatureCount; ++i) acc[i] /= n;
  acc[0] = e.readings.back().t - e.readings.front().t;
  return acc;
}

FeatureSequence experiment_to_sequence(const Experiment& e) {
  validate_experiment(e);
  FeatureSequence seq;
  seq.label = e.label;
  seq.steps.reserve(e.readings.size());
  for (const auto& r : e.readings) seq.steps.push_back(reading_features(r, r.t));
  return seq;
}

Standardizer fit_standardizer(std::span<const FeatureVector> vectors) {
  require(!vectors.empty(), Err::EmptyInput, "fit_standardizer needs at least one vector");
  Standardizer s;
  const double n = static_cast<double>(vectors.size());
  for (int i = 0; i < kFeatureCount; ++i) {
    double mean = 0.0;
    for (const auto& v : vectors) mean += v[i];
    mean /= n;
    double var = 0.0;
    for (const auto& v : vectors) {
      double d = v[i] - mean;
      var += d * d;
    }
    var /= n;
    s.mean[i] = mean;
    s.stddev[i] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

FeatureVector apply_standardizer(const Standardizer& s, const FeatureVector& x) {
  FeatureVector out;
  for (int i = 0; i < kFeatureCount; ++i) out[i] = (x[i] - s.mean[i]) / s.stddev[i];
  return out;
}

void write_features_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Err::Io, "cannot write '" + path + "'");
  out << kFeaturesCsvHeader << "\n";
  for (const auto& e : ds.experiments) {
    FeatureVector f = experiment_to_vector(e);
    for (int i = 0; i < kFeatureCount; ++i) {
      if (i) out << ',';
      out << format_double(f[i]);
    }
    out << ',' << label_name(e.label) << "\n";
  }
  require(out.good(), Err::Io, "write failed for '" + path + "'");
}

}  // namespace dyad

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace dyad {

// The four relationship categories, stable integer encoding 0..3.
enum class RelationshipLabel : int { Colleagues = 0, Couple = 1, Family = 2, Friendship = 3 };

// The coarsened two-category space: colleagues vs everyone closer.
enum class BinaryLabel : int { Acquaintances = 0, Intimate = 1 };

inline constexpr int kNumLabels = 4;
inline constexpr int kNumBinaryLabels = 2;

const char* label_name(RelationshipLabel l);
const char* binary_label_name(BinaryLabel l);

// Parses the lowercase names used in data files. Throws UnknownLabel.
RelationshipLabel parse_label(std::string_view name);

BinaryLabel merge_to_binary(RelationshipLabel l);

// One timestamped tracker sample of the pair: 13 scalars.
struct TrajectoryReading {
  double t = 0.0;
  std::array<double, 3> p1{};  // position of pedestrian 1, meters
  std::array<double, 3> p2{};
  std::array<double, 2> v1{};  // planar velocity of pedestrian 1, m/s
  std::array<double, 2> v2{};
  double vt1 = 0.0;  // total (scalar) velocity of pedestrian 1, m/s
  double vt2 = 0.0;
};

// One labeled accompaniment episode: a time-ordered reading sequence.
struct Experiment {
  std::string id;
  std::vector<TrajectoryReading> readings;
  RelationshipLabel label = RelationshipLabel::Colleagues;
};

struct Dataset {
  std::vector<Experiment> experiments;

  std::array<uint64_t, kNumLabels> label_counts() const;
  std::array<uint64_t, kNumBinaryLabels> binary_counts() const;
  size_t size() const { return experiments.size(); }
};

// CSV schema (UTF-8, comma separator, period decimals, header required):
//   exp_id,t,p1x,p1y,p1z,p2x,p2y,p2z,v1x,v1y,v2x,v2y,vt1,vt2,label
// Rows of one experiment must be contiguous and strictly increasing in t.
inline constexpr const char* kDatasetCsvHeader =
    "exp_id,t,p1x,p1y,p1z,p2x,p2y,p2z,v1x,v1y,v2x,v2y,vt1,vt2,label";

Dataset load_dataset(const std::string& path);
void write_dataset(const Dataset& ds, const std::string& path);

// Seeded Fisher-Yates shuffle of experiments; the first floor(n*fraction)
// form the training set. Throws EmptySplit when either side would be empty.
std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, double train_fraction, uint64_t seed);

// Validates one experiment against the data-model invariants; used by the
// loader and by the generator's output checks.
void validate_experiment(const Experiment& e);

}  // namespace dyad

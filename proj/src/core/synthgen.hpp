#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "core/dataset.hpp"

namespace dyad {

// Category-conditioned kinematics for one relationship label. Values are test
// instrumentation, not claims about human behavior; defaults live in
// data/profiles/*.conf.
struct CategoryProfile {
  double dist_mean = 0.0;     // interpersonal distance, meters
  double dist_jitter = 0.0;   // per-reading stddev
  double speed_mean = 0.0;    // pair walking speed, m/s
  double speed_jitter = 0.0;  // per-reading stddev
  double speed_asym = 0.0;    // |vt1 - vt2|, constant per experiment
  double duration_min = 0.0;  // seconds
  double duration_max = 0.0;
  double period = 0.0;        // sampling period, seconds
};

using ProfileMap = std::array<CategoryProfile, kNumLabels>;

enum class ProfileMode { Separable, Overlapping };

ProfileMode parse_profile_mode(std::string_view name);  // "separable" | "overlapping"

// separable: every category pair is >= 5 jitter-stddevs apart on at least the
// distance feature. overlapping: at least two categories sit within one
// jitter-stddev of each other on every profiled feature.
ProfileMap default_profiles(ProfileMode mode);

// Key-value file `<category>.<field>=<value>` applied on top of `base`.
ProfileMap load_profiles(const std::string& path, const ProfileMap& base);

void validate_profiles(const ProfileMap& profiles);

// Straight-line constant-heading walks with Gaussian jitter. Each experiment
// draws from its own splitmix stream derived from (seed, experiment index),
// so generation order and thread count cannot change the output. `jobs` > 1
// fills experiments in parallel.
Dataset generate_dataset(const ProfileMap& profiles, const std::array<uint64_t, kNumLabels>& counts,
                 uint64_t seed, unsigned jobs = 1);

}  // namespace dyad

#include "core/synthgen.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "core/profiles_embedded.hpp"
#include "core/rng.hpp"
#include "core/text.hpp"

namespace dyad {

ProfileMode parse_profile_mode(std::string_view name) {
  if (name == "separable") return ProfileMode::Separable;
  if (name == "overlapping") return ProfileMode::Overlapping;
  raise(Err::InvalidArgument, "unknown profile mode '" + std::string(name) +
                                  "', expected 'separable' or 'overlapping'");
}

namespace {

struct FieldRef {
  const char* name;
  double CategoryProfile::* member;
};

constexpr FieldRef kFields[] = {
    {"dist_mean", &CategoryProfile::dist_mean},
    {"dist_jitter", &CategoryProfile::dist_jitter},
    {"speed_mean", &CategoryProfile::speed_mean},
    {"speed_jitter", &CategoryProfile::speed_jitter},
    {"speed_asym", &CategoryProfile::speed_asym},
    {"duration_min", &CategoryProfile::duration_min},
    {"duration_max", &CategoryProfile::duration_max},
    {"period", &CategoryProfile::period},
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

ProfileMap parse_profiles(std::string_view text, const ProfileMap& base) {
  ProfileMap out = base;
  size_t line_no = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    size_t eq = line.find('=');
    require(eq != std::string_view::npos, Err::InvalidProfile,
            "profiles line " + std::to_string(line_no) + ": expected key=value");
    std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));

    size_t dot = key.find('.');
    require(dot != std::string_view::npos, Err::InvalidProfile,
            "profiles line " + std::to_string(line_no) + ": key must be <category>.<field>");
    RelationshipLabel label;
    try {
      label = parse_label(key.substr(0, dot));
    } catch (const Error&) {
      raise(Err::InvalidProfile, "profiles line " + std::to_string(line_no) +
                                     ": unknown category '" + std::string(key.substr(0, dot)) +
                                     "'");
    }
    std::string_view field = key.substr(dot + 1);
    double v;
    require(parse_double(value, v), Err::InvalidProfile,
            "profiles line " + std::to_string(line_no) + ": non-numeric value");

    bool matched = false;
    for (const auto& f : kFields) {
      if (field == f.name) {
        out[static_cast<size_t>(label)].*(f.member) = v;
        matched = true;
        break;
      }
    }
    require(matched, Err::InvalidProfile, "profiles line " + std::to_string(line_no) +
                                              ": unknown field '" + std::string(field) + "'");
  }
  return out;
}

}  // namespace

void validate_profiles(const ProfileMap& profiles) {
  for (int l = 0; l < kNumLabels; ++l) {
    const CategoryProfile& p = profiles[l];
    const std::string who = std::string("profile '") + label_name(static_cast<RelationshipLabel>(l)) + "'";
    require(p.dist_mean >= 0.0 && p.speed_mean >= 0.0 && p.speed_asym >= 0.0, Err::InvalidProfile,
            who + ": means must be >= 0");
    require(p.dist_jitter >= 0.0 && p.speed_jitter >= 0.0, Err::InvalidProfile,
            who + ": jitters must be >= 0");
    require(p.duration_min > 0.0 && p.duration_max >= p.duration_min, Err::InvalidProfile,
            who + ": duration range must be positive");
    require(p.period > 0.0, Err::InvalidProfile, who + ": period must be > 0");
  }
}

ProfileMap default_profiles(ProfileMode mode) {
  ProfileMap base{};
  const char* text = mode == ProfileMode::Separable ? embedded::kSeparableProfiles
                                                    : embedded::kOverlappingProfiles;
  ProfileMap out = parse_profiles(text, base);
  validate_profiles(out);
  return out;
}

ProfileMap load_profiles(const std::string& path, const ProfileMap& base) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Err::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  ProfileMap out = parse_profiles(ss.str(), base);
  validate_profiles(out);
  return out;
}

namespace {

Experiment generate_experiment(const CategoryProfile& p, RelationshipLabel label,
                               uint64_t per_label_index, uint64_t stream_seed) {
  SplitMix64 rng(stream_seed);

  const double duration = rng.uniform(p.duration_min, p.duration_max);
  const double heading = rng.uniform(0.0, 6.28318530717958647692);
  const double dir_x = std::cos(heading);
  const double dir_y = std::sin(heading);
  const double nrm_x = -dir_y;
  const double nrm_y = dir_x;
  const size_t n_steps = static_cast<size_t>(std::floor(duration / p.period)) + 1;

  Experiment e;
  {
    char id[48];
    std::snprintf(id, sizeof(id), "%s_%05llu", label_name(label),
                  static_cast<unsigned long long>(per_label_index));
    e.id = id;
  }
  e.label = label;
  e.readings.reserve(n_steps);

  double cx = 0.0, cy = 0.0;
  for (size_t s = 0; s < n_steps; ++s) {
    const double pair_speed = std::max(0.05, rng.normal(p.speed_mean, p.speed_jitter));
    const double dist = std::max(0.05, rng.normal(p.dist_mean, p.dist_jitter));
    if (s > 0) {
      cx += pair_speed * p.period * dir_x;
      cy += pair_speed * p.period * dir_y;
    }

    TrajectoryReading r;
    r.t = static_cast<double>(s) * p.period;
    const double hx = 0.5 * dist * nrm_x;
    const double hy = 0.5 * dist * nrm_y;
    r.p1 = {cx + hx, cy + hy, 1.0};
    r.p2 = {cx - hx, cy - hy, 1.0};
    r.vt1 = pair_speed + 0.5 * p.speed_asym;
    r.vt2 = std::max(0.0, pair_speed - 0.5 * p.speed_asym);
    r.v1 = {r.vt1 * dir_x, r.vt1 * dir_y};
    r.v2 = {r.vt2 * dir_x, r.vt2 * dir_y};
    e.readings.push_back(r);
  }
  return e;
}

}  // namespace

Dataset generate_dataset(const ProfileMap& profiles, const std::array<uint64_t, kNumLabels>& counts,
                 uint64_t seed, unsigned jobs) {
  validate_profiles(profiles);

  struct Slot {
    RelationshipLabel label;
    uint64_t per_label_index;
    uint64_t stream_seed;
  };
  std::vector<Slot> slots;
  uint64_t exp_index = 0;
  for (int l = 0; l < kNumLabels; ++l) {
    for (uint64_t k = 0; k < counts[static_cast<size_t>(l)]; ++k) {
      slots.push_back({static_cast<RelationshipLabel>(l), k, SplitMix64::mix(seed, exp_index)});
      ++exp_index;
    }
  }

  Dataset ds;
  ds.experiments.resize(slots.size());
  auto fill_range = [&](size_t lo, size_t hi) {
    for (size_t i = lo; i < hi; ++i) {
      const Slot& s = slots[i];
      ds.experiments[i] = generate_experiment(profiles[static_cast<size_t>(s.label)], s.label,
                                              s.per_label_index, s.stream_seed);
    }
  };

  if (jobs <= 1 || slots.size() < 2) {
    fill_range(0, slots.size());
  } else {
    unsigned n_threads = std::min<unsigned>(jobs, std::thread::hardware_concurrency());
    n_threads = std::max(1u, std::min<unsigned>(n_threads, static_cast<unsigned>(slots.size())));
    std::vector<std::thread> workers;
    size_t chunk = (slots.size() + n_threads - 1) / n_threads;
    for (unsigned w = 0; w < n_threads; ++w) {
      size_t lo = w * chunk;
      size_t hi = std::min(slots.size(), lo + chunk);
      if (lo >= hi) break;
      workers.emplace_back(fill_range, lo, hi);
    }
    for (auto& t : workers) t.join();
  }

  for (const auto& e : ds.experiments) validate_experiment(e);
  return ds;
}

}  // namespace dyad

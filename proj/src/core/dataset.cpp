#include "core/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "core/rng.hpp"
#include "core/text.hpp"

namespace dyad {

const char* label_name(RelationshipLabel l) {
  switch (l) {
    case RelationshipLabel::Colleagues: return "colleagues";
    case RelationshipLabel::Couple: return "couple";
    case RelationshipLabel::Family: return "family";
    case RelationshipLabel::Friendship: return "friendship";
  }
  return "?";
}

const char* binary_label_name(BinaryLabel l) {
  return l == BinaryLabel::Acquaintances ? "acquaintances" : "intimate";
}

RelationshipLabel parse_label(std::string_view name) {
  for (int i = 0; i < kNumLabels; ++i) {
    auto l = static_cast<RelationshipLabel>(i);
    if (name == label_name(l)) return l;
  }
  raise(Err::UnknownLabel, "unknown relationship label '" + std::string(name) + "'");
}

BinaryLabel merge_to_binary(RelationshipLabel l) {
  return l == RelationshipLabel::Colleagues ? BinaryLabel::Acquaintances : BinaryLabel::Intimate;
}

std::array<uint64_t, kNumLabels> Dataset::label_counts() const {
  std::array<uint64_t, kNumLabels> counts{};
  for (const auto& e : experiments) counts[static_cast<int>(e.label)]++;
  return counts;
}

std::array<uint64_t, kNumBinaryLabels> Dataset::binary_counts() const {
  std::array<uint64_t, kNumBinaryLabels> counts{};
  for (const auto& e : experiments) counts[static_cast<int>(merge_to_binary(e.label))]++;
  return counts;
}

void validate_experiment(const Experiment& e) {
  require(!e.readings.empty(), Err::MalformedRow, "experiment '" + e.id + "' has no readings");
  double prev_t = 0.0;
  bool first = true;
  for (const auto& r : e.readings) {
    const double comps[13] = {r.t,     r.p1[0], r.p1[1], r.p1[2], r.p2[0], r.p2[1], r.p2[2],
                              r.v1[0], r.v1[1], r.v2[0], r.v2[1], r.vt1,   r.vt2};
    for (double c : comps)
      require(std::isfinite(c), Err::MalformedRow,
              "experiment '" + e.id + "' has a non-finite component");
    require(r.vt1 >= 0.0 && r.vt2 >= 0.0, Err::MalformedRow,
            "experiment '" + e.id + "' has a negative total velocity");
    if (!first)
      require(r.t > prev_t, Err::NonMonotonicTime,
              "experiment '" + e.id + "' time not strictly increasing at t=" + format_double(r.t));
    prev_t = r.t;
    first = false;
  }
}

namespace {

double parse_field(std::string_view field, size_t line_no, const char* what) {
  double v;
  if (!parse_double(field, v))
    raise(Err::MalformedRow, "line " + std::to_string(line_no) + ": non-numeric " +
                                 std::string(what) + " field '" + std::string(field) + "'");
  return v;
}

}  // namespace

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Err::Io, "cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) raise(Err::EmptyFile, "'" + path + "' is empty");
  require(trim_cr(line) == kDatasetCsvHeader, Err::MalformedRow,
          "bad header, expected '" + std::string(kDatasetCsvHeader) + "'");

  Dataset ds;
  std::unordered_set<std::string> closed_ids;
  Experiment* current = nullptr;
  size_t line_no = 1;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = trim_cr(line);
    if (sv.empty()) continue;
    auto fields = split_on(sv, ',');
    require(fields.size() == 15, Err::MalformedRow,
            "line " + std::to_string(line_no) + ": expected 15 fields, got " +
                std::to_string(fields.size()));

    std::string id(fields[0]);
    TrajectoryReading r;
    r.t = parse_field(fields[1], line_no, "t");
    for (int i = 0; i < 3; ++i) r.p1[i] = parse_field(fields[2 + i], line_no, "p1");
    for (int i = 0; i < 3; ++i) r.p2[i] = parse_field(fields[5 + i], line_no, "p2");
    for (int i = 0; i < 2; ++i) r.v1[i] = parse_field(fields[8 + i], line_no, "v1");
    for (int i = 0; i < 2; ++i) r.v2[i] = parse_field(fields[10 + i], line_no, "v2");
    r.vt1 = parse_field(fields[12], line_no, "vt1");
    r.vt2 = parse_field(fields[13], line_no, "vt2");
    RelationshipLabel label = parse_label(fields[14]);

    const double comps[13] = {r.t,     r.p1[0], r.p1[1], r.p1[2], r.p2[0], r.p2[1], r.p2[2],
                              r.v1[0], r.v1[1], r.v2[0], r.v2[1], r.vt1,   r.vt2};
    for (double c : comps)
      require(std::isfinite(c), Err::MalformedRow,
              "line " + std::to_string(line_no) + ": non-finite value");
    require(r.vt1 >= 0.0 && r.vt2 >= 0.0, Err::MalformedRow,
            "line " + std::to_string(line_no) + ": total velocity must be >= 0");

    if (current == nullptr || current->id != id) {
      require(!closed_ids.count(id), Err::MalformedRow,
              "line " + std::to_string(line_no) + ": experiment '" + id +
                  "' reappears; rows per experiment must be contiguous");
      if (current != nullptr) closed_ids.insert(current->id);
      ds.experiments.push_back(Experiment{id, {}, label});
      current = &ds.experiments.back();
    } else {
      require(current->label == label, Err::MalformedRow,
              "line " + std::to_string(line_no) + ": label changes within experiment '" + id + "'");
      require(r.t > current->readings.back().t, Err::NonMonotonicTime,
              "line " + std::to_string(line_no) + ": t not strictly increasing in '" + id + "'");
    }
    current->readings.push_back(r);
  }

  require(!ds.experiments.empty(), Err::EmptyFile, "'" + path + "' has no data rows");
  for (const auto& e : ds.experiments) validate_experiment(e);
  return ds;
}

void write_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Err::Io, "cannot write '" + path + "'");
  out << kDatasetCsvHeader << "\n";
  for (const auto& e : ds.experiments) {
    for (const auto& r : e.readings) {
      out << e.id << ',' << format_double(r.t);
      for (double c : r.p1) out << ',' << format_double(c);
      for (double c : r.p2) out << ',' << format_double(c);
      for (double c : r.v1) out << ',' << format_double(c);
      for (double c : r.v2) out << ',' << format_double(c);
      out << ',' << format_double(r.vt1) << ',' << format_double(r.vt2) << ','
          << label_name(e.label) << "\n";
    }
  }
  require(out.good(), Err::Io, "write failed for '" + path + "'");
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, double train_fraction,
                                          uint64_t seed) {
  require(!ds.experiments.empty(), Err::EmptyInput, "cannot split an empty dataset");
  require(train_fraction > 0.0 && train_fraction < 1.0, Err::InvalidArgument,
          "train_fraction must lie in (0,1)");

  const size_t n = ds.experiments.size();
  const size_t n_train =
      static_cast<size_t>(std::floor(static_cast<double>(n) * train_fraction));
  require(n_train > 0 && n_train < n, Err::EmptySplit,
          "split " + format_double(train_fraction) + " of " + std::to_string(n) +
              " experiments leaves one side empty");

  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  SplitMix64 rng(seed);
  shuffle(order, rng);

  Dataset train, test;
  train.experiments.reserve(n_train);
  test.experiments.reserve(n - n_train);
  for (size_t i = 0; i < n; ++i) {
    (i < n_train ? train : test).experiments.push_back(ds.experiments[order[i]]);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace dyad

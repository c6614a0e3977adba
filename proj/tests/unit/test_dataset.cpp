#include <doctest.h>

#include <set>

#include "core/dataset.hpp"
#include "core/rng.hpp"
#include "core/synthgen.hpp"
#include "test_util.hpp"

using namespace dyad;
using testutil::TempDir;

namespace {

const char* kTwoRowFamily =
    "exp_id,t,p1x,p1y,p1z,p2x,p2y,p2z,v1x,v1y,v2x,v2y,vt1,vt2,label\n"
    "e1,0.0,0,0,1,0.6,0,1,1,0,1,0,1,1,family\n"
    "e1,0.5,0.5,0,1,1.1,0,1,1,0,1,0,1,1,family\n";

Err load_error(const std::string& path) {
  try {
    load_dataset(path);
  } catch (const Error& e) {
    return e.code();
  }
  return Err::Ok;
}

// minimal in-code dataset builder for split tests
Dataset trivial_dataset(size_t n) {
  Dataset ds;
  for (size_t i = 0; i < n; ++i) {
    Experiment e;
    e.id = "e" + std::to_string(i);
    e.label = static_cast<RelationshipLabel>(i % kNumLabels);
    TrajectoryReading r;
    r.p1 = {0, 0, 1};
    r.p2 = {1, 0, 1};
    r.vt1 = r.vt2 = 1.0;
    e.readings.push_back(r);
    ds.experiments.push_back(std::move(e));
  }
  return ds;
}

}  // namespace

TEST_CASE("load_dataset: minimal valid file") {
  TempDir dir;
  testutil::write_file(dir.file("ok.csv"), kTwoRowFamily);
  Dataset ds = load_dataset(dir.file("ok.csv"));
  REQUIRE(ds.size() == 1);
  CHECK(ds.experiments[0].readings.size() == 2);
  auto counts = ds.label_counts();
  CHECK(counts[static_cast<int>(RelationshipLabel::Family)] == 1);
  CHECK(counts[0] + counts[1] + counts[3] == 0);
}

TEST_CASE("load_dataset: error taxonomy") {
  TempDir dir;
  auto write = [&](const char* name, const std::string& content) {
    testutil::write_file(dir.file(name), content);
    return dir.file(name);
  };
  const std::string header = "exp_id,t,p1x,p1y,p1z,p2x,p2y,p2z,v1x,v1y,v2x,v2y,vt1,vt2,label\n";

  CHECK(load_error(write("empty.csv", "")) == Err::EmptyFile);
  CHECK(load_error(write("header_only.csv", header)) == Err::EmptyFile);
  CHECK(load_error(write("bad_header.csv", "a,b,c\nrow\n")) == Err::MalformedRow);
  CHECK(load_error(write("unknown_label.csv",
                         header + "e1,0,0,0,1,1,0,1,1,0,1,0,1,1,enemy\n")) == Err::UnknownLabel);
  CHECK(load_error(write("short_row.csv", header + "e1,0,0,0,1,1,0,1,1,0,1,0,1,family\n")) ==
        Err::MalformedRow);
  CHECK(load_error(write("non_numeric.csv",
                         header + "e1,zero,0,0,1,1,0,1,1,0,1,0,1,1,family\n")) ==
        Err::MalformedRow);
  CHECK(load_error(write("nan_field.csv", header + "e1,0,nan,0,1,1,0,1,1,0,1,0,1,1,family\n")) ==
        Err::MalformedRow);
  CHECK(load_error(write("neg_vt.csv", header + "e1,0,0,0,1,1,0,1,1,0,1,0,-1,1,family\n")) ==
        Err::MalformedRow);
  CHECK(load_error(write("dup_time.csv", header + "e1,1,0,0,1,1,0,1,1,0,1,0,1,1,family\n" +
                                             "e1,1,0,0,1,1,0,1,1,0,1,0,1,1,family\n")) ==
        Err::NonMonotonicTime);
  CHECK(load_error(write("dec_time.csv", header + "e1,1,0,0,1,1,0,1,1,0,1,0,1,1,family\n" +
                                             "e1,0.5,0,0,1,1,0,1,1,0,1,0,1,1,family\n")) ==
        Err::NonMonotonicTime);
  CHECK(load_error(write("reappear.csv", header + "e1,0,0,0,1,1,0,1,1,0,1,0,1,1,family\n" +
                                             "e2,0,0,0,1,1,0,1,1,0,1,0,1,1,couple\n" +
                                             "e1,1,0,0,1,1,0,1,1,0,1,0,1,1,family\n")) ==
        Err::MalformedRow);
  CHECK(load_error(write("label_flip.csv", header + "e1,0,0,0,1,1,0,1,1,0,1,0,1,1,family\n" +
                                               "e1,1,0,0,1,1,0,1,1,0,1,0,1,1,couple\n")) ==
        Err::MalformedRow);
}

TEST_CASE("load_dataset: fuzzed single-field corruption is always rejected") {
  TempDir dir;
  SplitMix64 rng(314);
  const std::string base = kTwoRowFamily;
  for (int trial = 0; trial < 60; ++trial) {
    std::string mutated = base;
    switch (rng.next_below(5)) {
      case 0:  // corrupt a numeric char into a letter
      {
        size_t pos = base.find('\n') + 1 + rng.next_below(base.size() - base.find('\n') - 3);
        if (std::isdigit(static_cast<unsigned char>(mutated[pos]))) mutated[pos] = 'x';
        break;
      }
      case 1:  // duplicate the last data row (repeats t)
        mutated += "e1,0.5,0.5,0,1,1.1,0,1,1,0,1,0,1,1,family\n";
        break;
      case 2:  // negative total velocity
        mutated = base.substr(0, base.rfind("1,1,family")) + "-2,1,family\n";
        break;
      case 3:  // label typo
        mutated = base.substr(0, base.rfind("family")) + "famly\n";
        break;
      case 4:  // drop one field from the final row
        mutated = base;
        mutated.erase(base.rfind(",1,1,family"), 2);
        break;
    }
    if (mutated == base) continue;
    testutil::write_file(dir.file("fuzz.csv"), mutated);
    try {
      Dataset ds = load_dataset(dir.file("fuzz.csv"));
      // a mutation that survives must still satisfy every invariant
      for (const auto& e : ds.experiments) validate_experiment(e);
    } catch (const Error&) {
      // rejected, as intended
    }
  }
}

TEST_CASE("dataset round-trip is byte-identical for canonical files") {
  TempDir dir;
  auto profiles = default_profiles(ProfileMode::Separable);
  Dataset ds = generate_dataset(profiles, {3, 2, 4, 1}, 5);
  write_dataset(ds, dir.file("a.csv"));
  Dataset loaded = load_dataset(dir.file("a.csv"));
  write_dataset(loaded, dir.file("b.csv"));
  CHECK(testutil::read_file(dir.file("a.csv")) == testutil::read_file(dir.file("b.csv")));
  CHECK(loaded.size() == ds.size());
}

TEST_CASE("split_dataset: 867 at 0.9 gives 780/87") {
  Dataset ds = trivial_dataset(867);
  auto [train, test] = split_dataset(ds, 0.9, 42);
  CHECK(train.size() == 780);
  CHECK(test.size() == 87);
}

TEST_CASE("split_dataset: deterministic partition, union and disjointness") {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    size_t n = 5 + rng.next_below(200);
    double fraction = 0.2 + 0.6 * rng.next_double();
    uint64_t seed = rng.next_u64();
    Dataset ds = trivial_dataset(n);
    size_t n_train = static_cast<size_t>(std::floor(n * fraction));
    if (n_train == 0 || n_train == n) continue;

    auto [train1, test1] = split_dataset(ds, fraction, seed);
    auto [train2, test2] = split_dataset(ds, fraction, seed);
    CHECK(train1.size() == n_train);
    CHECK(train1.size() + test1.size() == n);

    std::vector<std::string> ids1, ids2;
    for (const auto& e : train1.experiments) ids1.push_back(e.id);
    for (const auto& e : train2.experiments) ids2.push_back(e.id);
    CHECK(ids1 == ids2);  // same seed, same partition

    std::set<std::string> seen;
    for (const auto& e : train1.experiments) CHECK(seen.insert(e.id).second);
    for (const auto& e : test1.experiments) CHECK(seen.insert(e.id).second);
    CHECK(seen.size() == n);
  }
}

TEST_CASE("split_dataset: boundary arithmetic") {
  Dataset two = trivial_dataset(2);
  auto [train, test] = split_dataset(two, 0.99, 1);  // floor(2*0.99)=1
  CHECK(train.size() == 1);
  CHECK(test.size() == 1);

  Dataset one = trivial_dataset(1);
  CHECK_THROWS_AS(split_dataset(one, 0.5, 1), Error);
  try {
    split_dataset(one, 0.5, 1);
  } catch (const Error& e) {
    CHECK(e.code() == Err::EmptySplit);
  }
  CHECK_THROWS_AS(split_dataset(two, 1.5, 1), Error);  // fraction out of range
}

TEST_CASE("merge_to_binary: mapping, totality, reference distribution") {
  CHECK(merge_to_binary(RelationshipLabel::Colleagues) == BinaryLabel::Acquaintances);
  CHECK(merge_to_binary(RelationshipLabel::Couple) == BinaryLabel::Intimate);
  CHECK(merge_to_binary(RelationshipLabel::Family) == BinaryLabel::Intimate);
  CHECK(merge_to_binary(RelationshipLabel::Friendship) == BinaryLabel::Intimate);

  // surjective onto both binary values
  std::set<BinaryLabel> image;
  for (int i = 0; i < kNumLabels; ++i)
    image.insert(merge_to_binary(static_cast<RelationshipLabel>(i)));
  CHECK(image.size() == 2);

  // the published category distribution folds to 267 / 600
  const uint64_t dist[kNumLabels] = {267, 96, 218, 286};
  uint64_t merged[2] = {0, 0};
  for (int i = 0; i < kNumLabels; ++i)
    merged[static_cast<int>(merge_to_binary(static_cast<RelationshipLabel>(i)))] += dist[i];
  CHECK(merged[0] == 267);
  CHECK(merged[1] == 600);
}

TEST_CASE("label names parse back to themselves") {
  for (int i = 0; i < kNumLabels; ++i) {
    auto l = static_cast<RelationshipLabel>(i);
    CHECK(parse_label(label_name(l)) == l);
  }
  CHECK_THROWS_AS(parse_label("enemy"), Error);
}

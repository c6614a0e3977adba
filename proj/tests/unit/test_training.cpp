#include <doctest.h>

#include <cmath>
#include <set>

#include "core/evaluation.hpp"
#include "core/synthgen.hpp"
#include "core/training.hpp"
#include "test_util.hpp"

using namespace dyad;
using testutil::TempDir;

namespace {

NetworkSpec small_spec(const char* name, std::vector<uint32_t> hidden, uint32_t out,
                       uint32_t epochs, double lr) {
  NetworkSpec spec;
  spec.name = name;
  spec.hidden_sizes = std::move(hidden);
  spec.output_size = out;
  spec.learning_rate = lr;
  spec.epochs = epochs;
  return spec;
}

Dataset separable_dataset(size_t per_label, uint64_t seed) {
  auto profiles = default_profiles(ProfileMode::Separable);
  return generate_dataset(profiles, {per_label, per_label, per_label, per_label}, seed);
}

std::string model_bytes(const Network& net, TempDir& dir, const char* name) {
  std::string path = dir.file(name);
  save_model(net, path);
  return testutil::read_file(path);
}

}  // namespace

TEST_CASE("train: vanishing learning rate leaves parameters effectively unchanged") {
  Dataset ds = separable_dataset(15, 4);
  NetworkSpec spec = small_spec("t", {8, 4}, 4, 3, 1e-300);
  TrainConfig cfg = default_train_config(spec);
  cfg.seed = 21;

  TrainResult res = train(spec, ds, cfg);
  Network fresh = build(spec, cfg.seed);
  fresh.standardizer = res.network.standardizer;  // the only trained-in state

  // updates of order lr vanish against every parameter except the handful of
  // exact zeros, which pick up +-1e-300 denormals
  for (size_t li = 0; li < fresh.dense.size(); ++li) {
    for (size_t k = 0; k < fresh.dense[li].w.size(); ++k)
      CHECK(std::fabs(res.network.dense[li].w.data[k] - fresh.dense[li].w.data[k]) <= 1e-290);
    for (size_t k = 0; k < fresh.dense[li].b.size(); ++k)
      CHECK(std::fabs(res.network.dense[li].b[k] - fresh.dense[li].b[k]) <= 1e-290);
  }

  EvalResult untrained = evaluate(fresh, ds);
  EvalResult trained = evaluate(res.network, ds);
  CHECK(untrained.accuracy == trained.accuracy);
}

TEST_CASE("train: identical inputs give identical reports and models") {
  TempDir dir;
  Dataset ds = separable_dataset(12, 5);
  NetworkSpec spec = small_spec("t", {12, 6}, 4, 12, 0.01);
  spec.dropout_rate = 0.1;  // exercise the stochastic path too
  TrainConfig cfg = default_train_config(spec);
  cfg.seed = 99;
  cfg.batch_size = 8;

  TrainResult a = train(spec, ds, cfg);
  TrainResult b = train(spec, ds, cfg);
  CHECK(render_train_report(a.report) == render_train_report(b.report));
  CHECK(model_bytes(a.network, dir, "a.bin") == model_bytes(b.network, dir, "b.bin"));
  CHECK(a.test_predictions.rows.size() == b.test_predictions.rows.size());
  for (size_t i = 0; i < a.test_predictions.rows.size(); ++i) {
    CHECK(a.test_predictions.rows[i].exp_id == b.test_predictions.rows[i].exp_id);
    CHECK(a.test_predictions.rows[i].predicted == b.test_predictions.rows[i].predicted);
  }
}

TEST_CASE("train: first-epoch loss of a fresh 4-class model is near ln 4") {
  Dataset ds = separable_dataset(15, 6);
  NetworkSpec spec = small_spec("t", {16, 8}, 4, 1, 1e-6);
  TrainConfig cfg = default_train_config(spec);
  cfg.seed = 3;
  TrainResult res = train(spec, ds, cfg);
  REQUIRE(res.report.epochs.size() == 1);
  double lnc = std::log(4.0);
  CHECK(std::fabs(res.report.epochs[0].mean_loss - lnc) / lnc < 0.05);
}

TEST_CASE("train: loss trend falls on separable data and the model learns") {
  Dataset ds = separable_dataset(30, 7);
  NetworkSpec spec = small_spec("t", {16, 8}, 4, 150, 0.02);
  TrainConfig cfg = default_train_config(spec);
  cfg.seed = 11;
  TrainResult res = train(spec, ds, cfg);

  size_t tenth = res.report.epochs.size() / 10;
  REQUIRE(tenth >= 1);
  double head = 0, tail = 0;
  for (size_t i = 0; i < tenth; ++i) head += res.report.epochs[i].mean_loss;
  for (size_t i = res.report.epochs.size() - tenth; i < res.report.epochs.size(); ++i)
    tail += res.report.epochs[i].mean_loss;
  CHECK(head / tenth >= tail / tenth);
  CHECK(res.report.final_train_accuracy >= 90.0);

  // epochs are listed contiguously from 1
  for (size_t i = 0; i < res.report.epochs.size(); ++i)
    CHECK(res.report.epochs[i].epoch == i + 1);
}

TEST_CASE("train: test-split labels cannot influence the trained parameters") {
  TempDir dir;
  Dataset ds = separable_dataset(12, 8);
  NetworkSpec spec = small_spec("t", {8, 4}, 4, 10, 0.01);
  TrainConfig cfg = default_train_config(spec);
  cfg.seed = 17;

  // find the test membership for this seed and split
  auto [train_ds, test_ds] = split_dataset(ds, cfg.train_fraction, cfg.seed);
  std::set<std::string> test_ids;
  for (const auto& e : test_ds.experiments) test_ids.insert(e.id);

  Dataset perturbed = ds;
  for (auto& e : perturbed.experiments)
    if (test_ids.count(e.id))
      e.label = static_cast<RelationshipLabel>((static_cast<int>(e.label) + 1) % kNumLabels);

  TrainResult a = train(spec, ds, cfg);
  TrainResult b = train(spec, perturbed, cfg);
  CHECK(model_bytes(a.network, dir, "a.bin") == model_bytes(b.network, dir, "b.bin"));
  CHECK(a.report.final_train_accuracy == b.report.final_train_accuracy);
}

TEST_CASE("train: two-class models score against merged truth") {
  Dataset ds = separable_dataset(15, 9);
  NetworkSpec spec = small_spec("t", {12, 6}, 2, 120, 0.02);
  TrainConfig cfg = default_train_config(spec);
  cfg.seed = 5;
  TrainResult res = train(spec, ds, cfg);
  CHECK(res.train_predictions.binary);
  CHECK(res.report.final_train_accuracy >= 90.0);  // binary split is even easier
  for (const auto& row : res.train_predictions.rows) {
    CHECK(row.truth >= 0);
    CHECK(row.truth < 2);
  }
}

TEST_CASE("train: class coverage precondition") {
  auto profiles = default_profiles(ProfileMode::Separable);
  Dataset three = generate_dataset(profiles, {10, 10, 10, 0}, 3);
  NetworkSpec spec = small_spec("t", {8}, 4, 2, 0.01);
  TrainConfig cfg = default_train_config(spec);
  CHECK_THROWS_AS(train(spec, three, cfg), Error);

  // two-class training only needs both merged categories present
  Dataset two = generate_dataset(profiles, {10, 10, 0, 0}, 3);
  NetworkSpec bspec = small_spec("t", {8}, 2, 2, 0.01);
  TrainConfig bcfg = default_train_config(bspec);
  bcfg.seed = 1;
  CHECK_NOTHROW(train(bspec, two, bcfg));
}

TEST_CASE("train: degenerate split coverage is a warning, not an error") {
  auto profiles = default_profiles(ProfileMode::Separable);
  // 19 colleagues + 1 couple: some split side will miss categories entirely
  Dataset ds = generate_dataset(profiles, {19, 1, 0, 0}, 12);
  NetworkSpec spec = small_spec("t", {8}, 2, 2, 0.01);
  TrainConfig cfg = default_train_config(spec);
  cfg.seed = 2;
  TrainResult res = train(spec, ds, cfg);
  bool mentions = false;
  for (const auto& w : res.report.warnings)
    mentions |= w.find("DegenerateDataset") != std::string::npos;
  CHECK(mentions);
}

TEST_CASE("evaluate: zeroed head predicts class 0 everywhere (tie-break by lowest index)") {
  Dataset ds = separable_dataset(10, 13);
  NetworkSpec spec = small_spec("t", {8}, 4, 1, 0.01);
  Network net = build(spec, 1);
  for (double& v : net.dense.back().w.data) v = 0.0;
  for (double& v : net.dense.back().b) v = 0.0;
  EvalResult res = evaluate(net, ds);
  for (const auto& row : res.predictions.rows) CHECK(row.predicted == 0);
  auto counts = ds.label_counts();
  double freq0 = 100.0 * static_cast<double>(counts[0]) / static_cast<double>(ds.size());
  CHECK(res.accuracy == doctest::Approx(freq0).epsilon(1e-12));
}

TEST_CASE("evaluate is deterministic (dropout never active at inference)") {
  Dataset ds = separable_dataset(8, 14);
  NetworkSpec spec = small_spec("t", {8, 4}, 4, 5, 0.02);
  spec.dropout_rate = 0.3;
  TrainConfig cfg = default_train_config(spec);
  cfg.seed = 77;
  TrainResult res = train(spec, ds, cfg);
  EvalResult a = evaluate(res.network, ds);
  EvalResult b = evaluate(res.network, ds);
  CHECK(a.accuracy == b.accuracy);
  for (size_t i = 0; i < a.predictions.rows.size(); ++i)
    CHECK(a.predictions.rows[i].predicted == b.predictions.rows[i].predicted);
}

TEST_CASE("sequence models train through the bucketed batch path") {
  Dataset ds = separable_dataset(12, 15);
  NetworkSpec spec = small_spec("t", {10, 6}, 4, 8, 0.02);
  spec.first_hidden_is_lstm = true;
  TrainConfig cfg = default_train_config(spec);
  cfg.seed = 31;
  cfg.batch_size = 4;
  TrainResult res = train(spec, ds, cfg);
  CHECK(res.report.epochs.size() == 8);
  CHECK(res.network.lstm.has_value());
  // deterministic rerun
  TrainResult res2 = train(spec, ds, cfg);
  CHECK(render_train_report(res.report) == render_train_report(res2.report));
}

TEST_CASE("train report render and predictions round-trip") {
  TempDir dir;
  Dataset ds = separable_dataset(10, 16);
  NetworkSpec spec = small_spec("tiny", {8}, 4, 3, 0.01);
  TrainConfig cfg = default_train_config(spec);
  cfg.seed = 41;
  TrainResult res = train(spec, ds, cfg);

  std::string rendered = render_train_report(res.report);
  CHECK(rendered.rfind("# format: trainlog/1\n", 0) == 0);
  CHECK(rendered.find("model=tiny") != std::string::npos);
  CHECK(rendered.find("# final") != std::string::npos);
  // wall time never lands in the serialized report
  CHECK(rendered.find("wall") == std::string::npos);

  std::string path = dir.file("preds.tsv");
  write_predictions_tsv(res.test_predictions, path);
  Predictions loaded = load_predictions_tsv(path);
  REQUIRE(loaded.rows.size() == res.test_predictions.rows.size());
  CHECK(loaded.binary == res.test_predictions.binary);
  for (size_t i = 0; i < loaded.rows.size(); ++i) {
    CHECK(loaded.rows[i].exp_id == res.test_predictions.rows[i].exp_id);
    CHECK(loaded.rows[i].truth == res.test_predictions.rows[i].truth);
    CHECK(loaded.rows[i].predicted == res.test_predictions.rows[i].predicted);
  }
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/network.hpp"

namespace dyad {

struct TrainConfig {
  double learning_rate = 1e-4;
  uint32_t epochs = 1;
  uint32_t batch_size = 32;
  double l2_lambda = 1e-3;  // used only when the spec enables L2
  double dropout_rate = 0.0;
  uint64_t seed = 0;
  double train_fraction = 0.9;
};

// Seeds the run knobs from the spec's published hyperparameters.
TrainConfig default_train_config(const NetworkSpec& spec);

struct PredictionRow {
  std::string exp_id;
  int truth = 0;
  int predicted = 0;
};

struct Predictions {
  bool binary = false;  // label space: 4-class names or acquaintances/intimate
  std::vector<PredictionRow> rows;
};

struct EpochStat {
  uint32_t epoch = 0;       // 1-based, contiguous
  double mean_loss = 0.0;   // data loss only; the L2 penalty is not folded in
  double train_accuracy = 0.0;
};

struct TrainReport {
  std::vector<EpochStat> epochs;
  double final_train_accuracy = 0.0;
  double final_test_accuracy = 0.0;
  double wall_seconds = 0.0;  // not serialized; reports stay byte-reproducible
  std::string model_name;
  uint64_t seed = 0;
  uint32_t batch_size = 0;
  double l2_lambda = 0.0;
  double train_fraction = 0.0;
  double learning_rate = 0.0;
  uint32_t trained_epochs = 0;
  double dropout_rate = 0.0;
  bool l2_enabled = false;
  std::vector<std::string> warnings;
};

struct TrainResult {
  Network network;
  TrainReport report;
  Predictions train_predictions;
  Predictions test_predictions;
};

// End-to-end run: seeded 90/10 split, standardizer fit on the training split
// only, spec.epochs epochs of mini-batch SGD with cross-entropy loss, L2 and
// dropout per the spec flags. Feed-forward specs train on averaged feature
// vectors; recurrent specs on per-reading sequences, batched by equal length
// where possible.
TrainResult train(const NetworkSpec& spec, const Dataset& ds, const TrainConfig& cfg);

struct EvalResult {
  double accuracy = 0.0;  // percent
  Predictions predictions;
};

// Argmax prediction (lowest index wins ties) using the network's embedded
// standardizer. Two-class networks score against merged binary truth labels.
EvalResult evaluate(const Network& net, const Dataset& ds);

std::string render_train_report(const TrainReport& report);
void write_train_report(const TrainReport& report, const std::string& path);

void write_predictions_tsv(const Predictions& preds, const std::string& path);
Predictions load_predictions_tsv(const std::string& path);

}  // namespace dyad

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/training.hpp"

namespace dyad {

// Row = real value, column = predicted value. Percentages are derived from
// counts per row; rows without support render as all zeros and are flagged.
struct ConfusionMatrix {
  bool binary = false;
  std::vector<std::vector<uint64_t>> counts;

  size_t classes() const { return counts.size(); }
  uint64_t total() const;
  uint64_t row_sum(size_t i) const;
};

ConfusionMatrix confusion(const Predictions& preds);

// Block sums under the acquaintances/intimate merge; only valid on 4-class
// matrices.
ConfusionMatrix merge_confusion(const ConfusionMatrix& cm4);

// Row-normalized percentages (100 * count / row_sum); zero-support rows are 0.
std::vector<std::vector<double>> percentages(const ConfusionMatrix& cm);

enum class RenderStyle { Counts, Percent };

// Fixed-width text table; percent style rounds half-up to two decimals.
std::string render(const ConfusionMatrix& cm, RenderStyle style);

double overall_accuracy(const ConfusionMatrix& cm);          // percent
std::vector<double> per_class_recall(const ConfusionMatrix& cm);  // percent per class

// The full text block printed by the `report` subcommand: count and percent
// tables plus overall and per-class accuracy.
std::string render_report(const Predictions& preds, bool merge_binary);

}  // namespace dyad

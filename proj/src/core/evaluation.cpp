#include "core/evaluation.hpp"

#include <sstream>

#include "core/text.hpp"

namespace dyad {

uint64_t ConfusionMatrix::total() const {
  uint64_t t = 0;
  for (const auto& row : counts)
    for (uint64_t c : row) t += c;
  return t;
}

uint64_t ConfusionMatrix::row_sum(size_t i) const {
  uint64_t t = 0;
  for (uint64_t c : counts[i]) t += c;
  return t;
}

ConfusionMatrix confusion(const Predictions& preds) {
  const size_t n = preds.binary ? kNumBinaryLabels : kNumLabels;
  ConfusionMatrix cm;
  cm.binary = preds.binary;
  cm.counts.assign(n, std::vector<uint64_t>(n, 0));
  for (const auto& row : preds.rows) {
    require(row.truth >= 0 && static_cast<size_t>(row.truth) < n, Err::LabelOutOfSpace,
            "true label " + std::to_string(row.truth) + " outside the label space");
    require(row.predicted >= 0 && static_cast<size_t>(row.predicted) < n, Err::LabelOutOfSpace,
            "predicted label " + std::to_string(row.predicted) + " outside the label space");
    cm.counts[static_cast<size_t>(row.truth)][static_cast<size_t>(row.predicted)]++;
  }
  return cm;
}

ConfusionMatrix merge_confusion(const ConfusionMatrix& cm4) {
  require(!cm4.binary && cm4.classes() == kNumLabels, Err::InvalidArgument,
          "merge_confusion expects a 4-class matrix");
  ConfusionMatrix cm;
  cm.binary = true;
  cm.counts.assign(kNumBinaryLabels, std::vector<uint64_t>(kNumBinaryLabels, 0));
  for (size_t i = 0; i < kNumLabels; ++i) {
    size_t bi = static_cast<size_t>(merge_to_binary(static_cast<RelationshipLabel>(i)));
    for (size_t j = 0; j < kNumLabels; ++j) {
      size_t bj = static_cast<size_t>(merge_to_binary(static_cast<RelationshipLabel>(j)));
      cm.counts[bi][bj] += cm4.counts[i][j];
    }
  }
  return cm;
}

std::vector<std::vector<double>> percentages(const ConfusionMatrix& cm) {
  const size_t n = cm.classes();
  std::vector<std::vector<double>> pct(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) {
    uint64_t rs = cm.row_sum(i);
    if (rs == 0) continue;
    for (size_t j = 0; j < n; ++j)
      pct[i][j] = 100.0 * static_cast<double>(cm.counts[i][j]) / static_cast<double>(rs);
  }
  return pct;
}

namespace {

const char* class_name(const ConfusionMatrix& cm, size_t i) {
  return cm.binary ? binary_label_name(static_cast<BinaryLabel>(i))
                   : label_name(static_cast<RelationshipLabel>(i));
}

std::string pad_left(std::string s, size_t w) {
  while (s.size() < w) s.insert(s.begin(), ' ');
  return s;
}

std::string pad_right(std::string s, size_t w) {
  while (s.size() < w) s.push_back(' ');
  return s;
}

}  // namespace

std::string render(const ConfusionMatrix& cm, RenderStyle style) {
  const size_t n = cm.classes();
  const size_t label_w = 18;
  const size_t col_w = 14;
  auto pct = percentages(cm);

  std::ostringstream os;
  os << pad_right("real \\ predicted", label_w);
  for (size_t j = 0; j < n; ++j) os << pad_left(class_name(cm, j), col_w);
  os << "\n";

  bool any_zero_row = false;
  for (size_t i = 0; i < n; ++i) {
    bool zero_row = cm.row_sum(i) == 0;
    std::string label = class_name(cm, i);
    if (zero_row && style == RenderStyle::Percent) {
      label += " *";
      any_zero_row = true;
    }
    os << pad_right(label, label_w);
    for (size_t j = 0; j < n; ++j) {
      std::string cell = style == RenderStyle::Counts ? std::to_string(cm.counts[i][j])
                                                      : format_fixed2(pct[i][j]);
      os << pad_left(cell, col_w);
    }
    os << "\n";
  }
  if (any_zero_row) os << "* no examples with this real value\n";
  return os.str();
}

double overall_accuracy(const ConfusionMatrix& cm) {
  uint64_t t = cm.total();
  require(t > 0, Err::EmptyInput, "empty confusion matrix");
  uint64_t diag = 0;
  for (size_t i = 0; i < cm.classes(); ++i) diag += cm.counts[i][i];
  return 100.0 * static_cast<double>(diag) / static_cast<double>(t);
}

std::vector<double> per_class_recall(const ConfusionMatrix& cm) {
  std::vector<double> out(cm.classes(), 0.0);
  for (size_t i = 0; i < cm.classes(); ++i) {
    uint64_t rs = cm.row_sum(i);
    if (rs > 0) out[i] = 100.0 * static_cast<double>(cm.counts[i][i]) / static_cast<double>(rs);
  }
  return out;
}

std::string render_report(const Predictions& preds, bool merge_binary) {
  Predictions effective = preds;
  if (merge_binary) {
    require(!preds.binary, Err::InvalidArgument, "predictions are already in the binary space");
    effective.binary = true;
    for (auto& row : effective.rows) {
      row.truth = static_cast<int>(merge_to_binary(static_cast<RelationshipLabel>(row.truth)));
      row.predicted =
          static_cast<int>(merge_to_binary(static_cast<RelationshipLabel>(row.predicted)));
    }
  }
  ConfusionMatrix cm = confusion(effective);

  std::ostringstream os;
  os << "# format: report/1\n";
  os << "label_space=" << (cm.binary ? "2-class" : "4-class") << "\n";
  os << "examples=" << cm.total() << "\n";
  os << "overall_accuracy=" << format_fixed2(overall_accuracy(cm)) << "\n";
  os << "\ncounts\n" << render(cm, RenderStyle::Counts);
  os << "\npercent\n" << render(cm, RenderStyle::Percent);
  os << "\nper-class recall\n";
  auto recall = per_class_recall(cm);
  for (size_t i = 0; i < cm.classes(); ++i) {
    os << class_name(cm, i) << "=" << format_fixed2(recall[i]);
    if (cm.row_sum(i) == 0) os << " (no support)";
    os << "\n";
  }
  return os.str();
}

}  // namespace dyad

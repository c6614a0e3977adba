#include "core/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/loss.hpp"
#include "core/text.hpp"

namespace dyad {

TrainConfig default_train_config(const NetworkSpec& spec) {
  TrainConfig cfg;
  cfg.learning_rate = spec.learning_rate;
  cfg.epochs = spec.epochs;
  cfg.dropout_rate = spec.dropout_rate;
  return cfg;
}

namespace {

void validate_config(const TrainConfig& cfg) {
  require(cfg.learning_rate > 0.0, Err::InvalidArgument, "learning_rate must be > 0");
  require(cfg.epochs >= 1, Err::InvalidArgument, "epochs must be >= 1");
  require(cfg.batch_size >= 1, Err::InvalidArgument, "batch_size must be >= 1");
  require(cfg.l2_lambda >= 0.0, Err::InvalidArgument, "l2_lambda must be >= 0");
  require(cfg.dropout_rate >= 0.0 && cfg.dropout_rate < 1.0, Err::InvalidArgument,
          "dropout_rate must lie in [0,1)");
  require(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0, Err::InvalidArgument,
          "train_fraction must lie in (0,1)");
}

int effective_label(const Experiment& e, uint32_t output_size) {
  return output_size == 2 ? static_cast<int>(merge_to_binary(e.label))
                          : static_cast<int>(e.label);
}

size_t argmax_row(const double* row, size_t n) {
  size_t best = 0;
  for (size_t j = 1; j < n; ++j)
    if (row[j] > row[best]) best = j;  // lowest index wins ties
  return best;
}

void coverage_warnings(const Dataset& split, const char* which, uint32_t output_size,
                       std::vector<std::string>& warnings) {
  std::vector<uint64_t> counts(output_size, 0);
  for (const auto& e : split.experiments) counts[effective_label(e, output_size)]++;
  for (uint32_t c = 0; c < output_size; ++c) {
    if (counts[c] == 0) {
      const char* name = output_size == 2 ? binary_label_name(static_cast<BinaryLabel>(c))
                                          : label_name(static_cast<RelationshipLabel>(c));
      warnings.push_back(std::string("DegenerateDataset: ") + which + " split has no '" + name +
                         "' examples");
    }
  }
}

Matrix one_hot_rows(const std::vector<int>& labels, uint32_t classes) {
  Matrix t(labels.size(), classes);
  for (size_t i = 0; i < labels.size(); ++i) t(i, static_cast<size_t>(labels[i])) = 1.0;
  return t;
}

// --- feed-forward path -----------------------------------------------------

struct DenseBatchState {
  std::vector<DenseCache> caches;
  std::vector<Matrix> masks;  // dropout masks per hidden layer
};

// Forward through the dense stack; returns logits (pre-activation of the
// Softmax layer). Dropout is applied to hidden-layer outputs in training mode.
Matrix dense_train_forward(Network& net, const Matrix& x, double dropout_rate, SplitMix64& rng,
                           bool training, DenseBatchState* state) {
  Matrix cur = x;
  if (state) {
    state->caches.assign(net.dense.size(), DenseCache{});
    state->masks.assign(net.dense.size(), Matrix{});
  }
  for (size_t li = 0; li < net.dense.size(); ++li) {
    const bool last = li + 1 == net.dense.size();
    DenseCache* cache = state ? &state->caches[li] : nullptr;
    cur = dense_forward(net.dense[li], cur, cache);
    if (last) {
      // loss consumes pre-activation logits
      cur = cache ? cache->z : cur;
    } else if (dropout_rate > 0.0) {
      Matrix mask;
      cur = dropout_forward(cur, dropout_rate, rng, training, &mask);
      if (state) state->masks[li] = std::move(mask);
    }
  }
  return cur;
}

void dense_train_backward(Network& net, const DenseBatchState& state, const Matrix& dlogits,
                          double dropout_rate, double lr, double l2) {
  Matrix d = dlogits;
  for (size_t li = net.dense.size(); li-- > 0;) {
    DenseGrads g = dense_backward(net.dense[li], state.caches[li], d);
    sgd_step(net.dense[li].w, g.dw, lr, l2);
    sgd_step(net.dense[li].b, g.db, lr);
    if (li > 0) {
      d = std::move(g.dx);
      if (dropout_rate > 0.0) d = dropout_backward(d, state.masks[li - 1]);
    }
  }
}

// --- recurrent path ----------------------------------------------------------

struct SeqExample {
  std::vector<Vector> steps;  // standardized
  int label = 0;
};

// One batch: forward/backward per sequence with gradients accumulated in
// batch order, then a single SGD step. Returns the mean data loss.
double lstm_train_batch(Network& net, const std::vector<SeqExample>& data,
                        const std::vector<size_t>& batch, double lr, double l2) {
  LstmLayer& lstm = *net.lstm;
  LstmGrads lstm_acc = make_lstm_grads(lstm);
  std::vector<Matrix> dw_acc(net.dense.size());
  std::vector<Vector> db_acc(net.dense.size());
  for (size_t li = 0; li < net.dense.size(); ++li) {
    dw_acc[li] = Matrix(net.dense[li].w.rows, net.dense[li].w.cols);
    db_acc[li] = Vector(net.dense[li].b.size(), 0.0);
  }

  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double loss_sum = 0.0;

  for (size_t idx : batch) {
    const SeqExample& ex = data[idx];
    LstmCache cache;
    Vector h = lstm_forward(lstm, ex.steps, &cache);

    Matrix cur(1, h.size());
    cur.data = h;
    std::vector<DenseCache> caches(net.dense.size());
    for (size_t li = 0; li < net.dense.size(); ++li) {
      cur = dense_forward(net.dense[li], cur, &caches[li]);
      if (li + 1 == net.dense.size()) cur = caches[li].z;
    }

    Matrix target(1, net.spec.output_size);
    target(0, static_cast<size_t>(ex.label)) = 1.0;
    LossResult res = softmax_cross_entropy(cur, target);
    loss_sum += res.loss;
    for (double& v : res.dlogits.data) v *= inv_b;

    Matrix d = std::move(res.dlogits);
    for (size_t li = net.dense.size(); li-- > 0;) {
      DenseGrads g = dense_backward(net.dense[li], caches[li], d);
      for (size_t k = 0; k < g.dw.size(); ++k) dw_acc[li].data[k] += g.dw.data[k];
      add_inplace(db_acc[li], g.db);
      d = std::move(g.dx);
    }
    Vector dh(d.data.begin(), d.data.end());
    LstmGrads lg = lstm_backward(lstm, cache, dh);
    accumulate(lstm_acc, lg);
  }

  for (size_t li = 0; li < net.dense.size(); ++li) {
    sgd_step(net.dense[li].w, dw_acc[li], lr, l2);
    sgd_step(net.dense[li].b, db_acc[li], lr);
  }
  sgd_step(lstm.wi, lstm_acc.dwi, lr, l2);
  sgd_step(lstm.wf, lstm_acc.dwf, lr, l2);
  sgd_step(lstm.wg, lstm_acc.dwg, lr, l2);
  sgd_step(lstm.wo, lstm_acc.dwo, lr, l2);
  sgd_step(lstm.ui, lstm_acc.dui, lr, l2);
  sgd_step(lstm.uf, lstm_acc.duf, lr, l2);
  sgd_step(lstm.ug, lstm_acc.dug, lr, l2);
  sgd_step(lstm.uo, lstm_acc.duo, lr, l2);
  sgd_step(lstm.bi, lstm_acc.dbi, lr);
  sgd_step(lstm.bf, lstm_acc.dbf, lr);
  sgd_step(lstm.bg, lstm_acc.dbg, lr);
  sgd_step(lstm.bo, lstm_acc.dbo, lr);
  return loss_sum * inv_b;
}

// Groups a shuffled index order into batches of equal sequence length. Full
// batches are emitted as they fill; leftovers afterwards, ordered by length.
std::vector<std::vector<size_t>> length_bucketed_batches(const std::vector<size_t>& order,
                                                         const std::vector<SeqExample>& data,
                                                         size_t batch_size) {
  std::vector<std::vector<size_t>> batches;
  std::vector<std::pair<size_t, std::vector<size_t>>> open;  // (length, pending)
  for (size_t idx : order) {
    size_t len = data[idx].steps.size();
    auto it = std::find_if(open.begin(), open.end(),
                           [len](const auto& p) { return p.first == len; });
    if (it == open.end()) {
      open.push_back({len, {}});
      it = std::prev(open.end());
    }
    it->second.push_back(idx);
    if (it->second.size() == batch_size) {
      batches.push_back(std::move(it->second));
      open.erase(it);
    }
  }
  std::sort(open.begin(), open.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& p : open)
    if (!p.second.empty()) batches.push_back(std::move(p.second));
  return batches;
}

double accuracy_percent(size_t correct, size_t total) {
  return 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace

EvalResult evaluate(const Network& net, const Dataset& ds) {
  require(net.spec.output_size == 2 || net.spec.output_size == 4, Err::ShapeMismatch,
          "network output size does not match any label space");
  require(!ds.experiments.empty(), Err::EmptyInput, "cannot evaluate an empty dataset");

  EvalResult res;
  res.predictions.binary = net.spec.output_size == 2;
  size_t correct = 0;

  for (const auto& e : ds.experiments) {
    int truth = effective_label(e, net.spec.output_size);
    size_t pred;
    if (net.lstm) {
      Vector probs = network_probs_seq(net, experiment_to_sequence(e));
      pred = argmax_row(probs.data(), probs.size());
    } else {
      FeatureVector f = experiment_to_vector(e);
      Matrix x(1, kFeatureCount);
      std::copy(f.v.begin(), f.v.end(), x.data.begin());
      Matrix probs = network_probs(net, x);
      pred = argmax_row(&probs.data[0], probs.cols);
    }
    if (static_cast<int>(pred) == truth) ++correct;
    res.predictions.rows.push_back({e.id, truth, static_cast<int>(pred)});
  }
  res.accuracy = accuracy_percent(correct, ds.experiments.size());
  return res;
}

TrainResult train(const NetworkSpec& spec, const Dataset& ds, const TrainConfig& cfg) {
  validate_spec(spec);
  validate_config(cfg);

  {
    std::vector<bool> present(spec.output_size, false);
    for (const auto& e : ds.experiments) present[effective_label(e, spec.output_size)] = true;
    size_t distinct = static_cast<size_t>(std::count(present.begin(), present.end(), true));
    require(distinct >= spec.output_size, Err::InvalidArgument,
            "dataset covers " + std::to_string(distinct) + " of " +
                std::to_string(spec.output_size) + " modeled classes");
  }

  auto t_start = std::chrono::steady_clock::now();

  auto [train_ds, test_ds] = split_dataset(ds, cfg.train_fraction, cfg.seed);

  TrainResult result;
  TrainReport& report = result.report;
  report.model_name = spec.name;
  report.seed = cfg.seed;
  report.batch_size = cfg.batch_size;
  report.l2_lambda = cfg.l2_lambda;
  report.train_fraction = cfg.train_fraction;
  report.learning_rate = cfg.learning_rate;
  report.trained_epochs = cfg.epochs;
  report.dropout_rate = cfg.dropout_rate;
  report.l2_enabled = spec.l2_enabled;
  coverage_warnings(train_ds, "training", spec.output_size, report.warnings);
  coverage_warnings(test_ds, "test", spec.output_size, report.warnings);

  Network net = build(spec, cfg.seed);
  const double l2 = spec.l2_enabled ? cfg.l2_lambda : 0.0;
  const size_t n_train = train_ds.experiments.size();

  // Stream for epoch shuffles and dropout masks, decoupled from the split and
  // init streams.
  SplitMix64 run_rng(SplitMix64::mix(cfg.seed, 2));

  std::vector<size_t> order(n_train);
  for (size_t i = 0; i < n_train; ++i) order[i] = i;

  if (!spec.first_hidden_is_lstm) {
    std::vector<FeatureVector> raw(n_train);
    std::vector<int> labels(n_train);
    for (size_t i = 0; i < n_train; ++i) {
      raw[i] = experiment_to_vector(train_ds.experiments[i]);
      labels[i] = effective_label(train_ds.experiments[i], spec.output_size);
    }
    net.standardizer = fit_standardizer(raw);
    Matrix x_all(n_train, kFeatureCount);
    for (size_t i = 0; i < n_train; ++i) {
      FeatureVector s = apply_standardizer(net.standardizer, raw[i]);
      std::copy(s.v.begin(), s.v.end(), &x_all.data[i * kFeatureCount]);
    }

    for (uint32_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
      shuffle(order, run_rng);
      double loss_sum = 0.0;
      for (size_t start = 0; start < n_train; start += cfg.batch_size) {
        size_t bsize = std::min<size_t>(cfg.batch_size, n_train - start);
        Matrix xb(bsize, kFeatureCount);
        std::vector<int> yb(bsize);
        for (size_t r = 0; r < bsize; ++r) {
          size_t src = order[start + r];
          std::copy(&x_all.data[src * kFeatureCount], &x_all.data[(src + 1) * kFeatureCount],
                    &xb.data[r * kFeatureCount]);
          yb[r] = labels[src];
        }
        DenseBatchState state;
        Matrix logits =
            dense_train_forward(net, xb, cfg.dropout_rate, run_rng, /*training=*/true, &state);
        LossResult res = softmax_cross_entropy(logits, one_hot_rows(yb, spec.output_size));
        loss_sum += res.loss * static_cast<double>(bsize);
        dense_train_backward(net, state, res.dlogits, cfg.dropout_rate, cfg.learning_rate, l2);
      }
      EvalResult train_eval = evaluate(net, train_ds);
      report.epochs.push_back(
          {epoch, loss_sum / static_cast<double>(n_train), train_eval.accuracy});
    }
  } else {
    std::vector<FeatureSequence> seqs(n_train);
    std::vector<FeatureVector> all_steps;
    for (size_t i = 0; i < n_train; ++i) {
      seqs[i] = experiment_to_sequence(train_ds.experiments[i]);
      all_steps.insert(all_steps.end(), seqs[i].steps.begin(), seqs[i].steps.end());
    }
    net.standardizer = fit_standardizer(all_steps);

    std::vector<SeqExample> data(n_train);
    for (size_t i = 0; i < n_train; ++i) {
      data[i].label = effective_label(train_ds.experiments[i], spec.output_size);
      data[i].steps.reserve(seqs[i].steps.size());
      for (const auto& step : seqs[i].steps) {
        FeatureVector s = apply_standardizer(net.standardizer, step);
        data[i].steps.emplace_back(s.v.begin(), s.v.end());
      }
    }

    for (uint32_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
      shuffle(order, run_rng);
      auto batches = length_bucketed_batches(order, data, cfg.batch_size);
      double loss_sum = 0.0;
      for (const auto& batch : batches) {
        double mean_loss = lstm_train_batch(net, data, batch, cfg.learning_rate, l2);
        loss_sum += mean_loss * static_cast<double>(batch.size());
      }
      EvalResult train_eval = evaluate(net, train_ds);
      report.epochs.push_back(
          {epoch, loss_sum / static_cast<double>(n_train), train_eval.accuracy});
    }
  }

  EvalResult train_eval = evaluate(net, train_ds);
  EvalResult test_eval = evaluate(net, test_ds);
  report.final_train_accuracy = train_eval.accuracy;
  report.final_test_accuracy = test_eval.accuracy;
  result.train_predictions = std::move(train_eval.predictions);
  result.test_predictions = std::move(test_eval.predictions);
  result.network = std::move(net);

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

std::string render_train_report(const TrainReport& report) {
  std::ostringstream os;
  os << "# format: trainlog/1\n";
  os << "model=" << report.model_name << "\n";
  os << "seed=" << report.seed << "\n";
  os << "batch_size=" << report.batch_size << "\n";
  os << "l2_lambda=" << format_double(report.l2_lambda) << "\n";
  os << "l2_enabled=" << (report.l2_enabled ? "yes" : "no") << "\n";
  os << "dropout_rate=" << format_double(report.dropout_rate) << "\n";
  os << "learning_rate=" << format_double(report.learning_rate) << "\n";
  os << "epochs=" << report.trained_epochs << "\n";
  os << "train_fraction=" << format_double(report.train_fraction) << "\n";
  os << "# epoch\tmean_loss\ttrain_accuracy\n";
  for (const auto& e : report.epochs)
    os << e.epoch << "\t" << format_double(e.mean_loss) << "\t"
       << format_double(e.train_accuracy) << "\n";
  os << "# final\n";
  os << "train_accuracy=" << format_double(report.final_train_accuracy) << "\n";
  os << "test_accuracy=" << format_double(report.final_test_accuracy) << "\n";
  return os.str();
}

void write_train_report(const TrainReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Err::Io, "cannot write '" + path + "'");
  out << render_train_report(report);
  require(out.good(), Err::Io, "write failed for '" + path + "'");
}

void write_predictions_tsv(const Predictions& preds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Err::Io, "cannot write '" + path + "'");
  out << "# format: predictions/1\n";
  for (const auto& row : preds.rows) {
    const char* t = preds.binary ? binary_label_name(static_cast<BinaryLabel>(row.truth))
                                 : label_name(static_cast<RelationshipLabel>(row.truth));
    const char* p = preds.binary ? binary_label_name(static_cast<BinaryLabel>(row.predicted))
                                 : label_name(static_cast<RelationshipLabel>(row.predicted));
    out << row.exp_id << "\t" << t << "\t" << p << "\n";
  }
  require(out.good(), Err::Io, "write failed for '" + path + "'");
}

namespace {

int parse_any_label(std::string_view name, bool& is_binary, size_t line_no) {
  for (int i = 0; i < kNumBinaryLabels; ++i)
    if (name == binary_label_name(static_cast<BinaryLabel>(i))) {
      is_binary = true;
      return i;
    }
  for (int i = 0; i < kNumLabels; ++i)
    if (name == label_name(static_cast<RelationshipLabel>(i))) {
      is_binary = false;
      return i;
    }
  raise(Err::UnknownLabel,
        "line " + std::to_string(line_no) + ": unknown label '" + std::string(name) + "'");
}

}  // namespace

Predictions load_predictions_tsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Err::Io, "cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) raise(Err::EmptyFile, "'" + path + "' is empty");
  require(trim_cr(line) == "# format: predictions/1", Err::MalformedRow,
          "expected '# format: predictions/1' header");

  Predictions preds;
  bool space_known = false;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = trim_cr(line);
    if (sv.empty()) continue;
    auto fields = split_on(sv, '\t');
    require(fields.size() == 3, Err::MalformedRow,
            "line " + std::to_string(line_no) + ": expected exp_id<TAB>true<TAB>pred");
    bool bt = false, bp = false;
    int truth = parse_any_label(fields[1], bt, line_no);
    int pred = parse_any_label(fields[2], bp, line_no);
    require(bt == bp, Err::LabelOutOfSpace,
            "line " + std::to_string(line_no) + ": mixed label spaces in one row");
    if (!space_known) {
      preds.binary = bt;
      space_known = true;
    }
    require(preds.binary == bt, Err::LabelOutOfSpace,
            "line " + std::to_string(line_no) + ": label space changes mid-file");
    preds.rows.push_back({std::string(fields[0]), truth, pred});
  }
  require(!preds.rows.empty(), Err::EmptyFile, "'" + path + "' has no prediction rows");
  return preds;
}

}  // namespace dyad

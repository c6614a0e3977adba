#include "dyadnet.h"

#include <cstring>
#include <string>

#include "core/dataset.hpp"
#include "core/evaluation.hpp"
#include "core/features.hpp"
#include "core/network.hpp"
#include "core/selftest.hpp"
#include "core/synthgen.hpp"
#include "core/training.hpp"

using dyad::Err;

static_assert(static_cast<int>(Err::Io) == DYAD_ERR_IO);
static_assert(static_cast<int>(Err::EmptyFile) == DYAD_ERR_EMPTY_FILE);
static_assert(static_cast<int>(Err::MalformedRow) == DYAD_ERR_MALFORMED_ROW);
static_assert(static_cast<int>(Err::UnknownLabel) == DYAD_ERR_UNKNOWN_LABEL);
static_assert(static_cast<int>(Err::NonMonotonicTime) == DYAD_ERR_NON_MONOTONIC_TIME);
static_assert(static_cast<int>(Err::EmptySplit) == DYAD_ERR_EMPTY_SPLIT);
static_assert(static_cast<int>(Err::EmptyInput) == DYAD_ERR_EMPTY_INPUT);
static_assert(static_cast<int>(Err::ShapeMismatch) == DYAD_ERR_SHAPE_MISMATCH);
static_assert(static_cast<int>(Err::EmptySequence) == DYAD_ERR_EMPTY_SEQUENCE);
static_assert(static_cast<int>(Err::InvalidTarget) == DYAD_ERR_INVALID_TARGET);
static_assert(static_cast<int>(Err::UnknownModelName) == DYAD_ERR_UNKNOWN_MODEL_NAME);
static_assert(static_cast<int>(Err::CorruptModelFile) == DYAD_ERR_CORRUPT_MODEL_FILE);
static_assert(static_cast<int>(Err::InvalidProfile) == DYAD_ERR_INVALID_PROFILE);
static_assert(static_cast<int>(Err::LabelOutOfSpace) == DYAD_ERR_LABEL_OUT_OF_SPACE);
static_assert(static_cast<int>(Err::InvalidArgument) == DYAD_ERR_INVALID_ARGUMENT);
static_assert(static_cast<int>(Err::Internal) == DYAD_ERR_INTERNAL);
static_assert(static_cast<int>(Err::SelftestFailed) == DYAD_ERR_SELFTEST_FAILED);

struct dyad_dataset {
  dyad::Dataset ds;
};
struct dyad_model {
  dyad::Network net;
};
struct dyad_report {
  dyad::TrainReport report;
};
struct dyad_predictions {
  dyad::Predictions preds;
};

namespace {

thread_local std::string g_last_error;

dyad_status fail(Err code, const std::string& message) {
  g_last_error = message;
  return static_cast<dyad_status>(code);
}

template <class Fn>
dyad_status guarded(Fn&& fn) {
  try {
    fn();
    return DYAD_OK;
  } catch (const dyad::Error& e) {
    g_last_error = e.what();
    return static_cast<dyad_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "Internal: out of memory";
    return DYAD_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = std::string("Internal: ") + e.what();
    return DYAD_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

dyad_status require_arg(bool cond, const char* what) {
  if (cond) return DYAD_OK;
  return fail(Err::InvalidArgument, std::string("InvalidArgument: ") + what);
}

dyad::NetworkSpec to_core_spec(const dyad_model_spec& s) {
  dyad::NetworkSpec spec;
  spec.name.assign(s.name, strnlen(s.name, DYAD_MODEL_NAME_MAX));
  spec.input_size = s.input_size;
  spec.output_size = s.output_size;
  if (s.hidden_count > DYAD_MAX_HIDDEN_LAYERS)
    dyad::raise(Err::InvalidArgument, "hidden_count exceeds DYAD_MAX_HIDDEN_LAYERS");
  spec.hidden_sizes.assign(s.hidden, s.hidden + s.hidden_count);
  spec.first_hidden_is_lstm = s.first_hidden_is_lstm != 0;
  spec.l2_enabled = s.l2_enabled != 0;
  spec.dropout_rate = s.dropout_rate;
  spec.learning_rate = s.learning_rate;
  spec.epochs = s.epochs;
  return spec;
}

void from_core_spec(const dyad::NetworkSpec& spec, dyad_model_spec* out) {
  std::memset(out, 0, sizeof(*out));
  std::snprintf(out->name, sizeof(out->name), "%s", spec.name.c_str());
  out->input_size = spec.input_size;
  out->output_size = spec.output_size;
  out->hidden_count = static_cast<uint32_t>(spec.hidden_sizes.size());
  for (size_t i = 0; i < spec.hidden_sizes.size() && i < DYAD_MAX_HIDDEN_LAYERS; ++i)
    out->hidden[i] = spec.hidden_sizes[i];
  out->first_hidden_is_lstm = spec.first_hidden_is_lstm ? 1 : 0;
  out->l2_enabled = spec.l2_enabled ? 1 : 0;
  out->dropout_rate = spec.dropout_rate;
  out->learning_rate = spec.learning_rate;
  out->epochs = spec.epochs;
}

}  // namespace

extern "C" {

const char* dyad_version(void) { return "0.1.0"; }

const char* dyad_status_name(dyad_status status) {
  return dyad::err_name(static_cast<Err>(status));
}

const char* dyad_last_error(void) { return g_last_error.c_str(); }

void dyad_string_free(char* s) { delete[] s; }

const char* dyad_label_name(int label) {
  if (label < 0 || label >= DYAD_NUM_LABELS) return nullptr;
  return dyad::label_name(static_cast<dyad::RelationshipLabel>(label));
}

const char* dyad_binary_label_name(int label) {
  if (label < 0 || label >= DYAD_NUM_BINARY_LABELS) return nullptr;
  return dyad::binary_label_name(static_cast<dyad::BinaryLabel>(label));
}

dyad_status dyad_label_parse(const char* name, int* label_out) {
  if (auto rc = require_arg(name && label_out, "dyad_label_parse: null argument")) return rc;
  return guarded([&] { *label_out = static_cast<int>(dyad::parse_label(name)); });
}

int dyad_label_to_binary(int label) {
  if (label < 0 || label >= DYAD_NUM_LABELS) return -1;
  return static_cast<int>(dyad::merge_to_binary(static_cast<dyad::RelationshipLabel>(label)));
}

/* ------------------------------------------------------------------ */

dyad_status dyad_dataset_load(const char* path, dyad_dataset** out) {
  if (auto rc = require_arg(path && out, "dyad_dataset_load: null argument")) return rc;
  return guarded([&] { *out = new dyad_dataset{dyad::load_dataset(path)}; });
}

dyad_status dyad_dataset_save(const dyad_dataset* ds, const char* path) {
  if (auto rc = require_arg(ds && path, "dyad_dataset_save: null argument")) return rc;
  return guarded([&] { dyad::write_dataset(ds->ds, path); });
}

void dyad_dataset_free(dyad_dataset* ds) { delete ds; }

size_t dyad_dataset_size(const dyad_dataset* ds) { return ds ? ds->ds.size() : 0; }

dyad_status dyad_dataset_label_counts(const dyad_dataset* ds,
                                      uint64_t counts_out[DYAD_NUM_LABELS]) {
  if (auto rc = require_arg(ds && counts_out, "dyad_dataset_label_counts: null argument"))
    return rc;
  auto counts = ds->ds.label_counts();
  for (int i = 0; i < DYAD_NUM_LABELS; ++i) counts_out[i] = counts[i];
  return DYAD_OK;
}

dyad_status dyad_dataset_binary_counts(const dyad_dataset* ds,
                                       uint64_t counts_out[DYAD_NUM_BINARY_LABELS]) {
  if (auto rc = require_arg(ds && counts_out, "dyad_dataset_binary_counts: null argument"))
    return rc;
  auto counts = ds->ds.binary_counts();
  for (int i = 0; i < DYAD_NUM_BINARY_LABELS; ++i) counts_out[i] = counts[i];
  return DYAD_OK;
}

dyad_status dyad_dataset_split(const dyad_dataset* ds, double train_fraction, uint64_t seed,
                               dyad_dataset** train_out, dyad_dataset** test_out) {
  if (auto rc = require_arg(ds && train_out && test_out, "dyad_dataset_split: null argument"))
    return rc;
  return guarded([&] {
    auto [train, test] = dyad::split_dataset(ds->ds, train_fraction, seed);
    *train_out = new dyad_dataset{std::move(train)};
    *test_out = new dyad_dataset{std::move(test)};
  });
}

dyad_status dyad_generate(const char* mode, const char* profiles_path,
                          const uint64_t counts[DYAD_NUM_LABELS], uint64_t seed, unsigned jobs,
                          dyad_dataset** out) {
  if (auto rc = require_arg(mode && counts && out, "dyad_generate: null argument")) return rc;
  return guarded([&] {
    dyad::ProfileMap profiles = dyad::default_profiles(dyad::parse_profile_mode(mode));
    if (profiles_path) profiles = dyad::load_profiles(profiles_path, profiles);
    std::array<uint64_t, dyad::kNumLabels> c{};
    for (int i = 0; i < DYAD_NUM_LABELS; ++i) c[i] = counts[i];
    *out = new dyad_dataset{dyad::generate_dataset(profiles, c, seed, jobs == 0 ? 1 : jobs)};
  });
}

dyad_status dyad_features_write_csv(const dyad_dataset* ds, const char* path) {
  if (auto rc = require_arg(ds && path, "dyad_features_write_csv: null argument")) return rc;
  return guarded([&] { dyad::write_features_csv(ds->ds, path); });
}

/* ------------------------------------------------------------------ */

dyad_status dyad_registry_lookup(const char* name, dyad_model_spec* spec_out) {
  if (auto rc = require_arg(name && spec_out, "dyad_registry_lookup: null argument")) return rc;
  return guarded([&] { from_core_spec(dyad::registry_lookup(name), spec_out); });
}

dyad_status dyad_registry_names(char** names_out) {
  if (auto rc = require_arg(names_out != nullptr, "dyad_registry_names: null argument"))
    return rc;
  return guarded([&] {
    std::string joined;
    for (const auto& n : dyad::registry_names()) {
      joined += n;
      joined += '\n';
    }
    *names_out = dup_string(joined);
  });
}

dyad_status dyad_models_table(char** table_out) {
  if (auto rc = require_arg(table_out != nullptr, "dyad_models_table: null argument")) return rc;
  return guarded([&] { *table_out = dup_string(dyad::render_registry_table()); });
}

/* ------------------------------------------------------------------ */

dyad_status dyad_train_config_defaults(const dyad_model_spec* spec, dyad_train_config* cfg_out) {
  if (auto rc = require_arg(spec && cfg_out, "dyad_train_config_defaults: null argument"))
    return rc;
  return guarded([&] {
    dyad::TrainConfig cfg = dyad::default_train_config(to_core_spec(*spec));
    cfg_out->learning_rate = cfg.learning_rate;
    cfg_out->epochs = cfg.epochs;
    cfg_out->batch_size = cfg.batch_size;
    cfg_out->l2_lambda = cfg.l2_lambda;
    cfg_out->dropout_rate = cfg.dropout_rate;
    cfg_out->seed = cfg.seed;
    cfg_out->train_fraction = cfg.train_fraction;
  });
}

dyad_status dyad_train(const dyad_model_spec* spec, const dyad_dataset* ds,
                       const dyad_train_config* cfg, dyad_model** model_out,
                       dyad_report** report_out, dyad_predictions** train_preds_out,
                       dyad_predictions** test_preds_out) {
  if (auto rc = require_arg(spec && ds && cfg, "dyad_train: null argument")) return rc;
  return guarded([&] {
    dyad::TrainConfig core_cfg;
    core_cfg.learning_rate = cfg->learning_rate;
    core_cfg.epochs = cfg->epochs;
    core_cfg.batch_size = cfg->batch_size;
    core_cfg.l2_lambda = cfg->l2_lambda;
    core_cfg.dropout_rate = cfg->dropout_rate;
    core_cfg.seed = cfg->seed;
    core_cfg.train_fraction = cfg->train_fraction;
    dyad::TrainResult res = dyad::train(to_core_spec(*spec), ds->ds, core_cfg);
    if (model_out) *model_out = new dyad_model{std::move(res.network)};
    if (report_out) *report_out = new dyad_report{std::move(res.report)};
    if (train_preds_out)
      *train_preds_out = new dyad_predictions{std::move(res.train_predictions)};
    if (test_preds_out) *test_preds_out = new dyad_predictions{std::move(res.test_predictions)};
  });
}

void dyad_model_free(dyad_model* model) { delete model; }

dyad_status dyad_model_spec_of(const dyad_model* model, dyad_model_spec* spec_out) {
  if (auto rc = require_arg(model && spec_out, "dyad_model_spec_of: null argument")) return rc;
  from_core_spec(model->net.spec, spec_out);
  return DYAD_OK;
}

dyad_status dyad_model_save(const dyad_model* model, const char* path) {
  if (auto rc = require_arg(model && path, "dyad_model_save: null argument")) return rc;
  return guarded([&] { dyad::save_model(model->net, path); });
}

dyad_status dyad_model_load(const char* path, dyad_model** out) {
  if (auto rc = require_arg(path && out, "dyad_model_load: null argument")) return rc;
  return guarded([&] { *out = new dyad_model{dyad::load_model(path)}; });
}

dyad_status dyad_evaluate(const dyad_model* model, const dyad_dataset* ds, double* accuracy_out,
                          dyad_predictions** preds_out) {
  if (auto rc = require_arg(model && ds, "dyad_evaluate: null argument")) return rc;
  return guarded([&] {
    dyad::EvalResult res = dyad::evaluate(model->net, ds->ds);
    if (accuracy_out) *accuracy_out = res.accuracy;
    if (preds_out) *preds_out = new dyad_predictions{std::move(res.predictions)};
  });
}

void dyad_report_free(dyad_report* report) { delete report; }

double dyad_report_train_accuracy(const dyad_report* report) {
  return report ? report->report.final_train_accuracy : 0.0;
}

double dyad_report_test_accuracy(const dyad_report* report) {
  return report ? report->report.final_test_accuracy : 0.0;
}

double dyad_report_wall_seconds(const dyad_report* report) {
  return report ? report->report.wall_seconds : 0.0;
}

dyad_status dyad_report_render(const dyad_report* report, char** text_out) {
  if (auto rc = require_arg(report && text_out, "dyad_report_render: null argument")) return rc;
  return guarded([&] { *text_out = dup_string(dyad::render_train_report(report->report)); });
}

dyad_status dyad_report_write(const dyad_report* report, const char* path) {
  if (auto rc = require_arg(report && path, "dyad_report_write: null argument")) return rc;
  return guarded([&] { dyad::write_train_report(report->report, path); });
}

dyad_status dyad_report_warnings(const dyad_report* report, char** text_out) {
  if (auto rc = require_arg(report && text_out, "dyad_report_warnings: null argument")) return rc;
  return guarded([&] {
    std::string joined;
    for (const auto& w : report->report.warnings) {
      joined += w;
      joined += '\n';
    }
    *text_out = dup_string(joined);
  });
}

void dyad_predictions_free(dyad_predictions* preds) { delete preds; }

size_t dyad_predictions_size(const dyad_predictions* preds) {
  return preds ? preds->preds.rows.size() : 0;
}

dyad_status dyad_predictions_write_tsv(const dyad_predictions* preds, const char* path) {
  if (auto rc = require_arg(preds && path, "dyad_predictions_write_tsv: null argument"))
    return rc;
  return guarded([&] { dyad::write_predictions_tsv(preds->preds, path); });
}

dyad_status dyad_predictions_load_tsv(const char* path, dyad_predictions** out) {
  if (auto rc = require_arg(path && out, "dyad_predictions_load_tsv: null argument")) return rc;
  return guarded([&] { *out = new dyad_predictions{dyad::load_predictions_tsv(path)}; });
}

/* ------------------------------------------------------------------ */

namespace {

dyad::Predictions merged_view(const dyad::Predictions& preds, int merge_binary) {
  if (!merge_binary) return preds;
  dyad::require(!preds.binary, Err::InvalidArgument,
                "predictions are already in the binary space");
  dyad::Predictions out;
  out.binary = true;
  out.rows = preds.rows;
  for (auto& row : out.rows) {
    row.truth = static_cast<int>(
        dyad::merge_to_binary(static_cast<dyad::RelationshipLabel>(row.truth)));
    row.predicted = static_cast<int>(
        dyad::merge_to_binary(static_cast<dyad::RelationshipLabel>(row.predicted)));
  }
  return out;
}

}  // namespace

dyad_status dyad_confusion_render(const dyad_predictions* preds, int merge_binary,
                                  dyad_render_style style, char** table_out) {
  if (auto rc = require_arg(preds && table_out, "dyad_confusion_render: null argument"))
    return rc;
  return guarded([&] {
    dyad::ConfusionMatrix cm = dyad::confusion(merged_view(preds->preds, merge_binary));
    *table_out = dup_string(dyad::render(cm, style == DYAD_RENDER_COUNTS
                                                 ? dyad::RenderStyle::Counts
                                                 : dyad::RenderStyle::Percent));
  });
}

dyad_status dyad_confusion_report(const dyad_predictions* preds, int merge_binary,
                                  char** report_out) {
  if (auto rc = require_arg(preds && report_out, "dyad_confusion_report: null argument"))
    return rc;
  return guarded(
      [&] { *report_out = dup_string(dyad::render_report(preds->preds, merge_binary != 0)); });
}

dyad_status dyad_confusion_accuracy(const dyad_predictions* preds, int merge_binary,
                                    double* accuracy_out) {
  if (auto rc = require_arg(preds && accuracy_out, "dyad_confusion_accuracy: null argument"))
    return rc;
  return guarded([&] {
    dyad::ConfusionMatrix cm = dyad::confusion(merged_view(preds->preds, merge_binary));
    *accuracy_out = dyad::overall_accuracy(cm);
  });
}

/* ------------------------------------------------------------------ */

dyad_status dyad_selftest(char** log_out) {
  return guarded([&] {
    std::string log;
    bool ok = dyad::run_selftest(&log);
    if (log_out) *log_out = dup_string(log);
    if (!ok) dyad::raise(Err::SelftestFailed, "one or more self checks failed");
  });
}

} /* extern "C" */

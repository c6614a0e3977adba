// dyad - command-line front end for the dyadnet library. Talks to the core
// exclusively through the C API in dyadnet.h.

#include <dyadnet.h>

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

// exit code 1: domain error (contract named in the message)
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// exit code 2: bad usage (offending flag named in the message)
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(dyad_status status) {
  if (status != DYAD_OK) throw DomainError(dyad_last_error());
}

// RAII for strings returned by the library
struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { dyad_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string timestamp_utc() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::vector<std::string> split_str(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<uint32_t> parse_hidden(const std::string& text, const char* flag) {
  std::vector<uint32_t> out;
  for (const auto& part : split_str(text, '-')) {
    uint32_t v = 0;
    auto res = std::from_chars(part.data(), part.data() + part.size(), v);
    if (res.ec != std::errc() || res.ptr != part.data() + part.size() || v == 0)
      throw UsageError(std::string(flag) + ": expected sizes like 64-32, got '" + text + "'");
    out.push_back(v);
  }
  if (out.empty() || out.size() > DYAD_MAX_HIDDEN_LAYERS)
    throw UsageError(std::string(flag) + ": bad layer count in '" + text + "'");
  return out;
}

void parse_counts(const std::string& text, uint64_t counts[DYAD_NUM_LABELS]) {
  for (int i = 0; i < DYAD_NUM_LABELS; ++i) counts[i] = 0;
  for (const auto& part : split_str(text, ',')) {
    auto kv = split_str(part, '=');
    int label = -1;
    uint64_t v = 0;
    if (kv.size() == 2) {
      if (dyad_label_parse(kv[0].c_str(), &label) != DYAD_OK) label = -1;
      auto res = std::from_chars(kv[1].data(), kv[1].data() + kv[1].size(), v);
      if (res.ec != std::errc() || res.ptr != kv[1].data() + kv[1].size()) label = -1;
    }
    if (label < 0)
      throw UsageError("--counts: expected label=count pairs like colleagues=267, got '" + part +
                       "'");
    counts[label] = v;
  }
}

std::string counts_to_string(const uint64_t counts[DYAD_NUM_LABELS]) {
  std::string out;
  for (int i = 0; i < DYAD_NUM_LABELS; ++i) {
    if (i) out += ',';
    out += dyad_label_name(i);
    out += '=';
    out += std::to_string(counts[i]);
  }
  return out;
}

std::string hidden_to_string(const dyad_model_spec& spec) {
  std::string out;
  for (uint32_t i = 0; i < spec.hidden_count; ++i) {
    if (i) out += '-';
    out += std::to_string(spec.hidden[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Manifests: flat key=value blocks, printed before results and sufficient to
// reproduce the run through `dyad replay`.
// ---------------------------------------------------------------------------

struct Manifest {
  std::vector<std::pair<std::string, std::string>> entries;

  void add(const std::string& k, const std::string& v) { entries.emplace_back(k, v); }
  void add(const std::string& k, uint64_t v) { add(k, std::to_string(v)); }
  void add(const std::string& k, double v) { add(k, fmt_double(v)); }

  std::string render() const {
    std::string out = "# format: manifest/1\n";
    for (const auto& [k, v] : entries) out += k + "=" + v + "\n";
    return out;
  }

  const std::string* find(const std::string& k) const {
    for (const auto& [key, v] : entries)
      if (key == k) return &v;
    return nullptr;
  }
  const std::string& need(const std::string& k) const {
    const std::string* v = find(k);
    if (!v) throw DomainError("MalformedRow: manifest is missing key '" + k + "'");
    return *v;
  }
};

Manifest new_manifest(const std::string& subcommand) {
  Manifest m;
  m.add("toolkit_version", dyad_version());
  m.add("timestamp", timestamp_utc());
  m.add("subcommand", subcommand);
  return m;
}

void emit_manifest(const Manifest& m, const std::string& extra_path) {
  std::cout << m.render();
  if (!extra_path.empty()) {
    std::ofstream out(extra_path, std::ios::binary);
    if (!out.good()) throw DomainError("IoError: cannot write manifest '" + extra_path + "'");
    out << m.render();
  }
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw DomainError("IoError: cannot open manifest '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line.rfind("# format: manifest/1", 0) != 0)
    throw DomainError("MalformedRow: expected '# format: manifest/1' in '" + path + "'");
  Manifest m;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError("MalformedRow: manifest line without '=': " + line);
    m.add(line.substr(0, eq), line.substr(eq + 1));
  }
  return m;
}

uint64_t to_u64(const std::string& s, const char* what) {
  uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw DomainError(std::string("MalformedRow: bad ") + what + " '" + s + "'");
  return v;
}

double to_f64(const std::string& s, const char* what) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw DomainError(std::string("MalformedRow: bad ") + what + " '" + s + "'");
  return v;
}

// ---------------------------------------------------------------------------
// Subcommand options
// ---------------------------------------------------------------------------

struct GenDataOpts {
  std::string counts = "colleagues=267,couple=96,family=218,friendship=286";
  std::string mode = "separable";
  std::string profiles;
  uint64_t seed = 0;
  unsigned jobs = 1;
  std::string out;
  std::string manifest_out;
};

struct FeaturesOpts {
  std::string data;
  std::string out;
  std::string manifest_out;
};

struct TrainOpts {
  std::string model;
  std::string spec_file;
  std::string data;
  std::string out_dir;
  uint64_t seed = 0;
  uint32_t batch_size = 32;
  double l2_lambda = 1e-3;
  double train_fraction = 0.9;
  // registry overrides; negative / empty means "keep the spec value"
  std::string hidden;
  int64_t epochs = -1;
  double learning_rate = -1.0;
  double dropout_rate = -1.0;
};

struct EvalOpts {
  std::string model;
  std::string data;
  std::string out;
  std::string manifest_out;
};

struct ReportOpts {
  std::string predictions;
  bool merge_binary = false;
  std::string style = "both";
  std::string manifest_out;
};

dyad_model_spec spec_from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw DomainError("IoError: cannot open spec file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError("MalformedRow: spec file line without '=': " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const char* k, const char* dflt) -> std::string {
    auto it = kv.find(k);
    return it == kv.end() ? dflt : it->second;
  };
  dyad_model_spec spec{};
  std::snprintf(spec.name, sizeof(spec.name), "%s", get("name", "custom").c_str());
  spec.input_size = 16;
  spec.output_size = static_cast<uint32_t>(to_u64(get("output_classes", "4"), "output_classes"));
  auto hidden = parse_hidden(get("hidden", ""), "spec file hidden=");
  spec.hidden_count = static_cast<uint32_t>(hidden.size());
  for (size_t i = 0; i < hidden.size(); ++i) spec.hidden[i] = hidden[i];
  spec.first_hidden_is_lstm = get("lstm", "no") == "yes";
  spec.l2_enabled = get("l2_enabled", "no") == "yes";
  spec.dropout_rate = to_f64(get("dropout_rate", "0"), "dropout_rate");
  spec.learning_rate = to_f64(get("learning_rate", "0.0001"), "learning_rate");
  spec.epochs = static_cast<uint32_t>(to_u64(get("epochs", "1"), "epochs"));
  return spec;
}

// ---------------------------------------------------------------------------
// Command implementations
// ---------------------------------------------------------------------------

int run_gen_data(const GenDataOpts& opts) {
  uint64_t counts[DYAD_NUM_LABELS];
  parse_counts(opts.counts, counts);

  Manifest m = new_manifest("gen-data");
  m.add("mode", opts.mode);
  m.add("profiles", opts.profiles.empty() ? "builtin" : opts.profiles);
  m.add("counts", counts_to_string(counts));
  m.add("seed", opts.seed);
  m.add("jobs", static_cast<uint64_t>(opts.jobs));
  m.add("out", opts.out);
  emit_manifest(m, opts.manifest_out);

  dyad_dataset* ds = nullptr;
  check(dyad_generate(opts.mode.c_str(), opts.profiles.empty() ? nullptr : opts.profiles.c_str(),
                      counts, opts.seed, opts.jobs, &ds));
  dyad_status rc = dyad_dataset_save(ds, opts.out.c_str());
  size_t n = dyad_dataset_size(ds);
  dyad_dataset_free(ds);
  check(rc);
  std::cout << "wrote " << n << " experiments to " << opts.out << "\n";
  return 0;
}

int run_features(const FeaturesOpts& opts) {
  Manifest m = new_manifest("features");
  m.add("data", opts.data);
  m.add("out", opts.out);
  emit_manifest(m, opts.manifest_out);

  dyad_dataset* ds = nullptr;
  check(dyad_dataset_load(opts.data.c_str(), &ds));
  dyad_status rc = dyad_features_write_csv(ds, opts.out.c_str());
  size_t n = dyad_dataset_size(ds);
  dyad_dataset_free(ds);
  check(rc);
  std::cout << "wrote " << n << " feature rows to " << opts.out << "\n";
  return 0;
}

int run_train_resolved(const dyad_model_spec& spec, const dyad_train_config& cfg,
                       const std::string& data, const std::string& out_dir) {
  fs::create_directories(out_dir);
  Manifest m = new_manifest("train");
  m.add("data", data);
  m.add("out_dir", out_dir);
  m.add("model", spec.name);
  m.add("hidden", hidden_to_string(spec));
  m.add("lstm", spec.first_hidden_is_lstm ? "yes" : "no");
  m.add("output_classes", static_cast<uint64_t>(spec.output_size));
  m.add("l2_enabled", spec.l2_enabled ? "yes" : "no");
  m.add("dropout_rate", spec.dropout_rate);
  m.add("learning_rate", cfg.learning_rate);
  m.add("epochs", static_cast<uint64_t>(cfg.epochs));
  m.add("batch_size", static_cast<uint64_t>(cfg.batch_size));
  m.add("l2_lambda", cfg.l2_lambda);
  m.add("seed", cfg.seed);
  m.add("train_fraction", cfg.train_fraction);
  emit_manifest(m, (fs::path(out_dir) / "manifest.txt").string());

  dyad_dataset* ds = nullptr;
  check(dyad_dataset_load(data.c_str(), &ds));

  dyad_model* model = nullptr;
  dyad_report* report = nullptr;
  dyad_predictions* train_preds = nullptr;
  dyad_predictions* test_preds = nullptr;
  dyad_status rc = dyad_train(&spec, ds, &cfg, &model, &report, &train_preds, &test_preds);
  dyad_dataset_free(ds);
  check(rc);

  {
    OwnedString warnings;
    check(dyad_report_warnings(report, &warnings.p));
    if (!warnings.str().empty()) std::cerr << warnings.str();
  }

  fs::path dir(out_dir);
  check(dyad_model_save(model, (dir / "model.dyadnn").string().c_str()));
  check(dyad_report_write(report, (dir / "train_log.tsv").string().c_str()));
  check(
      dyad_predictions_write_tsv(train_preds, (dir / "predictions_train.tsv").string().c_str()));
  check(dyad_predictions_write_tsv(test_preds, (dir / "predictions_test.tsv").string().c_str()));

  std::cout << "train_accuracy=" << fmt_double(dyad_report_train_accuracy(report)) << "\n"
            << "test_accuracy=" << fmt_double(dyad_report_test_accuracy(report)) << "\n"
            << "wall_seconds=" << fmt_double(dyad_report_wall_seconds(report)) << "\n";

  dyad_predictions_free(train_preds);
  dyad_predictions_free(test_preds);
  dyad_report_free(report);
  dyad_model_free(model);
  return 0;
}

int run_train(const TrainOpts& opts) {
  if (opts.model.empty() == opts.spec_file.empty())
    throw UsageError("--model/--spec-file: pass exactly one of them");

  dyad_model_spec spec{};
  if (!opts.model.empty())
    check(dyad_registry_lookup(opts.model.c_str(), &spec));
  else
    spec = spec_from_file(opts.spec_file);

  // desk-scale overrides; the manifest records the resolved values
  if (!opts.hidden.empty()) {
    auto hidden = parse_hidden(opts.hidden, "--hidden");
    spec.hidden_count = static_cast<uint32_t>(hidden.size());
    for (size_t i = 0; i < hidden.size(); ++i) spec.hidden[i] = hidden[i];
  }
  if (opts.epochs >= 0) spec.epochs = static_cast<uint32_t>(opts.epochs);
  if (opts.learning_rate >= 0.0) spec.learning_rate = opts.learning_rate;
  if (opts.dropout_rate >= 0.0) spec.dropout_rate = opts.dropout_rate;

  dyad_train_config cfg{};
  check(dyad_train_config_defaults(&spec, &cfg));
  cfg.batch_size = opts.batch_size;
  cfg.l2_lambda = opts.l2_lambda;
  cfg.seed = opts.seed;
  cfg.train_fraction = opts.train_fraction;

  return run_train_resolved(spec, cfg, opts.data, opts.out_dir);
}

int run_eval(const EvalOpts& opts) {
  Manifest m = new_manifest("eval");
  m.add("model", opts.model);
  m.add("data", opts.data);
  m.add("out", opts.out.empty() ? "-" : opts.out);
  emit_manifest(m, opts.manifest_out);

  dyad_model* model = nullptr;
  check(dyad_model_load(opts.model.c_str(), &model));
  dyad_dataset* ds = nullptr;
  dyad_status rc = dyad_dataset_load(opts.data.c_str(), &ds);
  if (rc != DYAD_OK) {
    dyad_model_free(model);
    check(rc);
  }

  double accuracy = 0.0;
  dyad_predictions* preds = nullptr;
  rc = dyad_evaluate(model, ds, &accuracy, &preds);
  dyad_dataset_free(ds);
  dyad_model_free(model);
  check(rc);

  if (!opts.out.empty()) {
    rc = dyad_predictions_write_tsv(preds, opts.out.c_str());
    if (rc != DYAD_OK) {
      dyad_predictions_free(preds);
      check(rc);
    }
  }
  std::cout << "examples=" << dyad_predictions_size(preds) << "\n"
            << "accuracy=" << fmt_double(accuracy) << "\n";
  dyad_predictions_free(preds);
  return 0;
}

int run_report(const ReportOpts& opts) {
  if (opts.style != "both" && opts.style != "counts" && opts.style != "percent")
    throw UsageError("--style: expected both|counts|percent, got '" + opts.style + "'");

  Manifest m = new_manifest("report");
  m.add("predictions", opts.predictions);
  m.add("merge_binary", opts.merge_binary ? "yes" : "no");
  m.add("style", opts.style);
  emit_manifest(m, opts.manifest_out);

  dyad_predictions* preds = nullptr;
  check(dyad_predictions_load_tsv(opts.predictions.c_str(), &preds));

  OwnedString text;
  dyad_status rc;
  if (opts.style == "both") {
    rc = dyad_confusion_report(preds, opts.merge_binary ? 1 : 0, &text.p);
  } else {
    rc = dyad_confusion_render(preds, opts.merge_binary ? 1 : 0,
                               opts.style == "counts" ? DYAD_RENDER_COUNTS : DYAD_RENDER_PERCENT,
                               &text.p);
  }
  dyad_predictions_free(preds);
  check(rc);
  std::cout << text.str();
  return 0;
}

int run_models_list() {
  OwnedString table;
  check(dyad_models_table(&table.p));
  std::cout << table.str();
  return 0;
}

int run_selftest() {
  OwnedString log;
  dyad_status rc = dyad_selftest(&log.p);
  std::cout << log.str();
  if (rc != DYAD_OK) {
    std::cerr << "error: " << dyad_last_error() << "\n";
    return 1;
  }
  std::cout << "selftest ok\n";
  return 0;
}

int run_replay(const std::string& manifest_path) {
  Manifest m = load_manifest(manifest_path);
  const std::string& sub = m.need("subcommand");
  if (sub == "gen-data") {
    GenDataOpts o;
    o.mode = m.need("mode");
    const std::string& profiles = m.need("profiles");
    o.profiles = profiles == "builtin" ? "" : profiles;
    o.counts = m.need("counts");
    o.seed = to_u64(m.need("seed"), "seed");
    o.jobs = static_cast<unsigned>(to_u64(m.need("jobs"), "jobs"));
    o.out = m.need("out");
    return run_gen_data(o);
  }
  if (sub == "features") {
    FeaturesOpts o;
    o.data = m.need("data");
    o.out = m.need("out");
    return run_features(o);
  }
  if (sub == "train") {
    dyad_model_spec spec{};
    std::snprintf(spec.name, sizeof(spec.name), "%s", m.need("model").c_str());
    spec.input_size = 16;
    spec.output_size = static_cast<uint32_t>(to_u64(m.need("output_classes"), "output_classes"));
    auto hidden = parse_hidden(m.need("hidden"), "manifest hidden=");
    spec.hidden_count = static_cast<uint32_t>(hidden.size());
    for (size_t i = 0; i < hidden.size(); ++i) spec.hidden[i] = hidden[i];
    spec.first_hidden_is_lstm = m.need("lstm") == "yes";
    spec.l2_enabled = m.need("l2_enabled") == "yes";
    spec.dropout_rate = to_f64(m.need("dropout_rate"), "dropout_rate");
    spec.learning_rate = to_f64(m.need("learning_rate"), "learning_rate");
    spec.epochs = static_cast<uint32_t>(to_u64(m.need("epochs"), "epochs"));

    dyad_train_config cfg{};
    check(dyad_train_config_defaults(&spec, &cfg));
    cfg.batch_size = static_cast<uint32_t>(to_u64(m.need("batch_size"), "batch_size"));
    cfg.l2_lambda = to_f64(m.need("l2_lambda"), "l2_lambda");
    cfg.seed = to_u64(m.need("seed"), "seed");
    cfg.train_fraction = to_f64(m.need("train_fraction"), "train_fraction");
    return run_train_resolved(spec, cfg, m.need("data"), m.need("out_dir"));
  }
  if (sub == "eval") {
    EvalOpts o;
    o.model = m.need("model");
    o.data = m.need("data");
    const std::string& out = m.need("out");
    o.out = out == "-" ? "" : out;
    return run_eval(o);
  }
  if (sub == "report") {
    ReportOpts o;
    o.predictions = m.need("predictions");
    o.merge_binary = m.need("merge_binary") == "yes";
    o.style = m.need("style");
    return run_report(o);
  }
  throw DomainError("MalformedRow: manifest has unknown subcommand '" + sub + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dyadnet - pedestrian-dyad social relationship classifier toolkit"};
  app.require_subcommand(1);

  GenDataOpts gen_opts;
  auto* gen = app.add_subcommand("gen-data", "Generate a labeled synthetic trajectory dataset");
  gen->add_option("--counts", gen_opts.counts,
                  "Per-category experiment counts, label=count pairs separated by commas");
  gen->add_option("--mode", gen_opts.mode, "Profile set: separable or overlapping")
      ->default_val("separable");
  gen->add_option("--profiles", gen_opts.profiles,
                  "Key-value profile file applied on top of the mode defaults");
  gen->add_option("--seed", gen_opts.seed, "Generator seed")->default_val(0);
  gen->add_option("--jobs", gen_opts.jobs, "Parallel generation workers")->default_val(1);
  gen->add_option("--out", gen_opts.out, "Output CSV path")->required();
  gen->add_option("--manifest", gen_opts.manifest_out, "Also write the manifest to this path");

  FeaturesOpts feat_opts;
  auto* feat = app.add_subcommand("features", "Export averaged 16-feature rows per experiment");
  feat->add_option("--data", feat_opts.data, "Input dataset CSV")->required();
  feat->add_option("--out", feat_opts.out, "Output feature CSV path")->required();
  feat->add_option("--manifest", feat_opts.manifest_out, "Also write the manifest to this path");

  TrainOpts train_opts;
  auto* train = app.add_subcommand("train", "Train a model and write its artifacts");
  train->add_option("--model", train_opts.model, "Registry model name (see `models list`)");
  train->add_option("--spec-file", train_opts.spec_file, "Custom architecture key-value file");
  train->add_option("--data", train_opts.data, "Input dataset CSV")->required();
  train->add_option("--out-dir", train_opts.out_dir,
                    "Directory for manifest, model, log and predictions")
      ->required();
  train->add_option("--seed", train_opts.seed, "Run seed (split, init, shuffles, dropout)")
      ->default_val(0);
  train->add_option("--batch-size", train_opts.batch_size, "Mini-batch size")->default_val(32);
  train->add_option("--l2-lambda", train_opts.l2_lambda,
                    "L2 coefficient (used when the spec enables L2)")
      ->default_val(1e-3);
  train->add_option("--train-fraction", train_opts.train_fraction, "Training split fraction")
      ->default_val(0.9);
  train->add_option("--hidden", train_opts.hidden, "Override hidden sizes, e.g. 64-32");
  train->add_option("--epochs", train_opts.epochs, "Override epoch count");
  train->add_option("--learning-rate", train_opts.learning_rate, "Override learning rate");
  train->add_option("--dropout", train_opts.dropout_rate, "Override dropout rate");

  EvalOpts eval_opts;
  auto* eval = app.add_subcommand("eval", "Score a saved model on a dataset");
  eval->add_option("--model", eval_opts.model, "Model file written by train")->required();
  eval->add_option("--data", eval_opts.data, "Input dataset CSV")->required();
  eval->add_option("--out", eval_opts.out, "Write predictions TSV here");
  eval->add_option("--manifest", eval_opts.manifest_out, "Also write the manifest to this path");

  ReportOpts report_opts;
  auto* report = app.add_subcommand("report", "Confusion tables and accuracy from predictions");
  report->add_option("--predictions", report_opts.predictions, "Predictions TSV")->required();
  report->add_flag("--merge-binary", report_opts.merge_binary,
                   "Merge couple/family/friendship into 'intimate' first");
  report->add_option("--style", report_opts.style, "Output: both, counts or percent")
      ->default_val("both");
  report->add_option("--manifest", report_opts.manifest_out,
                     "Also write the manifest to this path");

  auto* models = app.add_subcommand("models", "Model registry");
  models->require_subcommand(1);
  models->add_subcommand("list", "Print every registry architecture");

  auto* selftest = app.add_subcommand("selftest", "Gradient checks and numeric invariants");

  std::string replay_manifest;
  auto* replay = app.add_subcommand("replay", "Re-run a recorded manifest");
  replay->add_option("--manifest", replay_manifest, "Manifest written by a previous run")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (gen->parsed()) return run_gen_data(gen_opts);
    if (feat->parsed()) return run_features(feat_opts);
    if (train->parsed()) return run_train(train_opts);
    if (eval->parsed()) return run_eval(eval_opts);
    if (report->parsed()) return run_report(report_opts);
    if (models->parsed()) return run_models_list();
    if (selftest->parsed()) return run_selftest();
    if (replay->parsed()) return run_replay(replay_manifest);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

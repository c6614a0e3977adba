#include "core/network.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "core/text.hpp"

static_assert(std::endian::native == std::endian::little,
              "model container assumes a little-endian host");

namespace dyad {

void validate_spec(const NetworkSpec& spec) {
  require(spec.input_size == kFeatureCount, Err::InvalidArgument,
          "input_size must be " + std::to_string(kFeatureCount));
  require(spec.output_size == 2 || spec.output_size == 4, Err::InvalidArgument,
          "output_size must be 2 or 4");
  require(!spec.hidden_sizes.empty(), Err::InvalidArgument, "hidden_sizes must be non-empty");
  for (uint32_t h : spec.hidden_sizes)
    require(h >= 1, Err::InvalidArgument, "hidden layer sizes must be >= 1");
  require(spec.dropout_rate >= 0.0 && spec.dropout_rate < 1.0, Err::InvalidArgument,
          "dropout_rate must lie in [0,1)");
  require(spec.learning_rate > 0.0, Err::InvalidArgument, "learning_rate must be > 0");
  require(spec.epochs >= 1, Err::InvalidArgument, "epochs must be >= 1");
}

namespace {

NetworkSpec make_spec(const char* name, std::vector<uint32_t> hidden, bool lstm, uint32_t out,
                      bool l2, double dropout, double lr, uint32_t epochs) {
  NetworkSpec s;
  s.name = name;
  s.hidden_sizes = std::move(hidden);
  s.first_hidden_is_lstm = lstm;
  s.output_size = out;
  s.l2_enabled = l2;
  s.dropout_rate = dropout;
  s.learning_rate = lr;
  s.epochs = epochs;
  return s;
}

const std::vector<NetworkSpec>& registry() {
  static const std::vector<NetworkSpec> entries = {
      make_spec("RN2-1", {25, 12}, false, 4, false, 0.0, 0.00015, 1500),
      make_spec("RN2-2", {1500, 600}, false, 4, false, 0.0, 0.00011, 2500),
      make_spec("RN2-3", {1500, 600}, false, 4, true, 0.0, 0.00011, 2500),
      make_spec("RN2-4", {1800, 2500, 1600, 600}, false, 4, true, 0.0, 0.00011, 2500),
      make_spec("RN2-5", {1500, 600}, false, 4, true, 0.15, 0.00011, 2500),
      make_spec("RNR2-1", {25, 12}, true, 4, true, 0.0, 0.00015, 1500),
      make_spec("RNR2-2", {2500, 1800, 1200, 600}, true, 4, true, 0.0, 0.00011, 10),
      make_spec("RNR2-3", {1500, 600}, true, 4, true, 0.0, 0.00011, 25),
      make_spec("RN2-6", {1500, 600}, false, 2, false, 0.0, 0.00011, 2500),
      make_spec("RN2-7", {1500, 600}, false, 2, true, 0.0, 0.00011, 2500),
      make_spec("RNR2-4", {25, 12}, true, 2, true, 0.0, 0.00011, 500),
  };
  return entries;
}

std::string hidden_str(const NetworkSpec& s) {
  std::string out;
  for (size_t i = 0; i < s.hidden_sizes.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(s.hidden_sizes[i]);
  }
  return out;
}

void render_rows(std::ostringstream& os, const std::vector<const NetworkSpec*>& rows) {
  auto pad = [](std::string s, size_t w) {
    while (s.size() < w) s += ' ';
    return s;
  };
  os << pad("model", 9) << pad("hidden layers", 15) << pad("neurons", 20) << pad("epochs", 8)
     << pad("learning rate", 15) << pad("L2 reg", 8) << "dropout\n";
  for (const NetworkSpec* s : rows) {
    os << pad(s->name, 9) << pad(std::to_string(s->hidden_sizes.size()), 15)
       << pad(hidden_str(*s), 20) << pad(std::to_string(s->epochs), 8)
       << pad(format_double(s->learning_rate), 15) << pad(s->l2_enabled ? "yes" : "no", 8)
       << (s->dropout_rate > 0.0 ? "yes" : "no") << "\n";
  }
}

}  // namespace

std::vector<std::string> registry_names() {
  std::vector<std::string> names;
  for (const auto& s : registry()) names.push_back(s.name);
  return names;
}

NetworkSpec registry_lookup(const std::string& name) {
  for (const auto& s : registry())
    if (s.name == name) return s;
  raise(Err::UnknownModelName, "no model named '" + name + "' in the registry");
}

std::string render_registry_table() {
  std::vector<const NetworkSpec*> standard4, recurrent4, binary2;
  for (const auto& s : registry()) {
    if (s.output_size == 2)
      binary2.push_back(&s);
    else if (s.first_hidden_is_lstm)
      recurrent4.push_back(&s);
    else
      standard4.push_back(&s);
  }
  std::ostringstream os;
  os << "# format: models/1\n\n";
  os << "standard NN models, 4 categories\n";
  render_rows(os, standard4);
  os << "\nRNN models, 4 categories (first hidden layer is LSTM)\n";
  render_rows(os, recurrent4);
  os << "\nNN models, 2 categories\n";
  render_rows(os, binary2);
  return os.str();
}

namespace {

void fill_uniform(Matrix& m, double limit, SplitMix64& rng) {
  for (double& v : m.data) v = rng.uniform(-limit, limit);
}

}  // namespace

Network build(const NetworkSpec& spec, uint64_t seed) {
  validate_spec(spec);
  Network net;
  net.spec = spec;
  SplitMix64 rng(seed);

  uint32_t fan_in = spec.input_size;
  size_t dense_start = 0;

  if (spec.first_hidden_is_lstm) {
    uint32_t hidden = spec.hidden_sizes[0];
    LstmLayer l = make_lstm_layer(fan_in, hidden);
    double wlim = std::sqrt(6.0 / static_cast<double>(fan_in + hidden));
    double ulim = std::sqrt(6.0 / static_cast<double>(hidden + hidden));
    fill_uniform(l.wi, wlim, rng);
    fill_uniform(l.wf, wlim, rng);
    fill_uniform(l.wg, wlim, rng);
    fill_uniform(l.wo, wlim, rng);
    fill_uniform(l.ui, ulim, rng);
    fill_uniform(l.uf, ulim, rng);
    fill_uniform(l.ug, ulim, rng);
    fill_uniform(l.uo, ulim, rng);
    // forget-gate bias 1 counters vanishing gradients early in training
    for (double& b : l.bf) b = 1.0;
    net.lstm = std::move(l);
    fan_in = hidden;
    dense_start = 1;
  }

  auto add_dense = [&](uint32_t out, Activation act) {
    DenseLayer d;
    d.w = Matrix(out, fan_in);
    d.b = Vector(out, 0.0);
    d.activation = act;
    double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    // the softmax head starts at a tenth of the He scale so a fresh model
    // predicts near-uniformly and its initial loss sits at ln C
    if (act == Activation::Softmax) limit *= 0.1;
    fill_uniform(d.w, limit, rng);
    net.dense.push_back(std::move(d));
    fan_in = out;
  };

  for (size_t i = dense_start; i < spec.hidden_sizes.size(); ++i)
    add_dense(spec.hidden_sizes[i], Activation::ReLU);
  add_dense(spec.output_size, Activation::Softmax);
  return net;
}

size_t parameter_count(const Network& net) {
  size_t n = 0;
  if (net.lstm) {
    const LstmLayer& l = *net.lstm;
    n += 4 * (l.wi.size() + l.ui.size() + l.bi.size());
  }
  for (const auto& d : net.dense) n += d.w.size() + d.b.size();
  return n;
}

Matrix network_probs(const Network& net, const Matrix& features) {
  require(!net.lstm, Err::InvalidArgument, "recurrent model needs the sequence path");
  require(features.cols == kFeatureCount, Err::ShapeMismatch, "feature width");
  Matrix x = features;
  for (size_t i = 0; i < x.rows; ++i)
    for (size_t j = 0; j < x.cols; ++j)
      x(i, j) = (x(i, j) - net.standardizer.mean[j]) / net.standardizer.stddev[j];
  for (const auto& d : net.dense) x = dense_forward(d, x);
  return x;
}

Vector network_probs_seq(const Network& net, const FeatureSequence& seq) {
  require(net.lstm.has_value(), Err::InvalidArgument, "dense model needs the vector path");
  require(!seq.steps.empty(), Err::EmptySequence, "empty feature sequence");
  std::vector<Vector> xs;
  xs.reserve(seq.steps.size());
  for (const auto& step : seq.steps) {
    FeatureVector s = apply_standardizer(net.standardizer, step);
    xs.emplace_back(s.v.begin(), s.v.end());
  }
  Vector h = lstm_forward(*net.lstm, xs);
  Matrix x(1, h.size());
  x.data = h;
  for (const auto& d : net.dense) x = dense_forward(d, x);
  return x.data;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[7] = {'D', 'Y', 'A', 'D', 'N', 'N', '1'};
constexpr uint32_t kVersion = 1;

struct Writer {
  std::ofstream out;
  explicit Writer(const std::string& path) : out(path, std::ios::binary) {
    require(out.good(), Err::Io, "cannot write '" + path + "'");
  }
  void bytes(const void* p, size_t n) { out.write(static_cast<const char*>(p), n); }
  void u8(uint8_t v) { bytes(&v, 1); }
  void u32(uint32_t v) { bytes(&v, 4); }
  void u64(uint64_t v) { bytes(&v, 8); }
  void f64(double v) { bytes(&v, 8); }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
};

struct Reader {
  std::ifstream in;
  explicit Reader(const std::string& path) : in(path, std::ios::binary) {
    require(in.good(), Err::Io, "cannot open '" + path + "'");
  }
  void bytes(void* p, size_t n) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    require(in.gcount() == static_cast<std::streamsize>(n), Err::CorruptModelFile,
            "truncated model file");
  }
  uint8_t u8() {
    uint8_t v;
    bytes(&v, 1);
    return v;
  }
  uint32_t u32() {
    uint32_t v;
    bytes(&v, 4);
    return v;
  }
  uint64_t u64() {
    uint64_t v;
    bytes(&v, 8);
    return v;
  }
  double f64() {
    double v;
    bytes(&v, 8);
    return v;
  }
  std::string str() {
    uint32_t n = u32();
    require(n <= 4096, Err::CorruptModelFile, "unreasonable string length");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  bool at_eof() { return in.peek() == std::ifstream::traits_type::eof(); }
};

}  // namespace

void save_model(const Network& net, const std::string& path) {
  Writer w(path);
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kVersion);
  w.str(net.spec.name);
  w.u32(net.spec.input_size);
  w.u32(net.spec.output_size);
  w.u32(static_cast<uint32_t>(net.spec.hidden_sizes.size()));
  for (uint32_t h : net.spec.hidden_sizes) w.u32(h);
  w.u8(net.spec.first_hidden_is_lstm ? 1 : 0);
  w.u8(net.spec.l2_enabled ? 1 : 0);
  w.f64(net.spec.dropout_rate);
  w.f64(net.spec.learning_rate);
  w.u32(net.spec.epochs);
  for (double m : net.standardizer.mean) w.f64(m);
  for (double s : net.standardizer.stddev) w.f64(s);

  uint64_t count = parameter_count(net);
  w.u64(count);
  auto dump_matrix = [&](const Matrix& m) {
    w.bytes(m.data.data(), m.data.size() * sizeof(double));
  };
  auto dump_vector = [&](const Vector& v) { w.bytes(v.data(), v.size() * sizeof(double)); };
  if (net.lstm) {
    const LstmLayer& l = *net.lstm;
    dump_matrix(l.wi);
    dump_matrix(l.wf);
    dump_matrix(l.wg);
    dump_matrix(l.wo);
    dump_matrix(l.ui);
    dump_matrix(l.uf);
    dump_matrix(l.ug);
    dump_matrix(l.uo);
    dump_vector(l.bi);
    dump_vector(l.bf);
    dump_vector(l.bg);
    dump_vector(l.bo);
  }
  for (const auto& d : net.dense) {
    dump_matrix(d.w);
    dump_vector(d.b);
  }
  w.out.flush();
  require(w.out.good(), Err::Io, "write failed for '" + path + "'");
}

Network load_model(const std::string& path) {
  Reader r(path);
  char magic[7];
  r.bytes(magic, sizeof(magic));
  require(std::memcmp(magic, kMagic, sizeof(kMagic)) == 0, Err::CorruptModelFile,
          "bad magic, not a model file");
  uint32_t version = r.u32();
  require(version == kVersion, Err::CorruptModelFile,
          "unsupported model file version " + std::to_string(version) + ", expected " +
              std::to_string(kVersion));

  NetworkSpec spec;
  spec.name = r.str();
  spec.input_size = r.u32();
  spec.output_size = r.u32();
  uint32_t n_hidden = r.u32();
  require(n_hidden >= 1 && n_hidden <= 64, Err::CorruptModelFile, "bad hidden layer count");
  spec.hidden_sizes.resize(n_hidden);
  for (auto& h : spec.hidden_sizes) h = r.u32();
  spec.first_hidden_is_lstm = r.u8() != 0;
  spec.l2_enabled = r.u8() != 0;
  spec.dropout_rate = r.f64();
  spec.learning_rate = r.f64();
  spec.epochs = r.u32();
  try {
    validate_spec(spec);
  } catch (const Error& e) {
    raise(Err::CorruptModelFile, std::string("invalid stored spec: ") + e.what());
  }

  Network net = build(spec, 0);
  for (double& m : net.standardizer.mean) m = r.f64();
  for (double& s : net.standardizer.stddev) s = r.f64();

  uint64_t count = r.u64();
  require(count == parameter_count(net), Err::CorruptModelFile,
          "parameter count " + std::to_string(count) + " does not match spec shapes");
  auto read_matrix = [&](Matrix& m) { r.bytes(m.data.data(), m.data.size() * sizeof(double)); };
  auto read_vector = [&](Vector& v) { r.bytes(v.data(), v.size() * sizeof(double)); };
  if (net.lstm) {
    LstmLayer& l = *net.lstm;
    read_matrix(l.wi);
    read_matrix(l.wf);
    read_matrix(l.wg);
    read_matrix(l.wo);
    read_matrix(l.ui);
    read_matrix(l.uf);
    read_matrix(l.ug);
    read_matrix(l.uo);
    read_vector(l.bi);
    read_vector(l.bf);
    read_vector(l.bg);
    read_vector(l.bo);
  }
  for (auto& d : net.dense) {
    read_matrix(d.w);
    read_vector(d.b);
  }
  require(r.at_eof(), Err::CorruptModelFile, "trailing bytes after parameters");
  return net;
}

}  // namespace dyad

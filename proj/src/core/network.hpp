#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/features.hpp"
#include "core/layers.hpp"
#include "core/lstm.hpp"

namespace dyad {

// Declarative architecture description. Registry entries carry the exact
// hyperparameters of the published configurations.
struct NetworkSpec {
  std::string name = "custom";
  uint32_t input_size = kFeatureCount;
  std::vector<uint32_t> hidden_sizes;
  bool first_hidden_is_lstm = false;
  uint32_t output_size = 4;
  bool l2_enabled = false;
  double dropout_rate = 0.0;  // 0 disables dropout
  double learning_rate = 1e-4;
  uint32_t epochs = 1;
};

void validate_spec(const NetworkSpec& spec);

std::vector<std::string> registry_names();
NetworkSpec registry_lookup(const std::string& name);  // throws UnknownModelName

// Text table of every registry entry; `models list` prints this verbatim.
std::string render_registry_table();

// Instantiated parameters. The standardizer travels with the network so a
// saved model can score new data on its own; build() leaves it at identity
// and training replaces it with the fit on the training split.
struct Network {
  NetworkSpec spec;
  std::optional<LstmLayer> lstm;   // present iff spec.first_hidden_is_lstm
  std::vector<DenseLayer> dense;   // ReLU hidden layers, then the Softmax output layer
  Standardizer standardizer;
};

// Deterministic in (spec, seed). Dense layers: He-uniform weights, zero
// biases. LSTM blocks: Xavier-uniform, forget-gate bias 1, other biases 0.
// Draw order: LSTM Wi,Wf,Wg,Wo,Ui,Uf,Ug,Uo row-major, then dense layers in
// order.
Network build(const NetworkSpec& spec, uint64_t seed);

size_t parameter_count(const Network& net);

// Inference on raw (unstandardized) feature rows; applies the embedded
// standardizer, returns per-row class probabilities.
Matrix network_probs(const Network& net, const Matrix& features);

// Sequence path: standardizes each step, runs the LSTM, then the dense stack.
Vector network_probs_seq(const Network& net, const FeatureSequence& seq);

// Binary container: magic DYADNN1, version, spec fields, standardizer, then
// all parameters as contiguous little-endian doubles in build() order.
void save_model(const Network& net, const std::string& path);
Network load_model(const std::string& path);

}  // namespace dyad

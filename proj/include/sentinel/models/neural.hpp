#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "sentinel/dataset.hpp"

namespace sentinel {

enum class Activation { kLinear, kRelu, kTanh, kSigmoid };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

// Fully connected layer; weights are row-major [outputs x inputs].
struct DenseLayer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights;
    std::vector<double> biases;
    Activation activation = Activation::kLinear;
};

enum class Loss {
    kBinaryCrossEntropy,  // single sigmoid output, target in {0, 1}
    kMeanSquaredError,    // mean over output components
};

class Network {
public:
    std::vector<DenseLayer> layers;

    std::vector<double> forward(std::span<const double> x) const;
    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().inputs; }
    std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().outputs; }
    std::size_t parameter_count() const;

    // Flattened parameters: per layer, weights then biases.
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> flat);
};

// Layer widths {in, h1, ..., out}; weights uniform in +-1/sqrt(fan_in), biases zero.
Network make_network(std::span<const std::size_t> widths, std::span<const Activation> activations, std::uint64_t seed);

// Mean loss over the batch.
double network_loss(const Network& net, std::span<const std::vector<double>> inputs,
                    std::span<const std::vector<double>> targets, Loss loss);

// Gradient of network_loss with respect to parameters(), by backpropagation.
std::vector<double> network_gradient(const Network& net, std::span<const std::vector<double>> inputs,
                                     std::span<const std::vector<double>> targets, Loss loss);

struct SgdParams {
    double learning_rate = 0.1;
    int epochs = 100;
    std::size_t batch_size = 16;
    std::uint64_t seed = 42;
};

// Mini-batch SGD over a seeded permutation per epoch.
void train_network(Network& net, std::span<const std::vector<double>> inputs,
                   std::span<const std::vector<double>> targets, Loss loss, const SgdParams& sgd);

// --- Multilayer perceptron classifier ---------------------------------------

struct MlpParams {
    std::vector<std::size_t> hidden{16};
    double learning_rate = 0.1;
    int epochs = 100;
    std::size_t batch_size = 16;
    std::uint64_t seed = 42;
};

class Mlp {
public:
    Network net;
    double predict(std::span<const double> x) const;
};

Mlp train_mlp(const LabeledDataset& ds, const MlpParams& params);

// --- Autoencoder ----------------------------------------------------------------

struct AutoencoderParams {
    std::size_t bottleneck = 4;
    double learning_rate = 0.1;
    int epochs = 100;
    std::size_t batch_size = 16;
    std::uint64_t seed = 42;
    double threshold_percentile = 95.0;
    Activation hidden_activation = Activation::kTanh;
    Activation output_activation = Activation::kSigmoid;
};

class Autoencoder {
public:
    Network net;
    double anomaly_threshold = 0.0;

    // Mean squared reconstruction error.
    double anomaly_score(std::span<const double> x) const;
    bool is_anomalous(std::span<const double> x) const { return anomaly_score(x) > anomaly_threshold; }
};

// Trains on the given rows only (callers pass legitimate rows). The threshold
// is the given percentile of training-row scores, linearly interpolated.
Autoencoder train_autoencoder(std::span<const std::vector<double>> legit_rows, const AutoencoderParams& params);

double percentile(std::vector<double> values, double pct);

}  // namespace sentinel

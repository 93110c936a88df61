#include "sentinel/models/neural.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "sentinel/error.hpp"
#include "sentinel/models/gbm.hpp"
#include "sentinel/rng.hpp"

namespace sentinel {

namespace {

double activate(Activation a, double z) {
    switch (a) {
        case Activation::kLinear: return z;
        case Activation::kRelu: return z > 0.0 ? z : 0.0;
        case Activation::kTanh: return std::tanh(z);
        case Activation::kSigmoid: return sigmoid(z);
    }
    return z;
}

// Derivative expressed through the pre-activation z and output a = f(z).
double derivative(Activation act, double z, double a) {
    switch (act) {
        case Activation::kLinear: return 1.0;
        case Activation::kRelu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::kTanh: return 1.0 - a * a;
        case Activation::kSigmoid: return a * (1.0 - a);
    }
    return 1.0;
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

struct Trace {
    std::vector<std::vector<double>> pre;  // z per layer
    std::vector<std::vector<double>> act;  // act[0] = input, act[l + 1] = output of layer l
};

Trace forward_trace(const Network& net, std::span<const double> x) {
    if (x.size() != net.input_dim()) {
        throw Error(ErrorCode::kDimensionMismatch, "network expects " + std::to_string(net.input_dim()) +
                                                       " inputs, got " + std::to_string(x.size()));
    }
    Trace tr;
    tr.act.emplace_back(x.begin(), x.end());
    for (const auto& layer : net.layers) {
        const auto& in = tr.act.back();
        std::vector<double> z(layer.outputs);
        std::vector<double> a(layer.outputs);
        for (std::size_t o = 0; o < layer.outputs; ++o) {
            double s = layer.biases[o];
            const double* w = layer.weights.data() + o * layer.inputs;
            for (std::size_t i = 0; i < layer.inputs; ++i) s += w[i] * in[i];
            z[o] = s;
            a[o] = activate(layer.activation, s);
        }
        tr.pre.push_back(std::move(z));
        tr.act.push_back(std::move(a));
    }
    return tr;
}

void check_loss_shape(const Network& net, Loss loss) {
    if (net.layers.empty()) throw Error(ErrorCode::kInvalidConfig, "network has no layers");
    if (loss == Loss::kBinaryCrossEntropy &&
        (net.output_dim() != 1 || net.layers.back().activation != Activation::kSigmoid)) {
        throw Error(ErrorCode::kInvalidConfig, "cross-entropy needs a single sigmoid output");
    }
}

double sample_loss(const Trace& tr, std::span<const double> target, Loss loss) {
    if (loss == Loss::kBinaryCrossEntropy) {
        const double z = tr.pre.back()[0];
        return softplus(z) - target[0] * z;
    }
    const auto& out = tr.act.back();
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) s += (out[i] - target[i]) * (out[i] - target[i]);
    return s / static_cast<double>(out.size());
}

// Adds the gradient of one sample's loss, scaled by `scale`, into `grad`.
void accumulate_gradient(const Network& net, const Trace& tr, std::span<const double> target, Loss loss, double scale,
                         std::vector<double>& grad) {
    const std::size_t L = net.layers.size();
    std::vector<double> delta(net.output_dim());
    const auto& out = tr.act.back();
    if (loss == Loss::kBinaryCrossEntropy) {
        delta[0] = out[0] - target[0];
    } else {
        const double d = static_cast<double>(out.size());
        for (std::size_t o = 0; o < out.size(); ++o) {
            delta[o] = 2.0 * (out[o] - target[o]) / d * derivative(net.layers.back().activation, tr.pre.back()[o], out[o]);
        }
    }

    // Offsets of each layer's block in the flat parameter vector.
    std::vector<std::size_t> offset(L);
    std::size_t acc = 0;
    for (std::size_t l = 0; l < L; ++l) {
        offset[l] = acc;
        acc += net.layers[l].weights.size() + net.layers[l].biases.size();
    }

    for (std::size_t l = L; l-- > 0;) {
        const auto& layer = net.layers[l];
        const auto& in = tr.act[l];
        double* gw = grad.data() + offset[l];
        double* gb = gw + layer.weights.size();
        for (std::size_t o = 0; o < layer.outputs; ++o) {
            const double d = scale * delta[o];
            gb[o] += d;
            for (std::size_t i = 0; i < layer.inputs; ++i) gw[o * layer.inputs + i] += d * in[i];
        }
        if (l == 0) break;
        std::vector<double> prev(layer.inputs, 0.0);
        for (std::size_t o = 0; o < layer.outputs; ++o) {
            const double* w = layer.weights.data() + o * layer.inputs;
            for (std::size_t i = 0; i < layer.inputs; ++i) prev[i] += w[i] * delta[o];
        }
        const auto& below = net.layers[l - 1];
        for (std::size_t i = 0; i < prev.size(); ++i) {
            prev[i] *= derivative(below.activation, tr.pre[l - 1][i], tr.act[l][i]);
        }
        delta = std::move(prev);
    }
}

}  // namespace

std::string_view activation_name(Activation a) {
    switch (a) {
        case Activation::kLinear: return "linear";
        case Activation::kRelu: return "relu";
        case Activation::kTanh: return "tanh";
        case Activation::kSigmoid: return "sigmoid";
    }
    return "linear";
}

Activation parse_activation(std::string_view name) {
    for (auto a : {Activation::kLinear, Activation::kRelu, Activation::kTanh, Activation::kSigmoid}) {
        if (activation_name(a) == name) return a;
    }
    throw Error(ErrorCode::kSchemaError, "unknown activation '" + std::string(name) + "'");
}

std::vector<double> Network::forward(std::span<const double> x) const { return forward_trace(*this, x).act.back(); }

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.biases.size();
    return n;
}

std::vector<double> Network::parameters() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (const auto& l : layers) {
        flat.insert(flat.end(), l.weights.begin(), l.weights.end());
        flat.insert(flat.end(), l.biases.begin(), l.biases.end());
    }
    return flat;
}

void Network::set_parameters(std::span<const double> flat) {
    if (flat.size() != parameter_count()) throw Error(ErrorCode::kDimensionMismatch, "parameter vector size mismatch");
    std::size_t k = 0;
    for (auto& l : layers) {
        for (auto& w : l.weights) w = flat[k++];
        for (auto& b : l.biases) b = flat[k++];
    }
}

Network make_network(std::span<const std::size_t> widths, std::span<const Activation> activations, std::uint64_t seed) {
    if (widths.size() < 2 || activations.size() != widths.size() - 1) {
        throw Error(ErrorCode::kInvalidConfig, "network needs one activation per layer");
    }
    Rng rng(seed);
    Network net;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        if (widths[l] == 0 || widths[l + 1] == 0) throw Error(ErrorCode::kInvalidConfig, "layer width must be > 0");
        DenseLayer layer;
        layer.inputs = widths[l];
        layer.outputs = widths[l + 1];
        layer.activation = activations[l];
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.inputs));
        layer.weights.resize(layer.inputs * layer.outputs);
        for (auto& w : layer.weights) w = rng.uniform(-bound, bound);
        layer.biases.assign(layer.outputs, 0.0);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

double network_loss(const Network& net, std::span<const std::vector<double>> inputs,
                    std::span<const std::vector<double>> targets, Loss loss) {
    check_loss_shape(net, loss);
    if (inputs.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < inputs.size(); ++i) total += sample_loss(forward_trace(net, inputs[i]), targets[i], loss);
    return total / static_cast<double>(inputs.size());
}

std::vector<double> network_gradient(const Network& net, std::span<const std::vector<double>> inputs,
                                     std::span<const std::vector<double>> targets, Loss loss) {
    check_loss_shape(net, loss);
    std::vector<double> grad(net.parameter_count(), 0.0);
    if (inputs.empty()) return grad;
    const double scale = 1.0 / static_cast<double>(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        accumulate_gradient(net, forward_trace(net, inputs[i]), targets[i], loss, scale, grad);
    }
    return grad;
}

void train_network(Network& net, std::span<const std::vector<double>> inputs,
                   std::span<const std::vector<double>> targets, Loss loss, const SgdParams& sgd) {
    check_loss_shape(net, loss);
    if (sgd.epochs < 0 || !(sgd.learning_rate >= 0.0) || sgd.batch_size == 0) {
        throw Error(ErrorCode::kInvalidConfig, "bad SGD parameters");
    }
    if (inputs.size() != targets.size()) throw Error(ErrorCode::kDimensionMismatch, "inputs/targets length differ");
    if (inputs.empty()) return;

    Rng rng(sgd.seed);
    std::vector<std::size_t> order(inputs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto params = net.parameters();
    std::vector<double> grad(params.size());
    for (int epoch = 0; epoch < sgd.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += sgd.batch_size) {
            const std::size_t end = std::min(order.size(), start + sgd.batch_size);
            std::fill(grad.begin(), grad.end(), 0.0);
            const double scale = 1.0 / static_cast<double>(end - start);
            for (std::size_t k = start; k < end; ++k) {
                const auto i = order[k];
                accumulate_gradient(net, forward_trace(net, inputs[i]), targets[i], loss, scale, grad);
            }
            for (std::size_t p = 0; p < params.size(); ++p) params[p] -= sgd.learning_rate * grad[p];
            net.set_parameters(params);
        }
    }
}

double Mlp::predict(std::span<const double> x) const { return net.forward(x)[0]; }

Mlp train_mlp(const LabeledDataset& ds, const MlpParams& params) {
    if (ds.rows.empty()) throw Error(ErrorCode::kInvalidConfig, "cannot train an MLP on an empty dataset");
    std::vector<std::size_t> widths{ds.dim()};
    std::vector<Activation> acts;
    for (auto h : params.hidden) {
        widths.push_back(h);
        acts.push_back(Activation::kRelu);
    }
    widths.push_back(1);
    acts.push_back(Activation::kSigmoid);

    Mlp mlp;
    mlp.net = make_network(widths, acts, params.seed);
    std::vector<std::vector<double>> inputs;
    std::vector<std::vector<double>> targets;
    for (const auto& r : ds.rows) {
        inputs.push_back(r.x);
        targets.push_back({static_cast<double>(r.label)});
    }
    // Shuffle stream is distinct from the initialization stream.
    train_network(mlp.net, inputs, targets, Loss::kBinaryCrossEntropy,
                  {params.learning_rate, params.epochs, params.batch_size, derive_seed(params.seed, 1)});
    return mlp;
}

double Autoencoder::anomaly_score(std::span<const double> x) const {
    const auto out = net.forward(x);
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) s += (out[i] - x[i]) * (out[i] - x[i]);
    return out.empty() ? 0.0 : s / static_cast<double>(out.size());
}

double percentile(std::vector<double> values, double pct) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double rank = std::clamp(pct, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (rank - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Autoencoder train_autoencoder(std::span<const std::vector<double>> legit_rows, const AutoencoderParams& params) {
    if (legit_rows.empty()) throw Error(ErrorCode::kInvalidConfig, "autoencoder needs at least one legitimate row");
    if (params.bottleneck == 0) throw Error(ErrorCode::kInvalidConfig, "bottleneck must be > 0");
    if (!(params.threshold_percentile >= 0.0 && params.threshold_percentile <= 100.0)) {
        throw Error(ErrorCode::kInvalidConfig, "threshold_percentile must lie in [0, 100]");
    }
    const std::size_t d = legit_rows.front().size();
    const std::array<std::size_t, 3> widths{d, params.bottleneck, d};
    const std::array<Activation, 2> acts{params.hidden_activation, params.output_activation};

    Autoencoder ae;
    ae.net = make_network(widths, acts, params.seed);
    train_network(ae.net, legit_rows, legit_rows, Loss::kMeanSquaredError,
                  {params.learning_rate, params.epochs, params.batch_size, derive_seed(params.seed, 1)});

    std::vector<double> scores;
    scores.reserve(legit_rows.size());
    for (const auto& r : legit_rows) scores.push_back(ae.anomaly_score(r));
    ae.anomaly_threshold = percentile(std::move(scores), params.threshold_percentile);
    return ae;
}

}  // namespace sentinel

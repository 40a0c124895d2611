#pragma once

#include "hnn/common.hpp"
#include "hnn/rng.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace hnn::net {

enum class Activation { ReLU, Softplus, Linear, Tanh };

enum class Mode { Train, Eval };

// Overflow-safe Softplus: max(x,0) + log1p(exp(-|x|)). Mathematically > 0 for
// all finite x; clamp away denormal underflow so downstream logs stay finite.
inline double softplus(double x) {
    const double v = std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
    return std::max(v, 1e-300);
}

inline double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

inline double activate(Activation a, double x) {
    switch (a) {
        case Activation::ReLU: return x > 0.0 ? x : 0.0;
        case Activation::Softplus: return softplus(x);
        case Activation::Linear: return x;
        case Activation::Tanh: return std::tanh(x);
    }
    return x;
}

// derivative as a function of the pre-activation
inline double activate_deriv(Activation a, double x) {
    switch (a) {
        case Activation::ReLU: return x > 0.0 ? 1.0 : 0.0;
        case Activation::Softplus: return sigmoid(x);
        case Activation::Linear: return 1.0;
        case Activation::Tanh: {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        }
    }
    return 1.0;
}

struct DenseLayer {
    Matrix weights;  // out x in
    Vector bias;     // out
    Activation activation = Activation::ReLU;

    DenseLayer() = default;
    DenseLayer(Eigen::Index out, Eigen::Index in, Activation act)
        : weights(Matrix::Zero(out, in)), bias(Vector::Zero(out)), activation(act) {}

    Eigen::Index in_dim() const { return weights.cols(); }
    Eigen::Index out_dim() const { return weights.rows(); }

    void validate() const {
        if (bias.size() != weights.rows()) throw ShapeError("DenseLayer: bias/weight mismatch");
        if (!weights.allFinite() || !bias.allFinite())
            throw NumericError("DenseLayer: non-finite parameters");
    }
};

struct LayerGrads {
    Matrix d_weights;
    Vector d_bias;
};

using StackGrads = std::vector<LayerGrads>;

struct StackCache {
    std::vector<Matrix> inputs;         // input fed to each layer (in x batch)
    std::vector<Matrix> preacts;        // z = W*input + b
    std::vector<Matrix> dropout_masks;  // inverted-scaled; empty when unused
    bool train_mode = false;
    bool valid = false;
};

struct ParamRef {
    double* data;
    Eigen::Index size;
};

// A plain feed-forward stack. Dropout (inverted scaling: activations divided
// by the keep-probability at train time) is applied to the outputs of the
// first `n_dropout_layers` layers.
class LayerStack {
public:
    LayerStack() = default;
    explicit LayerStack(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {}

    std::vector<DenseLayer>& layers() { return layers_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }
    bool empty() const { return layers_.empty(); }
    Eigen::Index in_dim() const { return layers_.front().in_dim(); }
    Eigen::Index out_dim() const { return layers_.back().out_dim(); }

    Matrix forward(const Matrix& x, Mode mode, double dropout_rate, int n_dropout_layers,
                   Rng* rng, StackCache* cache) const {
        if (x.rows() != in_dim())
            throw ShapeError("LayerStack: input has " + std::to_string(x.rows()) +
                             " rows, expected " + std::to_string(in_dim()));
        const bool dropping = mode == Mode::Train && dropout_rate > 0.0;
        if (cache) {
            cache->inputs.clear();
            cache->preacts.clear();
            cache->dropout_masks.clear();
            cache->train_mode = mode == Mode::Train;
            cache->valid = true;
        }
        Matrix a = x;
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            const DenseLayer& layer = layers_[l];
            if (cache) cache->inputs.push_back(a);
            Matrix z = (layer.weights * a).colwise() + layer.bias;
            if (cache) cache->preacts.push_back(z);
            const Activation act = layer.activation;
            a = z.unaryExpr([act](double v) { return activate(act, v); });
            if (dropping && static_cast<int>(l) < n_dropout_layers) {
                Matrix mask(a.rows(), a.cols());
                const double keep = 1.0 - dropout_rate;
                for (Eigen::Index j = 0; j < mask.cols(); ++j)
                    for (Eigen::Index i = 0; i < mask.rows(); ++i)
                        mask(i, j) = rng->uniform() < keep ? 1.0 / keep : 0.0;
                a = a.cwiseProduct(mask);
                if (cache) cache->dropout_masks.push_back(std::move(mask));
            } else if (cache) {
                cache->dropout_masks.emplace_back();
            }
            if (!a.allFinite())
                throw NumericError("LayerStack: non-finite activation in layer " +
                                   std::to_string(l));
        }
        return a;
    }

    // d_out is the gradient w.r.t. the stack output; returns the gradient
    // w.r.t. the stack input and accumulates parameter gradients into `grads`.
    Matrix backward(const Matrix& d_out, const StackCache& cache, StackGrads& grads) const {
        if (!cache.valid || cache.inputs.size() != layers_.size())
            throw StateError("LayerStack: backward called with a stale cache");
        if (grads.size() != layers_.size()) {
            grads.resize(layers_.size());
            for (std::size_t l = 0; l < layers_.size(); ++l) {
                grads[l].d_weights = Matrix::Zero(layers_[l].out_dim(), layers_[l].in_dim());
                grads[l].d_bias = Vector::Zero(layers_[l].out_dim());
            }
        }
        Matrix da = d_out;
        for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
            const auto ul = static_cast<std::size_t>(l);
            const DenseLayer& layer = layers_[ul];
            if (cache.dropout_masks[ul].size() > 0)
                da = da.cwiseProduct(cache.dropout_masks[ul]);
            const Activation act = layer.activation;
            const Matrix dz =
                da.cwiseProduct(cache.preacts[ul].unaryExpr(
                    [act](double v) { return activate_deriv(act, v); }));
            grads[ul].d_weights += dz * cache.inputs[ul].transpose();
            grads[ul].d_bias += dz.rowwise().sum();
            da = layer.weights.transpose() * dz;
        }
        return da;
    }

    void init_weights(Rng& rng, double weight_sd) {
        for (auto& layer : layers_) {
            for (Eigen::Index j = 0; j < layer.weights.cols(); ++j)
                for (Eigen::Index i = 0; i < layer.weights.rows(); ++i)
                    layer.weights(i, j) = rng.normal() * weight_sd;
            layer.bias.setZero();
        }
    }

    void collect_params(std::vector<ParamRef>& out) {
        for (auto& layer : layers_) {
            out.push_back({layer.weights.data(), layer.weights.size()});
            out.push_back({layer.bias.data(), layer.bias.size()});
        }
    }

    Eigen::Index param_count() const {
        Eigen::Index n = 0;
        for (const auto& layer : layers_) n += layer.weights.size() + layer.bias.size();
        return n;
    }

private:
    std::vector<DenseLayer> layers_;
};

inline void collect_grads(StackGrads& grads, std::vector<ParamRef>& out) {
    for (auto& g : grads) {
        out.push_back({g.d_weights.data(), g.d_weights.size()});
        out.push_back({g.d_bias.data(), g.d_bias.size()});
    }
}

inline void zero_grads(StackGrads& grads) {
    for (auto& g : grads) {
        g.d_weights.setZero();
        g.d_bias.setZero();
    }
}

}  // namespace hnn::net

#pragma once

#include "hnn/net/layer.hpp"

namespace hnn::net {

// Weights are drawn N(0, 3/100); biases start at zero.
constexpr double kInitWeightVariance = 0.03;

struct HnnTopology {
    int input_dim = 0;
    int common_layers = 2;
    int head_layers = 2;
    int neurons = 400;
    double dropout = 0.2;
    bool with_var_head = true;
};

struct BatchOutput {
    Vector mean;
    Vector raw_var;  // strictly positive (Softplus head); empty for mean-only nets
    StackCache common_cache, mean_cache, var_cache;
    Matrix shared;  // common-core output, kept for the head backprops
    bool train_cached = false;
};

struct HnnGrads {
    StackGrads common, mean_head, var_head;
};

// Two hemispheres over a shared core. The mean head ends in a Linear unit,
// the variance head in a Softplus unit; hidden layers are ReLU with dropout.
class HnnNetwork {
public:
    HnnNetwork() = default;

    explicit HnnNetwork(const HnnTopology& topo) : topo_(topo) {
        if (topo.input_dim <= 0) throw ConfigError("HnnNetwork: input_dim must be positive");
        std::vector<DenseLayer> common;
        Eigen::Index in = topo.input_dim;
        for (int l = 0; l < topo.common_layers; ++l) {
            common.emplace_back(topo.neurons, in, Activation::ReLU);
            in = topo.neurons;
        }
        common_ = LayerStack(std::move(common));
        mean_head_ = make_head(in, Activation::Linear);
        if (topo.with_var_head) var_head_ = make_head(in, Activation::Softplus);
    }

    const HnnTopology& topology() const { return topo_; }
    int input_dim() const { return topo_.input_dim; }
    bool has_variance() const { return topo_.with_var_head; }

    LayerStack& common() { return common_; }
    LayerStack& mean_head() { return mean_head_; }
    LayerStack& var_head() { return var_head_; }
    const LayerStack& common() const { return common_; }
    const LayerStack& mean_head() const { return mean_head_; }
    const LayerStack& var_head() const { return var_head_; }

    // X is feature-major: input_dim x batch. Train mode applies dropout masks
    // drawn from `dropout_seed`; eval mode is deterministic and seed-free.
    BatchOutput forward(const Matrix& X, Mode mode, std::uint64_t dropout_seed = 0) const {
        BatchOutput out;
        Rng rng(dropout_seed);
        Rng* rp = mode == Mode::Train && topo_.dropout > 0.0 ? &rng : nullptr;
        const bool cache = mode == Mode::Train;
        out.shared = common_.forward(X, mode, topo_.dropout,
                                     static_cast<int>(common_.layers().size()), rp,
                                     cache ? &out.common_cache : nullptr);
        const int head_hidden = static_cast<int>(mean_head_.layers().size()) - 1;
        out.mean = mean_head_
                       .forward(out.shared, mode, topo_.dropout, head_hidden, rp,
                                cache ? &out.mean_cache : nullptr)
                       .transpose();
        if (topo_.with_var_head) {
            out.raw_var = var_head_
                              .forward(out.shared, mode, topo_.dropout, head_hidden, rp,
                                       cache ? &out.var_cache : nullptr)
                              .transpose();
        }
        out.train_cached = cache;
        return out;
    }

    // Gradients of a scalar loss given d(loss)/d(mean_t) and d(loss)/d(raw_var_t).
    // Common-core gradients accumulate the contributions of both heads.
    void backward(const BatchOutput& out, const Vector& d_mean, const Vector& d_raw_var,
                  HnnGrads& grads) const {
        if (!out.train_cached) throw StateError("HnnNetwork: backward needs a train-mode forward");
        Matrix d_shared =
            mean_head_.backward(d_mean.transpose(), out.mean_cache, grads.mean_head);
        if (topo_.with_var_head) {
            if (d_raw_var.size() != out.raw_var.size())
                throw ShapeError("HnnNetwork: d_raw_var length mismatch");
            d_shared += var_head_.backward(d_raw_var.transpose(), out.var_cache, grads.var_head);
        }
        common_.backward(d_shared, out.common_cache, grads.common);
    }

    HnnGrads make_grads() const {
        HnnGrads g;
        size_stack(g.common, common_);
        size_stack(g.mean_head, mean_head_);
        if (topo_.with_var_head) size_stack(g.var_head, var_head_);
        return g;
    }

    void init_weights(std::uint64_t seed) {
        Rng rng(seed);
        const double sd = std::sqrt(kInitWeightVariance);
        common_.init_weights(rng, sd);
        mean_head_.init_weights(rng, sd);
        if (topo_.with_var_head) var_head_.init_weights(rng, sd);
    }

    std::vector<ParamRef> param_views() {
        std::vector<ParamRef> v;
        common_.collect_params(v);
        mean_head_.collect_params(v);
        if (topo_.with_var_head) var_head_.collect_params(v);
        return v;
    }

    static std::vector<ParamRef> grad_views(HnnGrads& g) {
        std::vector<ParamRef> v;
        collect_grads(g.common, v);
        collect_grads(g.mean_head, v);
        collect_grads(g.var_head, v);
        return v;
    }

    Eigen::Index param_count() const {
        return common_.param_count() + mean_head_.param_count() + var_head_.param_count();
    }

private:
    LayerStack make_head(Eigen::Index in, Activation terminal) const {
        std::vector<DenseLayer> layers;
        Eigen::Index d = in;
        for (int l = 0; l < topo_.head_layers; ++l) {
            layers.emplace_back(topo_.neurons, d, Activation::ReLU);
            d = topo_.neurons;
        }
        layers.emplace_back(1, d, terminal);
        return LayerStack(std::move(layers));
    }

    static void size_stack(StackGrads& g, const LayerStack& s) {
        g.resize(s.layers().size());
        for (std::size_t l = 0; l < s.layers().size(); ++l) {
            g[l].d_weights = Matrix::Zero(s.layers()[l].out_dim(), s.layers()[l].in_dim());
            g[l].d_bias = Vector::Zero(s.layers()[l].out_dim());
        }
    }

    HnnTopology topo_;
    LayerStack common_, mean_head_, var_head_;
};

}  // namespace hnn::net

#pragma once

#include "hnn/data/split.hpp"
#include "hnn/model/config.hpp"
#include "hnn/net/adam.hpp"
#include "hnn/net/loss.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace hnn::model {

enum class LossKind { GaussianNll, SquaredError };

struct TrainLogEntry {
    double train_loss = 0.0;  // per-observation, in (e^2/v + log v) units (or MSE)
    double val_loss = 0.0;
};

template <class Net>
struct Member {
    Net net;
    data::BlockSplit split;
    std::vector<int> validation_indices;  // subset of the bag
    std::uint64_t seed = 0;
    double var_scale = 1.0;  // frozen constraint factor nu / mean(raw var on train rows)
    std::vector<TrainLogEntry> training_log;
    double max_constraint_gap = 0.0;  // max |batch mean of constrained var - nu| seen
    // OOB projections, filled by the ensemble fit
    Vector oob_mean, oob_var;
    Matrix oob_contributions;
};

namespace detail {

inline Matrix gather_cols(const Matrix& Xt, const std::vector<int>& idx) {
    Matrix out(Xt.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out.col(static_cast<Eigen::Index>(i)) =
        Xt.col(idx[i]);
    return out;
}

inline Vector gather(const Vector& v, const std::vector<int>& idx) {
    Vector out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[idx[i]];
    return out;
}

inline Vector snapshot_params(const std::vector<net::ParamRef>& refs) {
    Vector flat(net::total_size(refs));
    Eigen::Index off = 0;
    for (const auto& r : refs) {
        for (Eigen::Index i = 0; i < r.size; ++i) flat[off + i] = r.data[i];
        off += r.size;
    }
    return flat;
}

inline void restore_params(const std::vector<net::ParamRef>& refs, const Vector& flat) {
    Eigen::Index off = 0;
    for (const auto& r : refs) {
        for (Eigen::Index i = 0; i < r.size; ++i) r.data[i] = flat[off + i];
        off += r.size;
    }
}

// Per-observation Gaussian NLL terms (e^2/v + log v) with the in-loss floor.
inline double nll_eval(const Vector& y, const Vector& mean, const Vector& var) {
    double acc = 0.0;
    for (Eigen::Index t = 0; t < y.size(); ++t) {
        const double v = std::max(var[t], net::kLossVarianceFloor);
        const double e = y[t] - mean[t];
        acc += e * e / v + std::log(v);
    }
    return acc / static_cast<double>(y.size());
}

}  // namespace detail

// Chain rule through the multiplicative batch renormalization
// c_i = raw_i * nu / mean(raw): the gradient flows through the normalizer.
inline Vector constraint_backward(const Vector& d_constrained, const Vector& raw, double nu) {
    const auto n = static_cast<double>(raw.size());
    const double m = raw.mean();
    const double s = d_constrained.dot(raw);
    return (nu / m) * d_constrained.array() - (nu * s / (n * m * m));
}

// Rescales the path so its batch mean equals nu exactly (nu * var(y) with
// var(y) = 1 in network units). Relative shape is preserved.
inline Vector constrain_variance(const Vector& raw_var_path, double nu) {
    if (raw_var_path.size() == 0) throw ShapeError("constrain_variance: empty path");
    const double m = raw_var_path.mean();
    if (!(m > 0.0)) throw DomainError("constrain_variance: path must be positive");
    return raw_var_path * (nu / m);
}

// Full-batch Adam on the bag minus a contiguous validation sub-block, with
// early stopping on the validation loss and best-parameter restore. The
// Gaussian objective applies the volatility-emphasis constraint inside every
// training forward pass.
template <class Net>
Member<Net> train_member(const Matrix& Xt, const Vector& y, double nu,
                         const data::BlockSplit& split, const HnnConfig& cfg,
                         std::uint64_t seed, LossKind loss, const Net& prototype) {
    const auto bag_size = static_cast<long>(split.bag_indices.size());
    const long val_size = std::max<long>(
        1, std::lround(cfg.early_stop_fraction * static_cast<double>(bag_size)));
    if (bag_size - val_size < 2)
        throw DomainError("train_member: bag too small for a validation sub-block");

    Member<Net> member;
    member.split = split;
    member.seed = seed;

    Rng val_rng(derive_seed(seed, "valBlock"));
    const long val_start = val_rng.uniform_int(0, bag_size - val_size);
    std::vector<int> train_rows;
    train_rows.reserve(static_cast<std::size_t>(bag_size - val_size));
    for (long i = 0; i < bag_size; ++i) {
        if (i >= val_start && i < val_start + val_size)
            member.validation_indices.push_back(split.bag_indices[static_cast<std::size_t>(i)]);
        else
            train_rows.push_back(split.bag_indices[static_cast<std::size_t>(i)]);
    }

    const Matrix Xtrain = detail::gather_cols(Xt, train_rows);
    const Vector ytrain = detail::gather(y, train_rows);
    const Matrix Xval = detail::gather_cols(Xt, member.validation_indices);
    const Vector yval = detail::gather(y, member.validation_indices);
    const auto n_train = static_cast<double>(Xtrain.cols());
    const bool gaussian = loss == LossKind::GaussianNll;

    for (int attempt = 0; attempt < 2; ++attempt) {
        member.net = prototype;
        member.net.init_weights(
            attempt == 0 ? derive_seed(seed, "memberInit") : derive_seed(seed, "memberRetry"));
        member.training_log.clear();
        member.max_constraint_gap = 0.0;

        auto params = member.net.param_views();
        auto state = net::make_adam_state(net::total_size(params), cfg.learning_rate,
                                          cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon);
        auto grads = member.net.make_grads();
        auto grad_refs = Net::grad_views(grads);

        double best_val = std::numeric_limits<double>::infinity();
        Vector best_params = detail::snapshot_params(params);
        int since_best = 0;
        bool failed = false;

        for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
            const auto out = member.net.forward(Xtrain, net::Mode::Train,
                                                derive_seed(seed, "dropout", epoch));
            double train_loss;
            Vector d_mean, d_raw;
            if (gaussian) {
                const Vector constrained = constrain_variance(out.raw_var, nu);
                member.max_constraint_gap =
                    std::max(member.max_constraint_gap, std::abs(constrained.mean() - nu));
                const auto nll = net::gaussian_nll_loss(ytrain, out.mean, constrained);
                train_loss = nll.loss / n_train;
                d_mean = nll.d_mean / n_train;
                d_raw = constraint_backward(nll.d_variance, out.raw_var, nu) / n_train;
            } else {
                const auto mse = net::squared_error_loss(ytrain, out.mean);
                train_loss = mse.loss / n_train;
                d_mean = mse.d_mean / n_train;
                d_raw = Vector::Zero(out.mean.size());
            }
            if (!std::isfinite(train_loss)) {
                failed = true;
                break;
            }
            for (auto& g : grad_refs)
                for (Eigen::Index i = 0; i < g.size; ++i) g.data[i] = 0.0;
            member.net.backward(out, d_mean, d_raw, grads);
            net::adam_step(params, grad_refs, state);

            // validation pass in eval mode; the constraint factor comes from
            // the training rows so the model seen by validation is the one
            // being estimated
            double val_loss;
            const auto ev_train = member.net.forward(Xtrain, net::Mode::Eval);
            const auto ev_val = member.net.forward(Xval, net::Mode::Eval);
            if (gaussian) {
                const double factor = nu / ev_train.raw_var.mean();
                val_loss = detail::nll_eval(yval, ev_val.mean, ev_val.raw_var * factor);
            } else {
                val_loss = (yval - ev_val.mean).squaredNorm() /
                           static_cast<double>(yval.size());
            }
            if (!std::isfinite(val_loss)) {
                failed = true;
                break;
            }
            member.training_log.push_back({train_loss, val_loss});
            if (val_loss < best_val) {
                best_val = val_loss;
                best_params = detail::snapshot_params(params);
                since_best = 0;
            } else {
                ++since_best;
                if (since_best > cfg.patience) break;
            }
        }
        if (!failed) {
            detail::restore_params(params, best_params);
            if (gaussian) {
                const auto ev = member.net.forward(Xtrain, net::Mode::Eval);
                member.var_scale = nu / ev.raw_var.mean();
            }
            return member;
        }
        // one re-seeded retry; silent dropping would bias the OOB counts
    }
    throw NumericError("train_member: non-finite loss after re-seeded retry (seed " +
                       std::to_string(seed) + ")");
}

}  // namespace hnn::model

#pragma once

#include "hnn/data/design.hpp"
#include "hnn/model/recalibrate.hpp"
#include "hnn/model/trainer.hpp"
#include "hnn/net/graph.hpp"

#include <exception>
#include <omp.h>

namespace hnn::model {

template <class Net>
concept HasContributions = requires(const Net& n, const Matrix& x) {
    { n.forward(x, net::Mode::Eval, std::uint64_t{0}).contributions } -> std::convertible_to<Matrix>;
};

// B trained members with their blocked splits, the aggregated OOB paths, and
// the recalibration parameters. Immutable once fitted; predict is read-only.
template <class Net>
struct Ensemble {
    std::vector<Member<Net>> members;
    double nu = 0.5;
    Vector oob_mean_path;  // standardized units
    Vector oob_var_path;   // standardized units, constraint applied
    IntVector oob_counts;
    Matrix oob_contributions;  // group x T when the net exposes contributions
    RecalParams recal;
    data::Scaler scaler;
    HnnConfig config;
    double eta = 1.0;  // sd of OOB residuals, original units
    std::uint64_t master_seed = 0;
};

namespace detail {

template <class Net>
void project_oob(Member<Net>& member, const Matrix& Xt) {
    const Matrix Xoob = gather_cols(Xt, member.split.oob_indices);
    const auto out = member.net.forward(Xoob, net::Mode::Eval);
    member.oob_mean = out.mean;
    if (member.net.has_variance()) member.oob_var = out.raw_var * member.var_scale;
    if constexpr (HasContributions<Net>) member.oob_contributions = out.contributions;
}

template <class Net>
Member<Net> fit_one_member(const Matrix& Xt, const Vector& y, double nu, const HnnConfig& cfg,
                           std::uint64_t master_seed, int index, LossKind loss,
                           const Net& proto) {
    const auto split = data::draw_block_split(
        static_cast<int>(y.size()), cfg.subsample_rate,
        derive_seed(master_seed, "dataSplit", static_cast<std::uint64_t>(index)));
    auto member = train_member(Xt, y, nu, split, cfg,
                               derive_seed(master_seed, "member", static_cast<std::uint64_t>(index)),
                               loss, proto);
    project_oob(member, Xt);
    return member;
}

}  // namespace detail

// Serial reference implementation, kept alongside the OpenMP path for testing
// and benchmarking. Both produce identical members: all randomness is keyed
// to (master_seed, member index), never to thread identity.
template <class Net>
std::vector<Member<Net>> train_members_serial(const Matrix& Xt, const Vector& y, double nu,
                                              const HnnConfig& cfg, std::uint64_t master_seed,
                                              LossKind loss, const Net& proto, int count) {
    std::vector<Member<Net>> members(static_cast<std::size_t>(count));
    for (int b = 0; b < count; ++b)
        members[static_cast<std::size_t>(b)] =
            detail::fit_one_member(Xt, y, nu, cfg, master_seed, b, loss, proto);
    return members;
}

template <class Net>
std::vector<Member<Net>> train_members_parallel(const Matrix& Xt, const Vector& y, double nu,
                                                const HnnConfig& cfg, std::uint64_t master_seed,
                                                LossKind loss, const Net& proto, int count,
                                                int threads) {
    std::vector<Member<Net>> members(static_cast<std::size_t>(count));
    std::exception_ptr first_error;
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
    for (int b = 0; b < count; ++b) {
        try {
            members[static_cast<std::size_t>(b)] =
                detail::fit_one_member(Xt, y, nu, cfg, master_seed, b, loss, proto);
        } catch (...) {
#pragma omp critical
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
    return members;
}

// Indicator-weighted OOB average: each t receives the mean of the member
// outputs whose OOB window contains t, ~ (1-rate)*B of them in expectation.
template <class Net>
void aggregate_oob(Ensemble<Net>& ens, Eigen::Index T) {
    const bool with_var = !ens.members.empty() && ens.members.front().net.has_variance();
    const Eigen::Index n_contrib =
        ens.members.empty() ? 0 : ens.members.front().oob_contributions.rows();
    ens.oob_mean_path = Vector::Zero(T);
    ens.oob_var_path = Vector::Zero(T);
    ens.oob_counts = IntVector::Zero(T);
    if (n_contrib > 0) ens.oob_contributions = Matrix::Zero(n_contrib, T);
    for (const auto& member : ens.members) {
        for (std::size_t i = 0; i < member.split.oob_indices.size(); ++i) {
            const int t = member.split.oob_indices[i];
            const auto ii = static_cast<Eigen::Index>(i);
            ens.oob_mean_path[t] += member.oob_mean[ii];
            if (with_var) ens.oob_var_path[t] += member.oob_var[ii];
            if (n_contrib > 0) ens.oob_contributions.col(t) += member.oob_contributions.col(ii);
            ens.oob_counts[t] += 1;
        }
    }
    for (Eigen::Index t = 0; t < T; ++t) {
        if (ens.oob_counts[t] == 0)
            throw DomainError("ensemble: observation " + std::to_string(t) +
                              " has no out-of-bag coverage; increase B");
        const double c = ens.oob_counts[t];
        ens.oob_mean_path[t] /= c;
        if (with_var) ens.oob_var_path[t] /= c;
        if (n_contrib > 0) ens.oob_contributions.col(t) /= c;
    }
}

template <class Net>
Ensemble<Net> fit_blocked_ensemble(const Matrix& Xt, const Vector& y, const Net& proto,
                                   const HnnConfig& cfg, double nu, LossKind loss,
                                   std::uint64_t master_seed, bool run_recalibration) {
    cfg.validate();
    Ensemble<Net> ens;
    ens.nu = nu;
    ens.config = cfg;
    ens.master_seed = master_seed;
    ens.members = cfg.threads == 1
                      ? train_members_serial(Xt, y, nu, cfg, master_seed, loss, proto,
                                             cfg.ensemble_size)
                      : train_members_parallel(Xt, y, nu, cfg, master_seed, loss, proto,
                                               cfg.ensemble_size, cfg.threads);
    aggregate_oob(ens, y.size());
    if (run_recalibration && loss == LossKind::GaussianNll) {
        const Vector eps2 = (y - ens.oob_mean_path).array().square();
        ens.recal = recalibrate(eps2, ens.oob_var_path, derive_seed(master_seed, "recalDraw"),
                                cfg.recal_draws);
    }
    ens.eta = sd_of(y - ens.oob_mean_path);
    return ens;
}

// Volatility-emphasis parameter from a mean-only bagged ensemble of analogous
// architecture: nu = mean(squared blocked-OOB residuals) / var(y), clipped.
template <class Net>
double estimate_nu(const Matrix& Xt, const Vector& y, const Net& mean_proto,
                   const HnnConfig& cfg, std::uint64_t master_seed,
                   Ensemble<Net>* mean_ensemble_out = nullptr) {
    if (cfg.nu_override) return *cfg.nu_override;
    HnnConfig nu_cfg = cfg;
    nu_cfg.ensemble_size = cfg.nu_ensemble_size;
    auto ens = fit_blocked_ensemble(Xt, y, mean_proto, nu_cfg, 0.0, LossKind::SquaredError,
                                    derive_seed(master_seed, "nuEnsemble"), false);
    const double mse = (y - ens.oob_mean_path).squaredNorm() / static_cast<double>(y.size());
    const double nu = mse / variance_of(y);
    if (mean_ensemble_out) *mean_ensemble_out = std::move(ens);
    return std::clamp(nu, cfg.nu_floor, cfg.nu_cap);
}

// Out-of-sample density forecast: the mean averages all B members; the raw
// variance averages the members' constrained paths and then passes through
// the reality-check map varsigma * exp(zeta0 + zeta1 * log(.)).
template <class Net>
data::DensityForecast predict(const Ensemble<Net>& ens, const Matrix& Xnew_rows) {
    if (ens.members.empty()) throw StateError("predict: ensemble has no members");
    if (Xnew_rows.cols() != ens.members.front().net.input_dim())
        throw ShapeError("predict: design has " + std::to_string(Xnew_rows.cols()) +
                         " columns, model expects " +
                         std::to_string(ens.members.front().net.input_dim()));
    const Matrix Xt = Xnew_rows.transpose();
    const Eigen::Index n = Xt.cols();
    Vector mean = Vector::Zero(n);
    Vector var = Vector::Zero(n);
    const bool with_var = ens.members.front().net.has_variance();
    for (const auto& member : ens.members) {
        const auto out = member.net.forward(Xt, net::Mode::Eval);
        mean += out.mean;
        if (with_var) var += out.raw_var * member.var_scale;
    }
    const auto B = static_cast<double>(ens.members.size());
    mean /= B;
    if (with_var) {
        var /= B;
        var = recalibrated_path(ens.recal, var);
    } else {
        var.setConstant(ens.eta * ens.eta);
    }
    return data::inverse_scale(mean, var, ens.scaler);
}

// In-sample density estimate from the blocked-OOB paths.
template <class Net>
data::DensityForecast oob_density(const Ensemble<Net>& ens) {
    const Vector var = recalibrated_path(ens.recal, ens.oob_var_path);
    return data::inverse_scale(ens.oob_mean_path, var, ens.scaler,
                               data::DensityForecast::Segment::InSampleOob);
}

using HnnEnsemble = Ensemble<net::HnnNetwork>;

inline net::HnnTopology hnn_topology(const HnnConfig& cfg, int input_dim, bool with_var_head) {
    net::HnnTopology t;
    t.input_dim = input_dim;
    t.common_layers = cfg.common_layers;
    t.head_layers = cfg.head_layers;
    t.neurons = cfg.neurons;
    t.dropout = cfg.dropout;
    t.with_var_head = with_var_head;
    return t;
}

// The full HNN estimator on a built design: estimate nu from a mean-only
// ensemble, train the two-hemisphere ensemble under the constraint, then
// recalibrate against the blocked OOB residuals.
inline HnnEnsemble fit_hnn(const data::DesignMatrix& design, const HnnConfig& cfg,
                           std::uint64_t master_seed) {
    cfg.validate();
    const Matrix Xt = design.X.topRows(design.n_labeled).transpose();
    const Vector y = design.y.head(design.n_labeled);
    const auto K = static_cast<int>(design.n_cols());
    const net::HnnNetwork mean_proto(hnn_topology(cfg, K, false));
    const double nu = estimate_nu(Xt, y, mean_proto, cfg, master_seed);
    const net::HnnNetwork proto(hnn_topology(cfg, K, true));
    auto ens = fit_blocked_ensemble(Xt, y, proto, cfg, nu, LossKind::GaussianNll, master_seed,
                                    true);
    ens.scaler = design.scaler;
    ens.eta *= design.scaler.y_sd;
    return ens;
}

}  // namespace hnn::model

#include "hnn/baselines/garch.hpp"

#include "hnn/net/layer.hpp"  // sigmoid
#include "hnn/rng.hpp"

#include <cmath>
#include <sstream>

namespace hnn::baselines {

Vector garch_filter(const GarchModel& m, const Vector& residuals) {
    const Eigen::Index T = residuals.size();
    Vector v(T);
    v[0] = m.initial_variance;
    for (Eigen::Index t = 1; t < T; ++t)
        v[t] = m.omega + m.alpha * residuals[t - 1] * residuals[t - 1] + m.beta * v[t - 1];
    return v;
}

double garch_nll(double omega, double alpha, double beta, const Vector& residuals) {
    GarchModel m;
    m.omega = omega;
    m.alpha = alpha;
    m.beta = beta;
    m.initial_variance = (residuals.array() - residuals.mean()).square().sum() /
                         static_cast<double>(residuals.size() - 1);
    const Vector v = garch_filter(m, residuals);
    double nll = 0.0;
    for (Eigen::Index t = 0; t < residuals.size(); ++t) {
        if (!(v[t] > 0.0)) return 1e100;
        nll += std::log(v[t]) + residuals[t] * residuals[t] / v[t];
    }
    return 0.5 * nll;
}

namespace {

// Unconstrained parameterisation: omega = exp(a); persistence p = sigmoid(b)
// splits into alpha = p*sigmoid(c), beta = p*(1 - sigmoid(c)).
struct Theta {
    double a, b, c;
};

void to_garch(const Theta& th, double& omega, double& alpha, double& beta) {
    omega = std::exp(th.a);
    const double p = net::sigmoid(th.b);
    const double q = net::sigmoid(th.c);
    alpha = p * q;
    beta = p * (1.0 - q);
}

double objective(const Theta& th, const Vector& eps) {
    double w, a, b;
    to_garch(th, w, a, b);
    return garch_nll(w, a, b, eps);
}

Eigen::Vector3d num_grad(const Theta& th, const Vector& eps) {
    Eigen::Vector3d g;
    const double h = 1e-6;
    const double base[3] = {th.a, th.b, th.c};
    for (int i = 0; i < 3; ++i) {
        Theta up = th, dn = th;
        (&up.a)[i] = base[i] + h;
        (&dn.a)[i] = base[i] - h;
        g[i] = (objective(up, eps) - objective(dn, eps)) / (2.0 * h);
    }
    return g;
}

// Compact BFGS with backtracking line search on the 3-dim transformed space.
std::pair<Theta, double> bfgs(Theta th, const Vector& eps, int max_iter = 300) {
    Eigen::Matrix3d H = Eigen::Matrix3d::Identity();
    double f = objective(th, eps);
    Eigen::Vector3d g = num_grad(th, eps);
    for (int it = 0; it < max_iter; ++it) {
        if (g.norm() < 1e-7) break;
        Eigen::Vector3d dir = -H * g;
        if (dir.dot(g) > 0.0) {
            H.setIdentity();
            dir = -g;
        }
        double step = 1.0;
        double f_new = f;
        Theta th_new = th;
        bool moved = false;
        for (int ls = 0; ls < 40; ++ls) {
            th_new = Theta{th.a + step * dir[0], th.b + step * dir[1], th.c + step * dir[2]};
            f_new = objective(th_new, eps);
            if (f_new < f - 1e-4 * step * g.dot(-dir)) {
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
        const Eigen::Vector3d g_new = num_grad(th_new, eps);
        const Eigen::Vector3d s{step * dir[0], step * dir[1], step * dir[2]};
        const Eigen::Vector3d yv = g_new - g;
        const double sy = s.dot(yv);
        if (sy > 1e-12) {
            const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
            H = (I - s * yv.transpose() / sy) * H * (I - yv * s.transpose() / sy) +
                s * s.transpose() / sy;
        }
        th = th_new;
        f = f_new;
        g = g_new;
    }
    return {th, f};
}

}  // namespace

GarchModel fit_garch11(const Vector& residuals) {
    const Eigen::Index T = residuals.size();
    if (T < 100) throw DomainError("fit_garch11: needs at least 100 residuals");
    const double var = (residuals.array() - residuals.mean()).square().sum() /
                       static_cast<double>(T - 1);
    if (!(var > 0.0)) throw DomainError("fit_garch11: degenerate residual series");

    // multi-start from 5 fixed seeds around typical GARCH shapes
    double best_f = 1e100;
    Theta best_th{};
    bool found = false;
    for (std::uint64_t start = 0; start < 5; ++start) {
        Rng rng(derive_seed(start, "garchStart"));
        Theta th;
        th.a = std::log(var * (0.1 + 0.3 * rng.uniform()));
        th.b = 1.0 + rng.normal();           // persistence around sigmoid(1) ~ 0.73
        th.c = -1.5 + 0.5 * rng.normal();    // alpha share around 0.18
        auto [th_end, f_end] = bfgs(th, residuals);
        if (f_end < best_f) {
            best_f = f_end;
            best_th = th_end;
            found = true;
        }
    }
    if (!found || best_f >= 1e99) {
        std::ostringstream ss;
        ss << "fit_garch11: optimization failed; last objective " << best_f;
        throw NumericError(ss.str());
    }
    GarchModel m;
    to_garch(best_th, m.omega, m.alpha, m.beta);
    m.initial_variance = var;
    m.filtered = garch_filter(m, residuals);
    m.loglik = -best_f - 0.5 * static_cast<double>(T) * std::log(2.0 * M_PI);
    return m;
}

}  // namespace hnn::baselines

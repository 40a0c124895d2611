#pragma once

#include "hnn/net/layer.hpp"

#include <cmath>
#include <vector>

namespace hnn::net {

struct AdamState {
    Vector first_moment;
    Vector second_moment;
    long step_count = 0;
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

inline AdamState make_adam_state(Eigen::Index n_params, double learning_rate = 0.001,
                                 double beta1 = 0.9, double beta2 = 0.999,
                                 double epsilon = 1e-8) {
    AdamState s;
    s.first_moment = Vector::Zero(n_params);
    s.second_moment = Vector::Zero(n_params);
    s.learning_rate = learning_rate;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.epsilon = epsilon;
    return s;
}

inline Eigen::Index total_size(const std::vector<ParamRef>& refs) {
    Eigen::Index n = 0;
    for (const auto& r : refs) n += r.size;
    return n;
}

// Standard Adam update with bias correction, in place.
inline void adam_step(std::vector<ParamRef>& params, const std::vector<ParamRef>& grads,
                      AdamState& state) {
    if (params.size() != grads.size()) throw ShapeError("adam_step: param/grad block mismatch");
    if (total_size(params) != state.first_moment.size())
        throw ShapeError("adam_step: state sized for a different parameter set");
    state.step_count += 1;
    const double b1 = state.beta1;
    const double b2 = state.beta2;
    const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.step_count));
    const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.step_count));
    Eigen::Index off = 0;
    for (std::size_t k = 0; k < params.size(); ++k) {
        if (params[k].size != grads[k].size) throw ShapeError("adam_step: block size mismatch");
        for (Eigen::Index i = 0; i < params[k].size; ++i) {
            const double g = grads[k].data[i];
            double& m = state.first_moment[off + i];
            double& v = state.second_moment[off + i];
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            const double mhat = m / corr1;
            const double vhat = v / corr2;
            params[k].data[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
        }
        off += params[k].size;
    }
}

}  // namespace hnn::net

#pragma once

#include "hnn/data/panel.hpp"

namespace hnn::baselines {

enum class DgpKind { LinearArch, GreatModeration, SwitchingVol, Homoskedastic };

DgpKind parse_dgp_kind(const std::string& name);
std::string dgp_kind_name(DgpKind k);

// Heteroskedastic test processes. All emit an observable regressor block X
// and a target Y with y_t = X_{t-1}' beta + sigma_{t-1} e_t, so the variance
// of y_{t+1} is measurable from the row-t covariates where the DGP allows it.
struct SyntheticDgp {
    DgpKind kind = DgpKind::LinearArch;
    int n_columns = 20;
    int n_informative = 3;
    double beta_scale = 0.5;
    // linearArch: sigma2_t = c + a1 * eps2_{t-1}
    double arch_const = 0.1;
    double arch_a1 = 0.6;
    // greatModeration: variance halves permanently at T/2 (flat mean)
    double gm_high_variance = 1.0;
    // switchingVol: persistent two-state regime exposed as an indicator column
    double switch_stay_prob = 0.95;
    double low_sigma = 0.5;
    double high_sigma = 2.0;
    // homoskedastic
    double noise_sigma = 1.0;
};

struct SimulatedPanel {
    data::TimeSeriesPanel panel;  // columns: Y, X1..Xn (+ IND for switchingVol)
    Vector true_variance;         // Var(y_t | info at t-1), aligned to panel rows
};

SimulatedPanel simulate(const SyntheticDgp& dgp, int T, std::uint64_t seed);

}  // namespace hnn::baselines

#pragma once

#include "hnn/common.hpp"

#include <optional>

namespace hnn::model {

struct HnnConfig {
    int common_layers = 2;
    int head_layers = 2;
    int neurons = 400;
    double dropout = 0.2;
    double learning_rate = 0.001;
    int max_epochs = 100;
    int patience = 15;
    int ensemble_size = 1000;  // B
    double subsample_rate = 0.8;
    double early_stop_fraction = 0.2;
    std::optional<double> nu_override;
    double nu_cap = 0.99;
    double nu_floor = 0.01;
    int nu_ensemble_size = 100;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    long recal_draws = 100000;
    // Training is full-batch; members are single-threaded units and the
    // ensemble parallelizes across them. threads = 1 selects the serial
    // reference path, 0 uses every available core.
    int threads = 0;

    void validate() const {
        if (common_layers < 1 || head_layers < 0 || neurons < 1)
            throw ConfigError("HnnConfig: layers/neurons must be positive");
        if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("HnnConfig: dropout in [0,1)");
        if (!(learning_rate > 0.0)) throw ConfigError("HnnConfig: learning_rate must be > 0");
        if (max_epochs < 1 || patience < 0 || ensemble_size < 1 || nu_ensemble_size < 1)
            throw ConfigError("HnnConfig: epochs/patience/ensemble sizes invalid");
        if (!(subsample_rate > 0.0 && subsample_rate < 1.0))
            throw ConfigError("HnnConfig: subsample_rate in (0,1)");
        if (!(early_stop_fraction > 0.0 && early_stop_fraction < 1.0))
            throw ConfigError("HnnConfig: early_stop_fraction in (0,1)");
        if (!(nu_cap > 0.0 && nu_cap < 1.0) || !(nu_floor > 0.0 && nu_floor <= nu_cap))
            throw ConfigError("HnnConfig: nu bounds invalid");
        if (nu_override && !(*nu_override > 0.0 && *nu_override <= 1.0))
            throw ConfigError("HnnConfig: nu_override must be in (0,1]");
        if (recal_draws < 1) throw ConfigError("HnnConfig: recal_draws must be positive");
        if (threads < 0) throw ConfigError("HnnConfig: threads must be >= 0");
    }
};

}  // namespace hnn::model

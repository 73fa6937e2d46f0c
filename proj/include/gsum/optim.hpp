#pragma once

#include "gsum/tensor.hpp"

namespace gsum {

struct AdamConfig {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Bias-corrected Adam over a fixed parameter list. step() consumes and
// clears the accumulated gradients; an empty grad buffer counts as zero.
class Adam {
public:
    Adam(std::vector<TensorPtr> params, AdamConfig cfg = {});

    void step();
    long long step_count() const { return step_; }
    const AdamConfig& config() const { return cfg_; }

private:
    AdamConfig cfg_;
    std::vector<TensorPtr> params_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    long long step_ = 0;
};

}  // namespace gsum

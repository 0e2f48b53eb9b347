#pragma once

#include "cfair/mlp.hpp"

namespace cfair {

enum class Direction { descend, ascend };

struct AdamState {
    std::vector<LayerGrad> m;
    std::vector<LayerGrad> v;
    std::size_t step_count = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    /// Fresh zero moments shaped like `net`.
    static AdamState for_network(const MLP& net, double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
                                 double eps = 1e-8);
};

/// One bias-corrected Adam update in place. `ascend` flips the gradient sign.
void adam_step(MLP& params, const Gradients& grads, AdamState& state, Direction direction = Direction::descend);

}  // namespace cfair

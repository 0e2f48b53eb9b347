#include "cfair/adam.hpp"

#include <cmath>

namespace cfair {

AdamState AdamState::for_network(const MLP& net, double lr, double beta1, double beta2, double eps) {
    AdamState s;
    s.m = Gradients::zeros_like(net).layers;
    s.v = s.m;
    s.lr = lr;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.eps = eps;
    return s;
}

namespace {

bool same_shape(const LayerGrad& g, const DenseLayer& l) {
    return g.weights.rows() == l.in_dim() && g.weights.cols() == l.out_dim() && g.bias.size() == l.out_dim();
}

void update(std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m, std::vector<double>& v,
            const AdamState& s, double sign, double c1, double c2) {
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double gk = sign * g[k];
        m[k] = s.beta1 * m[k] + (1.0 - s.beta1) * gk;
        v[k] = s.beta2 * v[k] + (1.0 - s.beta2) * gk * gk;
        const double m_hat = m[k] / c1;
        const double v_hat = v[k] / c2;
        p[k] -= s.lr * m_hat / (std::sqrt(v_hat) + s.eps);
    }
}

}  // namespace

void adam_step(MLP& params, const Gradients& grads, AdamState& state, Direction direction) {
    const std::size_t n = params.layers.size();
    if (grads.layers.size() != n || state.m.size() != n || state.v.size() != n)
        throw ShapeError("adam_step: layer count mismatch");
    for (std::size_t i = 0; i < n; ++i)
        if (!same_shape(grads.layers[i], params.layers[i]) || !same_shape(state.m[i], params.layers[i]) ||
            !same_shape(state.v[i], params.layers[i]))
            throw ShapeError("adam_step: gradient/state shape mismatch at layer " + std::to_string(i));

    ++state.step_count;
    const double t = double(state.step_count);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);
    const double sign = direction == Direction::ascend ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto& layer = params.layers[i];
        update(layer.weights.data(), grads.layers[i].weights.data(), state.m[i].weights.data(),
               state.v[i].weights.data(), state, sign, c1, c2);
        update(layer.bias, grads.layers[i].bias, state.m[i].bias, state.v[i].bias, state, sign, c1, c2);
    }
}

}  // namespace cfair

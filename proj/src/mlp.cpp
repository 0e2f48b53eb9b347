#include "cfair/mlp.hpp"

#include <cmath>

#include "cfair/random.hpp"

namespace cfair {

std::size_t MLP::in_dim() const {
    if (layers.empty()) throw ShapeError("MLP has no layers");
    return layers.front().in_dim();
}

std::size_t MLP::out_dim() const {
    if (layers.empty()) throw ShapeError("MLP has no layers");
    return layers.back().out_dim();
}

void MLP::validate() const {
    if (layers.empty()) throw ShapeError("MLP has no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].bias.size() != layers[i].out_dim()) throw ShapeError("DenseLayer bias length != out_dim");
        if (i + 1 < layers.size() && layers[i].out_dim() != layers[i + 1].in_dim())
            throw ShapeError("MLP layer dimensions do not chain");
    }
}

Gradients Gradients::zeros_like(const MLP& net) {
    Gradients g;
    g.layers.reserve(net.layers.size());
    for (const auto& l : net.layers)
        g.layers.push_back({Matrix(l.in_dim(), l.out_dim()), std::vector<double>(l.out_dim(), 0.0)});
    return g;
}

MLP init_mlp(std::span<const std::size_t> dims, std::span<const Activation> activations, std::uint64_t seed) {
    if (dims.size() < 2) throw ArgumentError("init_mlp: need at least input and output dims");
    if (activations.size() != dims.size() - 1) throw ArgumentError("init_mlp: one activation per layer required");
    Rng rng(seed);
    MLP net;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        const std::size_t in = dims[i];
        const std::size_t out = dims[i + 1];
        if (in == 0 || out == 0) throw ArgumentError("init_mlp: zero-width layer");
        const double scale = 1.0 / std::sqrt(double(in));
        DenseLayer layer{Matrix(in, out), std::vector<double>(out, 0.0), activations[i]};
        for (double& w : layer.weights.data()) w = rng.uniform(-scale, scale);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

MLP init_mlp(std::span<const std::size_t> dims, std::uint64_t seed) {
    if (dims.size() < 2) throw ArgumentError("init_mlp: need at least input and output dims");
    std::vector<Activation> acts(dims.size() - 1, Activation::leaky_relu);
    acts.back() = Activation::identity;
    return init_mlp(dims, acts, seed);
}

namespace {

void add_bias_and_activate(const DenseLayer& layer, Matrix& pre, Matrix* post) {
    for (std::size_t r = 0; r < pre.rows(); ++r) {
        auto row = pre.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] += layer.bias[c];
    }
    if (post) {
        *post = pre;
        if (layer.activation == Activation::leaky_relu)
            for (double& v : post->data()) v = leaky_relu(v);
    } else if (layer.activation == Activation::leaky_relu) {
        for (double& v : pre.data()) v = leaky_relu(v);
    }
}

void check_input(const MLP& net, const Matrix& batch) {
    net.validate();
    if (batch.cols() != net.in_dim())
        throw ShapeError("forward: batch has " + std::to_string(batch.cols()) + " columns, network expects " +
                         std::to_string(net.in_dim()));
}

}  // namespace

Matrix forward(const MLP& net, const Matrix& batch) {
    check_input(net, batch);
    Matrix act = batch;
    for (const auto& layer : net.layers) {
        Matrix pre = matmul(act, layer.weights);
        add_bias_and_activate(layer, pre, nullptr);
        act = std::move(pre);
    }
    return act;
}

ForwardCache forward_cached(const MLP& net, const Matrix& batch) {
    check_input(net, batch);
    ForwardCache cache;
    cache.inputs.reserve(net.layers.size());
    cache.pre.reserve(net.layers.size());
    Matrix act = batch;
    for (const auto& layer : net.layers) {
        Matrix pre = matmul(act, layer.weights);
        Matrix post;
        add_bias_and_activate(layer, pre, &post);
        cache.inputs.push_back(std::move(act));
        cache.pre.push_back(std::move(pre));
        act = std::move(post);
    }
    cache.output = std::move(act);
    return cache;
}

Gradients backward(const MLP& net, const ForwardCache& cache, const Matrix& loss_grad_at_output) {
    net.validate();
    if (cache.inputs.size() != net.layers.size()) throw ShapeError("backward: cache does not match network");
    if (loss_grad_at_output.rows() != cache.output.rows() || loss_grad_at_output.cols() != cache.output.cols())
        throw ShapeError("backward: output gradient shape differs from forward output");

    Gradients g;
    g.layers.resize(net.layers.size());
    Matrix delta = loss_grad_at_output;
    for (std::size_t i = net.layers.size(); i-- > 0;) {
        const auto& layer = net.layers[i];
        if (layer.activation == Activation::leaky_relu) {
            const auto& pre = cache.pre[i].data();
            auto& d = delta.data();
            for (std::size_t k = 0; k < d.size(); ++k) d[k] *= leaky_relu_grad(pre[k]);
        }
        g.layers[i].weights = matmul_tn(cache.inputs[i], delta);
        g.layers[i].bias.assign(layer.out_dim(), 0.0);
        for (std::size_t r = 0; r < delta.rows(); ++r) {
            auto row = delta.row(r);
            for (std::size_t c = 0; c < row.size(); ++c) g.layers[i].bias[c] += row[c];
        }
        delta = matmul_nt(delta, layer.weights);
    }
    g.input = std::move(delta);
    return g;
}

Gradients backward(const MLP& net, const Matrix& batch, const Matrix& loss_grad_at_output) {
    return backward(net, forward_cached(net, batch), loss_grad_at_output);
}

std::vector<double> flatten(const MLP& net) {
    std::vector<double> out;
    for (const auto& l : net.layers) {
        out.insert(out.end(), l.weights.data().begin(), l.weights.data().end());
        out.insert(out.end(), l.bias.begin(), l.bias.end());
    }
    return out;
}

std::vector<double> flatten(const Gradients& grads) {
    std::vector<double> out;
    for (const auto& l : grads.layers) {
        out.insert(out.end(), l.weights.data().begin(), l.weights.data().end());
        out.insert(out.end(), l.bias.begin(), l.bias.end());
    }
    return out;
}

std::size_t parameter_count(const MLP& net) {
    std::size_t n = 0;
    for (const auto& l : net.layers) n += l.weights.size() + l.bias.size();
    return n;
}

}  // namespace cfair

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cfair/matrix.hpp"

namespace cfair {

enum class Activation { identity, leaky_relu };

inline constexpr double kLeakySlope = 0.01;

/// max(slope * t, t) for slope in (0, 1).
constexpr double leaky_relu(double t, double slope = kLeakySlope) noexcept { return t >= 0.0 ? t : slope * t; }
constexpr double leaky_relu_grad(double t, double slope = kLeakySlope) noexcept { return t >= 0.0 ? 1.0 : slope; }

struct DenseLayer {
    Matrix weights;  // in_dim x out_dim
    std::vector<double> bias;
    Activation activation = Activation::identity;

    std::size_t in_dim() const noexcept { return weights.rows(); }
    std::size_t out_dim() const noexcept { return weights.cols(); }

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

struct MLP {
    std::vector<DenseLayer> layers;

    std::size_t in_dim() const;
    std::size_t out_dim() const;
    /// Throws ShapeError if adjacent layers do not chain.
    void validate() const;

    friend bool operator==(const MLP&, const MLP&) = default;
};

/// Gradient (or moment) buffers shaped like one DenseLayer.
struct LayerGrad {
    Matrix weights;
    std::vector<double> bias;
};

struct Gradients {
    std::vector<LayerGrad> layers;
    Matrix input;  // d loss / d batch

    static Gradients zeros_like(const MLP& net);
};

/// Per-layer inputs and pre-activations recorded by a forward pass.
struct ForwardCache {
    std::vector<Matrix> inputs;
    std::vector<Matrix> pre;
    Matrix output;
};

MLP init_mlp(std::span<const std::size_t> dims, std::span<const Activation> activations, std::uint64_t seed);
/// Hidden layers leaky_relu, output identity.
MLP init_mlp(std::span<const std::size_t> dims, std::uint64_t seed);

Matrix forward(const MLP& net, const Matrix& batch);
ForwardCache forward_cached(const MLP& net, const Matrix& batch);

Gradients backward(const MLP& net, const ForwardCache& cache, const Matrix& loss_grad_at_output);
Gradients backward(const MLP& net, const Matrix& batch, const Matrix& loss_grad_at_output);

/// Flattened view helpers used by tests and parameter snapshots.
std::vector<double> flatten(const MLP& net);
std::vector<double> flatten(const Gradients& grads);
std::size_t parameter_count(const MLP& net);

}  // namespace cfair

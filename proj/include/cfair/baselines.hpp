#pragma once

#include <variant>

#include "cfair/autoencoder.hpp"
#include "cfair/dataset.hpp"
#include "cfair/minimax.hpp"

namespace cfair {

enum class RepresentationKind { full, unaware, ae, invenc };

RepresentationKind parse_representation(std::string_view name);
std::string_view to_string(RepresentationKind kind);

/// full = [X | S_onehot], unaware = X, ae = latent of a [X | S_onehot] autoencoder, invenc = q_theta(X).
Matrix build_representation(RepresentationKind kind, const ProcessedDataset& data,
                            const ThreePlayerModel* trained = nullptr, const Autoencoder* ae = nullptr);

/// The AE baseline's encoder: autoencoder over [X | S_onehot] reconstructing its own input.
Autoencoder fit_feature_autoencoder(const ProcessedDataset& train, std::size_t latent, std::size_t epochs,
                                    std::uint64_t seed);

enum class Link { identity, logistic };

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    Link link = Link::identity;
};

struct LinearOptions {
    double ridge = 1e-8;
    std::size_t iterations = 500;
    double learning_rate = 0.1;
};

/// identity: ridge normal equations over [F | 1]; logistic: full-batch gradient descent on mean BCE.
LinearModel fit_linear(const Matrix& features, std::span<const double> y, Link link, const LinearOptions& options = {});

struct Stump {
    std::size_t feature = 0;
    double threshold = 0.0;  // x <= threshold goes left
    double left = 0.0;
    double right = 0.0;
};

struct StumpEnsemble {
    double base_score = 0.0;
    double learning_rate = 0.1;
    std::vector<Stump> stumps;
    std::size_t rounds() const noexcept { return stumps.size(); }
};

/// Best single split of `targets` by exhaustive midpoint scan under squared error.
Stump fit_stump(const Matrix& features, std::span<const double> targets);

StumpEnsemble fit_stumps(const Matrix& features, std::span<const double> y, Task task, std::size_t rounds = 100,
                         double learning_rate = 0.1);

/// Raw scores (logits for logistic / classification ensembles).
std::vector<double> predict(const LinearModel& model, const Matrix& features);
std::vector<double> predict(const StumpEnsemble& model, const Matrix& features);

}  // namespace cfair

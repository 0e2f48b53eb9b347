#pragma once

#include <functional>

#include "cfair/autoencoder.hpp"
#include "cfair/dataset.hpp"
#include "cfair/loss.hpp"

namespace cfair {

enum class AdversaryMode {
    own_loss,    // f_phi2 descends its own prediction loss
    ascend_gap,  // f_phi2 ascends the joint objective
};

AdversaryMode parse_adversary_mode(std::string_view name);
std::string_view to_string(AdversaryMode mode);

struct TrainConfig {
    double lambda = 1.0;
    std::size_t epochs = 200;
    std::size_t batch_size = 64;
    double lr = 1e-3;
    double h_slope = kLeakySlope;
    AdversaryMode adversary_mode = AdversaryMode::own_loss;
    LossKind loss_kind = LossKind::smooth_l1;
    std::uint64_t seed = 0;

    std::size_t z_dim = 8;
    std::size_t encoder_hidden = 32;
    std::size_t predictor_hidden = 16;

    // Adam steps per player per minibatch.
    std::size_t fair_steps = 1;
    std::size_t encoder_steps = 1;
    std::size_t adversary_steps = 1;

    double divergence_limit = 1e6;

    void validate() const;
};

/// Encoder q_theta, fair predictor f_phi1, sensitive-aware predictor f_phi2 and the frozen q_psi.
struct ThreePlayerModel {
    MLP encoder;              // X -> Z
    MLP fair_predictor;       // Z -> score
    MLP sensitive_predictor;  // [Z | S^e] -> score
    SensitiveAutoencoder autoencoder;
    EmbeddingTable embedding;  // sensitive_only autoencoders

    std::size_t z_dim() const { return encoder.out_dim(); }
};

ThreePlayerModel init_three_player(std::size_t x_dim, const SensitiveAutoencoder& ae, EmbeddingTable embedding,
                                   const TrainConfig& cfg);

Matrix encode(const ThreePlayerModel& model, const Matrix& X);
/// f_phi1(q_theta(X)); takes no sensitive input.
std::vector<double> fair_predict(const ThreePlayerModel& model, const Matrix& X);
/// S^e rows for a batch.
Matrix sensitive_embedding(const ThreePlayerModel& model, const Matrix& X, const Matrix& s_onehot);
/// f_phi2([q_theta(X) | S^e]).
std::vector<double> sensitive_predict(const ThreePlayerModel& model, const Matrix& X, const Matrix& s_onehot);

struct ObjectiveValue {
    double total = 0.0;
    double fair_loss = 0.0;
    double gap_term = 0.0;
};

/// L(Y, f_phi1(Z)) + lambda * mean h(f_phi1(Z) - f_phi2(Z, S^e)).
ObjectiveValue objective(const ThreePlayerModel& model, const Matrix& X, const Matrix& s_onehot,
                         std::span<const double> y, const TrainConfig& cfg);

struct EpochRecord {
    double fair_loss = 0.0;
    double adversary_loss = 0.0;
    double gap_term = 0.0;
    double total = 0.0;
};

struct TrainedFairModel {
    ThreePlayerModel model;
    std::vector<EpochRecord> history;
};

enum class Phase { init, fair_predictor, encoder, adversary };
std::string_view to_string(Phase phase);

/// Per-update notification; `objective` is the minibatch objective measured before the update.
struct StepEvent {
    Phase phase;
    std::size_t epoch;
    std::size_t batch;
    const ThreePlayerModel& model;
    ObjectiveValue objective;
};
using StepObserver = std::function<void(const StepEvent&)>;

/// Alternating three-phase training on a train split.
TrainedFairModel train(const ProcessedDataset& train_data, const SensitiveAutoencoder& ae, const TrainConfig& cfg,
                       const StepObserver& observer = {});

/// Writes epoch,fair_loss,adversary_loss,gap_term.
void write_history_csv(const std::vector<EpochRecord>& history, const std::filesystem::path& path);

}  // namespace cfair

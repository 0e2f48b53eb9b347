#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "cfair/mlp.hpp"

namespace cfair {

enum class AeInput { sensitive_only, all_features };
enum class ReconstructionLoss { mse, cross_entropy };

AeInput parse_ae_input(std::string_view name);
ReconstructionLoss parse_reconstruction_loss(std::string_view name);

struct Autoencoder {
    MLP encoder;
    MLP decoder;
};

struct AutoencoderOptions {
    std::size_t hidden = 16;
    std::size_t epochs = 20;
    std::size_t batch_size = 64;
    double lr = 1e-3;
    std::uint64_t seed = 0;
    ReconstructionLoss loss = ReconstructionLoss::mse;
    /// cross_entropy only: widths of the one-hot blocks in the target, softmax per block.
    std::vector<std::size_t> target_blocks;
};

/// Trains encoder (input -> latent) and decoder (latent -> target) on the reconstruction loss with Adam.
Autoencoder train_autoencoder(const Matrix& input, const Matrix& target, std::size_t latent,
                              const AutoencoderOptions& options);

double reconstruction_loss(const Autoencoder& ae, const Matrix& input, const Matrix& target,
                           const AutoencoderOptions& options);

/// q_psi: embeds categorical sensitive attributes into R^e. Frozen after pretraining.
struct SensitiveAutoencoder {
    Autoencoder net;
    std::size_t e = 0;
    AeInput input_mode = AeInput::sensitive_only;
    std::size_t onehot_dim = 0;
    std::size_t feature_dim = 0;  // width of X, all_features mode only
};

/// Pretrains on one-hot sensitive columns. `options.epochs` and `options.seed` are overridden by the arguments.
SensitiveAutoencoder pretrain(const Matrix& s_onehot, std::size_t e, std::size_t epochs, std::uint64_t seed,
                              AutoencoderOptions options = {});
/// all_features variant: encoder reads [X | S_onehot], decoder reconstructs S_onehot only.
SensitiveAutoencoder pretrain(const Matrix& X, const Matrix& s_onehot, std::size_t e, std::size_t epochs,
                              std::uint64_t seed, AutoencoderOptions options = {});

Matrix embed(const SensitiveAutoencoder& ae, const Matrix& s_onehot);
Matrix embed(const SensitiveAutoencoder& ae, const Matrix& X, const Matrix& s_onehot);

/// Frozen S^e lookup keyed by the one-hot pattern of a row.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    static EmbeddingTable build(const SensitiveAutoencoder& ae, const Matrix& s_onehot);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return entries_.size(); }
    const std::map<std::string, std::vector<double>>& entries() const noexcept { return entries_; }

    /// Throws LookupError for a combination not seen at build time.
    std::span<const double> lookup(std::span<const double> onehot_row) const;
    Matrix lookup(const Matrix& s_onehot) const;

    friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;

private:
    static std::string key(std::span<const double> onehot_row);
    std::size_t dim_ = 0;
    std::map<std::string, std::vector<double>> entries_;
};

}  // namespace cfair

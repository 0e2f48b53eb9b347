#include "cfair/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cfair/adam.hpp"
#include "cfair/errors.hpp"
#include "cfair/loss.hpp"
#include "cfair/random.hpp"

namespace cfair {

AeInput parse_ae_input(std::string_view name) {
    if (name == "sensitive_only") return AeInput::sensitive_only;
    if (name == "all_features") return AeInput::all_features;
    throw ArgumentError("unknown ae_input '" + std::string(name) + "'");
}

ReconstructionLoss parse_reconstruction_loss(std::string_view name) {
    if (name == "mse") return ReconstructionLoss::mse;
    if (name == "cross_entropy") return ReconstructionLoss::cross_entropy;
    throw ArgumentError("unknown reconstruction loss '" + std::string(name) + "'");
}

namespace {

// Returns mean loss over rows and writes d loss / d output into grad.
double reconstruction_grad(const Matrix& out, const Matrix& target, const AutoencoderOptions& opt, Matrix* grad) {
    const double inv_n = 1.0 / double(out.rows());
    if (grad) *grad = Matrix(out.rows(), out.cols());
    double total = 0.0;
    if (opt.loss == ReconstructionLoss::mse) {
        // mean over rows and columns
        const double inv = inv_n / double(out.cols());
        for (std::size_t k = 0; k < out.size(); ++k) {
            const double d = out.data()[k] - target.data()[k];
            total += d * d;
            if (grad) grad->data()[k] = 2.0 * d * inv;
        }
        return total * inv;
    }
    std::size_t width = std::accumulate(opt.target_blocks.begin(), opt.target_blocks.end(), std::size_t{0});
    if (width != out.cols()) throw ArgumentError("cross_entropy reconstruction: blocks do not cover the target");
    for (std::size_t r = 0; r < out.rows(); ++r) {
        std::size_t offset = 0;
        for (std::size_t b : opt.target_blocks) {
            double mx = out(r, offset);
            for (std::size_t c = 1; c < b; ++c) mx = std::max(mx, out(r, offset + c));
            double z = 0.0;
            for (std::size_t c = 0; c < b; ++c) z += std::exp(out(r, offset + c) - mx);
            for (std::size_t c = 0; c < b; ++c) {
                const double logp = out(r, offset + c) - mx - std::log(z);
                total -= target(r, offset + c) * logp;
                if (grad) (*grad)(r, offset + c) = (std::exp(logp) - target(r, offset + c)) * inv_n;
            }
            offset += b;
        }
    }
    return total * inv_n;
}

}  // namespace

Autoencoder train_autoencoder(const Matrix& input, const Matrix& target, std::size_t latent,
                              const AutoencoderOptions& opt) {
    if (latent == 0) throw ArgumentError("autoencoder latent dimension must be >= 1");
    if (input.rows() != target.rows()) throw ShapeError("autoencoder input/target row counts differ");
    if (opt.batch_size == 0) throw ArgumentError("autoencoder batch size must be >= 1");

    const std::size_t enc_dims[] = {input.cols(), opt.hidden, latent};
    const std::size_t dec_dims[] = {latent, opt.hidden, target.cols()};
    Autoencoder ae{init_mlp(enc_dims, derive_seed(opt.seed, 1)), init_mlp(dec_dims, derive_seed(opt.seed, 2))};
    AdamState enc_state = AdamState::for_network(ae.encoder, opt.lr);
    AdamState dec_state = AdamState::for_network(ae.decoder, opt.lr);
    Rng rng(derive_seed(opt.seed, 3));

    const std::size_t n = input.rows();
    for (std::size_t epoch = 0; epoch < opt.epochs && n > 0; ++epoch) {
        const auto order = rng.permutation(n);
        for (std::size_t start = 0; start < n; start += opt.batch_size) {
            const std::size_t stop = std::min(n, start + opt.batch_size);
            std::span<const std::size_t> idx(order.data() + start, stop - start);
            const Matrix xb = input.select_rows(idx);
            const Matrix tb = target.select_rows(idx);

            const auto enc = forward_cached(ae.encoder, xb);
            const auto dec = forward_cached(ae.decoder, enc.output);
            Matrix g_out;
            reconstruction_grad(dec.output, tb, opt, &g_out);
            const auto g_dec = backward(ae.decoder, dec, g_out);
            const auto g_enc = backward(ae.encoder, enc, g_dec.input);
            adam_step(ae.decoder, g_dec, dec_state);
            adam_step(ae.encoder, g_enc, enc_state);
        }
    }
    return ae;
}

double reconstruction_loss(const Autoencoder& ae, const Matrix& input, const Matrix& target,
                           const AutoencoderOptions& options) {
    if (input.rows() == 0) throw ArgumentError("reconstruction_loss: empty input");
    return reconstruction_grad(forward(ae.decoder, forward(ae.encoder, input)), target, options, nullptr);
}

SensitiveAutoencoder pretrain(const Matrix& s_onehot, std::size_t e, std::size_t epochs, std::uint64_t seed,
                              AutoencoderOptions options) {
    if (e < 1) throw ArgumentError("pretrain: embedding dimension must be >= 1");
    if (epochs < 1) throw ArgumentError("pretrain: epochs must be >= 1");
    if (e >= s_onehot.cols())
        throw ArgumentError("pretrain: embedding dimension " + std::to_string(e) + " does not compress one-hot width " +
                            std::to_string(s_onehot.cols()));
    options.epochs = epochs;
    options.seed = seed;
    SensitiveAutoencoder out;
    out.net = train_autoencoder(s_onehot, s_onehot, e, options);
    out.e = e;
    out.input_mode = AeInput::sensitive_only;
    out.onehot_dim = s_onehot.cols();
    return out;
}

SensitiveAutoencoder pretrain(const Matrix& X, const Matrix& s_onehot, std::size_t e, std::size_t epochs,
                              std::uint64_t seed, AutoencoderOptions options) {
    if (e < 1) throw ArgumentError("pretrain: embedding dimension must be >= 1");
    if (epochs < 1) throw ArgumentError("pretrain: epochs must be >= 1");
    if (e >= s_onehot.cols())
        throw ArgumentError("pretrain: embedding dimension " + std::to_string(e) + " does not compress one-hot width " +
                            std::to_string(s_onehot.cols()));
    options.epochs = epochs;
    options.seed = seed;
    SensitiveAutoencoder out;
    out.net = train_autoencoder(hconcat(X, s_onehot), s_onehot, e, options);
    out.e = e;
    out.input_mode = AeInput::all_features;
    out.onehot_dim = s_onehot.cols();
    out.feature_dim = X.cols();
    return out;
}

Matrix embed(const SensitiveAutoencoder& ae, const Matrix& s_onehot) {
    if (ae.input_mode != AeInput::sensitive_only) throw ArgumentError("embed: autoencoder also needs X");
    if (s_onehot.cols() != ae.onehot_dim) throw ShapeError("embed: one-hot width differs from pretraining");
    if (s_onehot.rows() == 0) return Matrix(0, ae.e);
    return forward(ae.net.encoder, s_onehot);
}

Matrix embed(const SensitiveAutoencoder& ae, const Matrix& X, const Matrix& s_onehot) {
    if (ae.input_mode == AeInput::sensitive_only) return embed(ae, s_onehot);
    if (s_onehot.cols() != ae.onehot_dim || X.cols() != ae.feature_dim)
        throw ShapeError("embed: input widths differ from pretraining");
    if (s_onehot.rows() == 0) return Matrix(0, ae.e);
    return forward(ae.net.encoder, hconcat(X, s_onehot));
}

std::string EmbeddingTable::key(std::span<const double> onehot_row) {
    std::string k(onehot_row.size(), '0');
    for (std::size_t i = 0; i < onehot_row.size(); ++i)
        if (onehot_row[i] != 0.0) k[i] = '1';
    return k;
}

EmbeddingTable EmbeddingTable::build(const SensitiveAutoencoder& ae, const Matrix& s_onehot) {
    EmbeddingTable t;
    t.dim_ = ae.e;
    std::map<std::string, std::size_t> first_row;
    for (std::size_t r = 0; r < s_onehot.rows(); ++r) first_row.emplace(key(s_onehot.row(r)), r);
    std::vector<std::size_t> rows;
    for (const auto& [k, r] : first_row) rows.push_back(r);
    const Matrix emb = embed(ae, s_onehot.select_rows(rows));
    std::size_t i = 0;
    for (const auto& [k, r] : first_row) {
        auto v = emb.row(i++);
        t.entries_.emplace(k, std::vector<double>(v.begin(), v.end()));
    }
    return t;
}

std::span<const double> EmbeddingTable::lookup(std::span<const double> onehot_row) const {
    const auto it = entries_.find(key(onehot_row));
    if (it == entries_.end()) throw LookupError("no sensitive embedding for combination " + key(onehot_row));
    return it->second;
}

Matrix EmbeddingTable::lookup(const Matrix& s_onehot) const {
    Matrix out(s_onehot.rows(), dim_);
    for (std::size_t r = 0; r < s_onehot.rows(); ++r) {
        auto v = lookup(s_onehot.row(r));
        std::copy(v.begin(), v.end(), out.row(r).begin());
    }
    return out;
}

}  // namespace cfair

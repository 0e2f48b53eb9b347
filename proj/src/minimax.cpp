#include "cfair/minimax.hpp"

#include <cmath>
#include <fstream>

#include "cfair/adam.hpp"
#include "cfair/errors.hpp"
#include "cfair/random.hpp"

namespace cfair {

AdversaryMode parse_adversary_mode(std::string_view name) {
    if (name == "own_loss") return AdversaryMode::own_loss;
    if (name == "ascend_gap") return AdversaryMode::ascend_gap;
    throw ArgumentError("unknown adversary mode '" + std::string(name) + "'");
}

std::string_view to_string(AdversaryMode mode) { return mode == AdversaryMode::own_loss ? "own_loss" : "ascend_gap"; }

std::string_view to_string(Phase phase) {
    switch (phase) {
        case Phase::init: return "init";
        case Phase::fair_predictor: return "fair_predictor";
        case Phase::encoder: return "encoder";
        case Phase::adversary: return "adversary";
    }
    return "?";
}

void TrainConfig::validate() const {
    if (!(lambda >= 0.0)) throw ArgumentError("train: lambda must be >= 0");
    if (batch_size < 1) throw ArgumentError("train: batch_size must be >= 1");
    if (!(h_slope > 0.0 && h_slope < 1.0)) throw ArgumentError("train: h_slope must lie in (0, 1)");
    if (!(lr > 0.0)) throw ArgumentError("train: lr must be > 0");
    if (z_dim < 1 || encoder_hidden < 1 || predictor_hidden < 1) throw ArgumentError("train: zero-width layer");
}

ThreePlayerModel init_three_player(std::size_t x_dim, const SensitiveAutoencoder& ae, EmbeddingTable embedding,
                                   const TrainConfig& cfg) {
    const std::size_t enc_dims[] = {x_dim, cfg.encoder_hidden, cfg.z_dim};
    const std::size_t f1_dims[] = {cfg.z_dim, cfg.predictor_hidden, 1};
    const std::size_t f2_dims[] = {cfg.z_dim + ae.e, cfg.predictor_hidden, 1};
    return ThreePlayerModel{init_mlp(enc_dims, derive_seed(cfg.seed, 11)),
                            init_mlp(f1_dims, derive_seed(cfg.seed, 12)),
                            init_mlp(f2_dims, derive_seed(cfg.seed, 13)), ae, std::move(embedding)};
}

Matrix encode(const ThreePlayerModel& model, const Matrix& X) { return forward(model.encoder, X); }

std::vector<double> fair_predict(const ThreePlayerModel& model, const Matrix& X) {
    return forward(model.fair_predictor, encode(model, X)).data();
}

Matrix sensitive_embedding(const ThreePlayerModel& model, const Matrix& X, const Matrix& s_onehot) {
    if (X.rows() != s_onehot.rows()) throw ShapeError("sensitive input row count differs from X");
    if (model.autoencoder.input_mode == AeInput::sensitive_only) {
        if (s_onehot.cols() != model.autoencoder.onehot_dim) throw ShapeError("one-hot width differs from pretraining");
        return model.embedding.lookup(s_onehot);
    }
    return embed(model.autoencoder, X, s_onehot);
}

std::vector<double> sensitive_predict(const ThreePlayerModel& model, const Matrix& X, const Matrix& s_onehot) {
    const Matrix se = sensitive_embedding(model, X, s_onehot);
    return forward(model.sensitive_predictor, hconcat(encode(model, X), se)).data();
}

namespace {

struct GapParts {
    double mean_h = 0.0;
    std::vector<double> slope;  // h'(f1 - f2) per sample
};

GapParts gap(std::span<const double> f1, std::span<const double> f2, double h_slope) {
    GapParts g;
    g.slope.resize(f1.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < f1.size(); ++i) {
        const double t = f1[i] - f2[i];
        sum += leaky_relu(t, h_slope);
        g.slope[i] = leaky_relu_grad(t, h_slope);
    }
    g.mean_h = sum / double(f1.size());
    return g;
}

}  // namespace

ObjectiveValue objective(const ThreePlayerModel& model, const Matrix& X, const Matrix& s_onehot,
                         std::span<const double> y, const TrainConfig& cfg) {
    if (!(cfg.lambda >= 0.0)) throw ArgumentError("objective: lambda must be >= 0");
    if (X.rows() == 0) throw ArgumentError("objective: empty batch");
    if (y.size() != X.rows()) throw ShapeError("objective: target length differs from batch");
    const auto f1 = fair_predict(model, X);
    const auto f2 = sensitive_predict(model, X, s_onehot);
    ObjectiveValue v;
    v.fair_loss = loss(cfg.loss_kind, f1, y);
    v.gap_term = gap(f1, f2, cfg.h_slope).mean_h;
    v.total = v.fair_loss + cfg.lambda * v.gap_term;
    return v;
}

namespace {

class Trainer {
public:
    Trainer(ThreePlayerModel& model, const TrainConfig& cfg)
        : model_(model),
          cfg_(cfg),
          fair_state_(AdamState::for_network(model.fair_predictor, cfg.lr)),
          enc_state_(AdamState::for_network(model.encoder, cfg.lr)),
          adv_state_(AdamState::for_network(model.sensitive_predictor, cfg.lr)) {}

    // Forward pass of all three players on one minibatch.
    struct Pass {
        ForwardCache enc;
        ForwardCache f1;
        ForwardCache f2;
        ObjectiveValue obj;
        double adversary_loss = 0.0;
        GapParts gap;
    };

    Pass run(const Matrix& xb, const Matrix& seb, std::span<const double> yb) const {
        Pass p;
        p.enc = forward_cached(model_.encoder, xb);
        p.f1 = forward_cached(model_.fair_predictor, p.enc.output);
        p.f2 = forward_cached(model_.sensitive_predictor, hconcat(p.enc.output, seb));
        const auto& s1 = p.f1.output.data();
        const auto& s2 = p.f2.output.data();
        p.obj.fair_loss = loss(cfg_.loss_kind, s1, yb);
        p.gap = gap(s1, s2, cfg_.h_slope);
        p.obj.gap_term = p.gap.mean_h;
        p.obj.total = p.obj.fair_loss + cfg_.lambda * p.obj.gap_term;
        p.adversary_loss = loss(cfg_.loss_kind, s2, yb);
        return p;
    }

    // d total / d f1 and d total / d f2.
    Matrix grad_f1(const Pass& p, std::span<const double> yb) const {
        auto g = loss_grad(cfg_.loss_kind, p.f1.output.data(), yb);
        const double w = cfg_.lambda / double(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += w * p.gap.slope[i];
        return Matrix::column(g);
    }
    Matrix grad_f2(const Pass& p) const {
        std::vector<double> g(p.gap.slope.size());
        const double w = cfg_.lambda / double(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = -w * p.gap.slope[i];
        return Matrix::column(g);
    }

    void check(const Pass& p, std::size_t epoch, Phase phase) const {
        for (double v : {p.obj.total, p.obj.fair_loss, p.adversary_loss})
            if (!std::isfinite(v) || v > cfg_.divergence_limit)
                throw DivergenceError(epoch, std::string(to_string(phase)), v);
    }

    Pass fair_step(const Matrix& xb, const Matrix& seb, std::span<const double> yb, std::size_t epoch) {
        Pass p = run(xb, seb, yb);
        check(p, epoch, Phase::fair_predictor);
        const auto g = backward(model_.fair_predictor, p.f1, grad_f1(p, yb));
        adam_step(model_.fair_predictor, g, fair_state_, Direction::descend);
        return p;
    }

    Pass encoder_step(const Matrix& xb, const Matrix& seb, std::span<const double> yb, std::size_t epoch) {
        Pass p = run(xb, seb, yb);
        check(p, epoch, Phase::encoder);
        const auto g1 = backward(model_.fair_predictor, p.f1, grad_f1(p, yb));
        const auto g2 = backward(model_.sensitive_predictor, p.f2, grad_f2(p));
        Matrix dz = g1.input;
        const std::size_t zd = dz.cols();
        for (std::size_t r = 0; r < dz.rows(); ++r)
            for (std::size_t c = 0; c < zd; ++c) dz(r, c) += g2.input(r, c);
        const auto ge = backward(model_.encoder, p.enc, dz);
        adam_step(model_.encoder, ge, enc_state_, Direction::descend);
        return p;
    }

    Pass adversary_step(const Matrix& xb, const Matrix& seb, std::span<const double> yb, std::size_t epoch) {
        Pass p = run(xb, seb, yb);
        check(p, epoch, Phase::adversary);
        if (cfg_.adversary_mode == AdversaryMode::own_loss) {
            const auto d = Matrix::column(loss_grad(cfg_.loss_kind, p.f2.output.data(), yb));
            adam_step(model_.sensitive_predictor, backward(model_.sensitive_predictor, p.f2, d), adv_state_,
                      Direction::descend);
        } else {
            adam_step(model_.sensitive_predictor, backward(model_.sensitive_predictor, p.f2, grad_f2(p)), adv_state_,
                      Direction::ascend);
        }
        return p;
    }

private:
    ThreePlayerModel& model_;
    const TrainConfig& cfg_;
    AdamState fair_state_;
    AdamState enc_state_;
    AdamState adv_state_;
};

}  // namespace

TrainedFairModel train(const ProcessedDataset& train_data, const SensitiveAutoencoder& ae, const TrainConfig& cfg,
                       const StepObserver& observer) {
    cfg.validate();
    const std::size_t n = train_data.rows();
    if (n < cfg.batch_size)
        throw ArgumentError("train: " + std::to_string(n) + " training rows < batch size " +
                            std::to_string(cfg.batch_size));
    if (train_data.s_onehot.cols() != ae.onehot_dim) throw ShapeError("train: one-hot width differs from autoencoder");

    EmbeddingTable table;
    if (ae.input_mode == AeInput::sensitive_only) table = EmbeddingTable::build(ae, train_data.s_onehot);
    TrainedFairModel out{init_three_player(train_data.X.cols(), ae, std::move(table), cfg), {}};
    ThreePlayerModel& model = out.model;
    // S^e is frozen, so the whole training split is embedded once.
    const Matrix se_all = sensitive_embedding(model, train_data.X, train_data.s_onehot);

    if (observer) observer(StepEvent{Phase::init, 0, 0, model, {}});

    Trainer trainer(model, cfg);
    Rng rng(derive_seed(cfg.seed, 7));
    out.history.reserve(cfg.epochs);
    std::vector<double> yb;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto order = rng.permutation(n);
        EpochRecord rec;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size, ++batches) {
            const std::size_t stop = std::min(n, start + cfg.batch_size);
            std::span<const std::size_t> idx(order.data() + start, stop - start);
            const Matrix xb = train_data.X.select_rows(idx);
            const Matrix seb = se_all.select_rows(idx);
            yb.clear();
            for (auto i : idx) yb.push_back(train_data.y[i]);

            for (std::size_t s = 0; s < cfg.fair_steps; ++s) {
                const auto p = trainer.fair_step(xb, seb, yb, epoch);
                if (s == 0) {
                    rec.fair_loss += p.obj.fair_loss;
                    rec.adversary_loss += p.adversary_loss;
                    rec.gap_term += p.obj.gap_term;
                    rec.total += p.obj.total;
                }
                if (observer) observer(StepEvent{Phase::fair_predictor, epoch, batches, model, p.obj});
            }
            for (std::size_t s = 0; s < cfg.encoder_steps; ++s) {
                const auto p = trainer.encoder_step(xb, seb, yb, epoch);
                if (observer) observer(StepEvent{Phase::encoder, epoch, batches, model, p.obj});
            }
            for (std::size_t s = 0; s < cfg.adversary_steps; ++s) {
                const auto p = trainer.adversary_step(xb, seb, yb, epoch);
                if (observer) observer(StepEvent{Phase::adversary, epoch, batches, model, p.obj});
            }
        }
        const double inv = 1.0 / double(batches);
        rec.fair_loss *= inv;
        rec.adversary_loss *= inv;
        rec.gap_term *= inv;
        rec.total *= inv;
        out.history.push_back(rec);
    }
    return out;
}

void write_history_csv(const std::vector<EpochRecord>& history, const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write training history '" + path.string() + "'");
    f.precision(17);
    f << "epoch,fair_loss,adversary_loss,gap_term\n";
    for (std::size_t e = 0; e < history.size(); ++e)
        f << e << ',' << history[e].fair_loss << ',' << history[e].adversary_loss << ',' << history[e].gap_term
          << '\n';
}

}  // namespace cfair

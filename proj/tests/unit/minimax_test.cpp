#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <optional>

#include "cfair/adam.hpp"
#include "cfair/errors.hpp"
#include "cfair/minimax.hpp"
#include "oracles.hpp"

using namespace cfair;

namespace {

struct Fixture {
    ProcessedDataset data;
    SensitiveAutoencoder ae;
};

Fixture fixture(bool classification, std::size_t n = 240, std::uint64_t seed = 1) {
    const auto spec = oracle::toy_spec(classification);
    const auto raw = parse_csv(oracle::toy_csv(n, seed, classification), spec);
    std::vector<std::size_t> all(raw.rows);
    std::iota(all.begin(), all.end(), std::size_t{0});
    auto d = preprocess(raw, spec, all);
    auto ae = pretrain(d.s_onehot, 3, 10, derive_seed(seed, 5));
    return {std::move(d), std::move(ae)};
}

TrainConfig small_config(bool classification, double lambda) {
    TrainConfig c;
    c.lambda = lambda;
    c.epochs = 3;
    c.batch_size = 32;
    c.lr = 5e-3;
    c.loss_kind = classification ? LossKind::binary_cross_entropy : LossKind::smooth_l1;
    c.seed = 17;
    return c;
}

std::vector<double> column(const Matrix& m) { return m.data(); }

}  // namespace

TEST_SUITE("minimax_trainer") {

TEST_CASE("encode shape and determinism; zero first-layer column is ignored") {
    auto f = fixture(false);
    auto model = init_three_player(f.data.X.cols(), f.ae, EmbeddingTable::build(f.ae, f.data.s_onehot), TrainConfig{});
    const Matrix z = encode(model, f.data.X);
    CHECK(z.cols() == 8);
    CHECK(z == encode(model, f.data.X));
    for (std::size_t j = 0; j < model.encoder.layers[0].weights.cols(); ++j) model.encoder.layers[0].weights(0, j) = 0.0;
    Matrix x = f.data.X.select_rows(std::vector<std::size_t>{0, 0});
    x(1, 0) += 3.7;
    const Matrix zz = encode(model, x);
    CHECK(std::equal(zz.row(0).begin(), zz.row(0).end(), zz.row(1).begin()));
    CHECK_THROWS_AS(encode(model, Matrix(1, f.data.X.cols() + 1)), ShapeError);
}

TEST_CASE("fair_predict composes encoder and fair predictor and ignores S") {
    auto f = fixture(false);
    const auto model =
        init_three_player(f.data.X.cols(), f.ae, EmbeddingTable::build(f.ae, f.data.s_onehot), TrainConfig{});
    CHECK(fair_predict(model, f.data.X) == column(forward(model.fair_predictor, encode(model, f.data.X))));
    CHECK(fair_predict(model, f.data.X.select_rows(std::vector<std::size_t>{3})).size() == 1);
}

TEST_CASE("sensitive_predict uses S and rejects unseen combinations") {
    auto f = fixture(false);
    const auto table = EmbeddingTable::build(f.ae, f.data.s_onehot);
    bool any_difference = false;
    for (std::uint64_t s = 0; s < 5 && !any_difference; ++s) {
        TrainConfig c;
        c.seed = s;
        const auto model = init_three_player(f.data.X.cols(), f.ae, table, c);
        Matrix x = f.data.X.select_rows(std::vector<std::size_t>{0, 0});
        Matrix so(2, f.data.s_onehot.cols());
        so(0, 0) = so(0, 3) = 1.0;
        so(1, 2) = so(1, 4) = 1.0;
        const auto p = sensitive_predict(model, x, so);
        REQUIRE(p.size() == 2);
        any_difference = std::abs(p[0] - p[1]) > 1e-9;
        const auto q = sensitive_predict(model, x, f.data.s_onehot.select_rows(std::vector<std::size_t>{5, 5}));
        CHECK(q[0] == q[1]);
    }
    CHECK(any_difference);
    const auto model = init_three_player(f.data.X.cols(), f.ae, table, TrainConfig{});
    Matrix bogus(1, f.data.s_onehot.cols());
    bogus(0, 0) = bogus(0, 1) = 1.0;
    CHECK_THROWS_AS(sensitive_predict(model, f.data.X.select_rows(std::vector<std::size_t>{0}), bogus), LookupError);
}

TEST_CASE("objective examples") {
    auto f = fixture(false);
    const auto table = EmbeddingTable::build(f.ae, f.data.s_onehot);
    TrainConfig c;
    auto model = init_three_player(f.data.X.cols(), f.ae, table, c);
    c.lambda = 0.0;
    const auto o0 = objective(model, f.data.X, f.data.s_onehot, f.data.y, c);
    CHECK(o0.total == o0.fair_loss);

    // f2 := f1 with the S^e input rows zeroed.
    auto twin = model;
    auto& first = twin.sensitive_predictor.layers[0];
    const auto& src = twin.fair_predictor.layers[0];
    for (std::size_t r = 0; r < first.weights.rows(); ++r)
        for (std::size_t j = 0; j < first.weights.cols(); ++j)
            first.weights(r, j) = r < src.weights.rows() ? src.weights(r, j) : 0.0;
    first.bias = src.bias;
    twin.sensitive_predictor.layers[1] = twin.fair_predictor.layers[1];
    c.lambda = 3.0;
    CHECK(objective(twin, f.data.X, f.data.s_onehot, f.data.y, c).gap_term == 0.0);

    // single sample with f1 - f2 = -2: set both output biases and zero their weights.
    auto single = model;
    for (auto* net : {&single.fair_predictor, &single.sensitive_predictor})
        for (double& w : net->layers.back().weights.data()) w = 0.0;
    single.fair_predictor.layers.back().bias[0] = 1.0;
    single.sensitive_predictor.layers.back().bias[0] = 3.0;
    c.lambda = 10.0;
    const std::vector<std::size_t> one{0};
    const double y1[] = {1.0};
    const auto o = objective(single, f.data.X.select_rows(one), f.data.s_onehot.select_rows(one), y1, c);
    CHECK(c.lambda * o.gap_term == doctest::Approx(-0.2).epsilon(1e-14));
    CHECK(o.fair_loss == 0.0);
    CHECK(o.total == doctest::Approx(-0.2).epsilon(1e-14));
    CHECK_THROWS_AS(objective(model, Matrix(0, f.data.X.cols()), Matrix(0, f.data.s_onehot.cols()), {}, c),
                    ArgumentError);
}

TEST_CASE("zero epochs returns the initialization") {
    auto f = fixture(false);
    auto c = small_config(false, 1.0);
    c.epochs = 0;
    const auto t = train(f.data, f.ae, c);
    const auto init = init_three_player(f.data.X.cols(), f.ae, EmbeddingTable::build(f.ae, f.data.s_onehot), c);
    CHECK(t.model.encoder == init.encoder);
    CHECK(t.model.fair_predictor == init.fair_predictor);
    CHECK(t.model.sensitive_predictor == init.sensitive_predictor);
    CHECK(t.history.empty());
}

TEST_CASE("training is bitwise deterministic and history has one row per epoch") {
    for (bool cls : {false, true}) {
        auto f = fixture(cls);
        const auto c = small_config(cls, 1.0);
        const auto a = train(f.data, f.ae, c), b = train(f.data, f.ae, c);
        CHECK(flatten(a.model.encoder) == flatten(b.model.encoder));
        CHECK(flatten(a.model.fair_predictor) == flatten(b.model.fair_predictor));
        CHECK(flatten(a.model.sensitive_predictor) == flatten(b.model.sensitive_predictor));
        CHECK(a.history.size() == c.epochs);
    }
}

TEST_CASE("player isolation and frozen embedding") {
    for (auto mode : {AdversaryMode::own_loss, AdversaryMode::ascend_gap}) {
        auto f = fixture(false);
        auto c = small_config(false, 2.0);
        c.adversary_mode = mode;
        const SensitiveAutoencoder ae_before = f.ae;
        std::optional<ThreePlayerModel> prev;
        std::size_t checked = 0;
        train(f.data, f.ae, c, [&](const StepEvent& ev) {
            if (prev) {
                const bool enc = ev.model.encoder != prev->encoder;
                const bool f1 = ev.model.fair_predictor != prev->fair_predictor;
                const bool f2 = ev.model.sensitive_predictor != prev->sensitive_predictor;
                CHECK(enc == (ev.phase == Phase::encoder));
                CHECK(f1 == (ev.phase == Phase::fair_predictor));
                CHECK(f2 == (ev.phase == Phase::adversary));
                CHECK(ev.model.embedding == prev->embedding);
                CHECK(ev.model.autoencoder.net.encoder == ae_before.net.encoder);
                ++checked;
            }
            CHECK(ev.objective.total == doctest::Approx(ev.objective.fair_loss + c.lambda * ev.objective.gap_term)
                                            .epsilon(1e-12));
            prev = ev.model;
        });
        CHECK(checked == 3 * c.epochs * ((f.data.rows() + c.batch_size - 1) / c.batch_size));
        CHECK(f.ae.net.encoder == ae_before.net.encoder);
        CHECK(f.ae.net.decoder == ae_before.net.decoder);
    }
}

TEST_CASE("lambda 0 reproduces plain supervised training of encoder and predictor") {
    for (bool cls : {false, true}) {
        auto f = fixture(cls);
        const auto c = small_config(cls, 0.0);
        const auto got = oracle::trainer_trajectory(f.data, f.ae, c);
        const auto want = oracle::plain_supervised_trajectory(f.data, c);
        CHECK(got.size() == c.epochs * ((f.data.rows() + c.batch_size - 1) / c.batch_size));
        CHECK(oracle::trajectory_gap(got, want) <= 1e-12);
    }
}

TEST_CASE("lambda > 0 departs from the plain trajectory") {
    auto f = fixture(false);
    const auto c = small_config(false, 1.0);
    CHECK(oracle::trajectory_gap(oracle::trainer_trajectory(f.data, f.ae, c),
                                 oracle::plain_supervised_trajectory(f.data, c)) > 1e-6);
}

TEST_CASE("gap term changes the encoder gradient when lambda is positive") {
    auto f = fixture(false, 120);
    const auto table = EmbeddingTable::build(f.ae, f.data.s_onehot);
    TrainConfig c;
    c.seed = 3;
    const auto model = init_three_player(f.data.X.cols(), f.ae, table, c);
    auto encoder_fd = [&](double lambda) {
        TrainConfig cc = c;
        cc.lambda = lambda;
        ThreePlayerModel probe = model;
        std::vector<double> g;
        for (std::size_t i = 0; i < parameter_count(probe.encoder); ++i) {
            double& p = oracle::param(probe.encoder, i);
            const double p0 = p;
            p = p0 + 1e-5;
            const double up = objective(probe, f.data.X, f.data.s_onehot, f.data.y, cc).total;
            p = p0 - 1e-5;
            const double down = objective(probe, f.data.X, f.data.s_onehot, f.data.y, cc).total;
            p = p0;
            g.push_back((up - down) / 2e-5);
        }
        return g;
    };
    const auto g0 = encoder_fd(0.0), g1 = encoder_fd(5.0);
    double diff = 0.0;
    for (std::size_t i = 0; i < g0.size(); ++i) diff = std::max(diff, std::abs(g0[i] - g1[i]));
    CHECK(diff > 1e-6);

}

TEST_CASE("encoder gradient through both predictors matches finite differences") {
    auto f = fixture(true, 80);
    const auto table = EmbeddingTable::build(f.ae, f.data.s_onehot);
    TrainConfig c;
    c.seed = 21;
    c.lambda = 2.5;
    c.loss_kind = LossKind::binary_cross_entropy;
    c.epochs = 1;
    c.batch_size = f.data.rows();
    c.lr = 1e-7;  // tiny step: parameter change ~ lr * sign(grad)
    // Capture the model right before the encoder step and the step taken.
    std::optional<ThreePlayerModel> pre;
    std::vector<double> after;
    std::vector<double> before;
    train(f.data, f.ae, c, [&](const StepEvent& ev) {
        if (ev.phase == Phase::fair_predictor) {
            pre = ev.model;
            before = flatten(ev.model.encoder);
        }
        if (ev.phase == Phase::encoder) after = flatten(ev.model.encoder);
    });
    REQUIRE(pre);
    std::size_t counted = 0;
    ThreePlayerModel probe = *pre;
    for (std::size_t i = 0; i < before.size(); ++i) {
        double& p = oracle::param(probe.encoder, i);
        const double p0 = p;
        p = p0 + 1e-5;
        const double up = objective(probe, f.data.X, f.data.s_onehot, f.data.y, c).total;
        p = p0 - 1e-5;
        const double down = objective(probe, f.data.X, f.data.s_onehot, f.data.y, c).total;
        p = p0;
        const double g = (up - down) / 2e-5;
        if (std::abs(g) < 1e-5) continue;
        ++counted;
        // First Adam step moves by lr * g / (|g| + eps): exactly -lr * sign(g) up to eps.
        CHECK((after[i] - before[i]) == doctest::Approx(-c.lr * g / (std::abs(g) + 1e-8)).epsilon(1e-3));
    }
    CHECK(counted > 0);
}

TEST_CASE("literal invariance under sensitive relabeling") {
    auto f = fixture(true);
    const auto t = train(f.data, f.ae, small_config(true, 1.0));
    const auto base = fair_predict(t.model, f.data.X);
    ProcessedDataset relabeled = f.data;
    for (auto& lab : relabeled.s_labels[0]) lab = (lab + 1) % 3;
    for (auto& lab : relabeled.s_labels[1]) lab = 1 - lab;
    relabeled.refresh_onehot();
    CHECK(!(relabeled.s_onehot == f.data.s_onehot));
    CHECK(fair_predict(t.model, relabeled.X) == base);
}

TEST_CASE("divergence is reported with epoch and phase") {
    auto f = fixture(false);
    auto c = small_config(false, 1.0);
    c.divergence_limit = 1e-9;
    try {
        train(f.data, f.ae, c);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.epoch == 0);
        CHECK(e.phase == "fair_predictor");
    }
}

TEST_CASE("config validation and batch size guard") {
    TrainConfig c;
    c.lambda = -1;
    CHECK_THROWS_AS(c.validate(), ArgumentError);
    c = TrainConfig{};
    c.batch_size = 0;
    CHECK_THROWS_AS(c.validate(), ArgumentError);
    auto f = fixture(false, 40);
    c = small_config(false, 1.0);
    c.batch_size = 64;
    CHECK_THROWS_AS(train(f.data, f.ae, c), ArgumentError);
    CHECK(parse_adversary_mode("ascend_gap") == AdversaryMode::ascend_gap);
    CHECK_THROWS_AS(parse_adversary_mode("sideways"), ArgumentError);
}

TEST_CASE("history csv") {
    auto f = fixture(false);
    const auto t = train(f.data, f.ae, small_config(false, 1.0));
    const auto path = std::filesystem::temp_directory_path() / "cfair_history_test.csv";
    write_history_csv(t.history, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "epoch,fair_loss,adversary_loss,gap_term");
    std::size_t lines = 0;
    for (std::string l; std::getline(in, l);) ++lines;
    CHECK(lines == t.history.size());
    std::filesystem::remove(path);
}

}

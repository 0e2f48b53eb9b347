#include <doctest.h>

#include "cfair/adam.hpp"
#include "cfair/errors.hpp"
#include "oracles.hpp"

using namespace cfair;

TEST_SUITE("neural_core") {

TEST_CASE("matmul kernels agree with the triple loop") {
    Rng rng(3);
    const Matrix a = oracle::random_matrix(rng, 5, 4), b = oracle::random_matrix(rng, 4, 3);
    const Matrix c = matmul(a, b);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < 4; ++k) s += a(i, k) * b(k, j);
            CHECK(c(i, j) == doctest::Approx(s).epsilon(1e-14));
        }
    const Matrix d = oracle::random_matrix(rng, 5, 3);
    const Matrix tn = matmul_tn(a, d);  // 4 x 3
    const Matrix nt = matmul_nt(a, oracle::random_matrix(rng, 2, 4));
    CHECK(tn.rows() == 4);
    CHECK(tn.cols() == 3);
    CHECK(nt.rows() == 5);
    CHECK(nt.cols() == 2);
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t j = 0; j < 3; ++j) {
            double s = 0;
            for (std::size_t i = 0; i < 5; ++i) s += a(i, k) * d(i, j);
            CHECK(tn(k, j) == doctest::Approx(s).epsilon(1e-14));
        }
    CHECK_THROWS_AS(matmul(a, a), ShapeError);
}

TEST_CASE("matmul rows do not depend on the rest of the batch") {
    Rng rng(4);
    const Matrix a = oracle::random_matrix(rng, 9, 7), b = oracle::random_matrix(rng, 7, 5);
    const Matrix full = matmul(a, b);
    const std::size_t pick[] = {6};
    const Matrix one = matmul(a.select_rows(pick), b);
    for (std::size_t j = 0; j < 5; ++j) CHECK(one(0, j) == full(6, j));
}

TEST_CASE("forward examples") {
    MLP id{{DenseLayer{Matrix::from_rows({{1, 0}, {0, 1}}), {0, 0}, Activation::identity}}};
    CHECK(forward(id, Matrix::from_rows({{1, 2}})) == Matrix::from_rows({{1, 2}}));

    MLP leaky{{DenseLayer{Matrix::from_rows({{1}, {1}}), {0}, Activation::leaky_relu}}};
    CHECK(forward(leaky, Matrix::from_rows({{-1, 0}}))(0, 0) == doctest::Approx(-0.01).epsilon(1e-15));

    MLP konst{{DenseLayer{Matrix(3, 1, 0.0), {3}, Activation::identity}}};
    CHECK(forward(konst, Matrix::from_rows({{5, -7, 2}}))(0, 0) == 3.0);

    CHECK_THROWS_AS(forward(id, Matrix(1, 3)), ShapeError);
}

TEST_CASE("leaky_relu values and monotonicity") {
    CHECK(leaky_relu(0.0, 0.01) == 0.0);
    CHECK(leaky_relu(2.0, 0.01) == 2.0);
    CHECK(leaky_relu(-3.0, 0.01) == doctest::Approx(-0.03).epsilon(1e-15));
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        double t1 = 4 * rng.normal(), t2 = 4 * rng.normal();
        if (t1 == t2) continue;
        if (t1 > t2) std::swap(t1, t2);
        const double slope = rng.uniform(1e-3, 0.999);
        CHECK(leaky_relu(t1, slope) < leaky_relu(t2, slope));
    }
}

TEST_CASE("loss examples") {
    const double same[] = {0.3, -1.2};
    CHECK(loss(LossKind::smooth_l1, same, same) == 0.0);
    const double p[] = {2.0}, t[] = {0.0};
    CHECK(loss(LossKind::smooth_l1, p, t) == doctest::Approx(1.5).epsilon(1e-15));
    const double z[] = {0.0}, one[] = {1.0};
    CHECK(loss(LossKind::binary_cross_entropy, z, one) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    const double bad[] = {0.5};
    CHECK_THROWS_AS(loss(LossKind::binary_cross_entropy, z, bad), ArgumentError);
    CHECK_THROWS_AS(loss(LossKind::mse, std::span<const double>{}, std::span<const double>{}), ArgumentError);
    CHECK_THROWS_AS(loss(LossKind::mse, p, same), ArgumentError);
}

TEST_CASE("smooth_l1 is C1 at the transition") {
    for (double sign : {-1.0, 1.0}) {
        const double d0 = sign;
        const double t[] = {0.0};
        auto f = [&](double d) {
            const double p[] = {d};
            return loss(LossKind::smooth_l1, p, t);
        };
        const double eps = 1e-7;
        CHECK(std::abs(f(d0 - 1e-12) - f(d0 + 1e-12)) < 1e-9);
        const double left = (f(d0) - f(d0 - eps)) / eps, right = (f(d0 + eps) - f(d0)) / eps;
        CHECK(std::abs(left - right) < 1e-6);
        const double at[] = {d0};
        CHECK(loss_grad(LossKind::smooth_l1, at, t)[0] == doctest::Approx(sign).epsilon(1e-12));
    }
}

TEST_CASE("binary cross entropy is nonnegative and vanishes for confident correct logits") {
    Rng rng(6);
    for (int i = 0; i < 500; ++i) {
        const double z[] = {20 * rng.normal()}, y[] = {double(rng.below(2))};
        CHECK(loss(LossKind::binary_cross_entropy, z, y) >= 0.0);
    }
    const double one[] = {1.0};
    double prev = 1.0;
    for (double z : {1.0, 5.0, 20.0, 40.0}) {
        const double zz[] = {z};
        const double v = loss(LossKind::binary_cross_entropy, zz, one);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(prev < 1e-15);
    const double huge[] = {-800.0};
    CHECK(std::isfinite(loss(LossKind::binary_cross_entropy, huge, one)));
}

TEST_CASE("backward with a zero seed gives zero gradients") {
    const std::size_t dims[] = {3, 4, 2};
    const MLP net = init_mlp(dims, 7);
    Rng rng(7);
    const Matrix x = oracle::random_matrix(rng, 5, 3);
    for (double g : flatten(backward(net, x, Matrix(5, 2)))) CHECK(g == 0.0);
}

TEST_CASE("gradients match central finite differences") {
    for (auto kind : {LossKind::smooth_l1, LossKind::binary_cross_entropy, LossKind::mse})
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            Rng rng(derive_seed(seed, 99));
            const std::size_t depth = 1 + rng.below(3);
            std::vector<std::size_t> dims{1 + rng.below(5)};
            for (std::size_t i = 1; i < depth; ++i) dims.push_back(1 + rng.below(16));
            dims.push_back(1);
            const MLP net = init_mlp(dims, seed);
            const Matrix x = oracle::smooth_batch(rng, net, 6);
            const auto y = oracle::random_targets(rng, 6, kind);
            const auto r = oracle::fd_check(net, x, y, kind);
            CAPTURE(seed);
            CAPTURE(to_string(kind));
            CHECK(r.max_rel <= 1e-4);
        }
}

TEST_CASE("linear network with mse reproduces the closed-form gradient") {
    Rng rng(8);
    const std::size_t n = 7, d = 3;
    const Matrix X = oracle::random_matrix(rng, n, d);
    const auto y = oracle::random_targets(rng, n, LossKind::mse);
    MLP net{{DenseLayer{oracle::random_matrix(rng, d, 1), {0.0}, Activation::identity}}};
    const auto pred = forward(net, X).data();
    const auto g = backward(net, X, Matrix::column(loss_grad(LossKind::mse, pred, y)));
    for (std::size_t j = 0; j < d; ++j) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += X(i, j) * (pred[i] - y[i]);
        CHECK(g.layers[0].weights(j, 0) == doctest::Approx(2 * s / double(n)).epsilon(1e-12));
    }
}

TEST_CASE("input gradient matches finite differences") {
    const std::size_t dims[] = {4, 6, 1};
    const MLP net = init_mlp(dims, 9);
    Rng rng(9);
    Matrix x = oracle::smooth_batch(rng, net, 3);
    const auto y = oracle::random_targets(rng, 3, LossKind::mse);
    const auto g = backward(net, x, Matrix::column(loss_grad(LossKind::mse, forward(net, x).data(), y)));
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double x0 = x.data()[i];
        x.data()[i] = x0 + 1e-5;
        const double up = loss(LossKind::mse, forward(net, x).data(), y);
        x.data()[i] = x0 - 1e-5;
        const double down = loss(LossKind::mse, forward(net, x).data(), y);
        x.data()[i] = x0;
        CHECK(oracle::relative_error(g.input.data()[i], (up - down) / 2e-5) <= 1e-4);
    }
}

TEST_CASE("forward and backward are bitwise deterministic") {
    const std::size_t dims[] = {5, 8, 3};
    const MLP net = init_mlp(dims, 10);
    Rng rng(10);
    const Matrix x = oracle::random_matrix(rng, 4, 5), seed = oracle::random_matrix(rng, 4, 3);
    CHECK(forward(net, x) == forward(net, x));
    CHECK(flatten(backward(net, x, seed)) == flatten(backward(net, x, seed)));
}

TEST_CASE("adam examples") {
    MLP w{{DenseLayer{Matrix(1, 1, 0.0), {0.0}, Activation::identity}}};
    Gradients g = Gradients::zeros_like(w);
    auto zero_state = AdamState::for_network(w);
    const MLP before = w;
    adam_step(w, g, zero_state);
    CHECK(w == before);
    CHECK(zero_state.step_count == 1);

    g.layers[0].weights(0, 0) = 1.0;
    for (auto dir : {Direction::descend, Direction::ascend}) {
        MLP p = before;
        auto st = AdamState::for_network(p, 1e-3, 0.9, 0.999, 1e-8);
        adam_step(p, g, st, dir);
        const double expected = 1e-3 * 1.0 / (1.0 + 1e-8);
        CHECK(p.layers[0].weights(0, 0) == doctest::Approx(dir == Direction::descend ? -expected : expected).epsilon(1e-12));
        CHECK(p.layers[0].bias[0] == 0.0);
    }
}

TEST_CASE("adam descend then ascend from reset state returns to the start") {
    const std::size_t dims[] = {3, 4, 1};
    MLP net = init_mlp(dims, 11);
    const MLP start = net;
    Rng rng(11);
    const Matrix x = oracle::random_matrix(rng, 5, 3);
    const auto g = backward(net, x, oracle::random_matrix(rng, 5, 1));
    auto s1 = AdamState::for_network(net);
    adam_step(net, g, s1, Direction::descend);
    auto s2 = AdamState::for_network(net);
    adam_step(net, g, s2, Direction::ascend);
    const auto a = flatten(net), b = flatten(start);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12);
}

TEST_CASE("adam rejects mismatched shapes") {
    const std::size_t d1[] = {3, 2}, d2[] = {2, 2};
    MLP net = init_mlp(d1, 1);
    auto st = AdamState::for_network(net);
    const MLP other = init_mlp(d2, 1);
    CHECK_THROWS_AS(adam_step(net, Gradients::zeros_like(other), st), ShapeError);
}

TEST_CASE("init_mlp shapes, scale and determinism") {
    const std::size_t dims[] = {3, 5, 1};
    const MLP a = init_mlp(dims, 42), b = init_mlp(dims, 42);
    CHECK(a == b);
    REQUIRE(a.layers.size() == 2);
    CHECK(a.layers[0].weights.rows() == 3);
    CHECK(a.layers[0].weights.cols() == 5);
    CHECK(a.layers[1].weights.rows() == 5);
    CHECK(a.layers[1].weights.cols() == 1);
    CHECK(a.layers[0].activation == Activation::leaky_relu);
    CHECK(a.layers[1].activation == Activation::identity);
    for (double v : a.layers[0].weights.data()) CHECK(std::abs(v) <= 1.0 / std::sqrt(3.0));
    for (double v : a.layers[0].bias) CHECK(v == 0.0);
    for (std::uint64_t s = 0; s < 20; ++s) CHECK(init_mlp(dims, s) != init_mlp(dims, s + 1000));
    CHECK_THROWS_AS(init_mlp(std::span<const std::size_t>{}, 1), ArgumentError);
}

}

#include <doctest.h>

#include "cfair/errors.hpp"
#include "cfair/metrics.hpp"
#include "oracles.hpp"

using namespace cfair;

TEST_SUITE("fairness_metrics") {

TEST_CASE("regression metrics examples") {
    const std::vector<double> y{1.0, -1.0, 3.0};
    const auto perfect = regression_metrics(y, y);
    CHECK(perfect.rmse == 0.0);
    CHECK(perfect.mae == 0.0);
    CHECK(perfect.r2 == 1.0);
    const std::vector<double> mean(3, 1.0);
    CHECK(regression_metrics(mean, y).r2 == doctest::Approx(0.0).epsilon(1e-15));
    const auto m = regression_metrics(std::vector<double>{0, 0}, std::vector<double>{1, -1});
    CHECK(m.rmse == 1.0);
    CHECK(m.mae == 1.0);
    CHECK(m.r2 == 0.0);
    CHECK(regression_metrics(std::vector<double>{2, 2}, std::vector<double>{2, 2}).r2 == 0.0);
    CHECK_THROWS_AS(regression_metrics(std::vector<double>{}, std::vector<double>{}), ArgumentError);
}

TEST_CASE("classification metrics examples") {
    const std::vector<double> y{1, 1, 0, 0};
    const auto all = classification_metrics(y, y);
    CHECK(all.precision == 1.0);
    CHECK(all.recall == 1.0);
    CHECK(all.f1 == 1.0);
    CHECK(all.balanced_acc == 1.0);
    const auto m = classification_metrics(std::vector<double>{1, 0, 0, 0}, y);
    CHECK(m.balanced_acc == 0.75);
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 0.5);
    CHECK(m.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    const auto z = classification_metrics(std::vector<double>{0, 0, 0, 0}, y);
    CHECK(z.recall == 0.0);
    CHECK(z.precision == 0.0);
    CHECK(z.f1 == 0.0);
    CHECK(z.balanced_acc == 0.5);
    CHECK_THROWS_AS(classification_metrics(std::vector<double>{}, std::vector<double>{}), ArgumentError);
}

TEST_CASE("f1 identity and random-predictor balanced accuracy") {
    Rng rng(1);
    std::vector<double> p(10000), y(10000);
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = double(i % 2);
        p[i] = double(rng.below(2));
    }
    const auto m = classification_metrics(p, y);
    CHECK(std::abs(m.balanced_acc - 0.5) <= 0.05);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> a(20), b(20);
        for (std::size_t i = 0; i < 20; ++i) {
            a[i] = double(rng.below(2));
            b[i] = double(rng.below(2));
        }
        const auto c = classification_metrics(a, b);
        const auto& k = c.counts;
        const double denom = double(2 * k.tp + k.fp + k.fn);
        CHECK(c.f1 == doctest::Approx(denom > 0 ? 2.0 * double(k.tp) / denom : 0.0).epsilon(1e-15));
        CHECK(k.tp + k.fp + k.tn + k.fn == 20);
    }
}

TEST_CASE("wasserstein examples") {
    const std::vector<double> a{1, 2, 3};
    CHECK(wasserstein_1d(a, a) == 0.0);
    CHECK(wasserstein_1d(std::vector<double>{0}, std::vector<double>{3}) == 3.0);
    CHECK(wasserstein_1d(std::vector<double>{0, 1}, std::vector<double>{1, 2}) == 1.0);
    CHECK(wasserstein_1d(std::vector<double>{0, 1}, std::vector<double>{0}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(wasserstein_1d(std::vector<double>{}, a), ArgumentError);
}

TEST_CASE("wasserstein matches brute-force assignment and is a metric") {
    Rng rng(2);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + rng.below(8);
        std::vector<double> a(n), b(n), c(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = rng.normal();
            b[i] = rng.normal() + 0.5;
            c[i] = 2 * rng.normal();
        }
        const double w = wasserstein_1d(a, b);
        CHECK(std::abs(w - oracle::brute_force_w1(a, b)) <= 1e-9);
        CHECK(w == doctest::Approx(wasserstein_1d(b, a)).epsilon(1e-14));
        CHECK(wasserstein_1d(a, c) <= wasserstein_1d(a, b) + wasserstein_1d(b, c) + 1e-9);
        auto shuffled = a;
        std::reverse(shuffled.begin(), shuffled.end());
        CHECK(wasserstein_1d(a, shuffled) == 0.0);
    }
}

TEST_CASE("mmd examples and properties") {
    const std::vector<double> a{0.5, -1.0, 2.0, 2.0};
    CHECK(std::abs(gaussian_mmd(a, a)) <= 1e-12);
    CHECK(gaussian_mmd(std::vector<double>{0}, std::vector<double>{1}, 1.0) ==
          doctest::Approx(2 - 2 * std::exp(-0.5)).epsilon(1e-15));
    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> x(1 + rng.below(12)), y(1 + rng.below(12));
        for (double& v : x) v = rng.normal();
        for (double& v : y) v = rng.normal() * 1.5 + 0.3;
        const double m = gaussian_mmd(x, y);
        CHECK(m >= 0.0);
        CHECK(m == doctest::Approx(gaussian_mmd(y, x)).epsilon(1e-12));
        const double sigma = median_heuristic_bandwidth(x, y);
        CHECK(std::abs(m - oracle::direct_mmd(x, y, sigma)) <= 1e-12);
    }
    CHECK(median_heuristic_bandwidth(std::vector<double>{1}, std::vector<double>{1}) == 1.0);
    CHECK_THROWS_AS(gaussian_mmd(std::vector<double>{}, a), ArgumentError);
}

TEST_CASE("median heuristic uses all pairwise distances of the union") {
    // union {0, 1, 3}: distances 1, 3, 2 -> median 2
    CHECK(median_heuristic_bandwidth(std::vector<double>{0, 1}, std::vector<double>{3}) == 2.0);
    // union {0, 1, 3, 7}: distances 1,3,7,2,6,4 -> (3 + 4) / 2
    CHECK(median_heuristic_bandwidth(std::vector<double>{0, 1}, std::vector<double>{3, 7}) == 3.5);
}

TEST_CASE("generalized entropy examples") {
    const std::vector<double> ones(5, 1.0);
    for (double alpha : {0.0, 0.5, 1.0, 2.0, 3.0}) CHECK(generalized_entropy(ones, alpha) == 0.0);
    const std::vector<double> b{2, 0};
    CHECK(generalized_entropy(b, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(generalized_entropy(b, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(generalized_entropy(b, 0.0), ArgumentError);
    CHECK_THROWS_AS(generalized_entropy(std::vector<double>{0, 0}, 2.0), ArgumentError);
    // from predictions: one false positive, one false negative
    CHECK(generalized_entropy(std::vector<double>{1, 0}, std::vector<double>{0, 1}, 1.0) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("generalized entropy oracle, scale invariance and nonnegativity") {
    Rng rng(4);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> b(1 + rng.below(20));
        for (double& v : b) v = rng.uniform(0.05, 3.0);
        for (double alpha : {0.0, 0.5, 1.0, 2.0, 3.0}) {
            const double ge = generalized_entropy(b, alpha);
            CHECK(std::abs(ge - oracle::ge_formula(b, alpha)) <= 1e-12);
            CHECK(ge >= -1e-15);
        }
        const double c = rng.uniform(0.1, 10.0);
        auto scaled = b;
        for (double& v : scaled) v *= c;
        for (double alpha : {1.0, 2.0})
            CHECK(std::abs(generalized_entropy(scaled, alpha) - generalized_entropy(b, alpha)) <= 1e-12);
    }
}

TEST_CASE("regression benefits are clipped at zero and counted") {
    std::size_t clipped = 0;
    const auto b = benefits(std::vector<double>{0.0, 3.0, -4.0}, std::vector<double>{0.0, 1.0, 0.0}, &clipped);
    CHECK(b == std::vector<double>{1.0, 3.0, 0.0});
    CHECK(clipped == 1);
}

TEST_CASE("group fairness aggregation") {
    GroupedPredictions same{{1, 2, 1, 2, 1, 2}, {0, 0, 1, 1, 2, 2}, 3};
    const auto g = group_fairness(same);
    CHECK(g.wasserstein == 0.0);
    CHECK(std::abs(g.mmd) <= 1e-12);
    CHECK(g.pairs == 3);
    GroupedPredictions two{{0, 3}, {0, 1}, 2};
    CHECK(group_fairness(two).wasserstein == 3.0);
    GroupedPredictions gap{{0, 3, 5}, {0, 2, 2}, 3};  // group 1 empty -> one pair
    const auto gg = group_fairness(gap);
    CHECK(gg.pairs == 1);
    CHECK(gg.wasserstein == 4.0);
    GroupedPredictions lonely{{1, 2}, {0, 0}, 2};
    CHECK_THROWS_AS(group_fairness(lonely), ArgumentError);
}

TEST_CASE("score picks task-appropriate fields and averages attributes") {
    ProcessedDataset d;
    d.task = Task::regression;
    d.y = {0, 0, 0, 0};
    d.s_labels = {{0, 0, 1, 1}, {0, 1, 0, 1}};
    d.sensitive = {{"a", {"p", "q"}}, {"b", {"u", "v"}}};
    const std::vector<double> pred{0, 0, 4, 4};
    const auto r = score(pred, d);
    REQUIRE(r.regression);
    CHECK(!r.classification);
    CHECK(!r.cv);
    // attribute a: W1 = 4; attribute b: identical groups -> 0.
    CHECK(*r.wasserstein == 2.0);
    CHECK(r.values().front().first == "rmse");

    d.task = Task::classification;
    d.y = {1, 0, 1, 0};
    const std::vector<double> logits{2.0, -1.0, -0.5, 0.0};
    const auto c = score(logits, d, ScoreOptions{true});
    REQUIRE(c.classification);
    CHECK(!c.wasserstein);
    // predictions 1,0,0,1 -> b = 1,1,0,2 -> GE(2) = ((1+1+0+4)/4 - 1) / 2
    CHECK(*c.cv == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(*c.cv_sqrt == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(c.classification->balanced_acc == 0.5);
}

}

#include "cfair/baselines.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "cfair/errors.hpp"
#include "cfair/loss.hpp"

namespace cfair {

RepresentationKind parse_representation(std::string_view name) {
    if (name == "full") return RepresentationKind::full;
    if (name == "unaware") return RepresentationKind::unaware;
    if (name == "ae") return RepresentationKind::ae;
    if (name == "invenc") return RepresentationKind::invenc;
    throw ArgumentError("unknown representation '" + std::string(name) + "'");
}

std::string_view to_string(RepresentationKind kind) {
    switch (kind) {
        case RepresentationKind::full: return "full";
        case RepresentationKind::unaware: return "unaware";
        case RepresentationKind::ae: return "ae";
        case RepresentationKind::invenc: return "invenc";
    }
    return "?";
}

Matrix build_representation(RepresentationKind kind, const ProcessedDataset& data, const ThreePlayerModel* trained,
                            const Autoencoder* ae) {
    switch (kind) {
        case RepresentationKind::full: return hconcat(data.X, data.s_onehot);
        case RepresentationKind::unaware: return data.X;
        case RepresentationKind::ae:
            if (!ae) throw ArgumentError("ae representation needs a pretrained feature autoencoder");
            return forward(ae->encoder, hconcat(data.X, data.s_onehot));
        case RepresentationKind::invenc:
            if (!trained) throw ArgumentError("invenc representation needs a trained three-player model");
            return encode(*trained, data.X);
    }
    throw ArgumentError("unknown representation kind");
}

Autoencoder fit_feature_autoencoder(const ProcessedDataset& train, std::size_t latent, std::size_t epochs,
                                    std::uint64_t seed) {
    const Matrix input = hconcat(train.X, train.s_onehot);
    AutoencoderOptions opt;
    opt.hidden = 32;
    opt.epochs = epochs;
    opt.seed = seed;
    return train_autoencoder(input, input, latent, opt);
}

LinearModel fit_linear(const Matrix& features, std::span<const double> y, Link link, const LinearOptions& options) {
    const std::size_t n = features.rows();
    const std::size_t d = features.cols();
    if (n < 2) throw ArgumentError("fit_linear: need at least 2 rows");
    if (y.size() != n) throw ShapeError("fit_linear: target length differs from rows");

    LinearModel m;
    m.link = link;
    m.weights.assign(d, 0.0);
    if (link == Link::identity) {
        // Normal equations over the augmented design [F | 1].
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(Eigen::Index(d + 1), Eigen::Index(d + 1));
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(Eigen::Index(d + 1));
        std::vector<double> row(d + 1, 1.0);
        for (std::size_t r = 0; r < n; ++r) {
            std::copy(features.row(r).begin(), features.row(r).end(), row.begin());
            for (std::size_t i = 0; i <= d; ++i) {
                rhs[Eigen::Index(i)] += row[i] * y[r];
                for (std::size_t j = 0; j <= i; ++j) A(Eigen::Index(i), Eigen::Index(j)) += row[i] * row[j];
            }
        }
        for (std::size_t i = 0; i <= d; ++i) {
            for (std::size_t j = 0; j < i; ++j) A(Eigen::Index(j), Eigen::Index(i)) = A(Eigen::Index(i), Eigen::Index(j));
            A(Eigen::Index(i), Eigen::Index(i)) += options.ridge;
        }
        Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
        const auto& D = ldlt.vectorD();
        const double pivot_floor = 1e-13 * std::max(1.0, D.cwiseAbs().maxCoeff());
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || D.minCoeff() <= pivot_floor)
            throw NumericError("fit_linear: normal equations are singular");
        const Eigen::VectorXd w = ldlt.solve(rhs);
        if (!w.allFinite()) throw NumericError("fit_linear: normal equations are singular");
        for (std::size_t i = 0; i < d; ++i) m.weights[i] = w[Eigen::Index(i)];
        m.bias = w[Eigen::Index(d)];
        return m;
    }

    for (double t : y)
        if (t != 0.0 && t != 1.0) throw ArgumentError("fit_linear: logistic targets must be 0 or 1");
    std::vector<double> gw(d);
    for (std::size_t it = 0; it < options.iterations; ++it) {
        std::fill(gw.begin(), gw.end(), 0.0);
        double gb = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const auto x = features.row(r);
            const double z = std::inner_product(x.begin(), x.end(), m.weights.begin(), m.bias);
            const double e = sigmoid(z) - y[r];
            for (std::size_t j = 0; j < d; ++j) gw[j] += e * x[j];
            gb += e;
        }
        const double step = options.learning_rate / double(n);
        for (std::size_t j = 0; j < d; ++j) m.weights[j] -= step * gw[j];
        m.bias -= step * gb;
    }
    return m;
}

namespace {

// Column-sorted row orders, computed once per fit.
std::vector<std::vector<std::size_t>> sorted_orders(const Matrix& features) {
    std::vector<std::vector<std::size_t>> orders(features.cols());
    for (std::size_t c = 0; c < features.cols(); ++c) {
        auto& o = orders[c];
        o.resize(features.rows());
        std::iota(o.begin(), o.end(), std::size_t{0});
        std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) { return features(a, c) < features(b, c); });
    }
    return orders;
}

Stump best_stump(const Matrix& features, std::span<const double> targets,
                 const std::vector<std::vector<std::size_t>>& orders) {
    const std::size_t n = features.rows();
    const double total = std::accumulate(targets.begin(), targets.end(), 0.0);
    Stump best;
    best.left = best.right = total / double(n);
    best.threshold = n > 0 ? features(0, 0) : 0.0;
    // Minimizing SSE is maximizing sum_l^2/n_l + sum_r^2/n_r.
    double best_gain = total * total / double(n);
    for (std::size_t c = 0; c < features.cols(); ++c) {
        const auto& o = orders[c];
        double left_sum = 0.0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            left_sum += targets[o[k]];
            const double xl = features(o[k], c);
            const double xr = features(o[k + 1], c);
            if (!(xl < xr)) continue;
            const double nl = double(k + 1), nr = double(n - k - 1);
            const double right_sum = total - left_sum;
            const double gain = left_sum * left_sum / nl + right_sum * right_sum / nr;
            if (gain > best_gain) {
                best_gain = gain;
                best = Stump{c, 0.5 * (xl + xr), left_sum / nl, right_sum / nr};
            }
        }
    }
    return best;
}

double stump_value(const Stump& s, std::span<const double> x) { return x[s.feature] <= s.threshold ? s.left : s.right; }

}  // namespace

Stump fit_stump(const Matrix& features, std::span<const double> targets) {
    if (features.rows() == 0 || features.cols() == 0) throw ArgumentError("fit_stump: empty features");
    if (targets.size() != features.rows()) throw ShapeError("fit_stump: target length differs from rows");
    return best_stump(features, targets, sorted_orders(features));
}

StumpEnsemble fit_stumps(const Matrix& features, std::span<const double> y, Task task, std::size_t rounds,
                         double learning_rate) {
    if (rounds < 1) throw ArgumentError("fit_stumps: rounds must be >= 1");
    const std::size_t n = features.rows();
    if (n < 2) throw ArgumentError("fit_stumps: need at least 2 rows");
    if (features.cols() == 0) throw ArgumentError("fit_stumps: no features");
    if (y.size() != n) throw ShapeError("fit_stumps: target length differs from rows");

    StumpEnsemble m;
    m.learning_rate = learning_rate;
    const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / double(n);
    if (task == Task::regression) {
        m.base_score = mean_y;
    } else {
        for (double t : y)
            if (t != 0.0 && t != 1.0) throw ArgumentError("fit_stumps: classification targets must be 0 or 1");
        const double p = std::clamp(mean_y, 1e-12, 1.0 - 1e-12);
        m.base_score = std::log(p / (1.0 - p));
    }

    const auto orders = sorted_orders(features);
    std::vector<double> score(n, m.base_score), grad(n);
    for (std::size_t round = 0; round < rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i)
            grad[i] = task == Task::regression ? y[i] - score[i] : y[i] - sigmoid(score[i]);
        const Stump s = best_stump(features, grad, orders);
        for (std::size_t i = 0; i < n; ++i) score[i] += learning_rate * stump_value(s, features.row(i));
        m.stumps.push_back(s);
    }
    return m;
}

std::vector<double> predict(const LinearModel& model, const Matrix& features) {
    if (features.cols() != model.weights.size()) throw ShapeError("predict: feature width differs from model");
    std::vector<double> out(features.rows());
    for (std::size_t r = 0; r < features.rows(); ++r) {
        const auto x = features.row(r);
        out[r] = std::inner_product(x.begin(), x.end(), model.weights.begin(), model.bias);
    }
    return out;
}

std::vector<double> predict(const StumpEnsemble& model, const Matrix& features) {
    for (const auto& s : model.stumps)
        if (s.feature >= features.cols()) throw ShapeError("predict: feature width differs from model");
    std::vector<double> out(features.rows(), model.base_score);
    for (std::size_t r = 0; r < features.rows(); ++r)
        for (const auto& s : model.stumps) out[r] += model.learning_rate * stump_value(s, features.row(r));
    return out;
}

}  // namespace cfair

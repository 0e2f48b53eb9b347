#include "cfair/loss.hpp"

#include <cmath>
#include <string>

#include "cfair/errors.hpp"

namespace cfair {

LossKind parse_loss_kind(std::string_view name) {
    if (name == "smooth_l1") return LossKind::smooth_l1;
    if (name == "binary_cross_entropy" || name == "bce") return LossKind::binary_cross_entropy;
    if (name == "mse") return LossKind::mse;
    throw ArgumentError("unknown loss kind '" + std::string(name) + "'");
}

std::string_view to_string(LossKind kind) {
    switch (kind) {
        case LossKind::smooth_l1: return "smooth_l1";
        case LossKind::binary_cross_entropy: return "binary_cross_entropy";
        case LossKind::mse: return "mse";
    }
    return "?";
}

double sigmoid(double z) noexcept {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

void check(LossKind kind, std::span<const double> prediction, std::span<const double> target) {
    if (prediction.empty()) throw ArgumentError("loss: empty input");
    if (prediction.size() != target.size()) throw ArgumentError("loss: prediction/target lengths differ");
    if (kind == LossKind::binary_cross_entropy)
        for (double t : target)
            if (t != 0.0 && t != 1.0) throw ArgumentError("binary_cross_entropy: targets must be 0 or 1");
}

}  // namespace

double loss(LossKind kind, std::span<const double> prediction, std::span<const double> target) {
    check(kind, prediction, target);
    double sum = 0.0;
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        const double p = prediction[i];
        const double y = target[i];
        switch (kind) {
            case LossKind::smooth_l1: {
                const double d = std::abs(p - y);
                sum += d < 1.0 ? 0.5 * d * d : d - 0.5;
                break;
            }
            case LossKind::binary_cross_entropy:
                sum += std::max(p, 0.0) - p * y + std::log1p(std::exp(-std::abs(p)));
                break;
            case LossKind::mse: {
                const double d = p - y;
                sum += d * d;
                break;
            }
        }
    }
    return sum / double(prediction.size());
}

std::vector<double> loss_grad(LossKind kind, std::span<const double> prediction, std::span<const double> target) {
    check(kind, prediction, target);
    const double inv_n = 1.0 / double(prediction.size());
    std::vector<double> g(prediction.size());
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        const double d = prediction[i] - target[i];
        switch (kind) {
            case LossKind::smooth_l1: g[i] = (std::abs(d) < 1.0 ? d : (d > 0 ? 1.0 : -1.0)) * inv_n; break;
            case LossKind::binary_cross_entropy: g[i] = (sigmoid(prediction[i]) - target[i]) * inv_n; break;
            case LossKind::mse: g[i] = 2.0 * d * inv_n; break;
        }
    }
    return g;
}

}  // namespace cfair

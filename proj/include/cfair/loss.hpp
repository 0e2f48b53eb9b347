#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace cfair {

enum class LossKind { smooth_l1, binary_cross_entropy, mse };

LossKind parse_loss_kind(std::string_view name);
std::string_view to_string(LossKind kind);

/// Mean per-sample loss. For binary_cross_entropy `prediction` holds logits.
double loss(LossKind kind, std::span<const double> prediction, std::span<const double> target);

/// d loss / d prediction for the mean loss above.
std::vector<double> loss_grad(LossKind kind, std::span<const double> prediction, std::span<const double> target);

double sigmoid(double z) noexcept;

}  // namespace cfair

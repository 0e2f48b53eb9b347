#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cfair/dataset.hpp"

namespace cfair {

struct RegressionMetrics {
    double rmse = 0.0;
    double mae = 0.0;
    double r2 = 0.0;
};

struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::size_t total() const noexcept { return tp + fp + tn + fn; }
};

struct ClassificationMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double balanced_acc = 0.0;
    ConfusionCounts counts;
};

RegressionMetrics regression_metrics(std::span<const double> pred, std::span<const double> y);

ConfusionCounts confusion(std::span<const double> pred_binary, std::span<const double> y);
ClassificationMetrics classification_metrics(std::span<const double> pred_binary, std::span<const double> y);

/// Exact W1 between two empirical distributions on the line.
double wasserstein_1d(std::span<const double> a, std::span<const double> b);

/// Median of the pairwise distances over a union b; 1 when that median is 0 or there are no pairs.
double median_heuristic_bandwidth(std::span<const double> a, std::span<const double> b);
/// Biased (V-statistic) squared MMD with k(x, y) = exp(-(x - y)^2 / (2 sigma^2)).
double gaussian_mmd(std::span<const double> a, std::span<const double> b, std::optional<double> bandwidth = {});

/// GE(alpha) over benefits b_i. alpha = 1 is the Theil index, alpha = 2 the CV column.
double generalized_entropy(std::span<const double> benefits, double alpha);
/// Benefits b_i = pred_i - y_i + 1, clipped at 0; `clipped` receives the number of clipped entries.
std::vector<double> benefits(std::span<const double> pred, std::span<const double> y, std::size_t* clipped = nullptr);
double generalized_entropy(std::span<const double> pred, std::span<const double> y, double alpha);

struct GroupedPredictions {
    std::vector<double> predictions;
    std::vector<std::size_t> group_labels;
    std::size_t group_count = 0;
};

struct GroupFairness {
    double wasserstein = 0.0;
    double mmd = 0.0;
    std::size_t pairs = 0;
};

/// Mean W1 and MMD over unordered pairs of non-empty groups.
GroupFairness group_fairness(const GroupedPredictions& groups, std::optional<double> bandwidth = {});

struct MetricReport {
    Task task = Task::regression;
    std::optional<RegressionMetrics> regression;
    std::optional<ClassificationMetrics> classification;
    // regression fairness
    std::optional<double> wasserstein;
    std::optional<double> gaussian_mmd;
    std::size_t clipped_benefits = 0;
    // classification fairness
    std::optional<double> cv;
    std::optional<double> ti;
    std::optional<double> cv_sqrt;

    /// Flat (name, value) list in a fixed order.
    std::vector<std::pair<std::string, double>> values() const;
};

struct ScoreOptions {
    bool cv_sqrt = false;
};

/// Scores raw model outputs against a test split. Classification scores are logits thresholded at 0.
/// Group distances are averaged per sensitive attribute, then across attributes.
MetricReport score(std::span<const double> raw_scores, const ProcessedDataset& test, const ScoreOptions& options = {});

}  // namespace cfair

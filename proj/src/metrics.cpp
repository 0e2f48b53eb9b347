#include "cfair/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cfair/errors.hpp"

namespace cfair {

RegressionMetrics regression_metrics(std::span<const double> pred, std::span<const double> y) {
    if (pred.empty()) throw ArgumentError("regression_metrics: empty input");
    if (pred.size() != y.size()) throw ArgumentError("regression_metrics: length mismatch");
    const double n = double(y.size());
    const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double ss_res = 0.0, ss_tot = 0.0, abs_sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = pred[i] - y[i];
        ss_res += d * d;
        abs_sum += std::abs(d);
        ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
    }
    RegressionMetrics m;
    m.rmse = std::sqrt(ss_res / n);
    m.mae = abs_sum / n;
    if (ss_tot > 0.0) m.r2 = 1.0 - ss_res / ss_tot;
    else m.r2 = ss_res == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return m;
}

ConfusionCounts confusion(std::span<const double> pred_binary, std::span<const double> y) {
    if (pred_binary.empty()) throw ArgumentError("classification_metrics: empty input");
    if (pred_binary.size() != y.size()) throw ArgumentError("classification_metrics: length mismatch");
    ConfusionCounts c;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const bool p = pred_binary[i] != 0.0;
        const bool t = y[i] != 0.0;
        if ((pred_binary[i] != 0.0 && pred_binary[i] != 1.0) || (y[i] != 0.0 && y[i] != 1.0))
            throw ArgumentError("classification_metrics: values must be 0 or 1");
        if (p && t) ++c.tp;
        else if (p) ++c.fp;
        else if (t) ++c.fn;
        else ++c.tn;
    }
    return c;
}

ClassificationMetrics classification_metrics(std::span<const double> pred_binary, std::span<const double> y) {
    ClassificationMetrics m;
    m.counts = confusion(pred_binary, y);
    const auto& c = m.counts;
    const double tp = double(c.tp), fp = double(c.fp), tn = double(c.tn), fn = double(c.fn);
    m.precision = c.tp + c.fp == 0 ? 0.0 : tp / (tp + fp);
    m.recall = c.tp + c.fn == 0 ? 0.0 : tp / (tp + fn);
    m.f1 = m.precision + m.recall == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    const double tnr = c.tn + c.fp == 0 ? 0.0 : tn / (tn + fp);
    m.balanced_acc = 0.5 * (m.recall + tnr);
    return m;
}

double wasserstein_1d(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw ArgumentError("wasserstein_1d: empty input");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    // Integrate |F_a - F_b| between consecutive points of the merged support.
    const double na = double(sa.size()), nb = double(sb.size());
    std::size_t i = 0, j = 0;
    double prev = std::min(sa.front(), sb.front());
    double total = 0.0;
    while (i < sa.size() || j < sb.size()) {
        const double x = j >= sb.size() || (i < sa.size() && sa[i] <= sb[j]) ? sa[i] : sb[j];
        total += std::abs(double(i) / na - double(j) / nb) * (x - prev);
        while (i < sa.size() && sa[i] == x) ++i;
        while (j < sb.size() && sb[j] == x) ++j;
        prev = x;
    }
    return total;
}

double median_heuristic_bandwidth(std::span<const double> a, std::span<const double> b) {
    std::vector<double> pts(a.begin(), a.end());
    pts.insert(pts.end(), b.begin(), b.end());
    if (pts.size() < 2) return 1.0;
    // |x_i - x_j| over i < j; sorted points make the distances x_j - x_i.
    std::sort(pts.begin(), pts.end());
    std::vector<double> d;
    d.reserve(pts.size() * (pts.size() - 1) / 2);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) d.push_back(pts[j] - pts[i]);
    const std::size_t mid = d.size() / 2;
    std::nth_element(d.begin(), d.begin() + std::ptrdiff_t(mid), d.end());
    double med = d[mid];
    if (d.size() % 2 == 0) {
        const double lower = *std::max_element(d.begin(), d.begin() + std::ptrdiff_t(mid));
        med = 0.5 * (med + lower);
    }
    return med > 0.0 ? med : 1.0;
}

namespace {

double mean_kernel(std::span<const double> a, std::span<const double> b, double inv_two_sigma2) {
    double sum = 0.0;
    for (double x : a) {
        double row = 0.0;
        for (double y : b) row += std::exp(-(x - y) * (x - y) * inv_two_sigma2);
        sum += row;
    }
    return sum / (double(a.size()) * double(b.size()));
}

}  // namespace

double gaussian_mmd(std::span<const double> a, std::span<const double> b, std::optional<double> bandwidth) {
    if (a.empty() || b.empty()) throw ArgumentError("gaussian_mmd: empty input");
    const double sigma = bandwidth ? *bandwidth : median_heuristic_bandwidth(a, b);
    if (!(sigma > 0.0)) throw ArgumentError("gaussian_mmd: bandwidth must be > 0");
    const double k = 1.0 / (2.0 * sigma * sigma);
    const double v = mean_kernel(a, a, k) + mean_kernel(b, b, k) - 2.0 * mean_kernel(a, b, k);
    return std::max(v, 0.0);
}

double generalized_entropy(std::span<const double> b, double alpha) {
    if (b.empty()) throw ArgumentError("generalized_entropy: empty input");
    for (double v : b) {
        if (!(v >= 0.0)) throw ArgumentError("generalized_entropy: benefits must be >= 0");
        if (alpha <= 0.0 && v == 0.0) throw ArgumentError("generalized_entropy: zero benefit with alpha <= 0");
    }
    const double n = double(b.size());
    const double mu = std::accumulate(b.begin(), b.end(), 0.0) / n;
    if (!(mu > 0.0)) throw ArgumentError("generalized_entropy: mean benefit is 0");
    double sum = 0.0;
    if (alpha == 1.0) {
        for (double v : b) {
            const double r = v / mu;
            if (r > 0.0) sum += r * std::log(r);
        }
        return sum / n;
    }
    if (alpha == 0.0) {
        for (double v : b) sum -= std::log(v / mu);
        return sum / n;
    }
    for (double v : b) sum += std::pow(v / mu, alpha) - 1.0;
    return sum / (n * alpha * (alpha - 1.0));
}

std::vector<double> benefits(std::span<const double> pred, std::span<const double> y, std::size_t* clipped) {
    if (pred.size() != y.size()) throw ArgumentError("benefits: length mismatch");
    std::vector<double> b(pred.size());
    std::size_t c = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        b[i] = pred[i] - y[i] + 1.0;
        if (b[i] < 0.0) {
            b[i] = 0.0;
            ++c;
        }
    }
    if (clipped) *clipped = c;
    return b;
}

double generalized_entropy(std::span<const double> pred, std::span<const double> y, double alpha) {
    return generalized_entropy(benefits(pred, y), alpha);
}

GroupFairness group_fairness(const GroupedPredictions& groups, std::optional<double> bandwidth) {
    if (groups.predictions.size() != groups.group_labels.size())
        throw ArgumentError("group_fairness: predictions and labels differ in length");
    std::vector<std::vector<double>> members(groups.group_count);
    for (std::size_t i = 0; i < groups.predictions.size(); ++i) {
        if (groups.group_labels[i] >= groups.group_count) throw ArgumentError("group_fairness: label out of range");
        members[groups.group_labels[i]].push_back(groups.predictions[i]);
    }
    GroupFairness out;
    for (std::size_t g = 0; g < members.size(); ++g) {
        for (std::size_t h = g + 1; h < members.size(); ++h) {
            if (members[g].empty() || members[h].empty()) continue;
            out.wasserstein += wasserstein_1d(members[g], members[h]);
            out.mmd += gaussian_mmd(members[g], members[h], bandwidth);
            ++out.pairs;
        }
    }
    if (out.pairs == 0) throw ArgumentError("group_fairness: need at least two non-empty groups");
    out.wasserstein /= double(out.pairs);
    out.mmd /= double(out.pairs);
    return out;
}

std::vector<std::pair<std::string, double>> MetricReport::values() const {
    std::vector<std::pair<std::string, double>> v;
    if (regression) {
        v.emplace_back("rmse", regression->rmse);
        v.emplace_back("mae", regression->mae);
        v.emplace_back("r2", regression->r2);
    }
    if (classification) {
        v.emplace_back("balanced_acc", classification->balanced_acc);
        v.emplace_back("f1", classification->f1);
        v.emplace_back("precision", classification->precision);
        v.emplace_back("recall", classification->recall);
    }
    if (wasserstein) v.emplace_back("wasserstein", *wasserstein);
    if (gaussian_mmd) v.emplace_back("gaussian_mmd", *gaussian_mmd);
    if (cv) v.emplace_back("cv", *cv);
    if (cv_sqrt) v.emplace_back("cv_sqrt", *cv_sqrt);
    if (ti) v.emplace_back("ti", *ti);
    return v;
}

MetricReport score(std::span<const double> raw_scores, const ProcessedDataset& test, const ScoreOptions& options) {
    if (raw_scores.size() != test.rows()) throw ArgumentError("score: prediction count differs from test rows");
    MetricReport r;
    r.task = test.task;
    if (test.task == Task::regression) {
        r.regression = regression_metrics(raw_scores, test.y);
        double w = 0.0, m = 0.0;
        for (std::size_t a = 0; a < test.sensitive.size(); ++a) {
            GroupedPredictions g{std::vector<double>(raw_scores.begin(), raw_scores.end()), test.s_labels[a],
                                 test.sensitive[a].categories.size()};
            const auto gf = group_fairness(g);
            w += gf.wasserstein;
            m += gf.mmd;
        }
        r.wasserstein = w / double(test.sensitive.size());
        r.gaussian_mmd = m / double(test.sensitive.size());
        benefits(raw_scores, test.y, &r.clipped_benefits);
    } else {
        std::vector<double> labels(raw_scores.size());
        for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = raw_scores[i] >= 0.0 ? 1.0 : 0.0;
        r.classification = classification_metrics(labels, test.y);
        const auto b = benefits(labels, test.y);
        r.cv = generalized_entropy(b, 2.0);
        r.ti = generalized_entropy(b, 1.0);
        if (options.cv_sqrt) r.cv_sqrt = std::sqrt(2.0 * *r.cv);
    }
    return r;
}

}  // namespace cfair

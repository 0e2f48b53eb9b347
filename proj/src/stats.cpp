#include "cfair/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cfair/errors.hpp"

namespace cfair {

namespace {

// Continued fraction for I_x(a,b) (modified Lentz); converges quickly for x < (a+1)/(a+b+2).
double beta_continued_fraction(double x, double a, double b) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    throw NumericError("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw ArgumentError("incomplete_beta: a and b must be > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw ArgumentError("incomplete_beta: x must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(x, a, b) / a;
    return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double student_t_two_sided(double t, double dof) {
    if (!(dof > 0.0)) throw ArgumentError("student_t_two_sided: dof must be > 0");
    if (std::isinf(t)) return 0.0;
    return incomplete_beta(dof / (dof + t * t), 0.5 * dof, 0.5);
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ArgumentError("paired_t_test: samples differ in length");
    const std::size_t n = a.size();
    if (n < 2) throw ArgumentError("paired_t_test: need at least 2 pairs");
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
    const auto mv = mean_variance(d);
    TTestResult r;
    r.degrees_of_freedom = n - 1;
    const double sd = std::sqrt(mv.variance);
    if (sd == 0.0) {
        if (mv.mean == 0.0) {
            r.t_statistic = 0.0;
            r.p_value = 1.0;
        } else {
            r.t_statistic = std::copysign(std::numeric_limits<double>::infinity(), mv.mean);
            r.p_value = 0.0;
        }
        return r;
    }
    r.t_statistic = mv.mean * std::sqrt(double(n)) / sd;
    r.p_value = std::clamp(student_t_two_sided(r.t_statistic, double(n - 1)), 0.0, 1.0);
    return r;
}

MeanVariance mean_variance(std::span<const double> values) {
    MeanVariance mv;
    if (values.empty()) return mv;
    double sum = 0.0;
    for (double v : values) sum += v;
    mv.mean = sum / double(values.size());
    if (values.size() < 2) return mv;
    double ss = 0.0;
    for (double v : values) ss += (v - mv.mean) * (v - mv.mean);
    mv.variance = ss / double(values.size() - 1);
    return mv;
}

}  // namespace cfair

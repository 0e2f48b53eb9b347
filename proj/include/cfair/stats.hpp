#pragma once

#include <span>

namespace cfair {

/// Regularized incomplete beta I_x(a, b) for a, b > 0, x in [0, 1].
double incomplete_beta(double x, double a, double b);

/// Two-sided tail probability P(|T| >= |t|) of Student's t with `dof` degrees of freedom.
double student_t_two_sided(double t, double dof);

struct TTestResult {
    double t_statistic = 0.0;
    std::size_t degrees_of_freedom = 0;
    double p_value = 1.0;
};

/// Paired t-test on a - b. Zero spread gives (0, 1) for zero mean and (+-inf, 0) otherwise.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

struct MeanVariance {
    double mean = 0.0;
    double variance = 0.0;  // sample variance, 0 for a single value
};

MeanVariance mean_variance(std::span<const double> values);

}  // namespace cfair

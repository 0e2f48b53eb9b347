#pragma once

#include <functional>

#include "cfair/config.hpp"
#include "cfair/metrics.hpp"
#include "cfair/stats.hpp"

namespace cfair {

struct RunResult {
    std::string method;
    std::size_t repeat = 0;
    std::uint64_t seed = 0;  // split seed, shared by every method of a repeat
    std::optional<MetricReport> metrics;
    double seconds = 0.0;
    bool failed = false;
    std::string error;
};

struct MetricSummary {
    double mean = 0.0;
    double variance = 0.0;
    double stddev = 0.0;
    std::size_t n = 0;
};

struct MethodSummary {
    std::string method;
    std::size_t runs = 0;
    std::size_t failed = 0;
    std::vector<std::pair<std::string, MetricSummary>> metrics;
};

struct PairedTest {
    std::string method;
    std::string metric;
    std::size_t n = 0;
    TTestResult result;
};

struct AggregateReport {
    std::string dataset;
    Task task = Task::regression;
    std::string adversary_mode;
    std::size_t repeats = 0;
    std::string reference;  // empty when no t-tests were run
    std::vector<MethodSummary> methods;
    std::vector<PairedTest> t_tests;
};

struct SweepReport {
    std::string dataset;
    std::vector<std::pair<double, AggregateReport>> points;
};

using ProgressFn = std::function<void(const RunResult&)>;

/// Runs every method of every repeat on `raw`; repeat r uses split seed base_seed + r for all methods.
std::vector<RunResult> run_repeats(const RawTable& raw, const ExperimentConfig& cfg, const ProgressFn& progress = {});

/// All methods, repeat index `repeat`.
std::vector<RunResult> run_repeat(const RawTable& raw, const ExperimentConfig& cfg, std::size_t repeat);

AggregateReport aggregate(const std::vector<RunResult>& runs, const ExperimentConfig& cfg);

AggregateReport run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress = {});
AggregateReport run_experiment(const RawTable& raw, const ExperimentConfig& cfg, const ProgressFn& progress = {});

/// invfair only, one aggregate per lambda; splits are shared across lambdas.
SweepReport lambda_sweep(const ExperimentConfig& cfg, std::span<const double> lambdas, const ProgressFn& progress = {});
SweepReport lambda_sweep(const RawTable& raw, const ExperimentConfig& cfg, std::span<const double> lambdas,
                         const ProgressFn& progress = {});

}  // namespace cfair

#pragma once

#include <filesystem>
#include <string>

#include "cfair/config.hpp"
#include "cfair/experiment.hpp"

namespace cfair {

/// CSV: `method,metric,mean,variance,n`, one row per (method, metric); methods with failed runs add a
/// `failed_runs` row (mean = failed count, n = attempted runs).
/// JSON: methods -> metrics -> {mean, variance, std, n}, plus `t_tests`.
std::string format_report(const AggregateReport& report, ReportFormat format);
void emit_report(const AggregateReport& report, ReportFormat format, const std::filesystem::path& path);

/// Long format `lambda,metric,mean,variance,n` (CSV) or a list of {lambda, report} objects (JSON).
std::string format_sweep(const SweepReport& sweep, ReportFormat format);
void emit_sweep(const SweepReport& sweep, ReportFormat format, const std::filesystem::path& path);

/// Inverse of format_report(.., json).
AggregateReport parse_report_json(std::string_view text);

std::string format_real(double v);

}  // namespace cfair

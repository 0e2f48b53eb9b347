#include "cfair/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cfair/errors.hpp"

namespace cfair {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json real_json(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double json_real(const ordered_json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
    throw ParseError("report: bad real '" + s + "'", 0);
}

void check_nonempty(const AggregateReport& report) {
    if (report.methods.empty()) throw ArgumentError("report has no methods");
}

ordered_json report_json(const AggregateReport& report) {
    ordered_json j;
    j["dataset"] = report.dataset;
    j["task"] = std::string(to_string(report.task));
    j["adversary_mode"] = report.adversary_mode;
    j["repeats"] = report.repeats;
    j["reference"] = report.reference;
    ordered_json methods = ordered_json::object();
    for (const auto& m : report.methods) {
        ordered_json mj;
        mj["runs"] = m.runs;
        mj["failed"] = m.failed;
        ordered_json metrics = ordered_json::object();
        for (const auto& [name, s] : m.metrics)
            metrics[name] = {{"mean", real_json(s.mean)},
                             {"variance", real_json(s.variance)},
                             {"std", real_json(s.stddev)},
                             {"n", s.n}};
        mj["metrics"] = std::move(metrics);
        methods[m.method] = std::move(mj);
    }
    j["methods"] = std::move(methods);
    ordered_json tests = ordered_json::array();
    for (const auto& t : report.t_tests)
        tests.push_back({{"method", t.method},
                         {"reference", report.reference},
                         {"metric", t.metric},
                         {"n", t.n},
                         {"t_statistic", real_json(t.result.t_statistic)},
                         {"degrees_of_freedom", t.result.degrees_of_freedom},
                         {"p_value", real_json(t.result.p_value)}});
    j["t_tests"] = std::move(tests);
    return j;
}

void write_file(const std::string& text, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write report '" + path.string() + "'");
    f << text;
    if (!f) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_report(const AggregateReport& report, ReportFormat format) {
    check_nonempty(report);
    if (format == ReportFormat::json) return report_json(report).dump(2) + "\n";
    std::ostringstream out;
    out << "method,metric,mean,variance,n\n";
    for (const auto& m : report.methods) {
        for (const auto& [name, s] : m.metrics)
            out << m.method << ',' << name << ',' << format_real(s.mean) << ',' << format_real(s.variance) << ','
                << s.n << '\n';
        if (m.failed > 0) out << m.method << ",failed_runs," << m.failed << ",0," << m.runs << '\n';
    }
    return out.str();
}

void emit_report(const AggregateReport& report, ReportFormat format, const std::filesystem::path& path) {
    write_file(format_report(report, format), path);
}

std::string format_sweep(const SweepReport& sweep, ReportFormat format) {
    if (sweep.points.empty()) throw ArgumentError("sweep report is empty");
    if (format == ReportFormat::json) {
        ordered_json j;
        j["dataset"] = sweep.dataset;
        ordered_json pts = ordered_json::array();
        for (const auto& [lam, rep] : sweep.points) pts.push_back({{"lambda", lam}, {"report", report_json(rep)}});
        j["points"] = std::move(pts);
        return j.dump(2) + "\n";
    }
    std::ostringstream out;
    out << "lambda,metric,mean,variance,n\n";
    for (const auto& [lam, rep] : sweep.points) {
        check_nonempty(rep);
        for (const auto& m : rep.methods) {
            for (const auto& [name, s] : m.metrics)
                out << format_real(lam) << ',' << name << ',' << format_real(s.mean) << ',' << format_real(s.variance)
                    << ',' << s.n << '\n';
            if (m.failed > 0) out << format_real(lam) << ",failed_runs," << m.failed << ",0," << m.runs << '\n';
        }
    }
    return out.str();
}

void emit_sweep(const SweepReport& sweep, ReportFormat format, const std::filesystem::path& path) {
    write_file(format_sweep(sweep, format), path);
}

AggregateReport parse_report_json(std::string_view text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("report: ") + e.what(), 0);
    }
    AggregateReport r;
    r.dataset = j.at("dataset").get<std::string>();
    r.task = parse_task(j.at("task").get<std::string>());
    r.adversary_mode = j.at("adversary_mode").get<std::string>();
    r.repeats = j.at("repeats").get<std::size_t>();
    r.reference = j.at("reference").get<std::string>();
    for (const auto& [name, mj] : j.at("methods").items()) {
        MethodSummary m;
        m.method = name;
        m.runs = mj.at("runs").get<std::size_t>();
        m.failed = mj.at("failed").get<std::size_t>();
        for (const auto& [metric, sj] : mj.at("metrics").items())
            m.metrics.emplace_back(metric, MetricSummary{json_real(sj.at("mean")), json_real(sj.at("variance")),
                                                         json_real(sj.at("std")), sj.at("n").get<std::size_t>()});
        r.methods.push_back(std::move(m));
    }
    for (const auto& tj : j.at("t_tests"))
        r.t_tests.push_back(PairedTest{tj.at("method").get<std::string>(), tj.at("metric").get<std::string>(),
                                       tj.at("n").get<std::size_t>(),
                                       TTestResult{json_real(tj.at("t_statistic")),
                                                   tj.at("degrees_of_freedom").get<std::size_t>(),
                                                   json_real(tj.at("p_value"))}});
    return r;
}

}  // namespace cfair

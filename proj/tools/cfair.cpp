// cfair: repeated-run experiments, lambda sweeps and scoring of external predictions.
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>

#include "cfair/errors.hpp"
#include "cfair/experiment.hpp"
#include "cfair/report.hpp"

using namespace cfair;

namespace {

struct CommonArgs {
    std::string config;
    std::string dataset;
    std::string data_path;
    std::string methods;
    std::optional<std::size_t> repeats;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::optional<std::size_t> epochs;
    std::string lambdas;
    std::string out;
    std::string format;
    std::string history_dir;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--config", a.config, "key = value experiment config");
    cmd->add_option("--dataset", a.dataset, "preset dataset name (law, compas, adult)");
    cmd->add_option("--data", a.data_path, "dataset CSV path (overrides the config)");
    cmd->add_option("--method", a.methods, "comma-separated method list");
    cmd->add_option("--repeats", a.repeats, "number of repeated splits");
    cmd->add_option("--seed", a.seed, "base seed; repeat r uses base + r");
    cmd->add_option("--workers", a.workers, "worker threads (0 = hardware concurrency)");
    cmd->add_option("--epochs", a.epochs, "minimax training epochs");
    cmd->add_option("--lambda", a.lambdas, "lambda (run) or comma-separated lambda list (sweep)");
    cmd->add_option("--out", a.out, "report path (default: stdout)");
    cmd->add_option("--format", a.format, "csv or json");
    cmd->add_option("--history-dir", a.history_dir, "write per-run training histories here");
    cmd->add_flag("--quiet", a.quiet, "no progress output");
}

ExperimentConfig resolve(const CommonArgs& a) {
    ExperimentConfig cfg;
    if (!a.config.empty()) {
        cfg = load_config(a.config);
        if (!a.dataset.empty() && a.dataset != cfg.dataset.name)
            throw ConfigError("--dataset '" + a.dataset + "' conflicts with config dataset '" + cfg.dataset.name + "'");
    } else if (!a.dataset.empty()) {
        cfg = default_config(a.dataset);
    } else {
        throw ConfigError("one of --config or --dataset is required");
    }
    if (!a.data_path.empty()) cfg.dataset_path = a.data_path;
    if (!a.methods.empty()) cfg.methods = split_list(a.methods);
    if (a.repeats) cfg.repeats = *a.repeats;
    if (a.seed) cfg.base_seed = *a.seed;
    if (a.workers) cfg.workers = *a.workers;
    if (a.epochs) cfg.train.epochs = *a.epochs;
    if (!a.out.empty()) cfg.out_path = a.out;
    if (!a.format.empty()) cfg.format = parse_report_format(a.format);
    if (!a.history_dir.empty()) cfg.history_dir = a.history_dir;
    return cfg;
}

ProgressFn progress_printer(bool quiet) {
    if (quiet) return {};
    return [](const RunResult& r) {
        std::fprintf(stderr, "repeat %zu seed %llu %-15s %s %.2fs\n", r.repeat, static_cast<unsigned long long>(r.seed),
                     r.method.c_str(), r.failed ? ("FAILED: " + r.error).c_str() : "ok", r.seconds);
    };
}

void write_output(const std::string& text, const std::filesystem::path& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write '" + path.string() + "'");
    f << text;
}

int cmd_run(const CommonArgs& a) {
    ExperimentConfig cfg = resolve(a);
    if (!a.lambdas.empty()) {
        const auto l = parse_real_list(a.lambdas);
        if (l.size() != 1) throw ConfigError("run takes a single --lambda; use sweep for a list");
        cfg.train.lambda = l.front();
    }
    const auto report = run_experiment(cfg, progress_printer(a.quiet));
    if (cfg.out_path.empty())
        std::cout << format_report(report, cfg.format);
    else
        emit_report(report, cfg.format, cfg.out_path);
    return 0;
}

int cmd_sweep(const CommonArgs& a) {
    ExperimentConfig cfg = resolve(a);
    std::vector<double> lambdas = a.lambdas.empty() ? cfg.sweep_lambdas : parse_real_list(a.lambdas);
    if (lambdas.empty()) lambdas = {0.1, 1.0, 10.0, 100.0, 1000.0};
    const auto sweep = lambda_sweep(cfg, lambdas, progress_printer(a.quiet));
    if (cfg.out_path.empty())
        std::cout << format_sweep(sweep, cfg.format);
    else
        emit_sweep(sweep, cfg.format, cfg.out_path);
    return 0;
}

struct ScoreArgs {
    std::string input;
    std::string task = "regression";
    std::string sensitive;
    std::string pred_col = "prediction";
    std::string target_col = "target";
    std::string out;
    std::string format = "csv";
    bool cv_sqrt = false;
};

int cmd_score(const ScoreArgs& a) {
    DatasetSpec spec;
    spec.name = "score";
    spec.target_column = a.target_col;
    spec.sensitive_columns = split_list(a.sensitive);
    spec.continuous_columns = {a.pred_col};
    spec.task = parse_task(a.task);
    if (spec.task == Task::classification) spec.positive_labels = {"1", "1.0", "true", "True"};
    spec.validate();
    const RawTable raw = load_csv(a.input, spec);
    std::vector<std::size_t> all(raw.rows);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const ProcessedDataset data = preprocess(raw, spec, all);

    // Classification predictions are probabilities (or 0/1 labels); score() thresholds at 0.
    std::vector<double> scores = raw.numeric.at(a.pred_col);
    if (spec.task == Task::classification)
        for (double& s : scores) s -= 0.5;
    const MetricReport m = score(scores, data, ScoreOptions{a.cv_sqrt});

    std::string text;
    if (parse_report_format(a.format) == ReportFormat::json) {
        text = "{\n";
        const auto vals = m.values();
        for (std::size_t i = 0; i < vals.size(); ++i)
            text += "  \"" + vals[i].first + "\": " + format_real(vals[i].second) + (i + 1 < vals.size() ? ",\n" : "\n");
        text += "}\n";
    } else {
        text = "metric,value\n";
        for (const auto& [k, v] : m.values()) text += k + "," + format_real(v) + "\n";
    }
    write_output(text, a.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cfair: counterfactually fair representation experiments"};
    app.require_subcommand(1);

    CommonArgs run_args, sweep_args;
    auto* run = app.add_subcommand("run", "repeated-run experiment over all configured methods");
    add_common(run, run_args);
    auto* sweep = app.add_subcommand("sweep", "invfair lambda sweep");
    add_common(sweep, sweep_args);

    ScoreArgs score_args;
    auto* sc = app.add_subcommand("score", "fairness metrics for an external predictions CSV");
    sc->add_option("--input", score_args.input, "CSV with prediction, target and sensitive columns")->required();
    sc->add_option("--task", score_args.task, "regression or classification");
    sc->add_option("--sensitive", score_args.sensitive, "comma-separated sensitive columns")->required();
    sc->add_option("--pred-col", score_args.pred_col, "prediction column");
    sc->add_option("--target-col", score_args.target_col, "target column");
    sc->add_option("--out", score_args.out, "output path (default: stdout)");
    sc->add_option("--format", score_args.format, "csv or json");
    sc->add_flag("--cv-sqrt", score_args.cv_sqrt, "also report sqrt(2 GE(2))");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_args);
        if (sweep->parsed()) return cmd_sweep(sweep_args);
        return cmd_score(score_args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const SchemaError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

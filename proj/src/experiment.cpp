#include "cfair/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "cfair/baselines.hpp"
#include "cfair/errors.hpp"
#include "cfair/random.hpp"

namespace cfair {

namespace {

struct MethodName {
    std::string representation;  // full, unaware, ae, invenc, invfair
    std::string model;           // lr, gboost, or empty for invfair
};

MethodName split_method(const std::string& m) {
    if (m == "invfair") return {"invfair", ""};
    const auto dash = m.find('-');
    return {m.substr(0, dash), m.substr(dash + 1)};
}

bool needs_minimax(const std::vector<std::string>& methods) {
    for (const auto& m : methods)
        if (m == "invfair" || m.rfind("invenc-", 0) == 0) return true;
    return false;
}

bool needs_feature_ae(const std::vector<std::string>& methods) {
    for (const auto& m : methods)
        if (m.rfind("ae-", 0) == 0) return true;
    return false;
}

SensitiveAutoencoder pretrain_sensitive(const ProcessedDataset& train, const ExperimentConfig& cfg,
                                        std::uint64_t seed) {
    AutoencoderOptions opt;
    opt.hidden = cfg.ae_hidden;
    opt.lr = cfg.ae_lr;
    opt.loss = cfg.ae_loss;
    for (const auto& a : train.sensitive) opt.target_blocks.push_back(a.categories.size());
    if (cfg.ae_input == AeInput::all_features) return pretrain(train.X, train.s_onehot, cfg.ae_e, cfg.ae_epochs, seed, opt);
    return pretrain(train.s_onehot, cfg.ae_e, cfg.ae_epochs, seed, opt);
}

std::vector<double> fit_and_predict(const std::string& model, const Matrix& train_f, const ProcessedDataset& train,
                                    const Matrix& test_f, const ExperimentConfig& cfg) {
    if (model == "lr") {
        LinearOptions opt;
        opt.ridge = cfg.ridge;
        opt.iterations = cfg.logistic_iterations;
        opt.learning_rate = cfg.logistic_lr;
        const Link link = train.task == Task::regression ? Link::identity : Link::logistic;
        return predict(fit_linear(train_f, train.y, link, opt), test_f);
    }
    if (model == "gboost")
        return predict(fit_stumps(train_f, train.y, train.task, cfg.gboost_rounds, cfg.gboost_lr), test_f);
    throw ConfigError("unknown downstream model '" + model + "'");
}

}  // namespace

std::vector<RunResult> run_repeat(const RawTable& raw, const ExperimentConfig& cfg, std::size_t repeat) {
    using clock = std::chrono::steady_clock;
    const std::uint64_t seed = cfg.base_seed + repeat;
    const Split sp = split(raw.rows, seed);
    const ProcessedDataset data = preprocess(raw, cfg.dataset, sp.train_indices);
    const ProcessedDataset train = data.subset(sp.train_indices);
    const ProcessedDataset test = data.subset(sp.test_indices);
    const ScoreOptions score_opt{cfg.cv_sqrt};

    std::optional<TrainedFairModel> fair;
    std::string fair_error;
    double fair_seconds = 0.0;
    if (needs_minimax(cfg.methods)) {
        const auto t0 = clock::now();
        try {
            const auto ae = pretrain_sensitive(train, cfg, derive_seed(seed, 201));
            TrainConfig tc = cfg.train;
            tc.seed = derive_seed(seed, 202);
            fair = cfair::train(train, ae, tc);
            if (!cfg.history_dir.empty())
                write_history_csv(fair->history, cfg.history_dir / ("history_" + cfg.dataset.name + "_seed" +
                                                                    std::to_string(seed) + ".csv"));
        } catch (const NumericError& e) {
            fair_error = e.what();
        }
        fair_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    }
    std::optional<Autoencoder> feature_ae;
    if (needs_feature_ae(cfg.methods))
        feature_ae = fit_feature_autoencoder(train, cfg.feature_ae_latent, cfg.feature_ae_epochs, derive_seed(seed, 203));

    std::vector<RunResult> out;
    for (const auto& method : cfg.methods) {
        const auto t0 = clock::now();
        RunResult r{method, repeat, seed, std::nullopt, 0.0, false, {}};
        const auto name = split_method(method);
        try {
            std::vector<double> scores;
            if (name.representation == "invfair" || name.representation == "invenc") {
                if (!fair) throw NumericError(fair_error);
                r.seconds += fair_seconds;
            }
            if (name.representation == "invfair") {
                scores = fair_predict(fair->model, test.X);
            } else {
                const auto kind = parse_representation(name.representation);
                const ThreePlayerModel* tp = fair ? &fair->model : nullptr;
                const Autoencoder* fae = feature_ae ? &*feature_ae : nullptr;
                scores = fit_and_predict(name.model, build_representation(kind, train, tp, fae), train,
                                         build_representation(kind, test, tp, fae), cfg);
            }
            r.metrics = score(scores, test, score_opt);
        } catch (const NumericError& e) {
            r.failed = true;
            r.error = e.what();
        }
        r.seconds += std::chrono::duration<double>(clock::now() - t0).count();
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<RunResult> run_repeats(const RawTable& raw, const ExperimentConfig& cfg, const ProgressFn& progress) {
    cfg.validate();
    std::vector<std::vector<RunResult>> per_repeat(cfg.repeats);
    std::size_t workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, cfg.repeats);

    std::atomic<std::size_t> next{0};
    std::mutex progress_mutex;
    std::exception_ptr first_error;
    auto work = [&] {
        for (std::size_t r; (r = next.fetch_add(1)) < cfg.repeats;) {
            try {
                per_repeat[r] = run_repeat(raw, cfg, r);
                if (progress) {
                    std::lock_guard lock(progress_mutex);
                    for (const auto& rr : per_repeat[r]) progress(rr);
                }
            } catch (...) {
                std::lock_guard lock(progress_mutex);
                if (!first_error) first_error = std::current_exception();
                next = cfg.repeats;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<RunResult> all;
    for (auto& v : per_repeat)
        for (auto& r : v) all.push_back(std::move(r));
    return all;
}

AggregateReport aggregate(const std::vector<RunResult>& runs, const ExperimentConfig& cfg) {
    AggregateReport rep;
    rep.dataset = cfg.dataset.name;
    rep.task = cfg.dataset.task;
    rep.adversary_mode = std::string(to_string(cfg.train.adversary_mode));
    rep.repeats = cfg.repeats;

    // method -> seed -> metric values
    std::map<std::string, std::map<std::uint64_t, std::vector<std::pair<std::string, double>>>> table;
    for (const auto& method : cfg.methods) {
        MethodSummary ms;
        ms.method = method;
        std::vector<std::string> order;
        std::map<std::string, std::vector<double>> values;
        for (const auto& r : runs) {
            if (r.method != method) continue;
            ++ms.runs;
            if (r.failed || !r.metrics) {
                ++ms.failed;
                continue;
            }
            auto vals = r.metrics->values();
            for (const auto& [k, v] : vals) {
                if (!values.count(k)) order.push_back(k);
                values[k].push_back(v);
            }
            table[method][r.seed] = std::move(vals);
        }
        for (const auto& k : order) {
            const auto mv = mean_variance(values[k]);
            ms.metrics.emplace_back(k, MetricSummary{mv.mean, mv.variance, std::sqrt(mv.variance), values[k].size()});
        }
        rep.methods.push_back(std::move(ms));
    }

    if (cfg.repeats < 2) return rep;
    std::string reference = cfg.reference_method;
    if (std::find(cfg.methods.begin(), cfg.methods.end(), reference) == cfg.methods.end())
        reference = cfg.methods.front();
    if (!table.count(reference)) return rep;  // reference failed everywhere
    rep.reference = reference;
    for (const auto& method : cfg.methods) {
        if (method == reference || !table.count(method)) continue;
        const auto& ref_runs = table.at(reference);
        const auto& runs_m = table.at(method);
        std::vector<std::string> metrics;
        for (const auto& [k, v] : runs_m.begin()->second) metrics.push_back(k);
        for (const auto& metric : metrics) {
            std::vector<double> a, b;
            for (const auto& [seed, vals] : runs_m) {
                const auto it = ref_runs.find(seed);
                if (it == ref_runs.end()) continue;
                const auto find = [&](const std::vector<std::pair<std::string, double>>& v) -> std::optional<double> {
                    for (const auto& [k, x] : v)
                        if (k == metric) return x;
                    return std::nullopt;
                };
                const auto x = find(vals), y = find(it->second);
                if (x && y) {
                    a.push_back(*x);
                    b.push_back(*y);
                }
            }
            if (a.size() < 2) continue;
            rep.t_tests.push_back(PairedTest{method, metric, a.size(), paired_t_test(a, b)});
        }
    }
    return rep;
}

AggregateReport run_experiment(const RawTable& raw, const ExperimentConfig& cfg, const ProgressFn& progress) {
    return aggregate(run_repeats(raw, cfg, progress), cfg);
}

AggregateReport run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress) {
    cfg.validate();
    return run_experiment(load_csv(cfg.dataset_path, cfg.dataset), cfg, progress);
}

SweepReport lambda_sweep(const RawTable& raw, const ExperimentConfig& cfg, std::span<const double> lambdas,
                         const ProgressFn& progress) {
    if (lambdas.empty()) throw ArgumentError("lambda_sweep: no lambda values");
    SweepReport out;
    out.dataset = cfg.dataset.name;
    for (double lam : lambdas) {
        ExperimentConfig c = cfg;
        c.methods = {"invfair"};
        c.train.lambda = lam;
        out.points.emplace_back(lam, run_experiment(raw, c, progress));
    }
    return out;
}

SweepReport lambda_sweep(const ExperimentConfig& cfg, std::span<const double> lambdas, const ProgressFn& progress) {
    cfg.validate();
    return lambda_sweep(load_csv(cfg.dataset_path, cfg.dataset), cfg, lambdas, progress);
}

}  // namespace cfair

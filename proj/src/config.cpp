#include "cfair/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "cfair/errors.hpp"

namespace cfair {

ReportFormat parse_report_format(std::string_view name) {
    if (name == "csv") return ReportFormat::csv;
    if (name == "json") return ReportFormat::json;
    throw ConfigError("unknown report format '" + std::string(name) + "'");
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text, std::string_view source) {
    KeyValueConfig cfg;
    std::size_t line_no = 0;
    for (std::size_t pos = 0; pos <= text.size();) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const std::string body = trim(line);
        if (body.empty()) {
            if (end == text.size()) break;
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        if (key.empty()) throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": empty key");
        cfg.values_[key] = trim(std::string_view(body).substr(eq + 1));
        if (end == text.size()) break;
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find(',', pos);
        if (end == std::string_view::npos) end = text.size();
        auto item = trim(text.substr(pos, end - pos));
        if (!item.empty()) out.push_back(std::move(item));
        pos = end + 1;
    }
    return out;
}

namespace {

double to_real(const std::string& key, const std::string& v) {
    double out = 0.0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    if (first != last && *first == '+') ++first;
    auto [p, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || p != last) throw ConfigError("config key '" + key + "': '" + v + "' is not a number");
    return out;
}

std::uint64_t to_count(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw ConfigError("config key '" + key + "': '" + v + "' is not a non-negative integer");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + key + "': '" + v + "' is not a boolean");
}

}  // namespace

std::vector<double> parse_real_list(std::string_view text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) out.push_back(to_real("list", item));
    return out;
}

void ExperimentConfig::validate() const {
    dataset.validate();
    if (repeats < 1) throw ConfigError("experiment.repeats must be >= 1");
    if (methods.empty()) throw ConfigError("experiment.methods must name at least one method");
    for (const auto& m : methods)
        if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end())
            throw ConfigError("unknown method '" + m + "'");
    train.validate();
}

ExperimentConfig default_config(std::string_view dataset_name) {
    ExperimentConfig c;
    c.dataset = DatasetSpec::preset(dataset_name);
    c.dataset_path = std::filesystem::path("data") / (std::string(dataset_name) + ".csv");
    c.methods = known_methods();
    if (c.dataset.task == Task::regression) {
        c.train.loss_kind = LossKind::smooth_l1;
    } else {
        c.train.loss_kind = LossKind::binary_cross_entropy;
    }
    c.train.lambda = dataset_name == "adult" ? 100.0 : 1.0;
    return c;
}

ExperimentConfig make_config(const KeyValueConfig& kv, const std::filesystem::path& base_dir) {
    const auto name = kv.get("dataset.name");
    if (!name) throw ConfigError("config must set dataset.name");
    ExperimentConfig c;
    try {
        c = default_config(*name);
    } catch (const ArgumentError&) {
        // custom dataset: schema must come entirely from the file
        c = ExperimentConfig{};
        c.dataset.name = *name;
        c.methods = known_methods();
    }

    std::set<std::string> used;
    auto with = [&](const std::string& key, const std::function<void(const std::string&)>& apply) {
        if (auto v = kv.get(key)) {
            used.insert(key);
            try {
                apply(*v);
            } catch (const std::invalid_argument& e) {
                throw ConfigError("config key '" + key + "': " + e.what());
            }
        }
    };
    auto resolve = [&](const std::string& v) {
        std::filesystem::path p(v);
        return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    };
    used.insert("dataset.name");

    with("dataset.path", [&](const std::string& v) { c.dataset_path = resolve(v); });
    with("dataset.target", [&](const std::string& v) { c.dataset.target_column = v; });
    with("dataset.task", [&](const std::string& v) {
        c.dataset.task = parse_task(v);
        c.train.loss_kind = c.dataset.task == Task::regression ? LossKind::smooth_l1 : LossKind::binary_cross_entropy;
    });
    with("dataset.sensitive", [&](const std::string& v) { c.dataset.sensitive_columns = split_list(v); });
    with("dataset.continuous", [&](const std::string& v) { c.dataset.continuous_columns = split_list(v); });
    with("dataset.categorical", [&](const std::string& v) { c.dataset.categorical_columns = split_list(v); });
    with("dataset.positive", [&](const std::string& v) { c.dataset.positive_labels = split_list(v); });

    with("experiment.methods", [&](const std::string& v) { c.methods = split_list(v); });
    with("experiment.repeats", [&](const std::string& v) { c.repeats = to_count("experiment.repeats", v); });
    with("experiment.base_seed", [&](const std::string& v) { c.base_seed = to_count("experiment.base_seed", v); });
    with("experiment.reference", [&](const std::string& v) { c.reference_method = v; });
    with("experiment.workers", [&](const std::string& v) { c.workers = to_count("experiment.workers", v); });

    with("train.lambda", [&](const std::string& v) { c.train.lambda = to_real("train.lambda", v); });
    with("train.epochs", [&](const std::string& v) { c.train.epochs = to_count("train.epochs", v); });
    with("train.batch_size", [&](const std::string& v) { c.train.batch_size = to_count("train.batch_size", v); });
    with("train.lr", [&](const std::string& v) { c.train.lr = to_real("train.lr", v); });
    with("train.h_slope", [&](const std::string& v) { c.train.h_slope = to_real("train.h_slope", v); });
    with("train.adversary_mode", [&](const std::string& v) { c.train.adversary_mode = parse_adversary_mode(v); });
    with("train.loss", [&](const std::string& v) { c.train.loss_kind = parse_loss_kind(v); });
    with("train.z_dim", [&](const std::string& v) { c.train.z_dim = to_count("train.z_dim", v); });
    with("train.encoder_hidden", [&](const std::string& v) { c.train.encoder_hidden = to_count("train.encoder_hidden", v); });
    with("train.predictor_hidden",
         [&](const std::string& v) { c.train.predictor_hidden = to_count("train.predictor_hidden", v); });
    with("train.fair_steps", [&](const std::string& v) { c.train.fair_steps = to_count("train.fair_steps", v); });
    with("train.encoder_steps", [&](const std::string& v) { c.train.encoder_steps = to_count("train.encoder_steps", v); });
    with("train.adversary_steps",
         [&](const std::string& v) { c.train.adversary_steps = to_count("train.adversary_steps", v); });
    with("train.divergence_limit",
         [&](const std::string& v) { c.train.divergence_limit = to_real("train.divergence_limit", v); });

    with("ae.e", [&](const std::string& v) { c.ae_e = to_count("ae.e", v); });
    with("ae.epochs", [&](const std::string& v) { c.ae_epochs = to_count("ae.epochs", v); });
    with("ae.hidden", [&](const std::string& v) { c.ae_hidden = to_count("ae.hidden", v); });
    with("ae.lr", [&](const std::string& v) { c.ae_lr = to_real("ae.lr", v); });
    with("ae.input", [&](const std::string& v) { c.ae_input = parse_ae_input(v); });
    with("ae.loss", [&](const std::string& v) { c.ae_loss = parse_reconstruction_loss(v); });

    with("baseline.gboost_rounds", [&](const std::string& v) { c.gboost_rounds = to_count("baseline.gboost_rounds", v); });
    with("baseline.gboost_lr", [&](const std::string& v) { c.gboost_lr = to_real("baseline.gboost_lr", v); });
    with("baseline.ae_latent", [&](const std::string& v) { c.feature_ae_latent = to_count("baseline.ae_latent", v); });
    with("baseline.ae_epochs", [&](const std::string& v) { c.feature_ae_epochs = to_count("baseline.ae_epochs", v); });
    with("baseline.logistic_iterations",
         [&](const std::string& v) { c.logistic_iterations = to_count("baseline.logistic_iterations", v); });
    with("baseline.logistic_lr", [&](const std::string& v) { c.logistic_lr = to_real("baseline.logistic_lr", v); });
    with("baseline.ridge", [&](const std::string& v) { c.ridge = to_real("baseline.ridge", v); });

    with("metrics.cv_sqrt", [&](const std::string& v) { c.cv_sqrt = to_bool("metrics.cv_sqrt", v); });
    with("sweep.lambdas", [&](const std::string& v) { c.sweep_lambdas = parse_real_list(v); });

    with("output.path", [&](const std::string& v) { c.out_path = resolve(v); });
    with("output.format", [&](const std::string& v) { c.format = parse_report_format(v); });
    with("output.history_dir", [&](const std::string& v) { c.history_dir = resolve(v); });

    for (const auto& [key, value] : kv.values())
        if (!used.count(key)) throw ConfigError("unknown config key '" + key + "'");
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    return make_config(KeyValueConfig::load(path), path.parent_path());
}

}  // namespace cfair

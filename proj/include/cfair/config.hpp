#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cfair/autoencoder.hpp"
#include "cfair/dataset.hpp"
#include "cfair/minimax.hpp"

namespace cfair {

enum class ReportFormat { csv, json };
ReportFormat parse_report_format(std::string_view name);

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat `key = value` file; `#` starts a comment. Later assignments win.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view text, std::string_view source = "<config>");
    static KeyValueConfig load(const std::filesystem::path& path);

    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    std::optional<std::string> get(const std::string& key) const;
    const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    std::map<std::string, std::string> values_;
};

struct ExperimentConfig {
    DatasetSpec dataset;
    std::filesystem::path dataset_path;

    std::vector<std::string> methods;
    std::size_t repeats = 100;
    std::uint64_t base_seed = 0;
    std::string reference_method = "invfair";
    std::size_t workers = 0;  // 0: hardware concurrency

    TrainConfig train;

    std::size_t ae_e = 4;
    std::size_t ae_epochs = 20;
    std::size_t ae_hidden = 16;
    double ae_lr = 1e-3;
    AeInput ae_input = AeInput::sensitive_only;
    ReconstructionLoss ae_loss = ReconstructionLoss::mse;

    std::size_t gboost_rounds = 100;
    double gboost_lr = 0.1;
    std::size_t feature_ae_latent = 8;
    std::size_t feature_ae_epochs = 20;
    std::size_t logistic_iterations = 500;
    double logistic_lr = 0.1;
    double ridge = 1e-8;

    bool cv_sqrt = false;
    std::vector<double> sweep_lambdas;

    std::filesystem::path out_path;
    ReportFormat format = ReportFormat::csv;
    std::filesystem::path history_dir;

    void validate() const;
};

inline const std::vector<std::string>& known_methods() {
    static const std::vector<std::string> m = {"full-lr",  "full-gboost",  "unaware-lr",  "unaware-gboost", "ae-lr",
                                               "ae-gboost", "invenc-lr",   "invenc-gboost", "invfair"};
    return m;
}

/// Preset-backed defaults: smooth_l1 and lambda 1 for law, BCE and lambda 1 (compas) / 100 (adult).
ExperimentConfig default_config(std::string_view dataset_name);

/// Applies a key/value file on top of the defaults of its `dataset.name`.
/// Relative dataset/output paths resolve against `base_dir`.
ExperimentConfig make_config(const KeyValueConfig& kv, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

std::vector<std::string> split_list(std::string_view text);
std::vector<double> parse_real_list(std::string_view text);

}  // namespace cfair

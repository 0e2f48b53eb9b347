#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cfair/matrix.hpp"

namespace cfair {

enum class Task { regression, classification };

Task parse_task(std::string_view name);
std::string_view to_string(Task task);

struct DatasetSpec {
    std::string name;
    std::string target_column;
    std::vector<std::string> sensitive_columns;
    std::vector<std::string> continuous_columns;
    std::vector<std::string> categorical_columns;
    Task task = Task::regression;
    /// Classification only: raw target values mapped to 1, everything else to 0.
    std::vector<std::string> positive_labels;

    /// Disjoint column sets, at least one sensitive column, a target.
    void validate() const;

    /// Built-in schemas for law, compas and adult.
    static DatasetSpec preset(std::string_view name);
};

/// Typed columns after missing-row filtering.
struct RawTable {
    std::size_t rows = 0;
    std::size_t dropped_rows = 0;
    std::map<std::string, std::vector<double>> numeric;
    std::map<std::string, std::vector<std::string>> categorical;
    std::vector<double> target;
};

RawTable load_csv(const std::filesystem::path& path, const DatasetSpec& spec);
/// Same as load_csv on in-memory text; `source` names the input in error messages.
RawTable parse_csv(std::string_view text, const DatasetSpec& spec, std::string_view source = "<memory>");

struct SensitiveAttribute {
    std::string name;
    std::vector<std::string> categories;
};

struct ProcessedDataset {
    Matrix X;
    /// labels[a][row]: category index of sensitive attribute a.
    std::vector<std::vector<std::size_t>> s_labels;
    Matrix s_onehot;
    std::vector<double> y;
    Task task = Task::regression;
    std::vector<std::string> column_names;
    std::vector<SensitiveAttribute> sensitive;

    std::size_t rows() const noexcept { return y.size(); }
    ProcessedDataset subset(std::span<const std::size_t> rows) const;
    /// Rebuilds s_onehot from s_labels (after relabeling).
    void refresh_onehot();
};

/// Standardizes with train-row statistics only and one-hot encodes over the full table's categories.
ProcessedDataset preprocess(const RawTable& raw, const DatasetSpec& spec, std::span<const std::size_t> train_indices);

struct Split {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    std::uint64_t seed = 0;

    friend bool operator==(const Split&, const Split&) = default;
};

/// Seeded 80/20 partition of 0..n-1, |train| = round(0.8 n).
Split split(std::size_t n, std::uint64_t seed);

}  // namespace cfair

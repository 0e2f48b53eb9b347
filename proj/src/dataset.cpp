#include "cfair/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "cfair/errors.hpp"
#include "cfair/random.hpp"

namespace cfair {

Task parse_task(std::string_view name) {
    if (name == "regression") return Task::regression;
    if (name == "classification") return Task::classification;
    throw ArgumentError("unknown task '" + std::string(name) + "'");
}

std::string_view to_string(Task task) { return task == Task::regression ? "regression" : "classification"; }

void DatasetSpec::validate() const {
    if (target_column.empty()) throw SchemaError("dataset spec '" + name + "': no target column");
    if (sensitive_columns.empty()) throw SchemaError("dataset spec '" + name + "': no sensitive columns");
    std::set<std::string> seen{target_column};
    for (const auto* group : {&sensitive_columns, &continuous_columns, &categorical_columns})
        for (const auto& c : *group)
            if (!seen.insert(c).second)
                throw SchemaError("dataset spec '" + name + "': column '" + c + "' listed twice");
    if (task == Task::classification && positive_labels.empty())
        throw SchemaError("dataset spec '" + name + "': classification needs positive labels");
}

DatasetSpec DatasetSpec::preset(std::string_view name) {
    DatasetSpec s;
    s.name = std::string(name);
    if (name == "law") {
        s.target_column = "ZFYA";
        s.sensitive_columns = {"race", "sex"};
        s.continuous_columns = {"LSAT", "UGPA"};
        s.task = Task::regression;
    } else if (name == "compas") {
        s.target_column = "two_year_recid";
        s.sensitive_columns = {"race", "sex"};
        s.continuous_columns = {"age", "priors_count"};
        s.categorical_columns = {"c_charge_degree"};
        s.task = Task::classification;
        s.positive_labels = {"1"};
    } else if (name == "adult") {
        s.target_column = "income";
        s.sensitive_columns = {"race", "sex"};
        s.continuous_columns = {"age", "education-num", "hours-per-week", "capital-gain", "capital-loss"};
        s.categorical_columns = {"workclass", "occupation", "marital-status"};
        s.task = Task::classification;
        s.positive_labels = {">50K", ">50K."};
    } else {
        throw ArgumentError("no built-in dataset spec named '" + std::string(name) + "'");
    }
    return s;
}

namespace {

// One CSV record; handles quoted fields with embedded commas and doubled quotes.
std::vector<std::string> split_record(std::string_view line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            cells.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    cells.push_back(std::move(cur));
    return cells;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool is_missing(std::string_view cell) {
    return cell.empty() || cell == "?" || cell == "NA" || cell == "N/A" || cell == "NaN" || cell == "nan";
}

bool parse_double(std::string_view cell, double& out) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && std::isfinite(out);
}

}  // namespace

RawTable parse_csv(std::string_view text, const DatasetSpec& spec, std::string_view source) {
    spec.validate();
    std::vector<std::string_view> lines;
    for (std::size_t pos = 0; pos < text.size();) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        lines.push_back(text.substr(pos, end - pos));
        pos = end + 1;
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw SchemaError(std::string(source) + ": missing header row");

    const auto header = split_record(lines.front());
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < header.size(); ++i) index.emplace(std::string(trim(header[i])), i);  // first wins

    auto locate = [&](const std::string& col) {
        auto it = index.find(col);
        if (it == index.end()) throw SchemaError(std::string(source) + ": missing column '" + col + "'");
        return it->second;
    };
    struct Slot {
        std::string name;
        std::size_t pos;
        bool numeric;
    };
    std::vector<Slot> slots;
    const std::size_t target_pos = locate(spec.target_column);
    for (const auto& c : spec.continuous_columns) slots.push_back({c, locate(c), true});
    for (const auto& c : spec.categorical_columns) slots.push_back({c, locate(c), false});
    for (const auto& c : spec.sensitive_columns) slots.push_back({c, locate(c), false});

    RawTable table;
    for (const auto& s : slots) {
        if (s.numeric) table.numeric[s.name];
        else table.categorical[s.name];
    }

    std::vector<double> numbers(slots.size());
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) continue;
        const auto cells = split_record(lines[li]);
        const std::size_t row_number = li + 1;  // 1-based file line
        auto cell_at = [&](std::size_t pos) -> std::string_view {
            return pos < cells.size() ? trim(cells[pos]) : std::string_view{};
        };

        bool missing = is_missing(cell_at(target_pos));
        for (const auto& s : slots) missing = missing || is_missing(cell_at(s.pos));
        if (missing) {
            ++table.dropped_rows;
            continue;
        }

        for (std::size_t k = 0; k < slots.size(); ++k) {
            if (!slots[k].numeric) continue;
            if (!parse_double(cell_at(slots[k].pos), numbers[k]))
                throw ParseError(std::string(source) + ": cannot parse '" + std::string(cell_at(slots[k].pos)) +
                                     "' in continuous column '" + slots[k].name + "'",
                                 row_number);
        }
        double target = 0.0;
        const auto tcell = cell_at(target_pos);
        if (spec.task == Task::regression) {
            if (!parse_double(tcell, target))
                throw ParseError(std::string(source) + ": cannot parse target '" + std::string(tcell) + "'", row_number);
        } else {
            target = std::find(spec.positive_labels.begin(), spec.positive_labels.end(), tcell) !=
                             spec.positive_labels.end()
                         ? 1.0
                         : 0.0;
        }

        for (std::size_t k = 0; k < slots.size(); ++k) {
            if (slots[k].numeric) table.numeric[slots[k].name].push_back(numbers[k]);
            else table.categorical[slots[k].name].emplace_back(cell_at(slots[k].pos));
        }
        table.target.push_back(target);
        ++table.rows;
    }
    return table;
}

RawTable load_csv(const std::filesystem::path& path, const DatasetSpec& spec) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), spec, path.string());
}

ProcessedDataset ProcessedDataset::subset(std::span<const std::size_t> rows) const {
    ProcessedDataset out;
    out.X = X.select_rows(rows);
    out.s_onehot = s_onehot.select_rows(rows);
    out.s_labels.resize(s_labels.size());
    for (std::size_t a = 0; a < s_labels.size(); ++a) {
        out.s_labels[a].reserve(rows.size());
        for (auto r : rows) out.s_labels[a].push_back(s_labels[a][r]);
    }
    out.y.reserve(rows.size());
    for (auto r : rows) out.y.push_back(y[r]);
    out.task = task;
    out.column_names = column_names;
    out.sensitive = sensitive;
    return out;
}

void ProcessedDataset::refresh_onehot() {
    std::size_t width = 0;
    for (const auto& a : sensitive) width += a.categories.size();
    s_onehot = Matrix(rows(), width);
    std::size_t offset = 0;
    for (std::size_t a = 0; a < sensitive.size(); ++a) {
        for (std::size_t r = 0; r < rows(); ++r) {
            if (s_labels[a][r] >= sensitive[a].categories.size())
                throw ArgumentError("sensitive label out of range for '" + sensitive[a].name + "'");
            s_onehot(r, offset + s_labels[a][r]) = 1.0;
        }
        offset += sensitive[a].categories.size();
    }
}

namespace {

std::vector<std::string> sorted_categories(const std::vector<std::string>& values) {
    std::set<std::string> cats(values.begin(), values.end());
    return {cats.begin(), cats.end()};
}

}  // namespace

ProcessedDataset preprocess(const RawTable& raw, const DatasetSpec& spec, std::span<const std::size_t> train_indices) {
    if (train_indices.empty()) throw ArgumentError("preprocess: no training rows");
    for (auto i : train_indices)
        if (i >= raw.rows) throw ArgumentError("preprocess: training index out of range");

    const std::size_t n = raw.rows;
    std::size_t width = spec.continuous_columns.size();
    std::vector<std::vector<std::string>> cat_levels;
    for (const auto& c : spec.categorical_columns) {
        cat_levels.push_back(sorted_categories(raw.categorical.at(c)));
        width += cat_levels.back().size();
    }

    ProcessedDataset out;
    out.task = spec.task;
    out.X = Matrix(n, width);
    out.y = raw.target;

    std::size_t col = 0;
    for (const auto& c : spec.continuous_columns) {
        const auto& values = raw.numeric.at(c);
        double mean = 0.0;
        for (auto i : train_indices) mean += values[i];
        mean /= double(train_indices.size());
        double var = 0.0;
        for (auto i : train_indices) var += (values[i] - mean) * (values[i] - mean);
        var /= double(train_indices.size());
        double sd = std::sqrt(var);
        if (!(sd > 0.0)) sd = 1.0;
        for (std::size_t r = 0; r < n; ++r) out.X(r, col) = (values[r] - mean) / sd;
        out.column_names.push_back(c);
        ++col;
    }
    for (std::size_t k = 0; k < spec.categorical_columns.size(); ++k) {
        const auto& name = spec.categorical_columns[k];
        const auto& values = raw.categorical.at(name);
        const auto& levels = cat_levels[k];
        for (std::size_t r = 0; r < n; ++r) {
            const auto it = std::lower_bound(levels.begin(), levels.end(), values[r]);
            out.X(r, col + std::size_t(it - levels.begin())) = 1.0;
        }
        for (const auto& lv : levels) out.column_names.push_back(name + "=" + lv);
        col += levels.size();
    }

    for (const auto& name : spec.sensitive_columns) {
        const auto& values = raw.categorical.at(name);
        SensitiveAttribute attr{name, sorted_categories(values)};
        std::vector<std::size_t> labels(n);
        for (std::size_t r = 0; r < n; ++r)
            labels[r] = std::size_t(std::lower_bound(attr.categories.begin(), attr.categories.end(), values[r]) -
                                    attr.categories.begin());
        out.sensitive.push_back(std::move(attr));
        out.s_labels.push_back(std::move(labels));
    }
    out.refresh_onehot();
    return out;
}

Split split(std::size_t n, std::uint64_t seed) {
    if (n < 5) throw ArgumentError("split: need at least 5 rows, got " + std::to_string(n));
    Rng rng(derive_seed(seed, 0x5717));
    auto perm = rng.permutation(n);
    const std::size_t n_train = (8 * n + 5) / 10;
    Split s;
    s.seed = seed;
    s.train_indices.assign(perm.begin(), perm.begin() + std::ptrdiff_t(n_train));
    s.test_indices.assign(perm.begin() + std::ptrdiff_t(n_train), perm.end());
    std::sort(s.train_indices.begin(), s.train_indices.end());
    std::sort(s.test_indices.begin(), s.test_indices.end());
    return s;
}

}  // namespace cfair

#include "tsk/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tsk/error.hpp"

namespace tsk {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& cell, int data_row, int column) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(cell, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    // allow trailing whitespace only
    while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
    if (used != cell.size() || cell.empty())
        throw DataError("load_csv: invalid numeric value '" + cell + "' at row " +
                        std::to_string(data_row) + ", column " + std::to_string(column));
    return value;
}

std::string default_feature_name(int m) { return "x" + std::to_string(m + 1); }

} // namespace

Dataset load_csv(const std::string& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw DataError("load_csv: cannot open '" + path + "'");

    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
    std::string line;
    int columns = -1;
    int data_row = 0;

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_line(line);
        if (has_header && names.empty() && rows.empty()) {
            names.assign(cells.begin(), cells.end());
            columns = static_cast<int>(cells.size());
            continue;
        }
        ++data_row;
        if (columns < 0) columns = static_cast<int>(cells.size());
        if (static_cast<int>(cells.size()) != columns)
            throw DataError("load_csv: row " + std::to_string(data_row) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(columns));
        std::vector<double> row(cells.size());
        for (int j = 0; j < static_cast<int>(cells.size()); ++j)
            row[j] = parse_cell(cells[j], data_row, j + 1);
        rows.push_back(std::move(row));
    }

    if (rows.empty()) throw DataError("load_csv: '" + path + "' holds no data rows");
    if (columns < 2)
        throw DataError("load_csv: need at least one feature column plus the target column");

    const int n = static_cast<int>(rows.size());
    const int m = columns - 1;
    Dataset data;
    data.features = Matrix(n, m);
    data.targets.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) data.features(i, j) = rows[i][j];
        data.targets[i] = rows[i][m];
    }
    if (has_header && static_cast<int>(names.size()) == columns)
        data.feature_names.assign(names.begin(), names.end() - 1);
    else
        for (int j = 0; j < m; ++j) data.feature_names.push_back(default_feature_name(j));
    return data;
}

void save_csv(const Dataset& data, const std::string& path, bool with_header) {
    std::ofstream out(path);
    if (!out) throw DataError("save_csv: cannot open '" + path + "' for writing");
    char buf[40];
    if (with_header) {
        for (int j = 0; j < data.num_features(); ++j) {
            const std::string& name =
                j < static_cast<int>(data.feature_names.size()) ? data.feature_names[j]
                                                                : default_feature_name(j);
            out << name << ',';
        }
        out << "y\n";
    }
    for (int i = 0; i < data.num_samples(); ++i) {
        for (int j = 0; j < data.num_features(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", data.features(i, j));
            out << buf << ',';
        }
        std::snprintf(buf, sizeof(buf), "%.17g", data.targets[i]);
        out << buf << '\n';
    }
}

std::pair<Dataset, PreprocessingParams> fit_transform(const Dataset& train,
                                                      bool drop_constant_features) {
    const int n = train.num_samples();
    const int m = train.num_features();
    if (n < 1) throw DataError("fit_transform: empty training set");

    PreprocessingParams params;
    for (int j = 0; j < m; ++j) {
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += train.features(i, j);
        mean /= n;
        double var = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = train.features(i, j) - mean;
            var += d * d;
        }
        var /= n;
        const double sd = std::sqrt(var);
        if (sd <= 0.0) {
            if (!drop_constant_features)
                throw DataError("fit_transform: feature column " + std::to_string(j + 1) +
                                " is constant");
            std::cerr << "fit_transform: dropping constant feature column " << (j + 1) << "\n";
            continue;
        }
        params.kept_columns.push_back(j);
        params.feature_means.push_back(mean);
        params.feature_stds.push_back(sd);
    }
    if (params.kept_columns.empty())
        throw DataError("fit_transform: all feature columns are constant");

    double target_mean = 0.0;
    for (double t : train.targets) target_mean += t;
    params.target_mean = target_mean / n;

    return {apply_preprocessing(params, train), params};
}

Dataset apply_preprocessing(const PreprocessingParams& params, const Dataset& data) {
    const int kept = static_cast<int>(params.kept_columns.size());
    for (int col : params.kept_columns)
        if (col < 0 || col >= data.num_features())
            throw ShapeError("apply_preprocessing: recorded column out of range for this dataset");

    Dataset out;
    out.features = Matrix(data.num_samples(), kept);
    out.targets.resize(data.num_samples());
    for (int j = 0; j < kept; ++j) {
        const int src = params.kept_columns[j];
        out.feature_names.push_back(src < static_cast<int>(data.feature_names.size())
                                        ? data.feature_names[src]
                                        : default_feature_name(src));
        for (int i = 0; i < data.num_samples(); ++i)
            out.features(i, j) = (data.features(i, src) - params.feature_means[j]) /
                                 params.feature_stds[j];
    }
    for (int i = 0; i < data.num_samples(); ++i)
        out.targets[i] = data.targets[i] - params.target_mean;
    return out;
}

std::pair<std::vector<int>, std::vector<int>> split_indices(int n, double train_fraction, Rng& rng) {
    if (n < 2) throw DataError("split_indices: need at least two samples");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("split_indices: train_fraction must lie in (0, 1)");
    const int train_size =
        std::clamp(static_cast<int>(std::llround(train_fraction * n)), 1, n - 1);
    std::vector<int> order = rng.sample_without_replacement(n, n);
    std::vector<int> train(order.begin(), order.begin() + train_size);
    std::vector<int> test(order.begin() + train_size, order.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {std::move(train), std::move(test)};
}

std::pair<std::vector<int>, std::vector<int>> split_indices(int n, const SplitSpec& spec) {
    Rng rng(spec.seed);
    return split_indices(n, spec.train_fraction, rng);
}

Dataset subset(const Dataset& data, std::span<const int> indices) {
    Dataset out;
    out.features = data.features.select_rows(indices);
    out.feature_names = data.feature_names;
    out.targets.reserve(indices.size());
    for (int idx : indices) out.targets.push_back(data.targets[idx]);
    return out;
}

} // namespace tsk

#include "hyperbo/dataset.hpp"

#include "hyperbo/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

namespace hyperbo {

DatasetSchema preset_schema(const std::string& name) {
    DatasetSchema schema;
    if (name == "concrete" || name == "powerplant" || name == "fish") return schema;
    if (name == "diabetes") {
        schema.filters.push_back({FilterSpec::Kind::DropYoungOutlier, "AGE", 0.1});
        return schema;
    }
    if (name == "boston") {
        schema.target = "MEDV";
        schema.features = {"CRIM", "INDUS", "RM", "DIS", "PTRATIO", "B", "LSTAT"};
        schema.filters.push_back({FilterSpec::Kind::SingleMaximum, "", 0.0});
        return schema;
    }
    throw LoadError("unknown dataset preset '" + name + "'");
}

std::size_t Table::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw LoadError("missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\"");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\"");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line, char delimiter) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, delimiter)) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == delimiter) cells.emplace_back();
    return cells;
}

}  // namespace

Table parse_table(const std::string& text, char delimiter) {
    Table table;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells = split(line, delimiter);
        if (table.header.empty()) {
            table.header = std::move(cells);
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw LoadError("line " + std::to_string(line_no) + ": expected " + std::to_string(table.header.size()) +
                            " cells, got " + std::to_string(cells.size()));
        }
        std::vector<double> row(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const std::string& s = cells[c];
            const auto res = std::from_chars(s.data(), s.data() + s.size(), row[c]);
            if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
                throw LoadError("line " + std::to_string(line_no) + ", column '" + table.header[c] +
                                "': non-numeric cell '" + s + "'");
            }
        }
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw LoadError("empty file: no header row");
    return table;
}

Table read_table(const std::string& path, char delimiter) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_table(buf.str(), delimiter);
}

namespace {

void apply_filter(const FilterSpec& filter, const Table& table, std::size_t target, std::vector<std::size_t>& keep) {
    if (keep.empty()) return;
    if (filter.kind == FilterSpec::Kind::SingleMaximum) {
        double best = table.rows[keep.front()][target];
        for (std::size_t r : keep) best = std::max(best, table.rows[r][target]);
        bool seen = false;
        std::erase_if(keep, [&](std::size_t r) {
            if (table.rows[r][target] != best) return false;
            if (!seen) {
                seen = true;
                return false;
            }
            return true;
        });
        return;
    }
    const std::size_t col = table.column(filter.column);
    if (!(filter.fraction > 0.0 && filter.fraction <= 1.0)) throw LoadError("outlier filter fraction must be in (0, 1]");
    std::vector<std::size_t> by_age = keep;
    std::stable_sort(by_age.begin(), by_age.end(),
                     [&](std::size_t a, std::size_t b) { return table.rows[a][col] < table.rows[b][col]; });
    const std::size_t young = std::max<std::size_t>(1, static_cast<std::size_t>(filter.fraction * static_cast<double>(by_age.size())));
    std::size_t drop = by_age.front();
    for (std::size_t i = 0; i < young; ++i) {
        if (table.rows[by_age[i]][target] > table.rows[drop][target]) drop = by_age[i];
    }
    std::erase(keep, drop);
}

}  // namespace

Task make_dataset_task(const std::string& name, const Table& table, const DatasetSchema& schema) {
    if (table.header.size() < 2) throw LoadError("dataset needs at least one feature and a target column");
    const std::size_t target = schema.target.empty() ? table.header.size() - 1 : table.column(schema.target);

    std::vector<std::size_t> features;
    std::vector<std::string> names;
    if (schema.features.empty()) {
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            if (c != target) features.push_back(c);
        }
    } else {
        for (const std::string& f : schema.features) features.push_back(table.column(f));
    }
    for (std::size_t c : features) names.push_back(table.header[c]);

    std::vector<std::size_t> keep(table.rows.size());
    std::iota(keep.begin(), keep.end(), std::size_t{0});
    for (const FilterSpec& filter : schema.filters) apply_filter(filter, table, target, keep);
    if (keep.empty()) throw LoadError("no rows left after filtering");

    Matrix raw(static_cast<Index>(keep.size()), static_cast<Index>(features.size()));
    Vector values(static_cast<Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
        const std::vector<double>& row = table.rows[keep[i]];
        for (std::size_t f = 0; f < features.size(); ++f) raw(static_cast<Index>(i), static_cast<Index>(f)) = row[features[f]];
        values[static_cast<Index>(i)] = row[target];
    }
    ColumnScaling scaling = ColumnScaling::fit(raw);
    Matrix unit = scaling.normalize(raw);
    const std::size_t n0 = std::min(schema.initial_size, keep.size());
    Task task(name, TaskKind::Dataset, std::move(unit), std::move(values), std::move(names), InitialDesign::RandomRows, n0);
    task.set_scaling(std::move(scaling));
    return task;
}

Task load_dataset(const std::string& path, const DatasetSchema& schema, const std::string& name) {
    return make_dataset_task(name, read_table(path, schema.delimiter), schema);
}

}  // namespace hyperbo

#pragma once

#include "hyperbo/tasks.hpp"

#include <string>
#include <vector>

namespace hyperbo {

/// Row filter applied after parsing and before normalization.
struct FilterSpec {
    enum class Kind {
        DropYoungOutlier,  // drop the max-target row among the youngest `fraction` of rows by `column`
        SingleMaximum      // keep the first max-target row, drop later rows tied at the max
    };
    Kind kind = Kind::SingleMaximum;
    std::string column;
    double fraction = 0.1;
};

struct DatasetSchema {
    std::string target;                 // empty: last column
    std::vector<std::string> features;  // empty: every non-target column
    std::vector<FilterSpec> filters;
    char delimiter = ',';
    std::size_t initial_size = 3;
};

/// Defaults for the bundled task names: concrete, powerplant, fish,
/// diabetes, boston. LoadError for an unknown name.
DatasetSchema preset_schema(const std::string& name);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const;  // LoadError when missing
};

/// Delimited text with a header row; every data cell must be numeric.
Table read_table(const std::string& path, char delimiter = ',');
Table parse_table(const std::string& text, char delimiter = ',');

/// Applies the schema and returns a lookup task over the retained rows with
/// min-max normalized inputs.
Task make_dataset_task(const std::string& name, const Table& table, const DatasetSchema& schema);
Task load_dataset(const std::string& path, const DatasetSchema& schema, const std::string& name = "dataset");

}  // namespace hyperbo
